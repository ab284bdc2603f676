#ifndef RSF_TUNING_HPP
#define RSF_TUNING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rsf/dense_oracle.hpp"
#include "rsf/smoother.hpp"

namespace rsf {

// SURE(y, Ky) = -n sigma^2 + ||y - Ky||^2 + 2 sigma^2 tr(K).
double sure_exact(const DenseOracle& oracle, const Signal& y, double sigma2);

// Same score with the sample-mean estimate and the mean root count standing in
// for tr(K).
double sure_rsf(const SmoothEstimate& est, const Signal& y, double sigma2);

// LOOCV for a linear smoother: mean over labels of ((theta_i - y_i)/(1-K_ii))^2.
double loocv_exact(const DenseOracle& oracle, const Signal& y, std::span<const std::int32_t> labels);

// K_ii replaced by the ensemble's diagonal surrogate for the chosen estimator.
double loocv_rsf(const SmoothEstimate& est, const Signal& y, std::span<const std::int32_t> labels);

enum class TuneMethod { sure_exact, sure_rsf, loocv_exact, loocv_rsf };

struct TuneParams {
    double sigma2 = 0.0;                   // SURE methods
    std::vector<std::int32_t> labels;      // LOOCV label set; empty means all nodes
    Estimator estimator = Estimator::bar;  // RSF methods
    std::int64_t n_forests = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    std::vector<double> q_base;            // per-node base weights; empty means ones
    bool keep_estimates = false;
};

struct TuningResult {
    std::vector<double> grid;     // ascending candidates
    std::vector<double> scores;   // NaN where a candidate degenerated
    int best_index = -1;
    double best() const { return grid[best_index]; }
    std::vector<SmoothEstimate> estimates;  // filled when keep_estimates
};

// Evaluates the score per candidate mu (DiagQ = mu * q_base), fresh forests
// per candidate for RSF methods, and returns the argmin; ties break toward
// the smaller candidate.
TuningResult grid_search(const Graph& g, const Signal& y, std::vector<double> grid,
                         TuneMethod method, const TuneParams& params);

// `candidate,score` rows.
void write_tuning_csv(std::ostream& out, const TuningResult& result);

// lo:step:hi inclusive sweep, e.g. 0.5:0.5:5.0.
std::vector<double> parse_grid(const std::string& text);

}  // namespace rsf

#endif
