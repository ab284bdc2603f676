#ifndef RSF_SMOOTHER_HPP
#define RSF_SMOOTHER_HPP

#include <cstdint>
#include <vector>

#include "rsf/dense_oracle.hpp"
#include "rsf/forest.hpp"
#include "rsf/graph.hpp"

namespace rsf {

// Solves (L+Q) x = b; dense Cholesky up to kDenseCap nodes, conjugate gradient
// to relative residual 1e-10 beyond.
Signal solve_shifted_laplacian(const Graph& g, const DiagQ& q, const Signal& b);

// Multi-RHS variant; the dense route factorizes once for all columns.
std::vector<Signal> solve_shifted_laplacian_multi(const Graph& g, const DiagQ& q,
                                                  const std::vector<Signal>& bs);

// x_hat = (L+Q)^(-1) Q y — the exact Tikhonov smoother.
Signal exact_smooth(const Graph& g, const DiagQ& q, const Signal& y);

// N-forest sample mean of one RSF estimator, with enough ensemble state to
// drive SURE/LOOCV scoring.
struct SmoothEstimate {
    Signal values;                 // sample mean over n_forests forests
    std::vector<double> variance;  // per-node sample variance of the per-forest estimates
    std::int64_t n_forests = 0;
    double mean_root_count = 0.0;
    std::vector<double> diag;      // smoother-diagonal surrogate for `kind`
    Estimator kind = Estimator::tilde;
};

SmoothEstimate estimate_tilde(const Graph& g, const DiagQ& q, const Signal& y,
                              std::int64_t n_forests, std::uint64_t seed, int threads = 0);
SmoothEstimate estimate_bar(const Graph& g, const DiagQ& q, const Signal& y,
                            std::int64_t n_forests, std::uint64_t seed, int threads = 0);
SmoothEstimate estimate(const Graph& g, const DiagQ& q, const Signal& y, Estimator kind,
                        std::int64_t n_forests, std::uint64_t seed, int threads = 0);

// Shared-forest smoothing of several columns (one-hot label matrices and the
// like); the forests are signal-independent so one ensemble serves all.
struct MultiSmooth {
    std::vector<Signal> values;  // one mean per column
    std::int64_t n_forests = 0;
    double mean_root_count = 0.0;
    std::vector<double> diag;
    Estimator kind = Estimator::tilde;
};
MultiSmooth smooth_columns(const Graph& g, const DiagQ& q, const std::vector<Signal>& columns,
                           Estimator kind, std::int64_t n_forests, std::uint64_t seed,
                           int threads = 0);

// Closed-form weighted expected errors:
//   tilde: y' (Q - K' Q K) y,   bar: y' (QK - K' Q K) y.
double variance_oracle(const DenseOracle& oracle, const DiagQ& q, const Signal& y, Estimator kind);

}  // namespace rsf

#endif
