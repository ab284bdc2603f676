#include "rsf/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace rsf {

namespace {

constexpr double kDegenerateDiag = 1.0 - 1e-9;

double residual_sq(const Signal& a, const Signal& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::int32_t> all_nodes(std::size_t n) {
    std::vector<std::int32_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::int32_t>(i);
    return v;
}

double loocv_score(const Signal& theta, const Signal& y, std::span<const std::int32_t> labels,
                   const std::function<double(std::int32_t)>& diag, double degenerate_tol,
                   const char* what) {
    if (labels.empty()) throw UsageError("loocv: empty label set");
    double acc = 0.0;
    for (auto i : labels) {
        if (i < 0 || static_cast<std::size_t>(i) >= y.size())
            throw DimensionError("loocv: label index out of range");
        const double kii = diag(i);
        if (kii >= degenerate_tol)
            throw NumericError(std::string(what) + ": degenerate smoother diagonal at node " +
                               std::to_string(i));
        const double r = (theta[i] - y[i]) / (1.0 - kii);
        acc += r * r;
    }
    return acc / static_cast<double>(labels.size());
}

}  // namespace

double sure_exact(const DenseOracle& oracle, const Signal& y, double sigma2) {
    const auto n = oracle.K.rows();
    if (static_cast<Eigen::Index>(y.size()) != n)
        throw DimensionError("sure_exact: signal length does not match oracle");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    Eigen::VectorXd ky = oracle.K * yv;
    return -static_cast<double>(n) * sigma2 + (yv - ky).squaredNorm() +
           2.0 * sigma2 * oracle.K.trace();
}

double sure_rsf(const SmoothEstimate& est, const Signal& y, double sigma2) {
    if (est.values.size() != y.size())
        throw DimensionError("sure_rsf: signal length does not match estimate");
    const auto n = static_cast<double>(y.size());
    return -n * sigma2 + residual_sq(y, est.values) + 2.0 * sigma2 * est.mean_root_count;
}

double loocv_exact(const DenseOracle& oracle, const Signal& y,
                   std::span<const std::int32_t> labels) {
    if (static_cast<Eigen::Index>(y.size()) != oracle.K.rows())
        throw DimensionError("loocv_exact: signal length does not match oracle");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), y.size());
    Eigen::VectorXd ky = oracle.K * yv;
    Signal theta(ky.data(), ky.data() + ky.size());
    return loocv_score(theta, y, labels, [&](std::int32_t i) { return oracle.K(i, i); },
                       1.0 - 1e-12, "loocv_exact");
}

double loocv_rsf(const SmoothEstimate& est, const Signal& y,
                 std::span<const std::int32_t> labels) {
    if (est.values.size() != y.size())
        throw DimensionError("loocv_rsf: signal length does not match estimate");
    return loocv_score(est.values, y, labels, [&](std::int32_t i) { return est.diag[i]; },
                       kDegenerateDiag, "loocv_rsf");
}

TuningResult grid_search(const Graph& g, const Signal& y, std::vector<double> grid,
                         TuneMethod method, const TuneParams& params) {
    if (grid.empty()) throw UsageError("grid_search: empty grid");
    for (double v : grid)
        if (!(v > 0.0)) throw UsageError("grid_search: candidates must be positive");
    std::sort(grid.begin(), grid.end());

    const std::int32_t n = g.num_nodes();
    if (!params.q_base.empty() && params.q_base.size() != static_cast<std::size_t>(n))
        throw DimensionError("grid_search: q_base length does not match node count");
    std::vector<std::int32_t> labels =
        params.labels.empty() ? all_nodes(y.size()) : params.labels;

    TuningResult result;
    result.grid = grid;
    result.scores.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());

    const bool rsf = method == TuneMethod::sure_rsf || method == TuneMethod::loocv_rsf;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        DiagQ q = [&] {
            if (params.q_base.empty()) return DiagQ::scalar(n, grid[j]);
            std::vector<double> qv(params.q_base);
            for (auto& v : qv) v *= grid[j];
            return DiagQ::per_node(std::move(qv));
        }();
        try {
            double score;
            if (rsf) {
                // Fresh, independently seeded forests per candidate: the forest
                // law depends on q, so reuse across candidates would bias scores.
                const std::uint64_t seed = params.seed + 0x51ED270B * (j + 1);
                SmoothEstimate est = estimate(g, q, y, params.estimator, params.n_forests, seed,
                                              params.threads);
                score = method == TuneMethod::sure_rsf ? sure_rsf(est, y, params.sigma2)
                                                       : loocv_rsf(est, y, labels);
                if (params.keep_estimates) result.estimates.push_back(std::move(est));
            } else {
                DenseOracle oracle = DenseOracle::build(g, q);
                score = method == TuneMethod::sure_exact ? sure_exact(oracle, y, params.sigma2)
                                                         : loocv_exact(oracle, y, labels);
            }
            result.scores[j] = score;
        } catch (const NumericError&) {
            // degenerate candidate; leave NaN and keep sweeping
        }
        if (std::isfinite(result.scores[j]) &&
            (result.best_index < 0 || result.scores[j] < result.scores[result.best_index]))
            result.best_index = static_cast<int>(j);
    }
    if (result.best_index < 0) throw NumericError("grid_search: every candidate degenerated");
    return result;
}

void write_tuning_csv(std::ostream& out, const TuningResult& result) {
    out << "candidate,score\n";
    char buf[80];
    for (std::size_t j = 0; j < result.grid.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", result.grid[j], result.scores[j]);
        out << buf;
    }
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) return {parts[0]};
    if (parts.size() != 3) throw UsageError("grid: expected lo:step:hi");
    const double lo = parts[0], step = parts[1], hi = parts[2];
    if (!(step > 0.0) || hi < lo) throw UsageError("grid: bad range");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-12 * step; v += step) out.push_back(v);
    return out;
}

}  // namespace rsf
