#include "rsf/smoother.hpp"

#include "rsf/baselines.hpp"

namespace rsf {

std::vector<Signal> solve_shifted_laplacian_multi(const Graph& g, const DiagQ& q,
                                                  const std::vector<Signal>& bs) {
    const std::int32_t n = g.num_nodes();
    for (const auto& b : bs)
        if (b.size() != static_cast<std::size_t>(n))
            throw DimensionError("solve_shifted_laplacian: rhs length does not match node count");
    q.validate_for(g);
    std::vector<Signal> out;
    out.reserve(bs.size());
    if (n <= kDenseCap) {
        Eigen::MatrixXd A = dense_laplacian(g);
        for (std::int32_t i = 0; i < n; ++i) A(i, i) += q[i];
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success)
            throw NumericError("solve_shifted_laplacian: L+Q is not positive definite");
        for (const auto& b : bs) {
            Eigen::VectorXd x = llt.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
            out.emplace_back(x.data(), x.data() + n);
        }
        return out;
    }
    CgOptions opts;
    opts.tol = 1e-10;
    opts.max_iters = 20 * n;
    opts.precond = CgPrecond::jacobi;
    for (const auto& b : bs) out.push_back(cg_solve_system(g, q, b, opts).x);
    return out;
}

Signal solve_shifted_laplacian(const Graph& g, const DiagQ& q, const Signal& b) {
    return solve_shifted_laplacian_multi(g, q, {b}).front();
}

Signal exact_smooth(const Graph& g, const DiagQ& q, const Signal& y) {
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw DimensionError("exact_smooth: signal length does not match node count");
    Signal b(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) b[i] = q[static_cast<std::int32_t>(i)] * y[i];
    return solve_shifted_laplacian(g, q, b);
}

namespace {

SmoothEstimate from_ensemble(const ForestEnsemble& ens) {
    SmoothEstimate est;
    est.values = ens.mean_signal(0);
    est.variance = ens.variance_signal(0);
    est.n_forests = ens.count();
    est.mean_root_count = ens.mean_root_count();
    est.kind = ens.kind();
    est.diag = ens.kind() == Estimator::bar ? ens.diag_bar() : ens.diag_tilde();
    return est;
}

}  // namespace

SmoothEstimate estimate(const Graph& g, const DiagQ& q, const Signal& y, Estimator kind,
                        std::int64_t n_forests, std::uint64_t seed, int threads) {
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw DimensionError("estimate: signal length does not match node count");
    auto ens = build_ensemble(g, q, y.data(), 1, kind, n_forests, seed, threads);
    return from_ensemble(ens);
}

SmoothEstimate estimate_tilde(const Graph& g, const DiagQ& q, const Signal& y,
                              std::int64_t n_forests, std::uint64_t seed, int threads) {
    return estimate(g, q, y, Estimator::tilde, n_forests, seed, threads);
}

SmoothEstimate estimate_bar(const Graph& g, const DiagQ& q, const Signal& y,
                            std::int64_t n_forests, std::uint64_t seed, int threads) {
    return estimate(g, q, y, Estimator::bar, n_forests, seed, threads);
}

MultiSmooth smooth_columns(const Graph& g, const DiagQ& q, const std::vector<Signal>& columns,
                           Estimator kind, std::int64_t n_forests, std::uint64_t seed,
                           int threads) {
    const std::int32_t n = g.num_nodes();
    if (columns.empty()) throw UsageError("smooth_columns: no columns");
    std::vector<double> packed(static_cast<std::size_t>(n) * columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != static_cast<std::size_t>(n))
            throw DimensionError("smooth_columns: column length does not match node count");
        std::copy(columns[c].begin(), columns[c].end(), packed.begin() + c * n);
    }
    auto ens = build_ensemble(g, q, packed.data(), static_cast<std::int32_t>(columns.size()),
                              kind, n_forests, seed, threads);
    MultiSmooth out;
    out.n_forests = ens.count();
    out.mean_root_count = ens.mean_root_count();
    out.kind = kind;
    out.diag = kind == Estimator::bar ? ens.diag_bar() : ens.diag_tilde();
    out.values.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
        out.values.push_back(ens.mean_signal(static_cast<std::int32_t>(c)));
    return out;
}

double variance_oracle(const DenseOracle& oracle, const DiagQ& q, const Signal& y,
                       Estimator kind) {
    const auto n = oracle.K.rows();
    if (static_cast<Eigen::Index>(y.size()) != n)
        throw DimensionError("variance_oracle: signal length does not match oracle");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    Eigen::VectorXd ky = oracle.K * yv;
    Eigen::VectorXd qky = ky;
    for (Eigen::Index i = 0; i < n; ++i) qky[i] *= q[static_cast<std::int32_t>(i)];
    const double cross = ky.dot(qky);  // y' K' Q K y
    if (kind == Estimator::tilde) {
        double yqy = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) yqy += q[static_cast<std::int32_t>(i)] * y[i] * y[i];
        return yqy - cross;
    }
    return yv.dot(qky) - cross;  // y' Q K y - y' K' Q K y
}

}  // namespace rsf
