#include "rsf/dense_oracle.hpp"

namespace rsf {

DenseOracle DenseOracle::build(const Graph& g, const DiagQ& q, bool with_spectrum) {
    const std::int32_t n = g.num_nodes();
    if (n > kDenseCap)
        throw CapabilityError("DenseOracle: graph exceeds dense cap of " +
                              std::to_string(kDenseCap) + " nodes");
    q.validate_for(g);
    Eigen::MatrixXd A = dense_laplacian(g);
    for (std::int32_t i = 0; i < n; ++i) A(i, i) += q[i];
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw NumericError("DenseOracle: L+Q is not positive definite (all-zero q component?)");
    DenseOracle oracle;
    oracle.lq_inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
    oracle.K = oracle.lq_inverse;
    for (std::int32_t j = 0; j < n; ++j) oracle.K.col(j) *= q[j];
    if (with_spectrum) oracle.spectrum = dense_spectrum(g);
    return oracle;
}

std::pair<double, double> expected_roots_oracle(const DenseOracle& oracle) {
    const double tr_k = oracle.K.trace();
    const double tr_k2 = (oracle.K * oracle.K).trace();
    return {tr_k, tr_k - tr_k2};
}

std::pair<double, double> expected_roots_spectral(const Spectrum& spectrum, double q) {
    double mean = 0.0, var = 0.0;
    for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
        const double lam = spectrum.eigenvalues[i];
        mean += q / (q + lam);
        var += lam * q / ((q + lam) * (q + lam));
    }
    return {mean, var};
}

Eigen::VectorXd kernel_eigenvalues(const Graph& g, const DiagQ& q) {
    const std::int32_t n = g.num_nodes();
    if (n > kDenseCap) throw CapabilityError("kernel_eigenvalues: graph exceeds dense cap");
    // K is similar to the symmetric Q^(1/2) (L+Q)^(-1) Q^(1/2).
    Eigen::MatrixXd A = dense_laplacian(g);
    for (std::int32_t i = 0; i < n; ++i) A(i, i) += q[i];
    Eigen::MatrixXd inv = Eigen::LLT<Eigen::MatrixXd>(A).solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd sq(n);
    for (std::int32_t i = 0; i < n; ++i) sq[i] = std::sqrt(q[i]);
    Eigen::MatrixXd sym = sq.asDiagonal() * inv * sq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    return es.eigenvalues();
}

double walk_cost_oracle(const Graph& g, const DiagQ& q, const DenseOracle& oracle) {
    double acc = 0.0;
    for (std::int32_t i = 0; i < g.num_nodes(); ++i)
        acc += oracle.lq_inverse(i, i) * (g.degree_sum(i) + q[i]);
    return acc;
}

Eigen::MatrixXd root_marginal_empirical(const Graph& g, const DiagQ& q, std::int64_t n_forests,
                                        std::uint64_t seed) {
    const std::int32_t n = g.num_nodes();
    if (n > 50) throw CapabilityError("root_marginal_empirical: use n <= 50");
    q.validate_for(g);
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(n, n);
    ForestWorkspace ws;
    for (std::int64_t k = 0; k < n_forests; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        sample_forest_into(g, q, rng, ws);
        for (std::int32_t i = 0; i < n; ++i) freq(i, ws.root_of[i]) += 1.0;
    }
    freq /= static_cast<double>(n_forests);
    return freq;
}

}  // namespace rsf
