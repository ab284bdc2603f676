#ifndef RSF_DENSE_ORACLE_HPP
#define RSF_DENSE_ORACLE_HPP

#include <Eigen/Dense>
#include <optional>

#include "rsf/forest.hpp"
#include "rsf/graph.hpp"
#include "rsf/spectrum.hpp"

namespace rsf {

// Dense K = (L+Q)^(-1) Q for small-graph verification. Never used on the
// estimation path; everything here is O(n^3) and capped at kDenseCap nodes.
struct DenseOracle {
    Eigen::MatrixXd K;
    Eigen::MatrixXd lq_inverse;  // (L+Q)^(-1)
    std::optional<Spectrum> spectrum;

    static DenseOracle build(const Graph& g, const DiagQ& q, bool with_spectrum = false);
};

// tr(K) and tr(K - K^2): mean and variance of the root-count DPP.
std::pair<double, double> expected_roots_oracle(const DenseOracle& oracle);

// Same two moments through the eigenvalues of L, scalar q only:
// sum q/(q+lambda_i) and sum lambda_i q/(q+lambda_i)^2.
std::pair<double, double> expected_roots_spectral(const Spectrum& spectrum, double q);

// Eigenvalues of K (via the symmetrized similar form); the root count is
// distributed as a sum of independent Bernoulli(p_i) over these.
Eigen::VectorXd kernel_eigenvalues(const Graph& g, const DiagQ& q);

// Expected number of random-successor-equivalent draws of one forest sample:
// tr((L+Q)^(-1) (D+Q)).
double walk_cost_oracle(const Graph& g, const DiagQ& q, const DenseOracle& oracle);

// Empirical frequency matrix of root(i) = j over N forests; rows sum to one
// per sample and converge to K entrywise. Guarded to n <= 50.
Eigen::MatrixXd root_marginal_empirical(const Graph& g, const DiagQ& q, std::int64_t n_forests,
                                        std::uint64_t seed);

}  // namespace rsf

#endif
