#ifndef RSF_SPECTRUM_HPP
#define RSF_SPECTRUM_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "rsf/graph.hpp"

namespace rsf {

// Node-count cap for dense eigendecompositions and dense oracle builds.
constexpr std::int32_t kDenseCap = 3000;

struct Spectrum {
    Eigen::VectorXd eigenvalues;  // nondecreasing
    Eigen::MatrixXd U;            // orthonormal columns
};

Eigen::MatrixXd dense_laplacian(const Graph& g);

// Full symmetric eigendecomposition of L; n <= kDenseCap.
Spectrum dense_spectrum(const Graph& g);

// The k lowest eigenpairs: dense route below the cap, Lanczos with full
// reorthogonalization above it.
Spectrum lowest_eigenpairs(const Graph& g, std::int32_t k, std::uint64_t seed = 12345);

struct BandlimitedSignal {
    Signal x;       // unit-norm k-bandlimited signal
    Signal y;       // x + iid Gaussian noise
    double sigma2;  // noise variance (n * snr)^(-1)
};

// x = sum_{i<=k} alpha_i u_i with standard-normal coefficients, normalized to
// unit norm; sigma^2 = 1/(n*snr).
BandlimitedSignal bandlimited_signal(const Graph& g, std::int32_t k, double snr,
                                     std::uint64_t seed);

}  // namespace rsf

#endif
