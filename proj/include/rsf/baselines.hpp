#ifndef RSF_BASELINES_HPP
#define RSF_BASELINES_HPP

#include <cstdint>
#include <vector>

#include "rsf/forest.hpp"
#include "rsf/graph.hpp"

namespace rsf {

enum class CgPrecond { none, jacobi };

struct CgOptions {
    int max_iters = 0;        // 0: derive from n
    double tol = 0.0;         // relative residual target; 0 runs max_iters exactly
    CgPrecond precond = CgPrecond::none;
    const Signal* x0 = nullptr;
};

struct CgResult {
    Signal x;
    int iters = 0;
    double rel_residual = 0.0;
};

// Conjugate gradient on (L+Q) x = b.
CgResult cg_solve_system(const Graph& g, const DiagQ& q, const Signal& b, const CgOptions& opts);

// Smoothing form: solves (L+Q) x = Q y.
CgResult cg_solve(const Graph& g, const DiagQ& q, const Signal& y, const CgOptions& opts);

enum class ChebBound { exact_lambda_max, gershgorin };

// Chebyshev interpolant of h(lambda) = q / (q + lambda) on [0, b].
struct FilterSpec {
    double q = 0.0;
    double b = 0.0;                  // spectrum interval upper bound, b >= lambda_n
    int degree = 0;
    std::vector<double> coefficients;  // c_0 .. c_degree, c_0 halved at evaluation
};

// b from a seeded power iteration on L (relative tolerance 1e-6) or from the
// Gershgorin bound 2*max_i degree_sum[i].
FilterSpec chebyshev_setup(const Graph& g, double q, int degree,
                           ChebBound mode = ChebBound::exact_lambda_max);

// Three-term recurrence evaluation of the polynomial in L applied to y;
// costs `degree` Laplacian matvecs.
Signal chebyshev_apply(const Graph& g, const FilterSpec& spec, const Signal& y);

// Scalar Clenshaw evaluation of the stored polynomial at lambda.
double filter_eval(const FilterSpec& spec, double lambda);

// Largest Laplacian eigenvalue by power iteration, relative tolerance tol.
double lambda_max_estimate(const Graph& g, double tol = 1e-6, std::uint64_t seed = 7);

}  // namespace rsf

#endif
