#include "rsf/baselines.hpp"

#include <cmath>

#include "rsf/rng.hpp"

namespace rsf {

namespace {

// out = (L+Q) z
void apply_system(const Graph& g, const DiagQ& q, const std::vector<double>& z,
                  std::vector<double>& out) {
    laplacian_apply(g, z, out);
    for (std::size_t i = 0; i < z.size(); ++i) out[i] += q[static_cast<std::int32_t>(i)] * z[i];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

CgResult cg_solve_system(const Graph& g, const DiagQ& q, const Signal& b, const CgOptions& opts) {
    const std::int32_t n = g.num_nodes();
    if (b.size() != static_cast<std::size_t>(n))
        throw DimensionError("cg_solve: rhs length does not match node count");
    q.validate_for(g);
    const int max_iters = opts.max_iters > 0 ? opts.max_iters : 10 * n + 100;

    CgResult res;
    res.x = opts.x0 ? *opts.x0 : Signal(n, 0.0);
    std::vector<double> r(n), p(n), ap(n), z(n);
    apply_system(g, q, res.x, ap);
    for (std::int32_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];

    std::vector<double> inv_diag;
    if (opts.precond == CgPrecond::jacobi) {
        inv_diag.resize(n);
        for (std::int32_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / (g.degree_sum(i) + q[i]);
    }
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (inv_diag.empty())
            out = in;
        else
            for (std::int32_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    };

    const double b_norm = std::sqrt(dot(b, b));
    const double stop = opts.tol > 0.0 ? opts.tol * (b_norm > 0.0 ? b_norm : 1.0) : -1.0;

    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    double r_norm = std::sqrt(dot(r, r));
    int k = 0;
    while (k < max_iters) {
        if (stop >= 0.0 && r_norm <= stop) break;
        if (rz == 0.0) break;
        apply_system(g, q, p, ap);
        const double alpha = rz / dot(p, ap);
        for (std::int32_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::int32_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        r_norm = std::sqrt(dot(r, r));
        ++k;
    }
    res.iters = k;
    res.rel_residual = b_norm > 0.0 ? r_norm / b_norm : r_norm;
    return res;
}

CgResult cg_solve(const Graph& g, const DiagQ& q, const Signal& y, const CgOptions& opts) {
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw DimensionError("cg_solve: signal length does not match node count");
    Signal b(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) b[i] = q[static_cast<std::int32_t>(i)] * y[i];
    return cg_solve_system(g, q, b, opts);
}

double lambda_max_estimate(const Graph& g, double tol, std::uint64_t seed) {
    const std::int32_t n = g.num_nodes();
    Rng rng(seed, streams::misc);
    std::vector<double> v(n), w(n);
    for (auto& x : v) x = rng.normal();
    double norm = std::sqrt(dot(v, v));
    for (auto& x : v) x /= norm;
    double lam = 0.0;
    const int max_iters = 20000;
    for (int k = 0; k < max_iters; ++k) {
        laplacian_apply(g, v, w);
        lam = dot(v, w);  // Rayleigh quotient; always <= lambda_n
        // residual-based stop: || L v - lam v ||
        double resid = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double r = w[i] - lam * v[i];
            resid += r * r;
        }
        if (std::sqrt(resid) <= tol * std::max(lam, 1e-30)) break;
        norm = std::sqrt(dot(w, w));
        if (norm == 0.0) return 0.0;
        for (std::int32_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    return lam;
}

FilterSpec chebyshev_setup(const Graph& g, double q, int degree, ChebBound mode) {
    if (degree < 1) throw UsageError("chebyshev_setup: degree must be >= 1");
    if (!(q > 0.0)) throw UsageError("chebyshev_setup: q must be positive");
    FilterSpec spec;
    spec.q = q;
    spec.degree = degree;
    // The Rayleigh-quotient estimate approaches lambda_n from below; a 1%
    // inflation keeps the interval covering the spectrum.
    spec.b = mode == ChebBound::gershgorin ? 2.0 * g.max_degree_sum()
                                           : 1.01 * lambda_max_estimate(g);
    if (!(spec.b > 0.0)) throw NumericError("chebyshev_setup: empty spectrum interval");

    // Interpolation at the degree+1 Chebyshev points of the first kind,
    // mapped from [-1,1] to [0,b].
    const int m = degree + 1;
    spec.coefficients.assign(m, 0.0);
    std::vector<double> h(m);
    for (int j = 0; j < m; ++j) {
        const double theta = M_PI * (j + 0.5) / m;
        const double lam = (std::cos(theta) + 1.0) * spec.b / 2.0;
        h[j] = q / (q + lam);
    }
    for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += h[j] * std::cos(k * M_PI * (j + 0.5) / m);
        spec.coefficients[k] = 2.0 * acc / m;
    }
    return spec;
}

Signal chebyshev_apply(const Graph& g, const FilterSpec& spec, const Signal& y) {
    const std::int32_t n = g.num_nodes();
    if (y.size() != static_cast<std::size_t>(n))
        throw DimensionError("chebyshev_apply: signal length does not match node count");
    // T_k recurrence in the scaled operator (2L - bI)/b.
    const double scale = 2.0 / spec.b;
    std::vector<double> t_prev = y;           // T_0 y
    std::vector<double> t_cur(n), tmp(n);
    laplacian_apply(g, t_prev, tmp);
    for (std::int32_t i = 0; i < n; ++i) t_cur[i] = scale * tmp[i] - t_prev[i];  // T_1 y

    Signal out(n);
    for (std::int32_t i = 0; i < n; ++i)
        out[i] = 0.5 * spec.coefficients[0] * t_prev[i] +
                 (spec.degree >= 1 ? spec.coefficients[1] * t_cur[i] : 0.0);
    for (int k = 2; k <= spec.degree; ++k) {
        laplacian_apply(g, t_cur, tmp);
        for (std::int32_t i = 0; i < n; ++i) {
            const double t_next = 2.0 * (scale * tmp[i] - t_cur[i]) - t_prev[i];
            t_prev[i] = t_cur[i];
            t_cur[i] = t_next;
            out[i] += spec.coefficients[k] * t_next;
        }
    }
    return out;
}

double filter_eval(const FilterSpec& spec, double lambda) {
    const double x = 2.0 * lambda / spec.b - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (int k = spec.degree; k >= 1; --k) {
        const double b0 = 2.0 * x * b1 - b2 + spec.coefficients[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + 0.5 * spec.coefficients[0];
}

}  // namespace rsf
