#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rsf/baselines.hpp"
#include "rsf/smoother.hpp"
#include "support/test_graphs.hpp"

using namespace rsf;
using namespace rsf::testing;

namespace {

double linf(const Signal& a, const Signal& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// (L+Q)-norm of the error against a reference solution
double system_norm_err(const Graph& g, const DiagQ& q, const Signal& x, const Signal& ref) {
    Signal d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - ref[i];
    Signal ld = laplacian_apply(g, d);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += d[i] * (ld[i] + q[static_cast<std::int32_t>(i)] * d[i]);
    return std::sqrt(std::max(acc, 0.0));
}

}  // namespace

TEST_CASE("conjugate gradient") {
    SUBCASE("finite termination on small systems") {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const std::int32_t n = 8 + 3 * static_cast<std::int32_t>(s);
            Graph g = random_connected(n, 0.3, s);
            DiagQ q = DiagQ::scalar(n, 0.5);
            Signal y = random_signal(n, s + 1);
            CgOptions opts;
            opts.max_iters = n + 2;
            opts.tol = 0.0;
            CgResult res = cg_solve(g, q, y, opts);
            CHECK(res.rel_residual <= 1e-8);
        }
    }
    SUBCASE("constant y converges in one iteration") {
        Graph g = random_connected(25, 0.2, 3);
        CgOptions opts;
        opts.max_iters = 1;
        CgResult res = cg_solve(g, DiagQ::scalar(25, 0.8), Signal(25, 2.0), opts);
        for (double v : res.x) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("system-norm error decreases monotonically") {
        Graph g = random_connected(40, 0.15, 9);
        DiagQ q = DiagQ::scalar(40, 0.4);
        Signal y = random_signal(40, 2);
        Signal exact = exact_smooth(g, q, y);
        double prev = 1e300;
        for (int iters = 1; iters <= 25; ++iters) {
            CgOptions opts;
            opts.max_iters = iters;
            CgResult res = cg_solve(g, q, y, opts);
            const double err = system_norm_err(g, q, res.x, exact);
            CHECK(err <= prev * (1 + 1e-10) + 1e-14);
            prev = err;
        }
    }
    SUBCASE("jacobi preconditioning also reaches tolerance") {
        Graph g = random_connected(60, 0.1, 4);
        DiagQ q = DiagQ::per_node(random_abs_q(60, 3));
        Signal y = random_signal(60, 7);
        CgOptions plain, pc;
        plain.tol = 1e-8;
        plain.max_iters = 1000;
        pc = plain;
        pc.precond = CgPrecond::jacobi;
        CgResult a = cg_solve(g, q, y, plain);
        CgResult b = cg_solve(g, q, y, pc);
        CHECK(a.rel_residual <= 1e-8);
        CHECK(b.rel_residual <= 1e-8);
        // iteration counts are reported, not asserted as a theorem
        MESSAGE("plain iters ", a.iters, " jacobi iters ", b.iters);
    }
}

TEST_CASE("lambda max estimate") {
    SUBCASE("two-node graph: lambda_n = 2; Gershgorin 2 d_max = 2") {
        Graph g = two_node();
        CHECK(lambda_max_estimate(g) == doctest::Approx(2.0).epsilon(1e-4));
        CHECK(2.0 * g.max_degree_sum() == doctest::Approx(2.0));
    }
    SUBCASE("path of three: lambda_n = 3; Gershgorin bound 4") {
        Graph g = path_graph(3);
        CHECK(lambda_max_estimate(g) == doctest::Approx(3.0).epsilon(1e-4));
        CHECK(2.0 * g.max_degree_sum() == doctest::Approx(4.0));
    }
    SUBCASE("estimate is accurate and chebyshev intervals cover the spectrum") {
        for (std::uint64_t s = 0; s < 5; ++s) {
            Graph g = random_connected(30, 0.2, s + 50);
            Spectrum spec = dense_spectrum(g);
            const double lam_n = spec.eigenvalues[29];
            CHECK(lambda_max_estimate(g) == doctest::Approx(lam_n).epsilon(1e-3));
            for (auto mode : {ChebBound::exact_lambda_max, ChebBound::gershgorin}) {
                FilterSpec filt = chebyshev_setup(g, 1.0, 4, mode);
                CHECK(filt.b >= lam_n * (1 - 1e-9));  // b >= lambda_n invariant
            }
        }
    }
}

TEST_CASE("chebyshev setup") {
    Graph g = two_node();
    SUBCASE("degree must be positive") {
        CHECK_THROWS_AS(chebyshev_setup(g, 1.0, 0), UsageError);
    }
    SUBCASE("filter is exact at the interpolation nodes") {
        FilterSpec spec = chebyshev_setup(g, 0.7, 12);
        const int m = spec.degree + 1;
        for (int j = 0; j < m; ++j) {
            const double lam = (std::cos(M_PI * (j + 0.5) / m) + 1.0) * spec.b / 2.0;
            CHECK(filter_eval(spec, lam) ==
                  doctest::Approx(0.7 / (0.7 + lam)).epsilon(1e-13));
        }
    }
    SUBCASE("h(0) = 1 for any q") {
        for (double q : {0.2, 1.0, 8.0}) {
            FilterSpec spec = chebyshev_setup(g, q, 30);
            CHECK(filter_eval(spec, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    SUBCASE("gershgorin interval is wider than the exact one on a path") {
        Graph p3 = path_graph(3);  // lambda_n = 3, 2 d_max = 4
        FilterSpec ex = chebyshev_setup(p3, 1.0, 5, ChebBound::exact_lambda_max);
        FilterSpec ge = chebyshev_setup(p3, 1.0, 5, ChebBound::gershgorin);
        CHECK(ex.b == doctest::Approx(3.0).epsilon(0.02));
        CHECK(ge.b == doctest::Approx(4.0));
        CHECK(ge.b > ex.b);
    }
}

TEST_CASE("chebyshev apply") {
    SUBCASE("filters eigenvectors by h(lambda)") {
        Graph g = random_connected(24, 0.25, 11);
        Spectrum spec = dense_spectrum(g);
        FilterSpec filt = chebyshev_setup(g, 0.9, 40);
        // polynomial sup error on the interval bounds the vector error
        double sup_err = 0.0;
        for (int t = 0; t <= 400; ++t) {
            const double lam = filt.b * t / 400.0;
            sup_err = std::max(sup_err,
                               std::abs(filter_eval(filt, lam) - 0.9 / (0.9 + lam)));
        }
        for (int j : {0, 5, 23}) {
            Signal u(spec.U.col(j).data(), spec.U.col(j).data() + 24);
            Signal out = chebyshev_apply(g, filt, u);
            const double h = filter_eval(filt, spec.eigenvalues[j]);
            double err = 0.0;
            for (int i = 0; i < 24; ++i) {
                const double d = out[i] - h * u[i];
                err += d * d;
            }
            CHECK(std::sqrt(err) <= sup_err * 1.01 + 1e-10);
        }
    }
    SUBCASE("high degree matches exact smoothing to 1e-8") {
        Graph g = random_connected(60, 0.12, 13);
        Signal y = random_signal(60, 5);
        Signal exact = exact_smooth(g, DiagQ::scalar(60, 1.1), y);
        FilterSpec filt = chebyshev_setup(g, 1.1, 200);
        CHECK(linf(chebyshev_apply(g, filt, y), exact) <= 1e-8);
    }
    SUBCASE("constant input passes through at h(0)") {
        // q/b large enough for a degree-20 interpolant to hold 1e-6 at zero
        Graph g = two_node();
        FilterSpec filt = chebyshev_setup(g, 1.0, 20);
        Signal out = chebyshev_apply(g, filt, Signal(2, 1.0));
        for (double v : out) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("both baselines converge monotonically to exact_smooth") {
    Graph g = random_connected(50, 0.15, 15);
    DiagQ q = DiagQ::scalar(50, 0.8);
    Signal y = random_signal(50, 9);
    Signal exact = exact_smooth(g, q, y);

    SUBCASE("chebyshev error is nonincreasing beyond small-degree transients") {
        double prev = 1e300;
        for (int degree : {4, 6, 8, 12, 16, 24, 32, 48, 64, 96}) {
            FilterSpec filt = chebyshev_setup(g, 0.8, degree);
            const double err = linf(chebyshev_apply(g, filt, y), exact);
            CHECK(err <= prev * (1 + 1e-9) + 1e-12);
            prev = err;
        }
    }
    SUBCASE("gershgorin interval is never more accurate at equal degree") {
        for (int degree : {6, 12, 24, 48}) {
            FilterSpec ex = chebyshev_setup(g, 0.8, degree, ChebBound::exact_lambda_max);
            FilterSpec ge = chebyshev_setup(g, 0.8, degree, ChebBound::gershgorin);
            const double err_ex = linf(chebyshev_apply(g, ex, y), exact);
            const double err_ge = linf(chebyshev_apply(g, ge, y), exact);
            CHECK(err_ex <= err_ge * (1 + 1e-9) + 1e-12);
        }
    }
    SUBCASE("cg at tol 1e-10 matches to 1e-8") {
        CgOptions opts;
        opts.tol = 1e-10;
        opts.max_iters = 2000;
        CHECK(linf(cg_solve(g, q, y, opts).x, exact) <= 1e-8);
    }
}
