#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rsf/graph.hpp"
#include "rsf/graph_gen.hpp"
#include "rsf/graph_io.hpp"
#include "rsf/spectrum.hpp"
#include "support/test_graphs.hpp"

using namespace rsf;
using namespace rsf::testing;

namespace {
std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("rsf_test_" + name);
}
}  // namespace

TEST_CASE("laplacian_apply matches hand computations") {
    SUBCASE("constants are annihilated") {
        Graph g = random_connected(17, 0.3, 5);
        Signal z(17, 3.25);
        for (double v : laplacian_apply(g, z)) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("two nodes") {
        Graph g = two_node();
        Signal out = laplacian_apply(g, {0.0, 1.0});
        CHECK(out[0] == doctest::Approx(-1.0));
        CHECK(out[1] == doctest::Approx(1.0));
    }
    SUBCASE("path of three") {
        Graph g = path_graph(3);
        Signal out = laplacian_apply(g, {1.0, 0.0, 0.0});
        CHECK(out[0] == doctest::Approx(1.0));
        CHECK(out[1] == doctest::Approx(-1.0));
        CHECK(out[2] == doctest::Approx(0.0));
    }
    SUBCASE("dimension error") {
        Graph g = two_node();
        Signal bad(3, 0.0);
        CHECK_THROWS_AS(laplacian_apply(g, bad), DimensionError);
    }
    SUBCASE("parallel kernel equals serial reference") {
        Graph g = random_connected(200, 0.05, 11);
        Signal z = random_signal(200, 1);
        Signal a(200), b(200);
        laplacian_apply(g, z, a);
        laplacian_apply_serial(g, z, b);
        for (std::int32_t i = 0; i < 200; ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("laplacian is positive semidefinite on random signals") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Graph g = random_connected(24, 0.2, s);
        Signal z = random_signal(24, s + 100);
        CHECK(laplacian_quadratic(g, z) >= -1e-12);
    }
}

TEST_CASE("incidence operator") {
    SUBCASE("constant signals map to zero") {
        Graph g = random_connected(12, 0.4, 3);
        for (double v : incidence_apply(g, Signal(12, 2.5)))
            CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("single weighted edge") {
        Graph g = two_node(4.0);
        auto vals = incidence_apply(g, {0.0, 1.0});
        REQUIRE(vals.size() == 1);
        CHECK(vals[0] == doctest::Approx(-2.0));  // lower index carries +sqrt(w)
    }
    SUBCASE("sum of squares equals the Laplacian quadratic form") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            Graph g = random_connected(15, 0.3, s);
            Signal z = random_signal(15, s + 7);
            double sq = 0.0;
            for (double v : incidence_apply(g, z)) sq += v * v;
            const double quad = laplacian_quadratic(g, z);
            Signal lz = laplacian_apply(g, z);
            double zlz = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) zlz += z[i] * lz[i];
            CHECK(sq == doctest::Approx(quad).epsilon(1e-10));
            CHECK(sq == doctest::Approx(zlz).epsilon(1e-10));
        }
    }
}

TEST_CASE("graph construction validates input") {
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0, 1.0}}), DataError);       // self loop
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 1, -1.0}}), DataError);      // bad weight
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 3, 1.0}}), DataError);       // out of range
    Graph g = Graph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}});            // duplicates summed
    CHECK(g.num_edges() == 1);
    CHECK(g.degree_sum(0) == doctest::Approx(2.0));
}

TEST_CASE("degree sums equal adjacency sums") {
    Graph g = random_connected(30, 0.2, 8);
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        double s = 0.0;
        for (double w : g.weights(i)) s += w;
        CHECK(g.degree_sum(i) == doctest::Approx(s).epsilon(1e-15));
    }
}

TEST_CASE("generators") {
    SUBCASE("grid 3x3 has 12 edges") {
        Graph g = grid2d(3, 3, false);
        CHECK(g.num_nodes() == 9);
        CHECK(g.num_edges() == 12);
        CHECK(g.is_connected());
    }
    SUBCASE("periodic 100x100 grid has 20000 edges") {
        Graph g = grid2d(100, 100, true);
        CHECK(g.num_nodes() == 10000);
        CHECK(g.num_edges() == 20000);
        for (std::int32_t i = 0; i < g.num_nodes(); ++i) CHECK(g.degree(i) == 4);
    }
    SUBCASE("k-regular 10000x10 has exactly 50000 edges") {
        Graph g = k_regular(10000, 10, 42);
        CHECK(g.num_nodes() == 10000);
        CHECK(g.num_edges() == 50000);
        for (std::int32_t i = 0; i < g.num_nodes(); ++i) CHECK(g.degree(i) == 10);
        CHECK(g.is_connected());
    }
    SUBCASE("k-regular infeasible parity") {
        CHECK_THROWS_AS(k_regular(5, 3, 1), UsageError);
    }
    SUBCASE("erdos renyi is connected and deterministic") {
        GenReport rep;
        Graph a = erdos_renyi(400, 8.0, 9, &rep);
        Graph b = erdos_renyi(400, 8.0, 9);
        CHECK(a.is_connected());
        CHECK(a.num_nodes() == b.num_nodes());
        CHECK(a.num_edges() == b.num_edges());
        auto ea = a.edge_list(), eb = b.edge_list();
        for (std::size_t k = 0; k < ea.size(); ++k) {
            CHECK(ea[k].u == eb[k].u);
            CHECK(ea[k].v == eb[k].v);
        }
        CHECK(rep.delivered_nodes == a.num_nodes());
    }
    SUBCASE("barabasi albert") {
        Graph g = barabasi_albert(500, 2, 5);
        CHECK(g.num_nodes() == 500);
        CHECK(g.is_connected());
        CHECK(g.num_edges() == 3 + 2 * (500 - 3));  // clique seed + 2 per new node
    }
    SUBCASE("knn euclidean symmetrized") {
        Graph g = knn_euclidean(300, 6, 3, 17);
        CHECK(g.is_connected());
        for (std::int32_t i = 0; i < g.num_nodes(); ++i) CHECK(g.degree(i) >= 6);
    }
    SUBCASE("spec strings") {
        CHECK(make_graph({"grid:4x5"}, 1).num_nodes() == 20);
        CHECK(make_graph({"grid:10x10:periodic"}, 1).num_edges() == 200);
        CHECK_THROWS_AS(make_graph({"grid:4x5:bogus"}, 1), UsageError);
        CHECK_THROWS_AS(make_graph({"nope:4"}, 1), UsageError);
    }
}

TEST_CASE("largest component extraction relabels contiguously") {
    // two triangles plus an isolated edge; keep the 4-cycle component
    Graph g = Graph::from_edges(9, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0},
                                    {3, 4, 1.0}, {4, 5, 1.0}, {5, 6, 1.0}, {6, 3, 1.0},
                                    {7, 8, 1.0}});
    auto sub = largest_component(g);
    CHECK(sub.graph.num_nodes() == 4);
    CHECK(sub.graph.num_edges() == 4);
    CHECK(sub.to_old == std::vector<std::int32_t>{3, 4, 5, 6});
    CHECK(sub.to_new[3] == 0);
    CHECK(sub.to_new[0] == -1);
}

TEST_CASE("edge list io") {
    SUBCASE("duplicate lines sum") {
        auto path = tmp_file("dup.edges");
        {
            std::ofstream out(path);
            out << "0 1 1\n1 0 1\n";
        }
        Graph g = load_edge_list(path.string());
        CHECK(g.num_nodes() == 2);
        CHECK(g.num_edges() == 1);
        CHECK(g.degree_sum(0) == doctest::Approx(2.0));
    }
    SUBCASE("round trip is exact") {
        Graph g = random_connected(25, 0.3, 21);
        auto path = tmp_file("round.edges");
        save_edge_list(g, path.string());
        Graph h = load_edge_list(path.string());
        REQUIRE(h.num_nodes() == g.num_nodes());
        REQUIRE(h.num_edges() == g.num_edges());
        auto eg = g.edge_list(), eh = h.edge_list();
        for (std::size_t k = 0; k < eg.size(); ++k) {
            CHECK(eg[k].u == eh[k].u);
            CHECK(eg[k].v == eh[k].v);
            CHECK(eg[k].w == eh[k].w);  // bit-exact via %.17g
        }
    }
    SUBCASE("parse errors carry line numbers") {
        auto path = tmp_file("bad.edges");
        {
            std::ofstream out(path);
            out << "0 1 1\n2 2 1\n";
        }
        try {
            load_edge_list(path.string());
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
        {
            std::ofstream out(path);
            out << "0 1 0\n";
        }
        CHECK_THROWS_AS(load_edge_list(path.string()), DataError);
    }
}

TEST_CASE("labels io") {
    auto path = tmp_file("labels.txt");
    {
        std::ofstream out(path);
        out << "0 2\n3 0\n";
    }
    auto labels = load_labels(path.string(), 5);
    CHECK(labels == std::vector<int>{2, -1, -1, 0, -1});
    CHECK_THROWS_AS(load_labels(path.string(), 2), DataError);
}

TEST_CASE("pgm io") {
    SUBCASE("all-zero 2x2 image") {
        auto path = tmp_file("zero.pgm");
        save_pgm(path.string(), 2, 2, Signal(4, 0.0));
        PgmImage img = load_pgm(path.string());
        CHECK(img.rows == 2);
        CHECK(img.cols == 2);
        CHECK(img.grid.num_nodes() == 4);
        CHECK(img.grid.num_edges() == 4);
        for (double v : img.values) CHECK(v == 0.0);
    }
    SUBCASE("round trip at 8-bit resolution") {
        Signal vals(12);
        for (int i = 0; i < 12; ++i) vals[i] = (i * 17 % 256) / 255.0;
        auto path = tmp_file("round.pgm");
        save_pgm(path.string(), 3, 4, vals);
        PgmImage img = load_pgm(path.string());
        for (int i = 0; i < 12; ++i) CHECK(img.values[i] == doctest::Approx(vals[i]).epsilon(1e-12));
    }
    SUBCASE("rejects non-P5") {
        auto path = tmp_file("bad.pgm");
        {
            std::ofstream out(path);
            out << "P2\n1 1\n255\n0\n";
        }
        CHECK_THROWS_AS(load_pgm(path.string()), DataError);
    }
}

TEST_CASE("signal csv round trip") {
    Signal y = random_signal(9, 3);
    auto path = tmp_file("sig.csv");
    save_signal_csv(path.string(), y);
    Signal z = load_signal_csv(path.string());
    REQUIRE(z.size() == y.size());
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(z[i] == y[i]);
}

TEST_CASE("dense spectrum") {
    SUBCASE("two-node eigenvalues are 0 and 2") {
        Spectrum s = dense_spectrum(two_node());
        CHECK(s.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.eigenvalues[1] == doctest::Approx(2.0));
    }
    SUBCASE("path of three eigenvalues are 0, 1, 3") {
        Spectrum s = dense_spectrum(path_graph(3));
        CHECK(s.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
        CHECK(s.eigenvalues[2] == doctest::Approx(3.0));
    }
    SUBCASE("invariants: lambda_1 ~ 0 and orthonormal U") {
        Graph g = random_connected(40, 0.2, 12);
        Spectrum s = dense_spectrum(g);
        CHECK(std::abs(s.eigenvalues[0]) <= 1e-8 * s.eigenvalues[s.eigenvalues.size() - 1]);
        Eigen::MatrixXd gram = s.U.transpose() * s.U;
        CHECK((gram - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("capability error above the cap") {
        Graph g = grid2d(60, 60);  // 3600 > 3000
        CHECK_THROWS_AS(dense_spectrum(g), CapabilityError);
    }
}

TEST_CASE("lanczos lowest eigenpairs match the dense route") {
    Graph g = random_connected(250, 0.05, 31);
    Spectrum dense = dense_spectrum(g);
    Spectrum low = lowest_eigenpairs(g, 6);
    // below the cap this is the dense route; exercise lanczos directly too
    for (int j = 0; j < 6; ++j) CHECK(low.eigenvalues[j] == doctest::Approx(dense.eigenvalues[j]));

    // force the iterative route through a graph above the cap
    Graph big = grid2d(56, 56);  // 3136 nodes
    Spectrum approx = lowest_eigenpairs(big, 5);
    Eigen::VectorXd exact(5);
    // analytic grid eigenvalues: 4 sin^2(pi a / (2 rows)) + 4 sin^2(pi b / (2 cols))
    std::vector<double> all;
    for (int a = 0; a < 56; ++a)
        for (int b = 0; b < 56; ++b)
            all.push_back(4 * std::pow(std::sin(M_PI * a / (2.0 * 56)), 2) +
                          4 * std::pow(std::sin(M_PI * b / (2.0 * 56)), 2));
    std::sort(all.begin(), all.end());
    for (int j = 0; j < 5; ++j)
        CHECK(approx.eigenvalues[j] == doctest::Approx(all[j]).epsilon(1e-6));
    // Ritz vectors are eigenvectors: check the residual directly
    for (int j = 0; j < 5; ++j) {
        Signal v(approx.U.col(j).data(), approx.U.col(j).data() + big.num_nodes());
        Signal lv = laplacian_apply(big, v);
        double resid = 0.0;
        for (std::int32_t i = 0; i < big.num_nodes(); ++i) {
            const double r = lv[i] - approx.eigenvalues[j] * v[i];
            resid += r * r;
        }
        CHECK(std::sqrt(resid) <= 1e-6 * 2 * big.max_degree_sum());
    }
}

TEST_CASE("bandlimited signal") {
    SUBCASE("k=1 gives the constant vector") {
        Graph g = random_connected(50, 0.2, 3);
        auto sig = bandlimited_signal(g, 1, 2.0, 7);
        const double expect = 1.0 / std::sqrt(50.0);
        for (double v : sig.x) CHECK(std::abs(v) == doctest::Approx(expect).epsilon(1e-8));
    }
    SUBCASE("sigma2 follows (n snr)^(-1)") {
        Graph g = random_connected(100, 0.1, 4);
        auto sig = bandlimited_signal(g, 5, 2.0, 7);
        CHECK(sig.sigma2 == doctest::Approx(0.005));
        double norm = 0.0;
        for (double v : sig.x) norm += v * v;
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("noise energy concentrates at 1/snr") {
        // E||y-x||^2 = n sigma^2 = 1/snr regardless of n; a small graph keeps
        // the 1e4 spectrum builds cheap.
        Graph g = random_connected(30, 0.2, 4);
        double acc = 0.0;
        const int draws = 10000;
        for (int r = 0; r < draws; ++r) {
            auto sig = bandlimited_signal(g, 3, 2.0, 1000 + r);
            double e = 0.0;
            for (std::size_t i = 0; i < sig.x.size(); ++i) {
                const double d = sig.y[i] - sig.x[i];
                e += d * d;
            }
            acc += e;
        }
        acc /= draws;
        CHECK(acc == doctest::Approx(0.5).epsilon(0.05));
    }
}
