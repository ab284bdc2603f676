#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rsf/dense_oracle.hpp"
#include "rsf/forest.hpp"
#include "support/forest_enum.hpp"
#include "support/test_graphs.hpp"

using namespace rsf;
using namespace rsf::testing;

namespace {

void check_forest_invariants(const Graph& g, const Forest& f, const DiagQ& q) {
    const std::int32_t n = g.num_nodes();
    REQUIRE(f.roots.size() >= 1);
    for (std::int32_t i = 0; i < n; ++i) {
        // next-chains terminate at a root within n steps
        std::int32_t u = i;
        int steps = 0;
        while (f.next[u] != kNoNext) {
            u = f.next[u];
            REQUIRE(++steps <= n);
        }
        CHECK(f.root_of[i] == u);
        CHECK(f.next[f.root_of[i]] == kNoNext);
        CHECK(f.root_of[f.root_of[i]] == f.root_of[i]);
        CHECK(f.tree_id[i] == f.tree_id[f.root_of[i]]);
        if (f.next[i] != kNoNext) {
            // edges of the forest exist in the graph
            bool found = false;
            auto nb = g.neighbors(i);
            for (auto v : nb) found = found || v == f.next[i];
            CHECK(found);
        }
    }
    for (std::size_t t = 0; t < f.roots.size(); ++t) {
        CHECK(f.next[f.roots[t]] == kNoNext);
        CHECK(f.tree_id[f.roots[t]] == static_cast<std::int32_t>(t));
    }
    std::vector<double> qmass(f.roots.size(), 0.0);
    for (std::int32_t i = 0; i < n; ++i) qmass[f.tree_id[i]] += q[i];
    for (std::size_t t = 0; t < qmass.size(); ++t)
        CHECK(f.tree_qmass[t] == doctest::Approx(qmass[t]).epsilon(1e-12));
}

}  // namespace

TEST_CASE("DiagQ validation") {
    CHECK_THROWS_AS(DiagQ::scalar(3, 0.0), UsageError);
    CHECK_THROWS_AS(DiagQ::scalar(3, -1.0), UsageError);
    CHECK_THROWS_AS(DiagQ::per_node({0.0, 0.0}), UsageError);
    // zero-q component unreachable from the absorbing node
    Graph g = Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    CHECK_THROWS_AS(DiagQ::per_node({1.0, 1.0, 0.0, 0.0}).validate_for(g), UsageError);
    CHECK_NOTHROW(DiagQ::per_node({1.0, 0.0, 1.0, 0.0}).validate_for(g));
}

TEST_CASE("scalar and per-node q of equal value sample identical forests") {
    Graph g = random_connected(20, 0.25, 5);
    Rng r1(11, 0), r2(11, 0);
    Forest a = sample_forest(g, DiagQ::scalar(20, 0.7), r1);
    Forest b = sample_forest(g, DiagQ::per_node(std::vector<double>(20, 0.7)), r2);
    CHECK(a.next == b.next);
    CHECK(a.walk_steps == b.walk_steps);
}

TEST_CASE("same seed gives identical forests") {
    Graph g = random_connected(40, 0.15, 9);
    Rng r1(123, 4), r2(123, 4);
    Forest a = sample_forest(g, DiagQ::scalar(40, 1.3), r1);
    Forest b = sample_forest(g, DiagQ::scalar(40, 1.3), r2);
    CHECK(a.next == b.next);
}

TEST_CASE("forest invariants hold over fuzzed graphs") {
    std::int64_t samples = 0;
    for (std::uint64_t s = 0; s < 25; ++s) {
        const std::int32_t n = 5 + static_cast<std::int32_t>((s * 37) % 96);
        Graph g = random_connected(n, 0.15, s);
        DiagQ q = s % 2 == 0 ? DiagQ::scalar(n, 0.1 + 0.3 * (s % 5))
                             : DiagQ::per_node(random_abs_q(n, s));
        Rng rng(s, 77);
        for (int rep = 0; rep < 400; ++rep) {
            Forest f = sample_forest(g, q, rng);
            ++samples;
            if (rep % 50 == 0) check_forest_invariants(g, f, q);
        }
    }
    CHECK(samples == 25 * 400);
}

TEST_CASE("extreme q behaviour") {
    Graph g = two_node();
    SUBCASE("huge q makes every node a root") {
        Rng rng(5, 0);
        Forest f = sample_forest(g, DiagQ::scalar(2, 1e12), rng);
        CHECK(f.roots.size() == 2);
    }
    SUBCASE("zero q at node 0 never roots it") {
        for (std::uint64_t s = 0; s < 200; ++s) {
            Rng rng(s, 1);
            Forest f = sample_forest(g, DiagQ::per_node({0.0, 1.0}), rng);
            REQUIRE(f.roots.size() == 1);
            CHECK(f.roots[0] == 1);
            CHECK(f.next[0] == 1);
        }
    }
}

TEST_CASE("step budget aborts pathological walks") {
    Graph g = random_connected(50, 0.2, 3);
    Rng rng(1, 0);
    CHECK_THROWS_AS(sample_forest(g, DiagQ::scalar(50, 1e-9), rng, 10), NumericError);
}

TEST_CASE("two-node forest distribution is uniform over the three outcomes") {
    Graph g = two_node();
    DiagQ q = DiagQ::scalar(2, 1.0);
    std::map<std::vector<std::int32_t>, int> counts;
    const int N = 100000;
    ForestWorkspace ws;
    for (int k = 0; k < N; ++k) {
        Rng rng(2024, static_cast<std::uint64_t>(k));
        sample_forest_into(g, q, rng, ws);
        counts[ws.next] += 1;
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [key, c] : counts) {
        const double freq = static_cast<double>(c) / N;
        // exact probability 1/3, 4-sigma band
        CHECK(std::abs(freq - 1.0 / 3.0) <= 4.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / N));
    }
}

TEST_CASE("enumeration oracle matches the matrix-forest theorem") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const std::int32_t n = 3 + static_cast<std::int32_t>(s % 2);
        Graph g = random_connected(n, 0.8, 40 + s);
        DiagQ q = DiagQ::per_node(random_abs_q(n, s + 3));
        auto enumeration = enumerate_rooted_forests(g, q);
        Eigen::MatrixXd A = dense_laplacian(g);
        for (std::int32_t i = 0; i < n; ++i) A(i, i) += q[i];
        CHECK(enumeration.total_weight == doctest::Approx(A.determinant()).epsilon(1e-9));
    }
}

TEST_CASE("sampled frequencies match enumerated probabilities on a weighted 4-cycle") {
    Graph g = Graph::from_edges(4, {{0, 1, 0.7}, {1, 2, 1.4}, {2, 3, 0.9}, {3, 0, 1.1}});
    DiagQ q = DiagQ::per_node({0.5, 1.0, 1.5, 0.8});
    auto enumeration = enumerate_rooted_forests(g, q);
    std::map<std::vector<std::int32_t>, int> counts;
    const int N = 200000;
    ForestWorkspace ws;
    for (int k = 0; k < N; ++k) {
        Rng rng(7, static_cast<std::uint64_t>(k));
        sample_forest_into(g, q, rng, ws);
        counts[ws.next] += 1;
    }
    for (const auto& [next, c] : counts)
        REQUIRE(enumeration.index.count(next) == 1);  // only legal outcomes
    int violations = 0;
    for (const auto& out : enumeration.outcomes) {
        const auto it = counts.find(out.next);
        const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / N;
        const double se = std::sqrt(out.prob * (1.0 - out.prob) / N);
        if (std::abs(freq - out.prob) > 4.0 * se) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("conditional root distribution within a fixed partition follows q") {
    // triangle, condition on the partition {{0,1},{2}}: within the tree {0,1}
    // the root is 0 with probability q0/(q0+q1) (uniform when q is constant)
    Graph g = triangle(1.0, 1.0, 1.0);
    auto run = [&](const DiagQ& q, double expect_root0) {
        long in_partition = 0, root0 = 0;
        ForestWorkspace ws;
        for (int k = 0; k < 400000; ++k) {
            Rng rng(99, static_cast<std::uint64_t>(k));
            sample_forest_into(g, q, rng, ws);
            // partition check: nodes 0,1 in one tree, node 2 alone
            if (ws.tree_id[0] == ws.tree_id[1] && ws.tree_id[2] != ws.tree_id[0]) {
                ++in_partition;
                if (ws.root_of[0] == 0) ++root0;
            }
        }
        REQUIRE(in_partition > 1000);
        const double freq = static_cast<double>(root0) / in_partition;
        const double se = std::sqrt(expect_root0 * (1 - expect_root0) / in_partition);
        CHECK(std::abs(freq - expect_root0) <= 4.0 * se);
    };
    SUBCASE("uniform q, Eq. (9): uniform root within the subset") {
        run(DiagQ::scalar(3, 1.0), 0.5);
    }
    SUBCASE("weighted q, Eq. (11): root proportional to q") {
        run(DiagQ::per_node({2.0, 1.0, 0.7}), 2.0 / 3.0);
    }
}

TEST_CASE("expected root count oracle") {
    SUBCASE("two-node mean is 4/3 by three routes") {
        Graph g = two_node();
        DiagQ q = DiagQ::scalar(2, 1.0);
        DenseOracle oracle = DenseOracle::build(g, q, true);
        auto [mean, var] = expected_roots_oracle(oracle);
        CHECK(mean == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
        auto [mean_s, var_s] = expected_roots_spectral(*oracle.spectrum, 1.0);
        CHECK(mean_s == doctest::Approx(mean).epsilon(1e-10));
        CHECK(var_s == doctest::Approx(var).epsilon(1e-10));
        // enumeration route
        auto enumeration = enumerate_rooted_forests(g, q);
        double mean_e = 0.0;
        for (const auto& out : enumeration.outcomes) mean_e += out.prob * out.num_roots;
        CHECK(mean_e == doctest::Approx(mean).epsilon(1e-10));
    }
    SUBCASE("limits") {
        Graph g = random_connected(12, 0.3, 2);
        auto [mean_hi, var_hi] =
            expected_roots_oracle(DenseOracle::build(g, DiagQ::scalar(12, 1e12)));
        CHECK(mean_hi == doctest::Approx(12.0).epsilon(1e-6));
        auto [mean_lo, var_lo] =
            expected_roots_oracle(DenseOracle::build(g, DiagQ::scalar(12, 1e-10)));
        CHECK(mean_lo == doctest::Approx(1.0).epsilon(1e-4));
        (void)var_hi;
        (void)var_lo;
    }
}

TEST_CASE("walk cost oracle") {
    SUBCASE("two-node value 8/3 and empirical match") {
        Graph g = two_node();
        DiagQ q = DiagQ::scalar(2, 1.0);
        DenseOracle oracle = DenseOracle::build(g, q);
        const double cost = walk_cost_oracle(g, q, oracle);
        CHECK(cost == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
        ForestWorkspace ws;
        double mean = 0.0;
        const int N = 100000;
        for (int k = 0; k < N; ++k) {
            Rng rng(3, static_cast<std::uint64_t>(k));
            sample_forest_into(g, q, rng, ws);
            mean += static_cast<double>(ws.walk_steps) / N;
        }
        CHECK(mean == doctest::Approx(cost).epsilon(0.02));
    }
    SUBCASE("q to infinity tends to n") {
        Graph g = random_connected(9, 0.4, 6);
        DiagQ q = DiagQ::scalar(9, 1e12);
        CHECK(walk_cost_oracle(g, q, DenseOracle::build(g, q)) == doctest::Approx(9.0).epsilon(1e-6));
    }
    SUBCASE("upper bound n + 2|E|/q for scalar q") {
        for (double qv : {0.3, 1.0, 4.0}) {
            Graph g = random_connected(20, 0.2, 8);
            DiagQ q = DiagQ::scalar(20, qv);
            const double cost = walk_cost_oracle(g, q, DenseOracle::build(g, q));
            CHECK(cost <= 20 + 2.0 * static_cast<double>(g.num_edges()) / qv + 1e-9);
        }
    }
}

TEST_CASE("root marginal frequencies converge to K") {
    Graph g = two_node();
    DiagQ q = DiagQ::scalar(2, 1.0);
    Eigen::MatrixXd freq = root_marginal_empirical(g, q, 200000, 17);
    // K = (1/3) [[2,1],[1,2]]
    CHECK(freq(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(freq(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(freq(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    // rows sum to one exactly per sample
    CHECK(freq.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(freq.row(1).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ensemble accumulates exact running statistics") {
    Graph g = random_connected(15, 0.3, 21);
    DiagQ q = DiagQ::scalar(15, 0.8);
    Signal y = random_signal(15, 5);

    SUBCASE("serial vs parallel partition") {
        auto serial = build_ensemble_serial(g, q, y.data(), 1, Estimator::bar, 501, 3);
        auto parallel = build_ensemble(g, q, y.data(), 1, Estimator::bar, 501, 3, 4);
        REQUIRE(parallel.count() == serial.count());
        CHECK(parallel.root_count_samples() == serial.root_count_samples());
        for (std::int32_t i = 0; i < 15; ++i) {
            CHECK(parallel.mean(0)[i] == doctest::Approx(serial.mean(0)[i]).epsilon(1e-10));
            CHECK(parallel.diag_bar()[i] == doctest::Approx(serial.diag_bar()[i]).epsilon(1e-10));
        }
        CHECK(parallel.mean_walk_steps() ==
              doctest::Approx(serial.mean_walk_steps()).epsilon(1e-10));
    }

    SUBCASE("merge equals sequential processing") {
        auto all = build_ensemble_serial(g, q, y.data(), 1, Estimator::tilde, 400, 5);
        auto first = build_ensemble_serial(g, q, y.data(), 1, Estimator::tilde, 150, 5, 0);
        auto second = build_ensemble_serial(g, q, y.data(), 1, Estimator::tilde, 250, 5, 150);
        first.merge(second);
        REQUIRE(first.count() == all.count());
        CHECK(first.root_count_samples() == all.root_count_samples());
        for (std::int32_t i = 0; i < 15; ++i) {
            CHECK(first.mean(0)[i] == doctest::Approx(all.mean(0)[i]).epsilon(1e-10));
            CHECK(first.variance_signal(0)[i] ==
                  doctest::Approx(all.variance_signal(0)[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("forest csv dump") {
    Graph g = path_graph(3);
    Rng rng(1, 0);
    Forest f = sample_forest(g, DiagQ::scalar(3, 1.0), rng);
    std::ostringstream out;
    write_forest_csv(out, f);
    const std::string text = out.str();
    CHECK(text.rfind("node,next,root,tree_id\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
