#include "rsf/graph_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "rsf/graph_io.hpp"
#include "rsf/rng.hpp"

namespace rsf {

namespace {

std::uint64_t pair_key(std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

Graph finish_connected(Graph g, std::int32_t requested, GenReport* rep) {
    if (rep) {
        rep->requested_nodes = requested;
        rep->delivered_nodes = g.num_nodes();
        rep->took_largest_component = false;
    }
    if (g.is_connected()) return g;
    auto sub = largest_component(g);
    if (rep) {
        rep->took_largest_component = true;
        rep->delivered_nodes = sub.graph.num_nodes();
    }
    return std::move(sub.graph);
}

}  // namespace

Graph grid2d(std::int32_t rows, std::int32_t cols, bool periodic) {
    if (rows < 1 || cols < 1) throw UsageError("grid2d: dimensions must be positive");
    auto id = [cols](std::int32_t r, std::int32_t c) { return r * cols + c; };
    std::vector<Edge> edges;
    for (std::int32_t r = 0; r < rows; ++r) {
        for (std::int32_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
        }
    }
    if (periodic) {
        // Wrap edges; skipped on length-2 axes where they would duplicate.
        if (cols > 2)
            for (std::int32_t r = 0; r < rows; ++r) edges.push_back({id(r, 0), id(r, cols - 1), 1.0});
        if (rows > 2)
            for (std::int32_t c = 0; c < cols; ++c) edges.push_back({id(0, c), id(rows - 1, c), 1.0});
    }
    return Graph::from_edges(rows * cols, std::move(edges));
}

Graph erdos_renyi(std::int32_t n, double avg_degree, std::uint64_t seed, GenReport* rep) {
    if (n < 2) throw UsageError("erdos_renyi: need at least 2 nodes");
    const double p = avg_degree / static_cast<double>(n - 1);
    if (!(p > 0.0) || p > 1.0) throw UsageError("erdos_renyi: average degree out of range");
    Rng rng(seed, streams::generator);
    std::vector<Edge> edges;
    // Geometric skipping over the linearized upper-triangular pair index.
    const double log1mp = std::log1p(-p);
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::uint64_t idx = 0;
    auto advance = [&]() -> std::uint64_t {
        if (p >= 1.0) return 1;
        const double u = 1.0 - rng.next_double();
        return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / log1mp));
    };
    for (idx = advance() - 1; idx < total; idx += advance()) {
        // Map linear index to (u, v), u < v, row-major over the strict upper triangle.
        const double nd = static_cast<double>(n);
        std::int32_t u = static_cast<std::int32_t>(
            nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(idx)));
        while (static_cast<std::uint64_t>(u + 1) * (2 * n - u - 2) / 2 <= idx) ++u;
        while (u > 0 && static_cast<std::uint64_t>(u) * (2 * n - u - 1) / 2 > idx) --u;
        const std::uint64_t row_start = static_cast<std::uint64_t>(u) * (2 * n - u - 1) / 2;
        const std::int32_t v = static_cast<std::int32_t>(u + 1 + (idx - row_start));
        edges.push_back({u, v, 1.0});
    }
    return finish_connected(Graph::from_edges(n, std::move(edges)), n, rep);
}

Graph barabasi_albert(std::int32_t n, std::int32_t attach_m, std::uint64_t seed, GenReport* rep) {
    if (attach_m < 1 || n <= attach_m) throw UsageError("barabasi_albert: need n > attach_m >= 1");
    Rng rng(seed, streams::generator);
    std::vector<Edge> edges;
    std::vector<std::int32_t> endpoints;  // degree-proportional sampling pool
    // Seed graph: (attach_m+1)-clique.
    const std::int32_t n0 = attach_m + 1;
    for (std::int32_t i = 0; i < n0; ++i) {
        for (std::int32_t j = i + 1; j < n0; ++j) {
            edges.push_back({i, j, 1.0});
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    }
    std::vector<std::int32_t> picked;
    for (std::int32_t v = n0; v < n; ++v) {
        picked.clear();
        while (static_cast<std::int32_t>(picked.size()) < attach_m) {
            const auto t = endpoints[rng.below(endpoints.size())];
            if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
        }
        for (auto t : picked) {
            edges.push_back({t, v, 1.0});
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    if (rep) {
        rep->requested_nodes = n;
        rep->delivered_nodes = n;
        rep->took_largest_component = false;
    }
    return Graph::from_edges(n, std::move(edges));
}

Graph k_regular(std::int32_t n, std::int32_t k, std::uint64_t seed, GenReport* rep) {
    if (k < 1 || k >= n) throw UsageError("k_regular: need 1 <= k < n");
    if ((static_cast<std::int64_t>(n) * k) % 2 != 0)
        throw UsageError("k_regular: n*k must be even");
    const int max_restarts = 200;
    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        Rng rng(seed, streams::generator + attempt);
        std::vector<std::int32_t> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * k);
        for (std::int32_t i = 0; i < n; ++i)
            for (std::int32_t j = 0; j < k; ++j) stubs.push_back(i);
        std::unordered_set<std::uint64_t> used;
        std::vector<Edge> edges;
        bool stuck = false;
        while (!stubs.empty()) {
            // Pair random stubs, rejecting loops and duplicates; declare the
            // attempt stuck after too many consecutive rejections.
            long rejects = 0;
            const long reject_cap = 200 + 50 * static_cast<long>(stubs.size());
            bool paired = false;
            while (!paired) {
                const auto ia = rng.below(stubs.size());
                auto ib = rng.below(stubs.size());
                while (ib == ia) ib = rng.below(stubs.size());
                const auto a = stubs[ia];
                const auto b = stubs[ib];
                if (a != b && !used.count(pair_key(a, b))) {
                    used.insert(pair_key(a, b));
                    edges.push_back({a, b, 1.0});
                    const auto hi = std::max(ia, ib);
                    const auto lo = std::min(ia, ib);
                    stubs[hi] = stubs.back();
                    stubs.pop_back();
                    stubs[lo] = stubs.back();
                    stubs.pop_back();
                    paired = true;
                } else if (++rejects > reject_cap) {
                    stuck = true;
                    break;
                }
            }
            if (stuck) break;
        }
        if (stuck) continue;
        Graph g = Graph::from_edges(n, std::move(edges));
        if (g.is_connected()) {
            if (rep) {
                rep->requested_nodes = n;
                rep->delivered_nodes = n;
                rep->retries = attempt;
            }
            return g;
        }
    }
    throw NumericError("k_regular: failed to build a connected simple graph");
}

Graph knn_euclidean(std::int32_t n, std::int32_t k, std::int32_t dim, std::uint64_t seed,
                    GenReport* rep) {
    if (n < 2 || k < 1 || k >= n || dim < 1) throw UsageError("knn_euclidean: invalid parameters");
    Rng rng(seed, streams::generator);
    std::vector<double> pts(static_cast<std::size_t>(n) * dim);
    for (auto& x : pts) x = rng.next_double();
    std::vector<Edge> edges;
    std::vector<std::pair<double, std::int32_t>> dist(n);
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (std::int32_t a = 0; a < dim; ++a) {
                const double d = pts[static_cast<std::size_t>(i) * dim + a] -
                                 pts[static_cast<std::size_t>(j) * dim + a];
                d2 += d * d;
            }
            dist[j] = {d2, j};
        }
        dist[i].first = std::numeric_limits<double>::infinity();
        std::nth_element(dist.begin(), dist.begin() + k, dist.end());
        for (std::int32_t t = 0; t < k; ++t) edges.push_back({i, dist[t].second, 1.0});
    }
    // Union of both directions; duplicate (i,j)/(j,i) pairs collapse to one
    // unit-weight edge rather than summing.
    std::unordered_set<std::uint64_t> seen;
    std::vector<Edge> uniq;
    uniq.reserve(edges.size());
    for (const auto& e : edges)
        if (seen.insert(pair_key(e.u, e.v)).second) uniq.push_back(e);
    return finish_connected(Graph::from_edges(n, std::move(uniq)), n, rep);
}

Graph make_graph(const GraphSpec& spec, std::uint64_t seed, GenReport* rep) {
    const std::string& s = spec.text;
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto next = s.find(':', pos);
        parts.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    auto want = [&](std::size_t lo, std::size_t hi) {
        if (parts.size() < lo + 1 || parts.size() > hi + 1)
            throw UsageError("graph spec: wrong number of fields in '" + s + "'");
    };
    auto num = [&](std::size_t i) -> long {
        try {
            return std::stol(parts.at(i));
        } catch (...) {
            throw UsageError("graph spec: bad number in '" + s + "'");
        }
    };
    const std::string kind = parts.empty() ? "" : parts[0];
    if (kind == "grid") {
        want(1, 2);
        const auto x = parts[1].find('x');
        if (x == std::string::npos) throw UsageError("graph spec: grid wants RxC");
        const long r = std::stol(parts[1].substr(0, x));
        const long c = std::stol(parts[1].substr(x + 1));
        bool periodic = parts.size() > 2 && parts[2] == "periodic";
        if (parts.size() > 2 && !periodic) throw UsageError("graph spec: unknown grid option");
        Graph g = grid2d(static_cast<std::int32_t>(r), static_cast<std::int32_t>(c), periodic);
        if (rep) {
            rep->requested_nodes = g.num_nodes();
            rep->delivered_nodes = g.num_nodes();
        }
        return g;
    }
    if (kind == "er") {
        want(2, 2);
        return erdos_renyi(static_cast<std::int32_t>(num(1)), std::stod(parts[2]), seed, rep);
    }
    if (kind == "ba") {
        want(2, 2);
        return barabasi_albert(static_cast<std::int32_t>(num(1)),
                               static_cast<std::int32_t>(num(2)), seed, rep);
    }
    if (kind == "kreg") {
        want(2, 2);
        return k_regular(static_cast<std::int32_t>(num(1)), static_cast<std::int32_t>(num(2)),
                         seed, rep);
    }
    if (kind == "knn") {
        want(2, 3);
        const std::int32_t dim = parts.size() > 3 ? static_cast<std::int32_t>(num(3)) : 3;
        return knn_euclidean(static_cast<std::int32_t>(num(1)), static_cast<std::int32_t>(num(2)),
                             dim, seed, rep);
    }
    if (kind == "file") {
        want(1, 1);
        Graph g = load_edge_list(parts[1]);
        if (rep) {
            rep->requested_nodes = g.num_nodes();
            rep->delivered_nodes = g.num_nodes();
        }
        return g;
    }
    throw UsageError("graph spec: unknown kind '" + kind + "'");
}

}  // namespace rsf
