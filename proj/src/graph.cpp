#include "rsf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsf {

Graph Graph::from_edges(std::int32_t n, std::vector<Edge> edges) {
    if (n < 0) throw UsageError("graph: negative node count");
    for (auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw DataError("graph: edge endpoint out of range: " + std::to_string(e.u) + " " +
                            std::to_string(e.v));
        if (e.u == e.v) throw DataError("graph: self-loop at node " + std::to_string(e.u));
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw DataError("graph: non-positive weight on edge " + std::to_string(e.u) + "-" +
                            std::to_string(e.v));
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    // Merge duplicates by summing weights.
    std::vector<Edge> merged;
    merged.reserve(edges.size());
    for (const auto& e : edges) {
        if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v)
            merged.back().w += e.w;
        else
            merged.push_back(e);
    }

    Graph g;
    g.n_ = n;
    g.m_ = static_cast<std::int64_t>(merged.size());
    g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : merged) {
        ++g.offsets_[e.u + 1];
        ++g.offsets_[e.v + 1];
    }
    for (std::int32_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adj_.resize(static_cast<std::size_t>(2) * merged.size());
    g.w_.resize(g.adj_.size());
    std::vector<std::int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : merged) {
        g.adj_[cursor[e.u]] = e.v;
        g.w_[cursor[e.u]++] = e.w;
        g.adj_[cursor[e.v]] = e.u;
        g.w_[cursor[e.v]++] = e.w;
    }
    // Neighbor lists are already sorted: the merged edge scan visits (u,v) in
    // lexicographic order, filling u's list ascending; v-side entries arrive in
    // ascending u as well.
    g.deg_.assign(n, 0.0);
    for (std::int32_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (auto w : g.weights(i)) s += w;
        g.deg_[i] = s;
    }
    return g;
}

Graph Graph::reweighted(std::span<const double> new_weights) const {
    auto edges = edge_list();
    if (new_weights.size() != edges.size())
        throw DimensionError("reweighted: weight count does not match edge count");
    for (std::size_t k = 0; k < edges.size(); ++k) edges[k].w = new_weights[k];
    return from_edges(n_, std::move(edges));
}

double Graph::max_degree_sum() const {
    double m = 0.0;
    for (double d : deg_) m = std::max(m, d);
    return m;
}

std::vector<Edge> Graph::edge_list() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (std::int32_t i = 0; i < n_; ++i) {
        auto nb = neighbors(i);
        auto ws = weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (i < nb[k]) out.push_back({i, nb[k], ws[k]});
    }
    return out;
}

std::pair<std::vector<std::int32_t>, std::int32_t> Graph::components() const {
    std::vector<std::int32_t> comp(n_, -1);
    std::vector<std::int32_t> stack;
    std::int32_t count = 0;
    for (std::int32_t s = 0; s < n_; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            std::int32_t u = stack.back();
            stack.pop_back();
            for (auto v : neighbors(u)) {
                if (comp[v] < 0) {
                    comp[v] = count;
                    stack.push_back(v);
                }
            }
        }
        ++count;
    }
    return {std::move(comp), count};
}

bool Graph::is_connected() const {
    if (n_ <= 1) return true;
    return components().second == 1;
}

void laplacian_apply_serial(const Graph& g, std::span<const double> z, std::span<double> out) {
    if (z.size() != static_cast<std::size_t>(g.num_nodes()) || out.size() != z.size())
        throw DimensionError("laplacian_apply: signal length does not match node count");
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        auto nb = g.neighbors(i);
        auto ws = g.weights(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) acc += ws[k] * z[nb[k]];
        out[i] = g.degree_sum(i) * z[i] - acc;
    }
}

void laplacian_apply(const Graph& g, std::span<const double> z, std::span<double> out) {
    if (z.size() != static_cast<std::size_t>(g.num_nodes()) || out.size() != z.size())
        throw DimensionError("laplacian_apply: signal length does not match node count");
    const std::int32_t n = g.num_nodes();
#pragma omp parallel for schedule(static)
    for (std::int32_t i = 0; i < n; ++i) {
        auto nb = g.neighbors(i);
        auto ws = g.weights(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) acc += ws[k] * z[nb[k]];
        out[i] = g.degree_sum(i) * z[i] - acc;
    }
}

Signal laplacian_apply(const Graph& g, const Signal& z) {
    Signal out(z.size());
    laplacian_apply(g, z, out);
    return out;
}

std::vector<double> incidence_apply(const Graph& g, const Signal& z) {
    if (z.size() != static_cast<std::size_t>(g.num_nodes()))
        throw DimensionError("incidence_apply: signal length does not match node count");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(g.num_edges()));
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        auto nb = g.neighbors(i);
        auto ws = g.weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (i < nb[k]) out.push_back(std::sqrt(ws[k]) * (z[i] - z[nb[k]]));
    }
    return out;
}

double laplacian_quadratic(const Graph& g, std::span<const double> z) {
    if (z.size() != static_cast<std::size_t>(g.num_nodes()))
        throw DimensionError("laplacian_quadratic: signal length does not match node count");
    double acc = 0.0;
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        auto nb = g.neighbors(i);
        auto ws = g.weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (i < nb[k]) {
                const double d = z[i] - z[nb[k]];
                acc += ws[k] * d * d;
            }
        }
    }
    return acc;
}

Subgraph induced_subgraph(const Graph& g, std::span<const std::uint8_t> keep) {
    if (keep.size() != static_cast<std::size_t>(g.num_nodes()))
        throw DimensionError("induced_subgraph: mask length does not match node count");
    Subgraph s;
    s.to_new.assign(g.num_nodes(), -1);
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        if (keep[i]) {
            s.to_new[i] = static_cast<std::int32_t>(s.to_old.size());
            s.to_old.push_back(i);
        }
    }
    std::vector<Edge> edges;
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        if (!keep[i]) continue;
        auto nb = g.neighbors(i);
        auto ws = g.weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (i < nb[k] && keep[nb[k]])
                edges.push_back({s.to_new[i], s.to_new[nb[k]], ws[k]});
    }
    s.graph = Graph::from_edges(static_cast<std::int32_t>(s.to_old.size()), std::move(edges));
    return s;
}

Subgraph largest_component(const Graph& g) {
    auto [comp, count] = g.components();
    std::vector<std::int64_t> sizes(count, 0);
    for (auto c : comp) ++sizes[c];
    const auto best = static_cast<std::int32_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<std::uint8_t> keep(g.num_nodes(), 0);
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) keep[i] = comp[i] == best ? 1 : 0;
    return induced_subgraph(g, keep);
}

}  // namespace rsf
