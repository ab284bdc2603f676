#ifndef RSF_GRAPH_HPP
#define RSF_GRAPH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsf/errors.hpp"

namespace rsf {

using Signal = std::vector<double>;

struct Edge {
    std::int32_t u;
    std::int32_t v;
    double w;
};

// Immutable weighted undirected graph in compressed sparse adjacency form.
// Both directions of every edge are stored; degree_sum(i) is the cached sum of
// incident weights (the d[i] of the walk). Safe to share across threads after
// construction.
class Graph {
public:
    Graph() = default;

    // Builds from an undirected edge list. Duplicate edges (either orientation)
    // are summed. Rejects self-loops, non-positive weights and out-of-range
    // endpoints.
    static Graph from_edges(std::int32_t n, std::vector<Edge> edges);

    // Same topology, new per-edge weights given in edge_list() order.
    Graph reweighted(std::span<const double> new_weights) const;

    std::int32_t num_nodes() const { return n_; }
    std::int64_t num_edges() const { return m_; }

    double degree_sum(std::int32_t i) const { return deg_[i]; }
    const std::vector<double>& degree_sums() const { return deg_; }
    double max_degree_sum() const;

    std::int32_t degree(std::int32_t i) const {
        return static_cast<std::int32_t>(offsets_[i + 1] - offsets_[i]);
    }
    std::span<const std::int32_t> neighbors(std::int32_t i) const {
        return {adj_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
    }
    std::span<const double> weights(std::int32_t i) const {
        return {w_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
    }

    // Undirected edges with u < v, in deterministic CSR order. This order fixes
    // the incidence-operator row enumeration.
    std::vector<Edge> edge_list() const;

    bool is_connected() const;
    // Component id per node and component count.
    std::pair<std::vector<std::int32_t>, std::int32_t> components() const;

private:
    std::int32_t n_ = 0;
    std::int64_t m_ = 0;
    std::vector<std::int64_t> offsets_;
    std::vector<std::int32_t> adj_;
    std::vector<double> w_;
    std::vector<double> deg_;
};

// out[i] = degree_sum[i]*z[i] - sum_j w(i,j) z[j]. OpenMP-parallel over nodes.
void laplacian_apply(const Graph& g, std::span<const double> z, std::span<double> out);
Signal laplacian_apply(const Graph& g, const Signal& z);

// Serial reference for the parallel kernel; kept for tests and benchmarks.
void laplacian_apply_serial(const Graph& g, std::span<const double> z, std::span<double> out);

// Per-edge sqrt(w(u,v)) * (z[u] - z[v]) in edge_list() order; the lower index
// carries the positive sign.
std::vector<double> incidence_apply(const Graph& g, const Signal& z);

// z . L z computed edge-wise (never builds L).
double laplacian_quadratic(const Graph& g, std::span<const double> z);

// Induced subgraph on keep[i] != 0, nodes relabelled contiguously in
// increasing old-index order.
struct Subgraph {
    Graph graph;
    std::vector<std::int32_t> to_old;   // new index -> old index
    std::vector<std::int32_t> to_new;   // old index -> new index or -1
};
Subgraph induced_subgraph(const Graph& g, std::span<const std::uint8_t> keep);

// Largest connected component, relabelled contiguously.
Subgraph largest_component(const Graph& g);

}  // namespace rsf

#endif
