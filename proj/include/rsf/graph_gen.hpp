#ifndef RSF_GRAPH_GEN_HPP
#define RSF_GRAPH_GEN_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "rsf/graph.hpp"

namespace rsf {

// Filled in by generators when connectivity forced a repair.
struct GenReport {
    std::int32_t requested_nodes = 0;
    std::int32_t delivered_nodes = 0;
    bool took_largest_component = false;
    int retries = 0;
};

// 4-neighbour grid, row-major node order (r*cols + c), unit weights.
Graph grid2d(std::int32_t rows, std::int32_t cols, bool periodic = false);

// G(n, p) with p = avg_degree / (n-1); largest component if disconnected.
Graph erdos_renyi(std::int32_t n, double avg_degree, std::uint64_t seed, GenReport* rep = nullptr);

// Preferential attachment, attach_m edges per new node.
Graph barabasi_albert(std::int32_t n, std::int32_t attach_m, std::uint64_t seed,
                      GenReport* rep = nullptr);

// Random simple k-regular graph (pairing with restarts); n*k must be even.
Graph k_regular(std::int32_t n, std::int32_t k, std::uint64_t seed, GenReport* rep = nullptr);

// Symmetrized k-nearest-neighbour graph of n uniform points in [0,1)^dim,
// unit weights; both directions added, union kept.
Graph knn_euclidean(std::int32_t n, std::int32_t k, std::int32_t dim, std::uint64_t seed,
                    GenReport* rep = nullptr);

// Textual graph spec for the CLI and the benchmark harness:
//   grid:RxC[:periodic] | er:N:AVGDEG | ba:N:M | kreg:N:K | knn:N:K[:DIM] | file:PATH
struct GraphSpec {
    std::string text;
};
Graph make_graph(const GraphSpec& spec, std::uint64_t seed, GenReport* rep = nullptr);

}  // namespace rsf

#endif
