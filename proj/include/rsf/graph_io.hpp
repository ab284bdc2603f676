#ifndef RSF_GRAPH_IO_HPP
#define RSF_GRAPH_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "rsf/graph.hpp"

namespace rsf {

// Whitespace-separated `u v w` lines, 0-indexed; `u v` lines default w to 1.
// Orientation is dropped and duplicate edges are summed.
Graph load_edge_list(const std::string& path);
void save_edge_list(const Graph& g, const std::string& path);

// `u c` lines; returns per-node class id, -1 where unlabeled. n = max index + 1
// unless a larger n is given.
std::vector<int> load_labels(const std::string& path, std::int32_t n = -1);

struct PgmImage {
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    Graph grid;       // 4-neighbour grid over the pixels, row-major
    Signal values;    // intensities scaled to [0,1]
};

// Binary PGM (P5), 8-bit.
PgmImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, std::int32_t rows, std::int32_t cols, const Signal& values);

// `node,value` header, one row per node, round-trippable float formatting.
void save_signal_csv(const std::string& path, const Signal& values);
void write_signal_csv(std::ostream& out, const Signal& values);
Signal load_signal_csv(const std::string& path);

// Known-values file for interpolation: `node,value` rows over a subset of nodes.
std::vector<std::pair<std::int32_t, double>> load_partial_signal_csv(const std::string& path);

}  // namespace rsf

#endif
