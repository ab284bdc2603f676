#include "rsf/graph_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rsf {

namespace {

std::ifstream open_in(const std::string& path, std::ios_base::openmode mode = std::ios_base::in) {
    std::ifstream in(path, mode);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path, std::ios_base::openmode mode = std::ios_base::out) {
    std::ofstream out(path, mode);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& msg) {
    throw DataError(path + ":" + std::to_string(line) + ": " + msg);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Graph load_edge_list(const std::string& path) {
    auto in = open_in(path);
    std::vector<Edge> edges;
    std::int32_t max_node = -1;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        long long u, v;
        double w = 1.0;
        if (!(ls >> u)) continue;  // blank line
        if (!(ls >> v)) parse_fail(path, lineno, "expected `u v [w]`");
        ls >> w;
        if (u < 0 || v < 0) parse_fail(path, lineno, "negative node index");
        if (u == v) parse_fail(path, lineno, "self-loop");
        if (!(w > 0.0)) parse_fail(path, lineno, "non-positive weight");
        edges.push_back({static_cast<std::int32_t>(u), static_cast<std::int32_t>(v), w});
        max_node = std::max(max_node, static_cast<std::int32_t>(std::max(u, v)));
    }
    if (max_node < 0) throw DataError(path + ": no edges");
    return Graph::from_edges(max_node + 1, std::move(edges));
}

void save_edge_list(const Graph& g, const std::string& path) {
    auto out = open_out(path);
    for (const auto& e : g.edge_list())
        out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
}

std::vector<int> load_labels(const std::string& path, std::int32_t n) {
    auto in = open_in(path);
    std::vector<std::pair<std::int32_t, int>> entries;
    std::int32_t max_node = -1;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        long long u;
        long c;
        if (!(ls >> u)) continue;
        if (!(ls >> c)) parse_fail(path, lineno, "expected `u c`");
        if (u < 0 || c < 0) parse_fail(path, lineno, "negative node or class index");
        entries.emplace_back(static_cast<std::int32_t>(u), static_cast<int>(c));
        max_node = std::max(max_node, static_cast<std::int32_t>(u));
    }
    const std::int32_t size = n >= 0 ? n : max_node + 1;
    if (max_node >= size) throw DataError(path + ": node index exceeds graph size");
    std::vector<int> labels(size, -1);
    for (auto [u, c] : entries) labels[u] = c;
    return labels;
}

PgmImage load_pgm(const std::string& path) {
    auto in = open_in(path, std::ios_base::in | std::ios_base::binary);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw DataError(path + ": not a binary PGM (P5)");
    auto next_token = [&]() -> long {
        // Skip whitespace and '#' comments between header fields.
        while (true) {
            const int c = in.peek();
            if (c == '#') {
                std::string skip;
                std::getline(in, skip);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v;
        if (!(in >> v)) throw DataError(path + ": truncated PGM header");
        return v;
    };
    const long cols = next_token();
    const long rows = next_token();
    const long maxval = next_token();
    if (cols <= 0 || rows <= 0) throw DataError(path + ": bad PGM dimensions");
    if (maxval <= 0 || maxval > 255) throw DataError(path + ": only 8-bit PGM supported");
    in.get();  // single whitespace after maxval
    PgmImage img;
    img.rows = static_cast<std::int32_t>(rows);
    img.cols = static_cast<std::int32_t>(cols);
    std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw DataError(path + ": truncated PGM pixel data");
    img.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.values[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
    img.grid = [&] {
        // Local include-free duplicate of grid2d would be worse; build inline.
        std::vector<Edge> edges;
        auto id = [cols](long r, long c) {
            return static_cast<std::int32_t>(r * cols + c);
        };
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
                if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
            }
        return Graph::from_edges(static_cast<std::int32_t>(rows * cols), std::move(edges));
    }();
    return img;
}

void save_pgm(const std::string& path, std::int32_t rows, std::int32_t cols,
              const Signal& values) {
    if (values.size() != static_cast<std::size_t>(rows) * cols)
        throw DimensionError("save_pgm: value count does not match dimensions");
    auto out = open_out(path, std::ios_base::out | std::ios_base::binary);
    out << "P5\n" << cols << ' ' << rows << "\n255\n";
    std::vector<unsigned char> raw(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = std::clamp(values[i], 0.0, 1.0);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_signal_csv(std::ostream& out, const Signal& values) {
    out << "node,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << format_double(values[i]) << '\n';
}

void save_signal_csv(const std::string& path, const Signal& values) {
    auto out = open_out(path);
    write_signal_csv(out, values);
}

Signal load_signal_csv(const std::string& path) {
    Signal out;
    for (auto [node, value] : load_partial_signal_csv(path)) {
        if (static_cast<std::size_t>(node) != out.size())
            throw DataError(path + ": signal rows must cover nodes 0..n-1 in order");
        out.push_back(value);
    }
    return out;
}

std::vector<std::pair<std::int32_t, double>> load_partial_signal_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    std::vector<std::pair<std::int32_t, double>> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("node", 0) == 0) continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos) parse_fail(path, lineno, "expected `node,value`");
        try {
            const long node = std::stol(line.substr(0, comma));
            const double value = std::stod(line.substr(comma + 1));
            if (node < 0) parse_fail(path, lineno, "negative node index");
            out.emplace_back(static_cast<std::int32_t>(node), value);
        } catch (const DataError&) {
            throw;
        } catch (...) {
            parse_fail(path, lineno, "bad number");
        }
    }
    return out;
}

}  // namespace rsf
