#pragma once

#include "syngraph/graph.hpp"
#include "syngraph/rng.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace syngraph::fixtures {

// Single-partite graph with one edge type over `n` nodes.
inline PartiteGraph homogeneous(std::uint64_t n, std::vector<Edge> edges) {
    PartiteGraph g;
    g.partites = {{"v", n}};
    g.edge_types = {{"e", 0, 0}};
    g.edges = {std::move(edges)};
    g.node_features.resize(1);
    g.edge_features.resize(1);
    return g;
}

inline PartiteGraph bipartite(std::uint64_t rows, std::uint64_t cols, std::vector<Edge> edges) {
    PartiteGraph g;
    g.partites = {{"a", rows}, {"b", cols}};
    g.edge_types = {{"e", 0, 1}};
    g.edges = {std::move(edges)};
    g.node_features.resize(2);
    g.edge_features.resize(1);
    return g;
}

inline std::vector<Edge> random_edges(std::uint64_t rows, std::uint64_t cols, std::size_t count, std::uint64_t seed) {
    Engine engine = make_stream(seed);
    std::set<Edge> out;
    while (out.size() < count) {
        out.insert({uniform_below(engine, rows), uniform_below(engine, cols)});
    }
    return {out.begin(), out.end()};
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("syngraph_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace syngraph::fixtures
