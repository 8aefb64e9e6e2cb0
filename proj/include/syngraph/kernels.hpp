#pragma once

// Data-parallel graph kernels. Every kernel exists twice: `serial::` is the
// plain reference used by the tests, `parallel::` is the OpenMP version used
// by the library. Both return bit-identical results for the same input.

#include "syngraph/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace syngraph {

// Compressed adjacency over global node ids.
struct Csr {
    std::vector<std::uint64_t> offsets; // size nodes + 1
    std::vector<std::uint64_t> targets;

    [[nodiscard]] std::size_t num_nodes() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    [[nodiscard]] std::span<const std::uint64_t> neighbors(std::size_t v) const {
        return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
    }
};

// Simple undirected projection: both directions, no self loops, no repeats,
// neighbor lists sorted.
Csr undirected_csr(const PartiteGraph& g);

// In-neighbors over all edge types (pull form), plus out-degree per node.
struct PullGraph {
    Csr in;
    std::vector<std::uint64_t> out_degree;
};
PullGraph pull_graph(const PartiteGraph& g);

struct PageRankParams {
    double damping = 0.85;
    double tolerance = 1e-8; // L1 change between iterations
    int max_iterations = 200;
};

namespace serial {
std::vector<double> pagerank(const PullGraph& g, const PageRankParams& params = {});
// reach[h - 1] = ordered pairs (source, v != source) with dist <= h, summed
// over the given sources, for h = 1..max_h.
std::vector<std::uint64_t> reach_counts(const Csr& g, std::span<const std::uint64_t> sources, std::size_t max_h);
std::vector<double> clustering(const Csr& g);
} // namespace serial

namespace parallel {
std::vector<double> pagerank(const PullGraph& g, const PageRankParams& params = {});
std::vector<std::uint64_t> reach_counts(const Csr& g, std::span<const std::uint64_t> sources, std::size_t max_h);
std::vector<double> clustering(const Csr& g);
} // namespace parallel

} // namespace syngraph
