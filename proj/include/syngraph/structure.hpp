#pragma once

#include "syngraph/graph.hpp"
#include "syngraph/kernels.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace syngraph {

// Per-node structural descriptors over global node ids.
struct StructFeatures {
    static constexpr std::size_t width = 4;

    std::vector<double> degree;     // in + out over all edge types
    std::vector<double> pagerank;   // directed, sums to 1
    std::vector<double> clustering; // undirected projection
    std::vector<double> centrality; // degree / (nodes - 1)

    [[nodiscard]] std::size_t size() const noexcept { return degree.size(); }
    void write_row(std::uint64_t node, std::span<double> out) const;
};

StructFeatures structural_features(const PartiteGraph& g, const PageRankParams& params = {});

struct HopPlot {
    std::vector<double> reachable; // reachable[h - 1] = d(h), h = 1..max_h
    std::uint32_t effective_diameter = 0;
    bool exact = false;
};

// Reachable ordered pairs within h hops on the undirected projection,
// estimated from min(num_sources, N) sources drawn without replacement and
// scaled by N / sources. With num_sources >= N every node is a source and the
// counts are exact.
HopPlot hop_plot(const PartiteGraph& g, std::size_t num_sources, std::size_t max_h, std::uint64_t seed = 0);

// Smallest h with d(h) >= 0.9 d(max_h); 0 when nothing is reachable.
std::uint32_t effective_diameter(std::span<const double> reachable);

} // namespace syngraph
