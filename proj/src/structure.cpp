#include "syngraph/structure.hpp"

#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"

#include <algorithm>
#include <numeric>

namespace syngraph {

void StructFeatures::write_row(std::uint64_t node, std::span<double> out) const {
    out[0] = degree[node];
    out[1] = pagerank[node];
    out[2] = clustering[node];
    out[3] = centrality[node];
}

StructFeatures structural_features(const PartiteGraph& g, const PageRankParams& params) {
    const std::uint64_t n = g.total_nodes();
    if (n == 0) {
        throw DataError("structural features need a non-empty graph");
    }
    StructFeatures f;
    const auto degrees = total_degrees(g);
    f.degree.assign(degrees.begin(), degrees.end());
    f.centrality.resize(n);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 0.0;
    for (std::uint64_t v = 0; v < n; ++v) {
        f.centrality[v] = denom > 0.0 ? f.degree[v] / denom : 0.0;
    }
    f.pagerank = parallel::pagerank(pull_graph(g), params);
    f.clustering = parallel::clustering(undirected_csr(g));
    return f;
}

std::uint32_t effective_diameter(std::span<const double> reachable) {
    if (reachable.empty() || reachable.back() <= 0.0) {
        return 0;
    }
    const double target = 0.9 * reachable.back();
    for (std::size_t h = 0; h < reachable.size(); ++h) {
        if (reachable[h] >= target) {
            return static_cast<std::uint32_t>(h + 1);
        }
    }
    return static_cast<std::uint32_t>(reachable.size());
}

HopPlot hop_plot(const PartiteGraph& g, std::size_t num_sources, std::size_t max_h, std::uint64_t seed) {
    if (num_sources == 0) {
        throw ConfigError("hop plot needs at least one source");
    }
    const Csr csr = undirected_csr(g);
    const std::size_t n = csr.num_nodes();
    std::vector<std::uint64_t> sources(n);
    std::iota(sources.begin(), sources.end(), std::uint64_t{0});
    HopPlot plot;
    plot.exact = num_sources >= n;
    if (!plot.exact) {
        // Partial Fisher-Yates: the first num_sources entries are a uniform sample.
        auto engine = make_stream(seed, 0, 0, 0x40b);
        for (std::size_t i = 0; i < num_sources; ++i) {
            std::swap(sources[i], sources[i + uniform_below(engine, n - i)]);
        }
        sources.resize(num_sources);
        std::sort(sources.begin(), sources.end());
    }
    const auto counts = parallel::reach_counts(csr, sources, max_h);
    const double scale = sources.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(sources.size());
    plot.reachable.resize(max_h);
    for (std::size_t h = 0; h < max_h; ++h) {
        plot.reachable[h] = static_cast<double>(counts[h]) * scale;
    }
    plot.effective_diameter = effective_diameter(plot.reachable);
    return plot;
}

} // namespace syngraph
