#include "syngraph/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>

namespace syngraph {

Csr undirected_csr(const PartiteGraph& g) {
    const std::size_t n = g.total_nodes();
    std::vector<std::uint64_t> degree(n + 1, 0);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto so = g.offset(g.edge_types[t].src_partite);
        const auto d_o = g.offset(g.edge_types[t].dst_partite);
        for (const auto& e : g.edges[t]) {
            if (so + e.src != d_o + e.dst) {
                ++degree[so + e.src];
                ++degree[d_o + e.dst];
            }
        }
    }
    Csr csr;
    csr.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        csr.offsets[v + 1] = csr.offsets[v] + degree[v];
    }
    csr.targets.resize(csr.offsets[n]);
    std::vector<std::uint64_t> fill(csr.offsets.begin(), csr.offsets.end() - 1);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto so = g.offset(g.edge_types[t].src_partite);
        const auto d_o = g.offset(g.edge_types[t].dst_partite);
        for (const auto& e : g.edges[t]) {
            const auto u = so + e.src;
            const auto v = d_o + e.dst;
            if (u != v) {
                csr.targets[fill[u]++] = v;
                csr.targets[fill[v]++] = u;
            }
        }
    }
    // Sort and drop reciprocal duplicates, then compact.
    std::vector<std::uint64_t> new_offsets(n + 1, 0);
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v) {
        auto first = csr.targets.begin() + static_cast<std::ptrdiff_t>(csr.offsets[v]);
        auto last = csr.targets.begin() + static_cast<std::ptrdiff_t>(csr.offsets[v + 1]);
        std::sort(first, last);
        new_offsets[v + 1] = static_cast<std::uint64_t>(std::unique(first, last) - first);
    }
    for (std::size_t v = 0; v < n; ++v) {
        new_offsets[v + 1] += new_offsets[v];
    }
    std::vector<std::uint64_t> targets(new_offsets[n]);
    for (std::size_t v = 0; v < n; ++v) {
        std::copy_n(csr.targets.begin() + static_cast<std::ptrdiff_t>(csr.offsets[v]),
                    new_offsets[v + 1] - new_offsets[v],
                    targets.begin() + static_cast<std::ptrdiff_t>(new_offsets[v]));
    }
    csr.offsets = std::move(new_offsets);
    csr.targets = std::move(targets);
    return csr;
}

PullGraph pull_graph(const PartiteGraph& g) {
    const std::size_t n = g.total_nodes();
    PullGraph pg;
    pg.out_degree.assign(n, 0);
    pg.in.offsets.assign(n + 1, 0);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto so = g.offset(g.edge_types[t].src_partite);
        const auto d_o = g.offset(g.edge_types[t].dst_partite);
        for (const auto& e : g.edges[t]) {
            ++pg.out_degree[so + e.src];
            ++pg.in.offsets[d_o + e.dst + 1];
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        pg.in.offsets[v + 1] += pg.in.offsets[v];
    }
    pg.in.targets.resize(pg.in.offsets[n]);
    std::vector<std::uint64_t> fill(pg.in.offsets.begin(), pg.in.offsets.end() - 1);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto so = g.offset(g.edge_types[t].src_partite);
        const auto d_o = g.offset(g.edge_types[t].dst_partite);
        for (const auto& e : g.edges[t]) {
            pg.in.targets[fill[d_o + e.dst]++] = so + e.src;
        }
    }
    return pg;
}

namespace {

// Sums in fixed-size blocks so that the result does not depend on how many
// threads took part.
constexpr std::size_t kBlock = 4096;

double blocked_sum(const std::vector<double>& partial) {
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

void normalize_to_one(std::vector<double>& rank) {
    double total = 0.0;
    for (double v : rank) {
        total += v;
    }
    if (total > 0.0) {
        for (double& v : rank) {
            v /= total;
        }
    }
}

} // namespace

namespace serial {

std::vector<double> pagerank(const PullGraph& g, const PageRankParams& params) {
    const std::size_t n = g.in.num_nodes();
    if (n == 0) {
        return {};
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n);
    std::vector<double> next(n);
    std::vector<double> share(n);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks);
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        for (std::size_t b = 0; b < blocks; ++b) {
            double dangling = 0.0;
            for (std::size_t v = b * kBlock; v < std::min(n, (b + 1) * kBlock); ++v) {
                if (g.out_degree[v] == 0) {
                    dangling += rank[v];
                    share[v] = 0.0;
                } else {
                    share[v] = rank[v] / static_cast<double>(g.out_degree[v]);
                }
            }
            partial[b] = dangling;
        }
        const double base = (1.0 - params.damping) * inv_n + params.damping * blocked_sum(partial) * inv_n;
        for (std::size_t b = 0; b < blocks; ++b) {
            double delta = 0.0;
            for (std::size_t v = b * kBlock; v < std::min(n, (b + 1) * kBlock); ++v) {
                double sum = 0.0;
                for (auto u : g.in.neighbors(v)) {
                    sum += share[u];
                }
                next[v] = base + params.damping * sum;
                delta += std::abs(next[v] - rank[v]);
            }
            partial[b] = delta;
        }
        rank.swap(next);
        if (blocked_sum(partial) < params.tolerance) {
            break;
        }
    }
    normalize_to_one(rank);
    return rank;
}

std::vector<std::uint64_t> reach_counts(const Csr& g, std::span<const std::uint64_t> sources, std::size_t max_h) {
    std::vector<std::uint64_t> reach(max_h, 0);
    std::vector<std::uint32_t> dist(g.num_nodes(), UINT32_MAX);
    std::vector<std::uint64_t> frontier;
    std::vector<std::uint64_t> next;
    std::vector<std::uint64_t> touched;
    for (auto s : sources) {
        frontier.assign(1, s);
        dist[s] = 0;
        touched.assign(1, s);
        for (std::size_t h = 1; h <= max_h && !frontier.empty(); ++h) {
            next.clear();
            for (auto u : frontier) {
                for (auto v : g.neighbors(u)) {
                    if (dist[v] == UINT32_MAX) {
                        dist[v] = static_cast<std::uint32_t>(h);
                        next.push_back(v);
                        touched.push_back(v);
                    }
                }
            }
            reach[h - 1] += next.size();
            frontier.swap(next);
        }
        for (auto v : touched) {
            dist[v] = UINT32_MAX;
        }
    }
    for (std::size_t h = 1; h < max_h; ++h) {
        reach[h] += reach[h - 1];
    }
    return reach;
}

std::vector<double> clustering(const Csr& g) {
    const std::size_t n = g.num_nodes();
    std::vector<std::uint64_t> triangles(n, 0);
    std::vector<std::uint8_t> mark(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        for (auto v : g.neighbors(u)) {
            mark[v] = 1;
        }
        for (auto v : g.neighbors(u)) {
            for (auto w : g.neighbors(v)) {
                if (mark[w]) {
                    ++triangles[u];
                }
            }
        }
        for (auto v : g.neighbors(u)) {
            mark[v] = 0;
        }
    }
    std::vector<double> cc(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const double d = static_cast<double>(g.offsets[u + 1] - g.offsets[u]);
        if (d >= 2.0) {
            // every triangle at u is seen twice (v->w and w->v)
            cc[u] = static_cast<double>(triangles[u]) / (d * (d - 1.0));
        }
    }
    return cc;
}

} // namespace serial

namespace parallel {

std::vector<double> pagerank(const PullGraph& g, const PageRankParams& params) {
    const std::size_t n = g.in.num_nodes();
    if (n == 0) {
        return {};
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n);
    std::vector<double> next(n);
    std::vector<double> share(n);
    const auto blocks = static_cast<std::int64_t>((n + kBlock - 1) / kBlock);
    std::vector<double> partial(static_cast<std::size_t>(blocks));
    for (int iter = 0; iter < params.max_iterations; ++iter) {
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < blocks; ++b) {
            double dangling = 0.0;
            const std::size_t end = std::min(n, static_cast<std::size_t>(b + 1) * kBlock);
            for (std::size_t v = static_cast<std::size_t>(b) * kBlock; v < end; ++v) {
                if (g.out_degree[v] == 0) {
                    dangling += rank[v];
                    share[v] = 0.0;
                } else {
                    share[v] = rank[v] / static_cast<double>(g.out_degree[v]);
                }
            }
            partial[b] = dangling;
        }
        const double base = (1.0 - params.damping) * inv_n + params.damping * blocked_sum(partial) * inv_n;
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t b = 0; b < blocks; ++b) {
            double delta = 0.0;
            const std::size_t end = std::min(n, static_cast<std::size_t>(b + 1) * kBlock);
            for (std::size_t v = static_cast<std::size_t>(b) * kBlock; v < end; ++v) {
                double sum = 0.0;
                for (auto u : g.in.neighbors(v)) {
                    sum += share[u];
                }
                next[v] = base + params.damping * sum;
                delta += std::abs(next[v] - rank[v]);
            }
            partial[b] = delta;
        }
        rank.swap(next);
        if (blocked_sum(partial) < params.tolerance) {
            break;
        }
    }
    normalize_to_one(rank);
    return rank;
}

std::vector<std::uint64_t> reach_counts(const Csr& g, std::span<const std::uint64_t> sources, std::size_t max_h) {
    std::vector<std::uint64_t> reach(max_h, 0);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(max_h, 0);
        std::vector<std::uint32_t> dist(g.num_nodes(), UINT32_MAX);
        std::vector<std::uint64_t> frontier;
        std::vector<std::uint64_t> next;
        std::vector<std::uint64_t> touched;
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(sources.size()); ++i) {
            const auto s = sources[static_cast<std::size_t>(i)];
            frontier.assign(1, s);
            dist[s] = 0;
            touched.assign(1, s);
            for (std::size_t h = 1; h <= max_h && !frontier.empty(); ++h) {
                next.clear();
                for (auto u : frontier) {
                    for (auto v : g.neighbors(u)) {
                        if (dist[v] == UINT32_MAX) {
                            dist[v] = static_cast<std::uint32_t>(h);
                            next.push_back(v);
                            touched.push_back(v);
                        }
                    }
                }
                local[h - 1] += next.size();
                frontier.swap(next);
            }
            for (auto v : touched) {
                dist[v] = UINT32_MAX;
            }
        }
        // Integer sums: order of combination does not matter.
#pragma omp critical
        for (std::size_t h = 0; h < max_h; ++h) {
            reach[h] += local[h];
        }
    }
    for (std::size_t h = 1; h < max_h; ++h) {
        reach[h] += reach[h - 1];
    }
    return reach;
}

std::vector<double> clustering(const Csr& g) {
    // Degree-ordered triangle listing: each triangle found once from its
    // lowest-rank vertex, then credited to all three corners.
    const std::size_t n = g.num_nodes();
    auto before = [&](std::uint64_t a, std::uint64_t b) {
        const auto da = g.offsets[a + 1] - g.offsets[a];
        const auto db = g.offsets[b + 1] - g.offsets[b];
        return da < db || (da == db && a < b);
    };
    Csr forward;
    forward.offsets.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) {
        std::uint64_t count = 0;
        for (auto v : g.neighbors(u)) {
            count += before(u, v) ? 1 : 0;
        }
        forward.offsets[u + 1] = forward.offsets[u] + count;
    }
    forward.targets.resize(forward.offsets[n]);
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t u = 0; u < static_cast<std::int64_t>(n); ++u) {
        auto out = forward.targets.begin() + static_cast<std::ptrdiff_t>(forward.offsets[u]);
        for (auto v : g.neighbors(static_cast<std::size_t>(u))) {
            if (before(static_cast<std::uint64_t>(u), v)) {
                *out++ = v; // stays sorted: neighbor lists are sorted
            }
        }
    }
    std::vector<std::uint64_t> triangles(n, 0);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
        const auto u = static_cast<std::size_t>(ui);
        auto fu = forward.neighbors(u);
        for (auto v : fu) {
            auto fv = forward.neighbors(v);
            auto a = fu.begin();
            auto b = fv.begin();
            while (a != fu.end() && b != fv.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
#pragma omp atomic
                    ++triangles[u];
#pragma omp atomic
                    ++triangles[v];
#pragma omp atomic
                    ++triangles[*a];
                    ++a;
                    ++b;
                }
            }
        }
    }
    std::vector<double> cc(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const double d = static_cast<double>(g.offsets[u + 1] - g.offsets[u]);
        if (d >= 2.0) {
            cc[u] = 2.0 * static_cast<double>(triangles[u]) / (d * (d - 1.0));
        }
    }
    return cc;
}

} // namespace parallel

} // namespace syngraph
