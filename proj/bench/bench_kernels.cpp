// Serial reference vs OpenMP kernels on a Kronecker graph, plus edge
// generation throughput per thread count. Writes a CSV scaling table.

#include "syngraph/kernels.hpp"
#include "syngraph/kronecker.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>

using namespace syngraph;

namespace {

double seconds(const std::function<void()>& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel benchmark"};
    std::uint64_t edges = 1'000'000;
    unsigned workers = 8;
    std::string csv_path = "scaling.csv";
    std::vector<int> threads{1, 2, 4, 8};
    app.add_option("--edges", edges, "Edges to generate");
    app.add_option("--workers", workers, "Generation streams (fixes the output)");
    app.add_option("--threads", threads, "Thread counts to measure");
    app.add_option("--csv", csv_path, "Output CSV");
    CLI11_PARSE(app, argc, argv);

    SeedModel model;
    model.seed = {0.57, 0.19, 0.19, 0.05};
    const auto nodes = std::max<std::uint64_t>(16, edges / 8);
    model.rows = nodes;
    model.cols = nodes;
    model.edges = edges;
    model.shape = plan_shape(nodes, nodes);

    std::ofstream csv(csv_path);
    csv << "kernel,threads,edges,seconds\n";
    auto row = [&](const char* kernel, int t, double s) {
        csv << kernel << ',' << t << ',' << edges << ',' << s << '\n';
        std::printf("%-22s threads=%-3d %.3f s\n", kernel, t, s);
    };

    std::vector<Edge> sample;
    row("sample_edges_serial", 1, seconds([&] { sample = serial::sample_edges(model, edges, 1, workers); }));
    PartiteGraph g;
    g.partites = {{"v", nodes}};
    g.edge_types = {{"e", 0, 0}};
    g.edges = {sample};
    const auto csr = undirected_csr(g);
    const auto pull = pull_graph(g);
    std::vector<std::uint64_t> sources;
    for (std::uint64_t v = 0; v < std::min<std::uint64_t>(64, nodes); ++v) {
        sources.push_back(v * (nodes / 64 + 1) % nodes);
    }
    row("pagerank_serial", 1, seconds([&] { serial::pagerank(pull); }));
    row("reach_serial", 1, seconds([&] { serial::reach_counts(csr, sources, 10); }));
    row("clustering_serial", 1, seconds([&] { serial::clustering(csr); }));

    for (int t : threads) {
        omp_set_num_threads(t);
        std::vector<Edge> par;
        row("sample_edges", t, seconds([&] { par = sample_edges(model, edges, 1, workers); }));
        if (par != sample) {
            std::fprintf(stderr, "parallel sampler disagrees with the serial reference\n");
            return 1;
        }
        row("pagerank", t, seconds([&] { parallel::pagerank(pull); }));
        row("reach", t, seconds([&] { parallel::reach_counts(csr, sources, 10); }));
        row("clustering", t, seconds([&] { parallel::clustering(csr); }));
    }
    return 0;
}
