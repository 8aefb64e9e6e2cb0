// Command-line front end: fit, generate, evaluate, baseline, plus ingest and
// toy helpers.

#include "syngraph/error.hpp"
#include "syngraph/pipeline.hpp"
#include "syngraph/toy.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace syngraph;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<double> noise;
    std::optional<double> scale;
    std::optional<std::string> backend;
    std::optional<std::string> aligner;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--workers", o.workers, "Worker count")->check(CLI::PositiveNumber);
    cmd->add_option("--noise", o.noise, "Noise strength in [0, 1]");
    cmd->add_option("--scale", o.scale, "Scale factor");
    cmd->add_option("--feature-backend", o.backend, "mixture | independent");
    cmd->add_option("--aligner", o.aligner, "ranked | random | exhaustive");
}

PipelineConfig configure(const fs::path& path, const Overrides& o) {
    auto config = load_config(path);
    config.workers = workers_from_env(config.workers);
    if (o.seed) {
        config.seed = *o.seed;
    }
    if (o.workers) {
        config.workers = *o.workers;
    }
    if (o.noise) {
        config.noise = *o.noise;
    }
    if (o.scale) {
        config.scale = *o.scale;
    }
    if (o.backend) {
        config.feature_backend = feature_backend_from_string(*o.backend);
    }
    if (o.aligner) {
        config.aligner = aligner_mode_from_string(*o.aligner);
    }
    config.validate();
    return config;
}

void print_fit(const ModelBundle& bundle) {
    for (std::size_t t = 0; t < bundle.edge_types.size(); ++t) {
        const auto& m = bundle.models[t];
        const auto& s = m.structure.seed;
        std::printf("%s: %llu x %llu, %llu edges\n", bundle.edge_types[t].name.c_str(),
                    static_cast<unsigned long long>(m.structure.rows),
                    static_cast<unsigned long long>(m.structure.cols),
                    static_cast<unsigned long long>(m.structure.edges));
        std::printf("  p=%.4f q=%.4f  a=%.4f b=%.4f c=%.4f d=%.4f  loss_out=%.4g loss_in=%.4g\n", m.fit.p, m.fit.q,
                    s.a, s.b, s.c, s.d, m.fit.loss_out, m.fit.loss_in);
        if (m.features) {
            for (const auto& b : m.features->bic) {
                std::printf("  mixture K=%zu BIC=%.2f\n", b.components, b.bic);
            }
        }
    }
    for (const auto& d : bundle.diagnostics) {
        std::printf("note: %s\n", d.c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic attributed graph generator"};
    app.require_subcommand(1);

    fs::path config_path;
    fs::path out_dir;
    Overrides overrides;

    auto* fit = app.add_subcommand("fit", "Fit a model bundle from a real table");
    fit->add_option("--config", config_path, "Pipeline config (JSON)")->required();
    fit->add_option("--out", out_dir, "Bundle directory")->required();
    add_overrides(fit, overrides);

    fs::path bundle_dir;
    std::optional<double> gen_scale;
    std::optional<std::uint64_t> gen_seed;
    std::optional<unsigned> gen_workers;
    std::optional<std::string> gen_aligner;
    bool no_align = false;
    bool no_features = false;
    auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset from a bundle");
    gen->add_option("--bundle", bundle_dir, "Bundle directory")->required();
    gen->add_option("--scale", gen_scale, "Scale factor S (nodes x sqrt(S), edges x S)");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("--workers", gen_workers, "Worker count")->check(CLI::PositiveNumber);
    gen->add_option("--aligner", gen_aligner, "ranked | random | exhaustive");
    gen->add_flag("--no-align", no_align, "Attach feature rows in sampling order");
    gen->add_flag("--no-features", no_features, "Structure only");
    gen->add_option("--out", out_dir, "Dataset directory")->required();

    fs::path real_dir;
    fs::path synth_dir;
    auto* eval = app.add_subcommand("evaluate", "Compare a synthetic dataset with real data");
    eval->add_option("--real", real_dir, "Real dataset or bundle directory")->required();
    eval->add_option("--synthetic", synth_dir, "Synthetic dataset directory")->required();
    eval->add_option("--out", out_dir, "Report directory")->required();

    std::string kind = "er";
    auto* base = app.add_subcommand("baseline", "Erdos-Renyi baseline with independent features");
    base->add_option("--config", config_path, "Pipeline config (JSON)")->required();
    base->add_option("--kind", kind, "Baseline kind")->check(CLI::IsMember({"er"}));
    base->add_option("--out", out_dir, "Dataset directory")->required();
    add_overrides(base, overrides);

    auto* ingest = app.add_subcommand("ingest", "Write the real graph of a config as a dataset directory");
    ingest->add_option("--config", config_path, "Pipeline config (JSON)")->required();
    ingest->add_option("--out", out_dir, "Dataset directory")->required();

    ToyOptions toy;
    auto* toy_cmd = app.add_subcommand("toy", "Write the toy transaction table and its config");
    toy_cmd->add_option("--out", out_dir, "Output directory")->required();
    toy_cmd->add_option("--transactions", toy.transactions, "Rows");
    toy_cmd->add_option("--users", toy.users, "Users");
    toy_cmd->add_option("--merchants", toy.merchants, "Merchants");
    toy_cmd->add_option("--seed", toy.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit) {
            const auto config = configure(config_path, overrides);
            omp_set_num_threads(static_cast<int>(config.workers));
            const auto real = load_real_graph(config);
            const auto bundle = fit_bundle(real, config);
            save_bundle(bundle, out_dir);
            print_fit(bundle);
        } else if (*gen) {
            const auto bundle = load_bundle(bundle_dir);
            GenerateOptions options;
            options.scale = gen_scale.value_or(bundle.config.scale);
            options.seed = gen_seed.value_or(bundle.config.seed);
            options.workers = gen_workers.value_or(workers_from_env(bundle.config.workers));
            if (gen_aligner) {
                options.aligner = aligner_mode_from_string(*gen_aligner);
            }
            options.align = !no_align;
            options.features = !no_features;
            omp_set_num_threads(static_cast<int>(options.workers));
            const auto out = generate(bundle, options);
            write_dataset(out_dir, out.graph, out.info);
            std::printf("%llu nodes, %llu edges\n", static_cast<unsigned long long>(out.graph.total_nodes()),
                        static_cast<unsigned long long>(out.graph.total_edges()));
        } else if (*eval) {
            omp_set_num_threads(static_cast<int>(workers_from_env(1)));
            const auto real = load_real_summary(real_dir);
            const auto synthetic = read_dataset(synth_dir);
            const auto report = evaluate(real, synthetic, out_dir);
            std::printf("degree_dist_score %.4f\nfeature_corr_score %.4f\ndegree_feature_js %.4f\n",
                        report.degree_dist_score, report.feature_corr_score, report.degree_feature_js);
            for (const auto& d : report.diagnostics) {
                std::printf("note: %s\n", d.c_str());
            }
        } else if (*base) {
            const auto config = configure(config_path, overrides);
            omp_set_num_threads(static_cast<int>(config.workers));
            const auto real = load_real_graph(config);
            const auto out = generate_baseline(real, config);
            write_dataset(out_dir, out.graph, out.info);
        } else if (*ingest) {
            auto config = load_config(config_path);
            config.workers = workers_from_env(config.workers);
            omp_set_num_threads(static_cast<int>(config.workers));
            DatasetInfo info;
            info.seed = config.seed;
            info.workers = config.workers;
            write_dataset(out_dir, load_real_graph(config), info);
        } else if (*toy_cmd) {
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            std::ostringstream csv;
            const auto data = make_toy_transactions(toy);
            write_csv_row(csv, data.header);
            for (const auto& row : data.rows) {
                write_csv_row(csv, row);
            }
            write_text_file(out_dir / "toy_transactions.csv", csv.str());
            write_text_file(out_dir / "toy_config.json", toy_config_json("toy_transactions.csv").dump(2) + "\n");
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
