#include "syngraph/error.hpp"
#include "syngraph/pipeline.hpp"
#include "syngraph/toy.hpp"

#include "test_util.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace syngraph;
namespace fs = std::filesystem;

namespace {

// Small toy table plus config in `dir`.
PipelineConfig small_toy(const fs::path& dir, std::uint64_t transactions = 2500) {
    ToyOptions options;
    options.users = 400;
    options.merchants = 120;
    options.transactions = transactions;
    const auto csv = make_toy_transactions(options);
    std::ofstream out(dir / "toy.csv", std::ios::binary);
    write_csv_row(out, csv.header);
    for (const auto& row : csv.rows) {
        write_csv_row(out, row);
    }
    out.close();
    return config_from_json(toy_config_json("toy.csv"), dir);
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(SYNGRAPH_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_same_files(const fs::path& a, const fs::path& b, bool skip_manifest) {
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        if (skip_manifest && name == "manifest.json") {
            continue;
        }
        ASSERT_TRUE(fs::exists(b / name)) << name;
        EXPECT_EQ(fixtures::slurp(entry.path()), fixtures::slurp(b / name)) << name;
        ++compared;
    }
    EXPECT_GT(compared, 0U);
}

Json without_timings(Json j) {
    j.erase("timings");
    return j;
}

} // namespace

TEST(Pipeline, ConfigValidation) {
    const auto dir = fixtures::scratch_dir("config");
    auto j = toy_config_json("toy.csv");
    EXPECT_NO_THROW(config_from_json(j, dir));
    auto bad = j;
    bad["noise"] = 1.5;
    EXPECT_THROW(config_from_json(bad, dir), ConfigError);
    bad = j;
    bad["scale"] = 0.0;
    EXPECT_THROW(config_from_json(bad, dir), ConfigError);
    bad = j;
    bad["colour"] = "blue";
    EXPECT_THROW(config_from_json(bad, dir), ConfigError);
    bad = j;
    bad["aligner"] = "optimal";
    EXPECT_THROW(config_from_json(bad, dir), ConfigError);
    const auto config = config_from_json(j, dir);
    EXPECT_EQ(config.input, dir / "toy.csv");
    EXPECT_EQ(config_from_json(to_json(config)).seed, config.seed);
}

TEST(Pipeline, WorkersFromEnvironment) {
    ::setenv("SYNGRAPH_WORKERS", "3", 1);
    EXPECT_EQ(workers_from_env(1), 3U);
    ::unsetenv("SYNGRAPH_WORKERS");
    EXPECT_EQ(workers_from_env(5), 5U);
}

TEST(Pipeline, MissingColumnExitsWithCode2) {
    const auto dir = fixtures::scratch_dir("missing");
    small_toy(dir, 200);
    auto j = toy_config_json("toy.csv");
    j["partites"][1]["columns"][0] = "shop_id";
    write_text_file(dir / "config.json", j.dump(2));
    const int code = run_cli("fit --config " + (dir / "config.json").string() + " --out " + (dir / "bundle").string(),
                             dir / "log.txt");
    EXPECT_EQ(code, 2);
    EXPECT_NE(fixtures::slurp(dir / "log.txt").find("shop_id"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "bundle" / "manifest.json"));
}

TEST(Pipeline, BadArgumentsExitWithCode2) {
    const auto dir = fixtures::scratch_dir("args");
    EXPECT_EQ(run_cli("generate --scale 2", dir / "log.txt"), 2);
    EXPECT_EQ(run_cli("fly", dir / "log.txt"), 2);
}

TEST(Pipeline, TenRowTableFitsQuickly) {
    const auto dir = fixtures::scratch_dir("ten");
    std::ofstream out(dir / "t.csv");
    out << "user_id,merchant_id,amount,hour,category,user_score,card_type,merchant_region\n";
    for (int i = 0; i < 10; ++i) {
        out << "u" << i % 4 << ",m" << i % 3 << "," << 10 + i << "," << i << ",c" << i % 2 << ",0." << i % 4
            << ",credit,r" << i % 3 << "\n";
    }
    out.close();
    const auto config = config_from_json(toy_config_json("t.csv"), dir);
    const auto start = std::chrono::steady_clock::now();
    const auto real = load_real_graph(config);
    const auto bundle = fit_bundle(real, config);
    save_bundle(bundle, dir / "bundle");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(seconds, 1.0);
    EXPECT_EQ(real.edges[0].size(), 10U);
    ASSERT_EQ(bundle.models.size(), 1U);
    EXPECT_TRUE(bundle.models[0].features);
    EXPECT_TRUE(bundle.models[0].aligner);
    for (const char* stage : {"fit_structure", "fit_features", "fit_aligner", "summarize"}) {
        EXPECT_TRUE(bundle.timings.contains(stage)) << stage;
    }
}

TEST(Pipeline, StageNameInFitErrors) {
    const auto dir = fixtures::scratch_dir("stage");
    std::ofstream out(dir / "t.csv");
    out << "user_id,merchant_id,amount,hour,category,user_score,card_type,merchant_region\n";
    for (int i = 0; i < 5; ++i) {
        out << "u" << i << ",m" << i << ",1,2,c,0.5,credit,r\n";
    }
    out.close();
    const auto config = config_from_json(toy_config_json("t.csv"), dir);
    try {
        fit_bundle(load_real_graph(config), config);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(std::string(e.what()).rfind("fit_aligner:", 0), 0U) << e.what();
        EXPECT_EQ(e.exit_code(), 4);
    }
}

TEST(Pipeline, BundleRoundTripIsByteIdentical) {
    const auto dir = fixtures::scratch_dir("roundtrip");
    const auto config = small_toy(dir);
    const auto bundle = fit_bundle(load_real_graph(config), config);
    save_bundle(bundle, dir / "a");
    const auto loaded = load_bundle(dir / "a");
    save_bundle(loaded, dir / "b");
    expect_same_files(dir / "a", dir / "b", true);
    EXPECT_EQ(without_timings(read_json_file(dir / "a" / "manifest.json")),
              without_timings(read_json_file(dir / "b" / "manifest.json")));

    GenerateOptions options;
    options.seed = 5;
    options.workers = 2;
    const auto from_memory = generate(bundle, options);
    const auto from_disk = generate(loaded, options);
    write_dataset(dir / "mem", from_memory.graph, from_memory.info);
    write_dataset(dir / "disk", from_disk.graph, from_disk.info);
    expect_same_files(dir / "mem", dir / "disk", true);
    EXPECT_EQ(without_timings(read_json_file(dir / "mem" / "manifest.json")),
              without_timings(read_json_file(dir / "disk" / "manifest.json")));
}

TEST(Pipeline, GenerationIsDeterministicPerSeedAndWorkers) {
    const auto dir = fixtures::scratch_dir("determinism");
    const auto config = small_toy(dir);
    const auto bundle = fit_bundle(load_real_graph(config), config);
    GenerateOptions options;
    options.seed = 11;
    options.workers = 3;
    const auto a = generate(bundle, options);
    const auto b = generate(bundle, options);
    EXPECT_EQ(a.graph.edges, b.graph.edges);
    EXPECT_EQ(a.graph.edge_features[0]->values(), b.graph.edge_features[0]->values());
    EXPECT_EQ(a.graph.node_features[0]->values(), b.graph.node_features[0]->values());
    options.seed = 12;
    EXPECT_NE(generate(bundle, options).graph.edges, a.graph.edges);
}

TEST(Pipeline, ScaleKeepsCountsAndDensity) {
    const auto dir = fixtures::scratch_dir("scale");
    const auto config = small_toy(dir);
    const auto real = load_real_graph(config);
    const auto bundle = fit_bundle(real, config);
    GenerateOptions options;
    options.features = false;
    const auto same = generate(bundle, options);
    EXPECT_EQ(same.graph.partites[0].size, real.partites[0].size);
    EXPECT_EQ(same.graph.partites[1].size, real.partites[1].size);
    EXPECT_EQ(same.graph.edges[0].size(), real.edges[0].size());
    options.scale = 4.0;
    const auto big = generate(bundle, options);
    write_dataset(dir / "big", big.graph, big.info);
    const auto manifest = read_json_file(dir / "big" / "manifest.json");
    const double density = manifest["edge_types"][0]["density"].get<double>();
    EXPECT_NEAR(density / bundle.models[0].structure.density(), 1.0, 0.01);
    EXPECT_EQ(big.graph.partites[0].size, 2 * real.partites[0].size);
    EXPECT_FALSE(big.graph.edge_features[0]);
}

TEST(Pipeline, BaselineIsUniformAndDeterministic) {
    const auto dir = fixtures::scratch_dir("baseline");
    const auto config = small_toy(dir);
    const auto real = load_real_graph(config);
    const auto a = generate_baseline(real, config);
    const auto b = generate_baseline(real, config);
    EXPECT_EQ(a.graph.edges, b.graph.edges);
    EXPECT_EQ(a.graph.edge_features[0]->values(), b.graph.edge_features[0]->values());
    EXPECT_EQ(a.graph.edges[0].size(), real.edges[0].size());
    a.graph.validate();

    // chi-square of source ids over 8 equal-width row groups
    const auto rows = a.graph.partites[0].size;
    std::vector<double> groups(8, 0.0);
    for (const auto& e : a.graph.edges[0]) {
        groups[e.src * 8 / rows] += 1.0;
    }
    const double total = static_cast<double>(a.graph.edges[0].size());
    double stat = 0.0;
    for (std::size_t g = 0; g < 8; ++g) {
        const double lo = static_cast<double>((g * rows + 7) / 8);
        const double hi = static_cast<double>(((g + 1) * rows + 7) / 8);
        const double expected = total * (hi - lo) / static_cast<double>(rows);
        stat += (groups[g] - expected) * (groups[g] - expected) / expected;
    }
    boost::math::chi_squared dist(7);
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001);

    // out-degree variance close to the binomial E/N (1 - 1/N) profile
    const auto dd = degree_distribution(a.graph, 0, Direction::out);
    const double n = static_cast<double>(rows);
    const double mean = total / n;
    double var = 0.0;
    for (const auto& [k, c] : dd.counts) {
        var += static_cast<double>(c) * (static_cast<double>(k) - mean) * (static_cast<double>(k) - mean);
    }
    var /= n;
    const double cols = static_cast<double>(a.graph.partites[1].size);
    const double p = total / (n * cols);
    EXPECT_NEAR(var / (cols * p * (1.0 - p)), 1.0, 0.2);
}

TEST(Pipeline, CliEndToEndSelfEvaluation) {
    const auto dir = fixtures::scratch_dir("cli");
    small_toy(dir, 1500);
    write_text_file(dir / "config.json", toy_config_json("toy.csv").dump(2));
    const auto config = (dir / "config.json").string();
    ASSERT_EQ(run_cli("ingest --config " + config + " --out " + (dir / "real").string(), dir / "log.txt"), 0);
    ASSERT_EQ(run_cli("evaluate --real " + (dir / "real").string() + " --synthetic " + (dir / "real").string() +
                          " --out " + (dir / "self").string(),
                      dir / "log.txt"),
              0);
    const auto report = read_json_file(dir / "self" / "report.json");
    EXPECT_EQ(report["degree_dist_score"].get<double>(), 1.0);
    EXPECT_EQ(report["feature_corr_score"].get<double>(), 1.0);
    EXPECT_EQ(report["degree_feature_js"].get<double>(), 0.0);

    ASSERT_EQ(run_cli("fit --config " + config + " --out " + (dir / "bundle").string(), dir / "log.txt"), 0)
        << fixtures::slurp(dir / "log.txt");
    ASSERT_EQ(run_cli("generate --bundle " + (dir / "bundle").string() + " --seed 3 --out " + (dir / "s1").string(),
                      dir / "log.txt"),
              0);
    ASSERT_EQ(run_cli("generate --bundle " + (dir / "bundle").string() + " --seed 3 --out " + (dir / "s2").string(),
                      dir / "log.txt"),
              0);
    expect_same_files(dir / "s1", dir / "s2", true);
    const auto manifest = read_json_file(dir / "s1" / "manifest.json");
    EXPECT_EQ(manifest["format_version"].get<int>(), 1);
    EXPECT_EQ(manifest["seed"].get<std::uint64_t>(), 3U);
    EXPECT_TRUE(manifest.contains("timings"));
    EXPECT_TRUE(manifest.contains("density"));

    // evaluation against the bundle's stored summary
    ASSERT_EQ(run_cli("evaluate --real " + (dir / "bundle").string() + " --synthetic " + (dir / "s1").string() +
                          " --out " + (dir / "eval").string(),
                      dir / "log.txt"),
              0);
    const auto eval = read_json_file(dir / "eval" / "report.json");
    for (const char* key : {"degree_dist_score", "feature_corr_score", "degree_feature_js"}) {
        const double v = eval[key].get<double>();
        EXPECT_GE(v, 0.0) << key;
        EXPECT_LE(v, 1.0) << key;
    }
    const auto hop = parse_csv(fixtures::slurp(dir / "eval" / "hop_plot.csv"));
    ASSERT_FALSE(hop.rows.empty());
    for (std::size_t col = 1; col < hop.header.size(); ++col) {
        double prev = 0.0;
        for (const auto& row : hop.rows) {
            const double v = std::stod(row[col]);
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(Pipeline, EvaluateRejectsSchemaMismatch) {
    const auto dir = fixtures::scratch_dir("mismatch");
    const auto config = small_toy(dir, 1000);
    const auto real = load_real_graph(config);
    write_dataset(dir / "real", real, {});
    auto other = real;
    other.edge_features[0]->schema()[0].name = "value";
    try {
        evaluate(load_real_summary(dir / "real"), other, dir / "out");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("value"), std::string::npos);
        EXPECT_EQ(e.exit_code(), 3);
    }
}

TEST(Pipeline, DatasetRoundTrip) {
    const auto dir = fixtures::scratch_dir("dataset");
    const auto config = small_toy(dir, 800);
    const auto real = load_real_graph(config);
    write_dataset(dir / "d", real, {});
    const auto back = read_dataset(dir / "d");
    EXPECT_EQ(back.edges, real.edges);
    EXPECT_EQ(back.partites[0].size, real.partites[0].size);
    EXPECT_EQ(back.edge_features[0]->values(), real.edge_features[0]->values());
    EXPECT_EQ(back.node_features[1]->schema(), real.node_features[1]->schema());
    EXPECT_FALSE(is_safe_name("../x"));
    EXPECT_TRUE(is_safe_name("tx-2.v1"));
}
