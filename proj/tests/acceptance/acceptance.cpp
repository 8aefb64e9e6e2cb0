// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.
#include "syngraph/error.hpp"
#include "syngraph/pipeline.hpp"
#include "syngraph/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace syngraph;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "syngraph_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SYNGRAPH_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Files of two directories agree byte for byte; manifest.json files agree
// once their stage timings are removed. Returns the first difference.
std::optional<std::string> compare_dirs(const fs::path& a, const fs::path& b) {
    std::vector<std::string> names_a;
    std::vector<std::string> names_b;
    for (const auto& e : fs::directory_iterator(a)) {
        names_a.push_back(e.path().filename().string());
    }
    for (const auto& e : fs::directory_iterator(b)) {
        names_b.push_back(e.path().filename().string());
    }
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    if (names_a != names_b) {
        return "file lists differ in " + a.string();
    }
    for (const auto& name : names_a) {
        if (name == "manifest.json") {
            auto ja = read_json_file(a / name);
            auto jb = read_json_file(b / name);
            ja.erase("timings");
            jb.erase("timings");
            if (ja != jb) {
                return (a / name).string() + " differs";
            }
        } else if (slurp(a / name) != slurp(b / name)) {
            return (a / name).string() + " differs";
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Shared fixtures

const fs::path data_dir = SYNGRAPH_DATA_DIR;

struct Toy {
    PipelineConfig config;
    PartiteGraph real;
    ModelBundle bundle;
    double fit_seconds = 0.0;
};

const Toy& toy() {
    static const Toy t = [] {
        Toy out;
        out.config = load_config(data_dir / "toy_config.json");
        const auto start = Clock::now();
        out.real = load_real_graph(out.config);
        out.bundle = fit_bundle(out.real, out.config);
        out.fit_seconds = seconds_since(start);
        return out;
    }();
    return t;
}

SeedModel square_model(const SeedMatrix& seed, unsigned levels, std::uint64_t edges) {
    SeedModel m;
    m.seed = seed;
    m.rows = 1ULL << levels;
    m.cols = 1ULL << levels;
    m.edges = edges;
    m.shape = plan_shape(m.rows, m.cols);
    return m;
}

// ---------------------------------------------------------------------------
// 1. Kronecker sampler oracle

std::vector<double> kron_power(const SeedMatrix& s, unsigned n) {
    // theta[r * 2^n + c], most significant level first
    std::vector<double> theta{1.0};
    std::size_t side = 1;
    const double quad[2][2] = {{s.a, s.b}, {s.c, s.d}};
    for (unsigned level = 0; level < n; ++level) {
        std::vector<double> next(side * side * 4);
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                for (std::size_t i = 0; i < 2; ++i) {
                    for (std::size_t j = 0; j < 2; ++j) {
                        next[(2 * r + i) * (2 * side) + 2 * c + j] = theta[r * side + c] * quad[i][j];
                    }
                }
            }
        }
        theta = std::move(next);
        side *= 2;
    }
    return theta;
}

Outcome criterion_sampler() {
    const auto start = Clock::now();
    const int draws = 1000000;
    double min_p = 1.0;
    std::string cases;
    std::uint64_t seed = 100;
    for (const SeedMatrix& s : {SeedMatrix{0.25, 0.25, 0.25, 0.25}, SeedMatrix{0.57, 0.19, 0.19, 0.05}}) {
        for (unsigned n : {2U, 3U}) {
            const auto shape = plan_shape(1ULL << n, 1ULL << n);
            const Cascade cascade(shape, s);
            const auto theta = kron_power(s, n);
            std::vector<double> observed(theta.size(), 0.0);
            Engine engine = make_stream(++seed);
            for (int i = 0; i < draws; ++i) {
                const auto [r, c] = cascade.draw(engine);
                observed[r * (1ULL << n) + c] += 1.0;
            }
            double stat = 0.0;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                const double expected = theta[i] * draws;
                stat += (observed[i] - expected) * (observed[i] - expected) / expected;
            }
            const boost::math::chi_squared dist(static_cast<double>(theta.size() - 1));
            const double p = boost::math::cdf(boost::math::complement(dist, stat));
            min_p = std::min(min_p, p);
            cases += fmt(" %s/n=%u p=%.3f", s.a == 0.25 ? "uniform" : "skewed", n, p);
        }
    }
    const double t = seconds_since(start);
    return {min_p > 0.01 && t < 30.0, fmt("min p = %.4f (> 0.01), %.1f s (< 30 s);", min_p, t) + cases};
}

// ---------------------------------------------------------------------------
// 2. Closed-form degree counts against Monte Carlo

Outcome criterion_degree_counts() {
    const auto start = Clock::now();
    const int replicates = 1000;
    double worst = 0.0;
    std::size_t bins = 0;
    std::uint64_t seed = 200;
    struct Size {
        unsigned levels;
        std::uint64_t edges;
    };
    for (double p : {0.5, 0.75}) {
        for (double q : {0.5, 0.75}) {
            for (const Size size : {Size{8, 10000}, Size{8, 2000}, Size{8, 1000}, Size{8, 256}}) {
                // any seed with these marginals; the counts depend only on p and q
                const SeedMatrix s{p * q, p * (1 - q), (1 - p) * q, (1 - p) * (1 - q)};
                const auto shape = plan_shape(1ULL << size.levels, 1ULL << size.levels);
                const Cascade cascade(shape, s);
                const std::size_t side = 1ULL << size.levels;
                const std::uint64_t kmax = size.edges;
                std::vector<double> out_mc(kmax + 1, 0.0);
                std::vector<double> in_mc(kmax + 1, 0.0);
                std::vector<std::uint64_t> out_deg(side);
                std::vector<std::uint64_t> in_deg(side);
                Engine engine = make_stream(++seed);
                for (int rep = 0; rep < replicates; ++rep) {
                    std::fill(out_deg.begin(), out_deg.end(), 0);
                    std::fill(in_deg.begin(), in_deg.end(), 0);
                    for (std::uint64_t e = 0; e < size.edges; ++e) {
                        const auto [r, c] = cascade.draw(engine);
                        ++out_deg[r];
                        ++in_deg[c];
                    }
                    for (std::size_t v = 0; v < side; ++v) {
                        out_mc[out_deg[v]] += 1.0 / replicates;
                        in_mc[in_deg[v]] += 1.0 / replicates;
                    }
                }
                const auto out_pred = expected_out_degree_counts(p, size.levels, size.edges, kmax);
                const auto in_pred = expected_in_degree_counts(q, size.levels, size.edges, kmax);
                for (std::uint64_t k = 0; k <= kmax; ++k) {
                    if (out_pred[k] >= 30.0) {
                        worst = std::max(worst, std::abs(out_pred[k] - out_mc[k]) / out_mc[k]);
                        ++bins;
                    }
                    if (in_pred[k] >= 30.0) {
                        worst = std::max(worst, std::abs(in_pred[k] - in_mc[k]) / in_mc[k]);
                        ++bins;
                    }
                }
            }
        }
    }
    const double t = seconds_since(start);
    return {worst <= 0.05 && bins > 0 && t < 120.0,
            fmt("max relative error %.4f (<= 0.05) over %zu bins, 16 configurations x %d replicates, %.1f s (< 120 s)",
                worst, bins, replicates, t)};
}

// ---------------------------------------------------------------------------
// 3. Planted-parameter recovery

Outcome criterion_recovery() {
    const auto start = Clock::now();
    const SeedMatrix planted{0.57, 0.19, 0.19, 0.05}; // p = q = 0.76, a / b = 3
    const auto model = square_model(planted, 14, 100000);
    PartiteGraph g;
    g.partites = {{"v", model.rows}};
    g.edge_types = {{"e", 0, 0}};
    g.edges = {sample_edges(model, model.edges, 31, 4)};
    g.node_features.resize(1);
    g.edge_features.resize(1);
    SeedFit fit;
    const auto fitted = fit_seed_model(g, 0, 0.0, &fit);
    const double ab = fitted.ratios.ab;
    const double t = seconds_since(start);
    const bool ok = std::abs(fit.p - 0.76) <= 0.02 && std::abs(fit.q - 0.76) <= 0.02 &&
                    std::abs(ab - 3.0) <= 0.3 && t < 60.0;
    return {ok, fmt("p = %.4f, q = %.4f (0.76 +- 0.02), a/b = %.4f (3 +- 10%%), %.1f s (< 60 s)", fit.p, fit.q, ab, t)};
}

// ---------------------------------------------------------------------------
// 4. Noise correctness

Outcome criterion_noise() {
    // epsilon = 0: the noisy cascade is the noiseless one
    bool zero_ok = true;
    const SeedMatrix s{0.57, 0.19, 0.19, 0.05};
    for (unsigned levels : {3U, 10U}) {
        Engine noise_engine = make_stream(41);
        const auto seeds = sample_noise(s, 0.0, levels, noise_engine);
        const auto shape = plan_shape(1ULL << levels, 1ULL << levels);
        const Cascade noisy(shape, seeds);
        const Cascade plain(shape, s);
        Engine a = make_stream(42);
        Engine b = make_stream(42);
        for (int i = 0; i < 100000; ++i) {
            zero_ok = zero_ok && noisy.draw(a) == plain.draw(b);
        }
        const std::uint64_t edges = levels == 3 ? 30 : 500;
        auto with_noise = square_model(s, levels, edges);
        Engine factor_engine = make_stream(43);
        with_noise.noise.level_noise = draw_noise_factors(s, 0.0, levels, factor_engine);
        zero_ok = zero_ok &&
                  sample_edges(with_noise, edges, 44, 2) == sample_edges(square_model(s, levels, edges), edges, 44, 2);
    }
    // epsilon > 0: zero-sum perturbation, valid distribution
    std::size_t violations = 0;
    double worst_sum = 0.0;
    Engine engine = make_stream(45);
    const int cases = 10000;
    for (int i = 0; i < cases; ++i) {
        double w[4];
        double total = 0.0;
        for (double& v : w) {
            v = uniform01(engine) + 1e-6;
            total += v;
        }
        const SeedMatrix seed{w[0] / total, w[1] / total, w[2] / total, w[3] / total};
        const double eps = 1e-6 + (1.0 - 1e-6) * uniform01(engine);
        for (const auto& level : sample_noise(seed, eps, 4, engine)) {
            const double delta = (level.a - seed.a) + (level.b - seed.b) + (level.c - seed.c) + (level.d - seed.d);
            worst_sum = std::max(worst_sum, std::abs(delta));
            if (std::abs(delta) > 1e-12 || !level.valid(1e-12)) {
                ++violations;
            }
        }
    }
    return {zero_ok && violations == 0,
            fmt("epsilon=0 cascade identical: %s; %d random seeds x 4 levels: %zu violations, max |sum of noise| %.2e",
                zero_ok ? "yes" : "no", cases, violations, worst_sum)};
}

// ---------------------------------------------------------------------------
// 5. Density preservation

Outcome criterion_density() {
    const auto& t = toy();
    const auto& fitted = t.bundle.models[0].structure;
    const double target = fitted.density();
    bool ok = true;
    std::string detail = fmt("fitted density %.6g;", target);
    for (double s : {1.0, 4.0, 64.0}) {
        GenerateOptions options;
        options.scale = s;
        options.seed = 5;
        options.features = false;
        const auto out = generate(t.bundle, options);
        const auto dir = scratch("density_" + std::to_string(static_cast<int>(s)));
        write_dataset(dir, out.graph, out.info);
        const auto manifest = read_json_file(dir / "manifest.json");
        const double density = manifest["edge_types"][0]["density"].get<double>();
        const double rel = std::abs(density / target - 1.0);
        ok = ok && rel <= 0.01;
        detail += fmt(" S=%g density %.6g (rel %.2e)", s, density, rel);
        if (s == 64.0) {
            const bool plus3 = out.graph.partites[0].size == 8 * t.real.partites[0].size &&
                               out.graph.partites[1].size == 8 * t.real.partites[1].size &&
                               out.graph.edges[0].size() == 64 * t.real.edges[0].size();
            ok = ok && plus3;
            detail += fmt(" N=%llu (8x %llu) M=%llu E=%zu (64x %zu)",
                          static_cast<unsigned long long>(out.graph.partites[0].size),
                          static_cast<unsigned long long>(t.real.partites[0].size),
                          static_cast<unsigned long long>(out.graph.partites[1].size), out.graph.edges[0].size(),
                          t.real.edges[0].size());
        }
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// 6. Metric identities

Outcome criterion_identities() {
    const auto& t = toy();
    const auto dir = scratch("identities");
    const auto report = evaluate(t.bundle.real_summary, t.real, dir);
    const bool self_ok =
        report.degree_dist_score == 1.0 && report.feature_corr_score == 1.0 && report.degree_feature_js == 0.0;
    std::size_t failures = 0;
    Engine engine = make_stream(61);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> p(32);
        std::vector<double> q(32);
        for (std::size_t j = 0; j < p.size(); ++j) {
            p[j] = uniform01(engine) < 0.25 ? 0.0 : uniform01(engine) * 100.0;
            q[j] = uniform01(engine) < 0.25 ? 0.0 : uniform01(engine);
        }
        p[0] += 1.0;
        q[1] += 1.0;
        if (js_divergence(p, q) != js_divergence(q, p)) {
            ++failures;
        }
        DegreeDistribution d;
        const auto support = 1 + uniform_below(engine, 60);
        for (std::uint64_t k = 0; k < support; ++k) {
            d.counts[uniform_below(engine, 5000)] += 1 + uniform_below(engine, 10000);
        }
        if (dcc(d, d) != 0.0 || dcc_normalized(d, d) != 0.0 || dcc_raw(d, d) != 0.0) {
            ++failures;
        }
    }
    return {self_ok && failures == 0,
            fmt("evaluate(real, real): degree %.17g, feature corr %.17g, JS %.17g; 100 random cases: %zu failures",
                report.degree_dist_score, report.feature_corr_score, report.degree_feature_js, failures)};
}

// ---------------------------------------------------------------------------
// 7. Ordering against the Erdos-Renyi baseline on the toy surrogate

Outcome criterion_ordering() {
    const auto start = Clock::now();
    const auto& t = toy();
    GenerateOptions options;
    options.seed = 1;
    const auto ours = generate(t.bundle, options);
    const auto base = generate_baseline(t.real, t.config);
    const auto& real = t.bundle.real_summary;
    const auto a = evaluate(real, ours.graph, scratch("ordering_ours"));
    const auto b = evaluate(real, base.graph, scratch("ordering_er"));
    const double total = t.fit_seconds + seconds_since(start);
    const bool ok = a.degree_dist_score > b.degree_dist_score && a.feature_corr_score > b.feature_corr_score &&
                    a.degree_feature_js < b.degree_feature_js && total < 600.0;
    return {ok, fmt("%zu edges; degree %.4f > %.4f, feature corr %.4f > %.4f, JS %.4f < %.4f (ours vs ER); "
                    "fit + generate + evaluate %.1f s (< 600 s)",
                    t.real.edges[0].size(), a.degree_dist_score, b.degree_dist_score, a.feature_corr_score,
                    b.feature_corr_score, a.degree_feature_js, b.degree_feature_js, total)};
}

// ---------------------------------------------------------------------------
// 8. Ranked versus random aligner on planted degree-correlated features

Outcome criterion_ablation() {
    // Structure from a known Kronecker model; features are noisy functions of
    // the endpoint degrees.
    const auto model = [] {
        SeedModel m;
        m.seed = {0.57, 0.19, 0.19, 0.05};
        m.rows = 1ULL << 12;
        m.cols = 1ULL << 10;
        m.edges = 40000;
        m.shape = plan_shape(m.rows, m.cols);
        return m;
    }();
    PartiteGraph g;
    g.partites = {{"user", model.rows}, {"merchant", model.cols}};
    g.edge_types = {{"tx", 0, 1}};
    g.edges = {sample_edges(model, model.edges, 81, 1)};
    g.node_features.resize(2);
    g.edge_features.resize(1);
    const auto degrees = total_degrees(g);
    FeatureTable table({ColumnSpec{"amount", ColumnKind::continuous, {}},
                        ColumnSpec{"tier", ColumnKind::categorical, {"low", "mid", "high"}}});
    Engine engine = make_stream(82);
    for (const auto& e : g.edges[0]) {
        const double ds = std::log2(1.0 + static_cast<double>(degrees[e.src]));
        const double dd = std::log2(1.0 + static_cast<double>(degrees[g.offset(1) + e.dst]));
        const double noisy = dd + 0.5 * standard_normal(engine);
        const double row[] = {ds + 0.5 * dd + 0.5 * standard_normal(engine), noisy < 5.0 ? 0.0 : noisy < 8.0 ? 1.0 : 2.0};
        table.append_row(row);
    }
    g.edge_features[0] = std::move(table);

    PipelineConfig config;
    config.construction.partites = {{"user", {"user_id"}, {}}, {"merchant", {"merchant_id"}, {}}};
    config.construction.edge_types = {{"tx", "user", "merchant"}};
    config.seed = 83;
    const auto bundle = fit_bundle(g, config);
    GenerateOptions options;
    options.seed = 84;
    options.aligner = AlignerMode::ranked;
    const auto ranked = generate(bundle, options);
    options.aligner = AlignerMode::random;
    const auto random = generate(bundle, options);

    // identical structure and identical feature rows, only the pairing differs
    auto sorted_rows = [](const FeatureTable& t) {
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < t.num_rows(); ++r) {
            rows.emplace_back(t.row(r).begin(), t.row(r).end());
        }
        std::sort(rows.begin(), rows.end());
        return rows;
    };
    const bool same_inputs = ranked.graph.edges == random.graph.edges &&
                             sorted_rows(*ranked.graph.edge_features[0]) == sorted_rows(*random.graph.edge_features[0]);
    const auto& real = bundle.real_summary;
    const double js_ranked = compare(real, summarize(ranked.graph, &real)).degree_feature_js;
    const double js_random = compare(real, summarize(random.graph, &real)).degree_feature_js;
    return {same_inputs && js_ranked < js_random,
            fmt("same edges and rows: %s; degree-feature JS ranked %.4f < random %.4f", same_inputs ? "yes" : "no",
                js_ranked, js_random)};
}

// ---------------------------------------------------------------------------
// 9. Ranked assignment against the brute-force optimum

double assignment_cost(std::span<const double> pred, std::span<const double> values, std::span<const std::size_t> a) {
    double c = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) {
        c += (pred[e] - values[a[e]]) * (pred[e] - values[a[e]]);
    }
    return c;
}

double brute_force_optimum(std::span<const double> pred, std::span<const double> values) {
    std::vector<std::size_t> perm(pred.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, assignment_cost(pred, values, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Outcome criterion_aligner_oracle() {
    const ColumnSpec column{"value", ColumnKind::continuous, {}};
    std::size_t instances = 0;
    std::size_t mismatches = 0;
    double worst = 0.0;
    Engine engine = make_stream(91);

    // Predictions and rows given directly, on a coarse grid so that ties occur.
    AlignerModel identity;
    identity.targets.push_back(AlignerTarget{column, 0.0, 1.0, {}});
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + uniform_below(engine, 10);
        std::vector<double> pred(n);
        std::vector<double> values(n);
        FeatureTable rows({column});
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = std::round(uniform01(engine) * 8.0) / 2.0;
            values[i] = std::round(standard_normal(engine) * 4.0) / 2.0;
            rows.append_row(std::span<const double>(&values[i], 1));
        }
        const auto a = assign_rows(identity, pred, n, rows, AlignerMode::ranked, 0);
        const double gap = assignment_cost(pred, values, a) - brute_force_optimum(pred, values);
        worst = std::max(worst, gap);
        mismatches += gap > 1e-9 ? 1 : 0;
        ++instances;
    }

    // Fitted aligners on 10-edge graphs, cost measured in prediction space.
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Edge> edges;
        while (edges.size() < 10) {
            const Edge e{uniform_below(engine, 6), uniform_below(engine, 6)};
            if (std::find(edges.begin(), edges.end(), e) == edges.end()) {
                edges.push_back(e);
            }
        }
        std::sort(edges.begin(), edges.end());
        PartiteGraph g;
        g.partites = {{"a", 6}, {"b", 6}};
        g.edge_types = {{"e", 0, 1}};
        g.edges = {edges};
        g.node_features.resize(2);
        g.edge_features.resize(1);
        const auto sf = structural_features(g);
        const auto inputs = edge_inputs(g, 0, sf);
        FeatureTable targets({column});
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double v = sf.degree[edges[i].src] + standard_normal(engine);
            targets.append_row(std::span<const double>(&v, 1));
        }
        AlignerOptions options;
        options.gbdt.alpha = 0.0; // let ten rows produce non-constant predictions
        const auto model = fit_aligner(inputs, inputs.size() / edges.size(), targets, 92 + trial, options);
        const auto pred = predict_features(model, inputs, model.input_width);
        FeatureTable rows({column});
        std::vector<double> values;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double v = 3.0 * standard_normal(engine);
            rows.append_row(std::span<const double>(&v, 1));
            values.push_back(to_prediction_space(model, rows.row(i))[0]);
        }
        const auto a = assign_rows(model, pred, edges.size(), rows, AlignerMode::ranked, 0);
        const double gap = assignment_cost(pred, values, a) - brute_force_optimum(pred, values);
        worst = std::max(worst, gap);
        mismatches += gap > 1e-9 ? 1 : 0;
        ++instances;
    }
    return {mismatches == 0,
            fmt("%zu instances with 1-10 edges: %zu above the brute-force optimum (max gap %.2e)", instances,
                mismatches, worst)};
}

// ---------------------------------------------------------------------------
// 10. Determinism and persistence

Outcome criterion_determinism() {
    const auto root = scratch("determinism");
    const auto config = (data_dir / "toy_config.json").string();
    for (const char* run : {"run1", "run2"}) {
        const auto dir = root / run;
        const std::string flags = " --workers 2";
        if (run_cli("fit --config " + config + " --seed 17" + flags + " --out " + (dir / "bundle").string()) != 0 ||
            run_cli("generate --bundle " + (dir / "bundle").string() + " --seed 18" + flags + " --out " +
                    (dir / "synthetic").string()) != 0 ||
            run_cli("evaluate --real " + (dir / "bundle").string() + " --synthetic " + (dir / "synthetic").string() +
                    " --out " + (dir / "report").string()) != 0) {
            return {false, std::string("command failed in ") + run};
        }
    }
    for (const char* sub : {"bundle", "synthetic", "report"}) {
        if (const auto diff = compare_dirs(root / "run1" / sub, root / "run2" / sub)) {
            return {false, "two runs differ: " + *diff};
        }
    }
    // save -> load -> generate equals generation from the in-memory bundle
    const auto& t = toy();
    save_bundle(t.bundle, root / "saved");
    const auto loaded = load_bundle(root / "saved");
    GenerateOptions options;
    options.seed = 19;
    options.workers = 2;
    const auto a = generate(t.bundle, options);
    const auto b = generate(loaded, options);
    write_dataset(root / "from_memory", a.graph, a.info);
    write_dataset(root / "from_disk", b.graph, b.info);
    if (const auto diff = compare_dirs(root / "from_memory", root / "from_disk")) {
        return {false, "bundle round trip differs: " + *diff};
    }
    save_bundle(loaded, root / "resaved");
    if (const auto diff = compare_dirs(root / "saved", root / "resaved")) {
        return {false, "bundle re-save differs: " + *diff};
    }
    return {true, "fit/generate/evaluate twice: identical bundles, datasets and reports; bundle save/load/generate "
                  "identical to in-memory generation (stage timings excluded from manifest comparison)"};
}

// ---------------------------------------------------------------------------
// 11. Throughput

Outcome criterion_throughput() {
    const auto& t = toy();
    const double base_edges = static_cast<double>(t.real.edges[0].size());
    const int threads = omp_get_max_threads();
    const unsigned workers = static_cast<unsigned>(std::max(8, threads));
    const fs::path csv_path = fs::current_path() / "generation_scaling.csv";
    std::ofstream csv(csv_path);
    csv << "scale,nodes,edges,threads,workers,generate_seconds,write_seconds\n";
    double big_seconds = 0.0;
    std::uint64_t big_edges = 0;
    const double target = 1e7;
    for (double s : {1.0, 10.0, 50.0, 100.0, target / base_edges}) {
        GenerateOptions options;
        options.scale = s;
        options.seed = 111;
        options.workers = workers;
        options.align = false;
        const auto start = Clock::now();
        const auto out = generate(t.bundle, options);
        const double gen = seconds_since(start);
        const auto dir = scratch("throughput");
        const auto write_start = Clock::now();
        write_dataset(dir, out.graph, out.info);
        const double wr = seconds_since(write_start);
        fs::remove_all(dir);
        csv << format_double(s) << ',' << out.graph.total_nodes() << ',' << out.graph.total_edges() << ',' << threads
            << ',' << workers << ',' << format_double(gen) << ',' << format_double(wr) << '\n';
        big_seconds = gen;
        big_edges = out.graph.total_edges();
    }
    const bool ok = big_edges >= static_cast<std::uint64_t>(target) - 1 && big_seconds < 60.0;
    return {ok, fmt("%llu edges, alignment disabled, generated in %.1f s (< 60 s) with %d hardware thread(s) "
                    "available (goal stated for 8 cores); curve written to %s",
                    static_cast<unsigned long long>(big_edges), big_seconds, threads, csv_path.c_str())};
}

} // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"kronecker sampler matches materialized theta", criterion_sampler},
        {"closed-form degree counts match Monte Carlo", criterion_degree_counts},
        {"planted seed recovery", criterion_recovery},
        {"noise correctness", criterion_noise},
        {"density preservation under scaling", criterion_density},
        {"metric identities", criterion_identities},
        {"ours beats ER baseline on all three metrics", criterion_ordering},
        {"ranked aligner beats random aligner on JS", criterion_ablation},
        {"ranked assignment equals brute-force optimum", criterion_aligner_oracle},
        {"determinism and bundle persistence", criterion_determinism},
        {"throughput of 10^7 edges", criterion_throughput},
    };
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int i = 1; i < argc; ++i) {
        const auto n = static_cast<std::size_t>(std::atoi(argv[i]));
        if (n >= 1 && n <= criteria.size()) {
            selected[n - 1] = true;
        }
    }
    int failed = 0;
    int ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) {
            continue;
        }
        ++ran;
        Outcome outcome;
        const auto start = Clock::now();
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failed += outcome.pass ? 0 : 1;
        std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", i + 1, outcome.pass ? "PASS" : "FAIL", criteria[i].first,
                    outcome.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria failed\n", failed, ran);
    return failed == 0 ? 0 : 1;
}
