#include "syngraph/pipeline.hpp"

#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"
#include "syngraph/structure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace syngraph {

namespace fs = std::filesystem;

namespace {

// Seed tags for the independent random consumers of one run.
enum : std::uint64_t {
    tag_features = 1,
    tag_aligner = 2,
    tag_edges = 3,
    tag_noise = 4,
    tag_rows = 5,
    tag_assign = 6,
    tag_node_rows = 7,
    tag_baseline = 8,
};

using Clock = std::chrono::steady_clock;

template <class F>
auto run_stage(const std::string& name, Json& timings, F&& f) {
    const auto start = Clock::now();
    try {
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            timings[name] = timings.value(name, 0.0) + std::chrono::duration<double>(Clock::now() - start).count();
        } else {
            auto result = f();
            timings[name] = timings.value(name, 0.0) + std::chrono::duration<double>(Clock::now() - start).count();
            return result;
        }
    } catch (const Error& e) {
        throw Error(name + ": " + e.what(), e.exit_code());
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::vector<std::string> string_list(const Json& j, const char* key) {
    return get_or<std::vector<std::string>>(j, key, {});
}

std::string render(const Json& j) {
    return j.dump(2) + "\n";
}

std::uint64_t scaled_size(std::uint64_t size, double scale) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(std::sqrt(scale) * static_cast<double>(size))));
}

// Feature block of partite p inside some edge type's joint table:
// (edge type, first column, width).
struct NodeSource {
    std::size_t edge_type = 0;
    std::size_t begin = 0;
    std::size_t width = 0;
};

std::optional<NodeSource> node_source(const std::vector<EdgeType>& types, const std::vector<JointLayout>& layouts,
                                      std::size_t partite) {
    for (std::size_t t = 0; t < types.size(); ++t) {
        if (types[t].src_partite == partite && layouts[t].src > 0) {
            return NodeSource{t, layouts[t].edge, layouts[t].src};
        }
        if (types[t].dst_partite == partite && layouts[t].dst > 0) {
            return NodeSource{t, layouts[t].edge + layouts[t].src, layouts[t].dst};
        }
    }
    return std::nullopt;
}

struct FeatureStage {
    std::vector<const FeatureModel*> models; // per edge type, null when featureless
    std::vector<const AlignerModel*> aligners;
    std::vector<JointLayout> layouts;
    AlignerMode mode = AlignerMode::ranked;
    bool align = true;
};

// Samples feature rows for every edge type, assigns them to edges and gives
// nodes that no edge reached their own sampled rows.
void attach_generated(PartiteGraph& g, const FeatureStage& stage, std::uint64_t seed, unsigned workers,
                      Json& timings) {
    g.node_features.assign(g.partites.size(), std::nullopt);
    g.edge_features.assign(g.edge_types.size(), std::nullopt);
    std::optional<StructFeatures> structure;
    auto fill = start_node_fill(g);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        if (!stage.models[t]) {
            continue;
        }
        const auto edges = g.edges[t].size();
        const auto rows = run_stage("sample_features", timings, [&] {
            return sample_features(*stage.models[t], edges, derive_seed(seed, tag_rows, t), workers);
        });
        const auto assignment = run_stage("align", timings, [&] {
            if (!stage.align) {
                std::vector<std::size_t> identity(edges);
                std::iota(identity.begin(), identity.end(), std::size_t{0});
                return identity;
            }
            const auto& model = *stage.aligners[t];
            if (stage.mode == AlignerMode::random) {
                return assign_rows(model, {}, edges, rows, stage.mode, derive_seed(seed, tag_assign, t));
            }
            if (!structure) {
                structure = structural_features(g);
            }
            const auto inputs = edge_inputs(g, t, *structure);
            const auto pred = predict_features(model, inputs, 2 * StructFeatures::width);
            return assign_rows(model, pred, edges, rows, stage.mode, derive_seed(seed, tag_assign, t));
        });
        attach_features(g, t, stage.layouts[t], rows, assignment, fill);
    }
    for (std::size_t p = 0; p < g.partites.size(); ++p) {
        const auto source = node_source(g.edge_types, stage.layouts, p);
        if (!source || !stage.models[source->edge_type]) {
            continue;
        }
        const auto missing = static_cast<std::size_t>(std::count(fill.set[p].begin(), fill.set[p].end(), 0));
        if (missing == 0) {
            continue;
        }
        run_stage("sample_features", timings, [&] {
            const auto rows = sample_features(*stage.models[source->edge_type], missing,
                                              derive_seed(seed, tag_node_rows, p), workers);
            std::vector<std::size_t> cols(source->width);
            std::iota(cols.begin(), cols.end(), source->begin);
            fill_remaining_nodes(g, p, rows.select_columns(cols), fill);
        });
    }
}

void write_curve_csv(const fs::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    write_csv_row(out, header);
    for (const auto& row : rows) {
        write_csv_row(out, row);
    }
    write_text_file(path, out.str());
}

} // namespace

void PipelineConfig::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ConfigError("scale must be positive");
    }
    if (!(noise >= 0.0 && noise <= 1.0)) {
        throw ConfigError("noise must lie in [0, 1]");
    }
    if (workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
    if (construction.partites.empty()) {
        throw ConfigError("config needs at least one partite");
    }
    if (construction.edge_types.empty()) {
        throw ConfigError("config needs at least one edge type");
    }
    std::set<std::string> names;
    std::set<std::string> used;
    for (const auto& p : construction.partites) {
        if (!is_safe_name(p.name)) {
            throw ConfigError("partite name '" + p.name + "' must use letters, digits, '_', '-', '.'");
        }
        if (!names.insert(p.name).second) {
            throw ConfigError("duplicate partite '" + p.name + "'");
        }
        if (p.key_columns.empty()) {
            throw ConfigError("partite '" + p.name + "' needs at least one key column");
        }
    }
    std::set<std::string> type_names;
    for (const auto& t : construction.edge_types) {
        if (!is_safe_name(t.name)) {
            throw ConfigError("edge type name '" + t.name + "' must use letters, digits, '_', '-', '.'");
        }
        if (!type_names.insert(t.name).second) {
            throw ConfigError("duplicate edge type '" + t.name + "'");
        }
        for (const auto& end : {t.src, t.dst}) {
            if (!names.contains(end)) {
                throw ConfigError("edge type '" + t.name + "' refers to unknown partite '" + end + "'");
            }
            used.insert(end);
        }
    }
    for (const auto& p : construction.partites) {
        if (!used.contains(p.name)) {
            throw ConfigError("partite '" + p.name + "' is not an endpoint of any edge type");
        }
    }
}

PipelineConfig config_from_json(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> known{"input",  "partites", "edge_types", "column_kinds", "feature_backend",
                                             "aligner", "noise",    "scale",      "seed",         "workers"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    PipelineConfig c;
    if (!j.contains("input")) {
        throw ConfigError("config key 'input' is required");
    }
    c.input = get_or<std::string>(j, "input", "");
    if (c.input.is_relative() && !base_dir.empty()) {
        c.input = base_dir / c.input;
    }
    if (!j.contains("partites") || !j.at("partites").is_array()) {
        throw ConfigError("config key 'partites' must be a list");
    }
    for (const auto& p : j.at("partites")) {
        PartiteRule rule;
        rule.name = get_or<std::string>(p, "name", "");
        rule.key_columns = string_list(p, "columns");
        rule.feature_columns = string_list(p, "feature_columns");
        c.construction.partites.push_back(std::move(rule));
    }
    if (j.contains("edge_types")) {
        for (const auto& t : j.at("edge_types")) {
            EdgeRule rule;
            rule.name = get_or<std::string>(t, "name", "edges");
            rule.src = get_or<std::string>(t, "src", "");
            rule.dst = get_or<std::string>(t, "dst", "");
            c.construction.edge_types.push_back(std::move(rule));
        }
    } else if (c.construction.partites.size() == 2) {
        c.construction.edge_types.push_back({"edges", c.construction.partites[0].name, c.construction.partites[1].name});
    } else if (c.construction.partites.size() == 1) {
        c.construction.edge_types.push_back({"edges", c.construction.partites[0].name, c.construction.partites[0].name});
    }
    for (const auto& [name, kind] : get_or<std::map<std::string, std::string>>(j, "column_kinds", {})) {
        c.column_kinds[name] = column_kind_from_string(kind);
    }
    c.feature_backend = feature_backend_from_string(get_or<std::string>(j, "feature_backend", "mixture"));
    c.aligner = aligner_mode_from_string(get_or<std::string>(j, "aligner", "ranked"));
    c.noise = get_or<double>(j, "noise", 0.1);
    c.scale = get_or<double>(j, "scale", 1.0);
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.workers = get_or<unsigned>(j, "workers", 1);
    c.validate();
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(parse_json(buf.str(), path.string()), path.parent_path());
}

Json to_json(const PipelineConfig& config) {
    Json partites = Json::array();
    for (const auto& p : config.construction.partites) {
        partites.push_back({{"name", p.name}, {"columns", p.key_columns}, {"feature_columns", p.feature_columns}});
    }
    Json types = Json::array();
    for (const auto& t : config.construction.edge_types) {
        types.push_back({{"name", t.name}, {"src", t.src}, {"dst", t.dst}});
    }
    Json kinds = Json::object();
    for (const auto& [name, kind] : config.column_kinds) {
        kinds[name] = std::string(to_string(kind));
    }
    return Json{{"input", config.input.generic_string()},
                {"partites", std::move(partites)},
                {"edge_types", std::move(types)},
                {"column_kinds", std::move(kinds)},
                {"feature_backend", std::string(to_string(config.feature_backend))},
                {"aligner", std::string(to_string(config.aligner))},
                {"noise", config.noise},
                {"scale", config.scale},
                {"seed", config.seed},
                {"workers", config.workers}};
}

unsigned workers_from_env(unsigned fallback) {
    const char* env = std::getenv("SYNGRAPH_WORKERS");
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) {
        throw ConfigError(std::string("SYNGRAPH_WORKERS must be a positive integer, got '") + env + "'");
    }
    return static_cast<unsigned>(v);
}

PartiteGraph load_real_graph(const PipelineConfig& config) {
    config.validate();
    const auto csv = read_csv(config.input);
    for (const auto& name : config.construction.referenced_columns()) {
        if (std::find(csv.header.begin(), csv.header.end(), name) == csv.header.end()) {
            throw ConfigError("config references missing column '" + name + "'");
        }
    }
    for (const auto& [name, kind] : config.column_kinds) {
        if (std::find(csv.header.begin(), csv.header.end(), name) == csv.header.end()) {
            throw ConfigError("column_kinds references missing column '" + name + "'");
        }
    }
    auto kinds = config.column_kinds;
    for (const auto& p : config.construction.partites) {
        for (const auto& key : p.key_columns) {
            kinds[key] = ColumnKind::categorical;
        }
    }
    const auto table = table_from_csv(csv, kinds);
    return build_graph_from_table(table, config.construction);
}

ModelBundle fit_bundle(const PartiteGraph& real, const PipelineConfig& config) {
    config.validate();
    real.validate();
    ModelBundle bundle;
    bundle.config = config;
    bundle.partites = real.partites;
    bundle.edge_types = real.edge_types;
    auto& timings = bundle.timings;

    std::optional<StructFeatures> structure;
    for (std::size_t t = 0; t < real.edge_types.size(); ++t) {
        EdgeTypeModel m;
        m.structure = run_stage("fit_structure", timings,
                                [&] { return fit_seed_model(real, t, config.noise, &m.fit); });
        for (const auto& d : m.fit.diagnostics) {
            bundle.diagnostics.push_back(real.edge_types[t].name + ": " + d);
        }
        m.layout = joint_layout(real, t);
        if (m.layout.width() > 0) {
            const auto joint = joint_feature_table(real, t);
            m.features = run_stage("fit_features", timings, [&] {
                return fit_feature_model(joint, config.feature_backend, derive_seed(config.seed, tag_features, t));
            });
            m.aligner = run_stage("fit_aligner", timings, [&] {
                if (!structure) {
                    structure = structural_features(real);
                }
                const auto inputs = edge_inputs(real, t, *structure);
                return fit_aligner(inputs, 2 * StructFeatures::width, joint, derive_seed(config.seed, tag_aligner, t));
            });
        }
        bundle.models.push_back(std::move(m));
    }
    bundle.real_summary = run_stage("summarize", timings, [&] { return summarize(real); });
    return bundle;
}

void save_bundle(const ModelBundle& bundle, const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    Json types = Json::array();
    for (std::size_t t = 0; t < bundle.edge_types.size(); ++t) {
        const auto& type = bundle.edge_types[t];
        const auto& m = bundle.models[t];
        const auto index = std::to_string(t);
        Json entry{{"name", type.name},
                   {"src", bundle.partites[type.src_partite].name},
                   {"dst", bundle.partites[type.dst_partite].name},
                   {"layout", {{"edge", m.layout.edge}, {"src", m.layout.src}, {"dst", m.layout.dst}}},
                   {"structure", "structure_" + index + ".json"},
                   {"fit", to_json(m.fit)}};
        files.emplace_back("structure_" + index + ".json", render(to_json(m.structure)));
        if (m.features) {
            entry["features"] = "features_" + index + ".json";
            files.emplace_back("features_" + index + ".json", render(to_json(*m.features)));
            Json bic = Json::array();
            for (const auto& b : m.features->bic) {
                bic.push_back({{"components", b.components}, {"bic", b.bic}});
            }
            entry["mixture_bic"] = std::move(bic);
        }
        if (m.aligner) {
            entry["aligner"] = "aligner_" + index + ".json";
            entry["aligner_trees"] = "aligner_trees_" + index + ".csv";
            files.emplace_back("aligner_" + index + ".json", render(to_json(*m.aligner)));
            std::ostringstream trees;
            write_trees_csv(trees, *m.aligner);
            files.emplace_back("aligner_trees_" + index + ".csv", trees.str());
        }
        types.push_back(std::move(entry));
    }
    files.emplace_back("real_summary.json", render(to_json(bundle.real_summary)));
    Json partites = Json::array();
    for (const auto& p : bundle.partites) {
        partites.push_back({{"name", p.name}, {"size", p.size}});
    }
    Json file_list = Json::array();
    for (const auto& f : files) {
        file_list.push_back(f.first);
    }
    const Json manifest{{"format_version", bundle_format_version},
                        {"kind", "bundle"},
                        {"config", to_json(bundle.config)},
                        {"partites", std::move(partites)},
                        {"edge_types", std::move(types)},
                        {"diagnostics", bundle.diagnostics},
                        {"files", std::move(file_list)},
                        {"timings", bundle.timings}};
    files.emplace_back("manifest.json", render(manifest));

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create " + dir.string() + ": " + ec.message());
    }
    for (const auto& [name, text] : files) {
        write_text_file(dir / name, text);
    }
}

ModelBundle load_bundle(const fs::path& dir) {
    const Json manifest = read_json_file(dir / "manifest.json");
    if (manifest.value("kind", "") != "bundle") {
        throw DataError(dir.string() + " is not a model bundle");
    }
    if (manifest.value("format_version", 0) != bundle_format_version) {
        throw DataError(dir.string() + ": unsupported bundle format version");
    }
    auto file = [&](const Json& entry, const char* key) {
        const auto name = entry.at(key).get<std::string>();
        if (!is_safe_name(name)) {
            throw DataError("unsafe file name '" + name + "' in bundle manifest");
        }
        return dir / name;
    };
    ModelBundle bundle;
    try {
        bundle.config = config_from_json(manifest.at("config"));
        for (const auto& p : manifest.at("partites")) {
            bundle.partites.push_back({p.at("name").get<std::string>(), p.at("size").get<std::uint64_t>()});
        }
        for (const auto& entry : manifest.at("edge_types")) {
            EdgeType type;
            type.name = entry.at("name").get<std::string>();
            auto find = [&](const std::string& name) {
                for (std::size_t i = 0; i < bundle.partites.size(); ++i) {
                    if (bundle.partites[i].name == name) {
                        return i;
                    }
                }
                throw DataError("bundle edge type '" + type.name + "' refers to unknown partite '" + name + "'");
            };
            type.src_partite = find(entry.at("src").get<std::string>());
            type.dst_partite = find(entry.at("dst").get<std::string>());
            bundle.edge_types.push_back(type);

            EdgeTypeModel m;
            m.structure = seed_model_from_json(read_json_file(file(entry, "structure")));
            const auto& fit = entry.at("fit");
            m.fit.p = fit.at("p").get<double>();
            m.fit.q = fit.at("q").get<double>();
            m.fit.loss_out = fit.at("loss_out").get<double>();
            m.fit.loss_in = fit.at("loss_in").get<double>();
            m.fit.seed = m.structure.seed;
            m.fit.diagnostics = fit.at("diagnostics").get<std::vector<std::string>>();
            const auto& layout = entry.at("layout");
            m.layout = {layout.at("edge").get<std::size_t>(), layout.at("src").get<std::size_t>(),
                        layout.at("dst").get<std::size_t>()};
            if (entry.contains("features")) {
                m.features = feature_model_from_json(read_json_file(file(entry, "features")));
            }
            if (entry.contains("aligner")) {
                m.aligner =
                    aligner_model_from_json(read_json_file(file(entry, "aligner")), read_csv(file(entry, "aligner_trees")));
            }
            if ((m.layout.width() > 0) != (m.features && m.aligner) ||
                (m.features && m.features->schema.size() != m.layout.width())) {
                throw DataError("bundle edge type '" + type.name + "' has inconsistent feature models");
            }
            bundle.models.push_back(std::move(m));
        }
        bundle.diagnostics = manifest.at("diagnostics").get<std::vector<std::string>>();
        bundle.timings = manifest.at("timings");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(dir.string() + ": malformed bundle: " + e.what());
    }
    bundle.real_summary = graph_summary_from_json(read_json_file(dir / "real_summary.json"));
    return bundle;
}

Generated generate(const ModelBundle& bundle, const GenerateOptions& options) {
    if (!(options.scale > 0.0) || !std::isfinite(options.scale)) {
        throw ConfigError("scale must be positive");
    }
    if (options.workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
    Generated out;
    out.info.seed = options.seed;
    out.info.scale = options.scale;
    out.info.workers = options.workers;
    auto& timings = out.info.timings;
    auto& g = out.graph;
    for (const auto& p : bundle.partites) {
        g.partites.push_back({p.name, scaled_size(p.size, options.scale)});
    }
    g.edge_types = bundle.edge_types;
    for (std::size_t t = 0; t < bundle.edge_types.size(); ++t) {
        auto model = run_stage("scale", timings, [&] { return scale_model(bundle.models[t].structure, options.scale); });
        const auto& type = bundle.edge_types[t];
        if (model.rows != g.partites[type.src_partite].size || model.cols != g.partites[type.dst_partite].size) {
            throw DataError("structure model of '" + type.name + "' does not match its partite sizes");
        }
        Engine engine = make_stream(options.seed, t, 0, tag_noise);
        model.noise.level_noise = draw_noise_factors(model.seed, model.noise.strength, model.shape.levels(), engine);
        out.info.level_noise.push_back(model.noise.level_noise);
        g.edges.push_back(run_stage("sample_edges", timings, [&] {
            return sample_edges(model, model.edges, derive_seed(options.seed, tag_edges, t), options.workers);
        }));
    }
    g.node_features.assign(g.partites.size(), std::nullopt);
    g.edge_features.assign(g.edge_types.size(), std::nullopt);
    if (options.features) {
        FeatureStage stage;
        for (const auto& m : bundle.models) {
            stage.models.push_back(m.features ? &*m.features : nullptr);
            stage.aligners.push_back(m.aligner ? &*m.aligner : nullptr);
            stage.layouts.push_back(m.layout);
        }
        stage.mode = options.aligner.value_or(bundle.config.aligner);
        stage.align = options.align;
        attach_generated(g, stage, options.seed, options.workers, timings);
    }
    return out;
}

Generated generate_baseline(const PartiteGraph& real, const PipelineConfig& config) {
    config.validate();
    Generated out;
    out.info.seed = config.seed;
    out.info.scale = 1.0;
    out.info.workers = config.workers;
    auto& timings = out.info.timings;
    auto& g = out.graph;
    g.partites = real.partites;
    g.edge_types = real.edge_types;
    std::vector<FeatureModel> models(real.edge_types.size());
    std::vector<AlignerModel> aligners(real.edge_types.size());
    FeatureStage stage;
    stage.mode = AlignerMode::random;
    for (std::size_t t = 0; t < real.edge_types.size(); ++t) {
        const auto& type = real.edge_types[t];
        g.edges.push_back(run_stage("sample_edges", timings, [&] {
            return sample_uniform_edges(real.partites[type.src_partite].size, real.partites[type.dst_partite].size,
                                        real.edges[t].size(), derive_seed(config.seed, tag_baseline, t),
                                        config.workers);
        }));
        stage.layouts.push_back(joint_layout(real, t));
        if (stage.layouts[t].width() > 0) {
            models[t] = run_stage("fit_features", timings, [&] {
                return fit_feature_model(joint_feature_table(real, t), FeatureBackend::independent,
                                         derive_seed(config.seed, tag_features, t));
            });
            stage.models.push_back(&models[t]);
        } else {
            stage.models.push_back(nullptr);
        }
        stage.aligners.push_back(&aligners[t]);
        out.info.level_noise.emplace_back();
    }
    attach_generated(g, stage, config.seed, config.workers, timings);
    return out;
}

GraphSummary load_real_summary(const fs::path& dir) {
    const Json manifest = read_json_file(dir / "manifest.json");
    const auto kind = manifest.value("kind", "");
    if (kind == "bundle") {
        return graph_summary_from_json(read_json_file(dir / "real_summary.json"));
    }
    if (kind == "dataset") {
        return summarize(read_dataset(dir));
    }
    throw DataError(dir.string() + " is neither a dataset nor a bundle directory");
}

MetricsReport evaluate(const GraphSummary& real, const PartiteGraph& synthetic, const fs::path& out) {
    const auto synth = summarize(synthetic, &real);
    auto report = compare(real, synth);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw DataError("cannot create " + out.string() + ": " + ec.message());
    }
    write_text_file(out / "report.json", render(to_json(report)));

    for (std::size_t t = 0; t < real.edge_types.size(); ++t) {
        const auto& a = real.edge_types[t];
        const auto& b = synth.edge_types[t];
        for (const auto& [dir, ra, rb] : {std::tuple{"out", &a.out, &b.out}, std::tuple{"in", &a.in, &b.in}}) {
            std::set<std::uint64_t> degrees;
            for (const auto& [k, c] : ra->counts) {
                degrees.insert(k);
            }
            for (const auto& [k, c] : rb->counts) {
                degrees.insert(k);
            }
            std::vector<std::vector<std::string>> rows;
            for (auto k : degrees) {
                const auto ia = ra->counts.find(k);
                const auto ib = rb->counts.find(k);
                rows.push_back({std::to_string(k), std::to_string(ia == ra->counts.end() ? 0 : ia->second),
                                std::to_string(ib == rb->counts.end() ? 0 : ib->second)});
            }
            write_curve_csv(out / ("degree_" + a.name + "_" + dir + ".csv"), {"degree", "real", "synthetic"}, rows);
        }
        for (const auto& [label, m] : {std::pair{"real", &a.association}, std::pair{"synthetic", &b.association}}) {
            std::vector<std::string> header{"column"};
            header.insert(header.end(), m->columns.begin(), m->columns.end());
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < m->size(); ++i) {
                std::vector<std::string> row{m->columns[i]};
                for (std::size_t j = 0; j < m->size(); ++j) {
                    row.push_back(format_double(m->at(i, j)));
                }
                rows.push_back(std::move(row));
            }
            write_curve_csv(out / ("association_" + a.name + "_" + label + ".csv"), header, rows);
        }
    }
    std::vector<std::vector<std::string>> hop_rows;
    const auto hops = std::max(real.hop.reachable.size(), synth.hop.reachable.size());
    for (std::size_t h = 0; h < hops; ++h) {
        auto value = [&](const HopPlot& p) {
            return h < p.reachable.size() ? format_double(p.reachable[h]) : std::string("0");
        };
        hop_rows.push_back({std::to_string(h + 1), value(real.hop), value(synth.hop)});
    }
    write_curve_csv(out / "hop_plot.csv", {"hops", "real", "synthetic"}, hop_rows);
    return report;
}

} // namespace syngraph
