#include "syngraph/serialize.hpp"

#include "syngraph/error.hpp"

#include <ostream>
#include <string>

namespace syngraph {

namespace {

template <class T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw DataError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("field '") + key + "': " + e.what());
    }
}

Json seed_to_json(const SeedMatrix& s) {
    return Json{{"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}};
}

SeedMatrix seed_from_json(const Json& j) {
    return {field<double>(j, "a"), field<double>(j, "b"), field<double>(j, "c"), field<double>(j, "d")};
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception&) {
        throw DataError(std::string("invalid ") + what + " '" + text + "'");
    }
}

double parse_number(const std::string& text, const char* what) {
    double v = 0.0;
    if (!parse_double(text, v)) {
        throw DataError(std::string("invalid ") + what + " '" + text + "'");
    }
    return v;
}

} // namespace

Json parse_json(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

Json schema_to_json(std::span<const ColumnSpec> schema) {
    Json out = Json::array();
    for (const auto& spec : schema) {
        Json col{{"name", spec.name}, {"kind", std::string(to_string(spec.kind))}};
        if (spec.is_categorical()) {
            col["vocabulary"] = spec.vocabulary;
        }
        out.push_back(std::move(col));
    }
    return out;
}

std::vector<ColumnSpec> schema_from_json(const Json& j) {
    std::vector<ColumnSpec> out;
    for (const auto& col : j) {
        ColumnSpec spec;
        spec.name = field<std::string>(col, "name");
        spec.kind = column_kind_from_string(field<std::string>(col, "kind"));
        if (spec.is_categorical()) {
            spec.vocabulary = field<std::vector<std::string>>(col, "vocabulary");
        }
        out.push_back(std::move(spec));
    }
    return out;
}

Json to_json(const DegreeDistribution& dd) {
    Json counts = Json::array();
    for (const auto& [k, c] : dd.counts) {
        counts.push_back({k, c});
    }
    return Json{{"direction", dd.direction == Direction::out ? "out" : "in"}, {"counts", std::move(counts)}};
}

DegreeDistribution degree_distribution_from_json(const Json& j) {
    DegreeDistribution dd;
    dd.direction = field<std::string>(j, "direction") == "out" ? Direction::out : Direction::in;
    for (const auto& pair : j.at("counts")) {
        dd.counts[pair.at(0).get<std::uint64_t>()] = pair.at(1).get<std::uint64_t>();
    }
    return dd;
}

Json to_json(const HopPlot& hop) {
    return Json{{"reachable", hop.reachable}, {"effective_diameter", hop.effective_diameter}, {"exact", hop.exact}};
}

HopPlot hop_plot_from_json(const Json& j) {
    HopPlot hop;
    hop.reachable = field<std::vector<double>>(j, "reachable");
    hop.effective_diameter = field<std::uint32_t>(j, "effective_diameter");
    hop.exact = field<bool>(j, "exact");
    return hop;
}

Json to_json(const SeedModel& model) {
    return Json{{"seed", seed_to_json(model.seed)},
                {"rows", model.rows},
                {"cols", model.cols},
                {"edges", model.edges},
                {"shape",
                 {{"n", model.shape.n},
                  {"m", model.shape.m},
                  {"square_levels", model.shape.square_levels},
                  {"row_pad_levels", model.shape.row_pad_levels},
                  {"col_pad_levels", model.shape.col_pad_levels}}},
                {"noise", {{"strength", model.noise.strength}, {"level_noise", model.noise.level_noise}}},
                {"ratios",
                 {{"ab", model.ratios.ab}, {"ac", model.ratios.ac}, {"frequency", model.ratios.frequency}}}};
}

SeedModel seed_model_from_json(const Json& j) {
    SeedModel model;
    model.seed = seed_from_json(j.at("seed"));
    model.rows = field<std::uint64_t>(j, "rows");
    model.cols = field<std::uint64_t>(j, "cols");
    model.edges = field<std::uint64_t>(j, "edges");
    const auto& shape = j.at("shape");
    model.shape.n = field<unsigned>(shape, "n");
    model.shape.m = field<unsigned>(shape, "m");
    model.shape.square_levels = field<unsigned>(shape, "square_levels");
    model.shape.row_pad_levels = field<unsigned>(shape, "row_pad_levels");
    model.shape.col_pad_levels = field<unsigned>(shape, "col_pad_levels");
    if (model.shape != plan_shape(model.rows, model.cols)) {
        throw DataError("structure model shape does not match its node counts");
    }
    model.noise.strength = field<double>(j.at("noise"), "strength");
    model.noise.level_noise = field<std::vector<double>>(j.at("noise"), "level_noise");
    model.ratios.ab = field<double>(j.at("ratios"), "ab");
    model.ratios.ac = field<double>(j.at("ratios"), "ac");
    model.ratios.frequency = field<std::array<double, 4>>(j.at("ratios"), "frequency");
    if (!model.seed.valid(1e-9)) {
        throw DataError("structure model seed is not a probability matrix");
    }
    return model;
}

Json to_json(const SeedFit& fit) {
    return Json{{"seed", seed_to_json(fit.seed)}, {"p", fit.p},           {"q", fit.q},
                {"loss_out", fit.loss_out},       {"loss_in", fit.loss_in}, {"diagnostics", fit.diagnostics}};
}

Json to_json(const FeatureModel& model) {
    Json normalizers = Json::array();
    for (const auto& n : model.normalizers) {
        Json modes = Json::array();
        for (const auto& m : n.modes) {
            modes.push_back({{"weight", m.weight}, {"mean", m.mean}, {"variance", m.variance}});
        }
        normalizers.push_back({{"constant", n.constant}, {"modes", std::move(modes)}});
    }
    Json components = Json::array();
    for (const auto& c : model.components) {
        components.push_back(
            {{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}, {"tables", c.tables}});
    }
    Json bic = Json::array();
    for (const auto& b : model.bic) {
        bic.push_back({{"components", b.components}, {"bic", b.bic}});
    }
    return Json{{"schema", schema_to_json(model.schema)},
                {"backend", std::string(to_string(model.backend))},
                {"normalizers", std::move(normalizers)},
                {"marginals", model.marginals},
                {"components", std::move(components)},
                {"bic", std::move(bic)}};
}

FeatureModel feature_model_from_json(const Json& j) {
    FeatureModel model;
    model.schema = schema_from_json(j.at("schema"));
    model.backend = feature_backend_from_string(field<std::string>(j, "backend"));
    for (const auto& n : j.at("normalizers")) {
        ContinuousNormalizer norm;
        norm.constant = field<bool>(n, "constant");
        for (const auto& m : n.at("modes")) {
            norm.modes.push_back({field<double>(m, "weight"), field<double>(m, "mean"), field<double>(m, "variance")});
        }
        model.normalizers.push_back(std::move(norm));
    }
    model.marginals = field<std::vector<std::vector<double>>>(j, "marginals");
    for (const auto& c : j.at("components")) {
        MixtureComponent comp;
        comp.weight = field<double>(c, "weight");
        comp.mean = field<std::vector<double>>(c, "mean");
        comp.variance = field<std::vector<double>>(c, "variance");
        comp.tables = field<std::vector<std::vector<double>>>(c, "tables");
        model.components.push_back(std::move(comp));
    }
    for (const auto& b : j.at("bic")) {
        model.bic.push_back({field<std::size_t>(b, "components"), field<double>(b, "bic")});
    }
    if (model.normalizers.size() != model.schema.size()) {
        throw DataError("feature model has " + std::to_string(model.normalizers.size()) + " normalizers for " +
                        std::to_string(model.schema.size()) + " columns");
    }
    return model;
}

Json to_json(const AlignerModel& model) {
    Json targets = Json::array();
    for (const auto& t : model.targets) {
        Json ensembles = Json::array();
        for (const auto& e : t.ensembles) {
            ensembles.push_back(
                {{"base_score", e.base_score}, {"learning_rate", e.learning_rate}, {"trees", e.trees.size()}});
        }
        const ColumnSpec one[1] = {t.column};
        targets.push_back({{"column", schema_to_json(one).at(0)},
                           {"mean", t.mean},
                           {"scale", t.scale},
                           {"ensembles", std::move(ensembles)}});
    }
    return Json{{"input_width", model.input_width}, {"targets", std::move(targets)}};
}

void write_trees_csv(std::ostream& out, const AlignerModel& model) {
    const std::string header[] = {"target", "ensemble", "tree", "node", "feature", "threshold", "left", "right", "value"};
    write_csv_row(out, header);
    std::vector<std::string> row(9);
    for (std::size_t t = 0; t < model.targets.size(); ++t) {
        const auto& target = model.targets[t];
        for (std::size_t e = 0; e < target.ensembles.size(); ++e) {
            const auto& trees = target.ensembles[e].trees;
            for (std::size_t k = 0; k < trees.size(); ++k) {
                for (std::size_t n = 0; n < trees[k].nodes.size(); ++n) {
                    const auto& node = trees[k].nodes[n];
                    row = {std::to_string(t),         std::to_string(e),          std::to_string(k),
                           std::to_string(n),         std::to_string(node.feature), format_double(node.threshold),
                           std::to_string(node.left), std::to_string(node.right), format_double(node.value)};
                    write_csv_row(out, row);
                }
            }
        }
    }
}

AlignerModel aligner_model_from_json(const Json& j, const CsvData& trees) {
    AlignerModel model;
    model.input_width = field<std::size_t>(j, "input_width");
    for (const auto& t : j.at("targets")) {
        AlignerTarget target;
        target.column = schema_from_json(Json::array({t.at("column")})).at(0);
        target.mean = field<double>(t, "mean");
        target.scale = field<double>(t, "scale");
        for (const auto& e : t.at("ensembles")) {
            GradientBoostedEnsemble ens;
            ens.base_score = field<double>(e, "base_score");
            ens.learning_rate = field<double>(e, "learning_rate");
            ens.trees.resize(field<std::size_t>(e, "trees"));
            target.ensembles.push_back(std::move(ens));
        }
        model.targets.push_back(std::move(target));
    }
    const std::vector<std::string> expected{"target", "ensemble", "tree", "node", "feature",
                                            "threshold", "left", "right", "value"};
    if (trees.header != expected) {
        throw DataError("aligner tree table has an unexpected header");
    }
    for (const auto& row : trees.rows) {
        const auto t = parse_u64(row[0], "target index");
        const auto e = parse_u64(row[1], "ensemble index");
        const auto k = parse_u64(row[2], "tree index");
        const auto n = parse_u64(row[3], "node index");
        if (t >= model.targets.size() || e >= model.targets[t].ensembles.size() ||
            k >= model.targets[t].ensembles[e].trees.size()) {
            throw DataError("aligner tree row refers to a missing ensemble");
        }
        auto& nodes = model.targets[t].ensembles[e].trees[k].nodes;
        if (n != nodes.size()) {
            throw DataError("aligner tree nodes are out of order");
        }
        TreeNode node;
        node.feature = static_cast<std::int32_t>(std::stol(row[4]));
        node.threshold = parse_number(row[5], "threshold");
        node.left = static_cast<std::int32_t>(std::stol(row[6]));
        node.right = static_cast<std::int32_t>(std::stol(row[7]));
        node.value = parse_number(row[8], "leaf value");
        nodes.push_back(node);
    }
    for (const auto& t : model.targets) {
        for (const auto& e : t.ensembles) {
            for (const auto& tree : e.trees) {
                const auto size = static_cast<std::int32_t>(tree.nodes.size());
                if (tree.nodes.empty()) {
                    throw DataError("aligner tree without nodes");
                }
                for (const auto& node : tree.nodes) {
                    if (node.feature >= static_cast<std::int32_t>(model.input_width) ||
                        (node.feature >= 0 &&
                         (node.left <= 0 || node.left >= size || node.right <= 0 || node.right >= size))) {
                        throw DataError("aligner tree node is malformed");
                    }
                }
            }
        }
    }
    return model;
}

Json to_json(const GraphSummary& summary) {
    Json types = Json::array();
    for (const auto& e : summary.edge_types) {
        Json bins = Json::array();
        for (const auto& b : e.bins) {
            bins.push_back({{"name", b.name}, {"categorical", b.categorical}, {"cuts", b.cuts}, {"labels", b.labels}});
        }
        types.push_back({{"name", e.name},
                         {"out", to_json(e.out)},
                         {"in", to_json(e.in)},
                         {"association", {{"columns", e.association.columns}, {"values", e.association.values}}},
                         {"bins", std::move(bins)},
                         {"src_hist", e.src_hist},
                         {"dst_hist", e.dst_hist}});
    }
    return Json{{"nodes", summary.nodes},
                {"edges", summary.edges},
                {"edge_types", std::move(types)},
                {"hop_plot", to_json(summary.hop)}};
}

GraphSummary graph_summary_from_json(const Json& j) {
    GraphSummary s;
    s.nodes = field<std::uint64_t>(j, "nodes");
    s.edges = field<std::uint64_t>(j, "edges");
    for (const auto& t : j.at("edge_types")) {
        EdgeTypeSummary e;
        e.name = field<std::string>(t, "name");
        e.out = degree_distribution_from_json(t.at("out"));
        e.in = degree_distribution_from_json(t.at("in"));
        e.association.columns = field<std::vector<std::string>>(t.at("association"), "columns");
        e.association.values = field<std::vector<double>>(t.at("association"), "values");
        for (const auto& b : t.at("bins")) {
            ColumnBinning bin;
            bin.name = field<std::string>(b, "name");
            bin.categorical = field<bool>(b, "categorical");
            bin.cuts = field<std::vector<double>>(b, "cuts");
            bin.labels = field<std::vector<std::string>>(b, "labels");
            e.bins.push_back(std::move(bin));
        }
        e.src_hist = field<std::vector<std::vector<double>>>(t, "src_hist");
        e.dst_hist = field<std::vector<std::vector<double>>>(t, "dst_hist");
        s.edge_types.push_back(std::move(e));
    }
    s.hop = hop_plot_from_json(j.at("hop_plot"));
    return s;
}

Json to_json(const MetricsReport& report) {
    Json types = Json::array();
    for (const auto& e : report.edge_types) {
        types.push_back({{"name", e.name},
                         {"dcc_out", e.dcc_out},
                         {"dcc_in", e.dcc_in},
                         {"feature_corr", e.feature_corr},
                         {"degree_feature_js", e.degree_feature_js}});
    }
    return Json{{"degree_dist_score", report.degree_dist_score},
                {"dcc_raw", report.dcc_raw},
                {"feature_corr_score", report.feature_corr_score},
                {"degree_feature_js", report.degree_feature_js},
                {"hop_plot",
                 {{"real", to_json(report.real_hop)}, {"synthetic", to_json(report.synth_hop)}}},
                {"edge_types", std::move(types)},
                {"diagnostics", report.diagnostics}};
}

} // namespace syngraph
