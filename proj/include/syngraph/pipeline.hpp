#pragma once

// End-to-end stages behind the command-line tool: fit a bundle from a real
// table, generate scaled synthetic datasets, evaluate, and the ER baseline.

#include "syngraph/aligner.hpp"
#include "syngraph/dataset.hpp"
#include "syngraph/features.hpp"
#include "syngraph/graph.hpp"
#include "syngraph/kronecker.hpp"
#include "syngraph/metrics.hpp"
#include "syngraph/serialize.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace syngraph {

inline constexpr int bundle_format_version = 1;

struct PipelineConfig {
    std::filesystem::path input;
    ConstructionSpec construction;
    std::map<std::string, ColumnKind> column_kinds;
    FeatureBackend feature_backend = FeatureBackend::mixture;
    AlignerMode aligner = AlignerMode::ranked;
    double noise = 0.1;
    double scale = 1.0;
    std::uint64_t seed = 0;
    unsigned workers = 1;

    // Ranges and names; column existence is checked against the input.
    void validate() const;
};

// Relative input paths resolve against `base_dir`.
PipelineConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
Json to_json(const PipelineConfig& config);

// Worker count from SYNGRAPH_WORKERS when set, `fallback` otherwise.
unsigned workers_from_env(unsigned fallback);

// Reads the input CSV and builds the real graph; key columns are categorical.
PartiteGraph load_real_graph(const PipelineConfig& config);

struct EdgeTypeModel {
    SeedModel structure;
    SeedFit fit;
    JointLayout layout;
    std::optional<FeatureModel> features; // absent when there are no feature columns
    std::optional<AlignerModel> aligner;
};

struct ModelBundle {
    PipelineConfig config;
    std::vector<Partite> partites;
    std::vector<EdgeType> edge_types;
    std::vector<EdgeTypeModel> models; // per edge type
    GraphSummary real_summary;
    std::vector<std::string> diagnostics;
    Json timings = Json::object();
};

ModelBundle fit_bundle(const PartiteGraph& real, const PipelineConfig& config);

// Writes into `dir` only after every file has been rendered.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);
ModelBundle load_bundle(const std::filesystem::path& dir);

struct GenerateOptions {
    double scale = 1.0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::optional<AlignerMode> aligner; // bundle config when unset
    bool features = true;               // false: structure only
    bool align = true;                  // false: rows attached in sampling order
};

struct Generated {
    PartiteGraph graph;
    DatasetInfo info;
};

Generated generate(const ModelBundle& bundle, const GenerateOptions& options);

// Erdos-Renyi structure with the real partite sizes and edge counts,
// independent-column features, random assignment.
Generated generate_baseline(const PartiteGraph& real, const PipelineConfig& config);

// Real side of an evaluation: a dataset directory or a bundle directory.
GraphSummary load_real_summary(const std::filesystem::path& dir);

// Writes report.json plus curve CSVs into `out`.
MetricsReport evaluate(const GraphSummary& real, const PartiteGraph& synthetic, const std::filesystem::path& out);

} // namespace syngraph
