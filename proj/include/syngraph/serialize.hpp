#pragma once

// JSON / CSV encodings of every persisted model and summary. Doubles
// round-trip exactly.

#include "syngraph/aligner.hpp"
#include "syngraph/csv.hpp"
#include "syngraph/features.hpp"
#include "syngraph/kronecker.hpp"
#include "syngraph/metrics.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <vector>

namespace syngraph {

using Json = nlohmann::ordered_json;

Json schema_to_json(std::span<const ColumnSpec> schema);
std::vector<ColumnSpec> schema_from_json(const Json& j);

Json to_json(const DegreeDistribution& dd);
DegreeDistribution degree_distribution_from_json(const Json& j);

Json to_json(const HopPlot& hop);
HopPlot hop_plot_from_json(const Json& j);

Json to_json(const SeedModel& model);
SeedModel seed_model_from_json(const Json& j);

Json to_json(const SeedFit& fit);

Json to_json(const FeatureModel& model);
FeatureModel feature_model_from_json(const Json& j);

// Ensemble metadata goes to JSON, tree nodes to a flat CSV table.
Json to_json(const AlignerModel& model);
void write_trees_csv(std::ostream& out, const AlignerModel& model);
AlignerModel aligner_model_from_json(const Json& j, const CsvData& trees);

Json to_json(const GraphSummary& summary);
GraphSummary graph_summary_from_json(const Json& j);

Json to_json(const MetricsReport& report);

// Parses a JSON document, mapping syntax errors onto ConfigError.
Json parse_json(std::string_view text, std::string_view what);

} // namespace syngraph
