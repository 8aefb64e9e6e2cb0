#pragma once

// Structure-to-feature predictor and the assignment of generated feature
// rows to generated edges.

#include "syngraph/gbdt.hpp"
#include "syngraph/graph.hpp"
#include "syngraph/structure.hpp"
#include "syngraph/table.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace syngraph {

enum class AlignerMode { ranked, random, exhaustive };

std::string_view to_string(AlignerMode mode);
AlignerMode aligner_mode_from_string(std::string_view text);

struct AlignerTarget {
    ColumnSpec column;
    double mean = 0.0; // continuous targets are standardized: (x - mean) / scale
    double scale = 1.0;
    // One ensemble for a continuous column, one per vocabulary entry for a
    // categorical column (classes past the cap keep only their base score).
    std::vector<GradientBoostedEnsemble> ensembles;
};

struct AlignerModel {
    std::size_t input_width = 2 * StructFeatures::width;
    std::vector<AlignerTarget> targets;

    [[nodiscard]] std::vector<ColumnSpec> schema() const;
    // Continuous columns contribute one slot, categorical columns one per class.
    [[nodiscard]] std::size_t prediction_width() const;
};

struct AlignerOptions {
    GbdtParams gbdt;
    std::size_t max_classes = 16; // categorical classes with their own trees
};

// [src struct features | dst struct features] per edge of one edge type.
std::vector<double> edge_inputs(const PartiteGraph& g, std::size_t edge_type, const StructFeatures& features);

// `inputs` is row-major with model width, one row per row of `targets`.
AlignerModel fit_aligner(std::span<const double> inputs, std::size_t width, const FeatureTable& targets,
                         std::uint64_t seed, const AlignerOptions& options = {});

// Row-major predictions, prediction_width() per input row.
std::vector<double> predict_features(const AlignerModel& model, std::span<const double> inputs, std::size_t width);

// -sum over continuous (pred - x)^2 + sum over categorical cosine(pred block,
// one-hot(x)). `candidate` holds continuous values in prediction space and
// categorical codes.
double similarity(std::span<const double> pred, std::span<const double> candidate, std::span<const ColumnSpec> schema);

// A feature row mapped to prediction space (continuous columns standardized).
std::vector<double> to_prediction_space(const AlignerModel& model, std::span<const double> row);

// assignment[e] = row used for edge e; rows are used at most once.
std::vector<std::size_t> assign_rows(const AlignerModel& model, std::span<const double> predictions,
                                     std::size_t edges, const FeatureTable& rows, AlignerMode mode,
                                     std::uint64_t seed);

// Tracks which nodes already carry features while edge types are attached.
struct NodeFill {
    std::vector<std::vector<char>> set; // per partite, per node
};

NodeFill start_node_fill(const PartiteGraph& g);

// Splits the assigned joint rows of one edge type into edge features and
// node features; a node keeps the first row that reaches it.
void attach_features(PartiteGraph& g, std::size_t edge_type, const JointLayout& layout, const FeatureTable& joint,
                     std::span<const std::size_t> assignment, NodeFill& fill);

// Gives every node of `partite` still without features the next row of
// `rows` (node schema), in node order. Returns the number of rows consumed.
std::size_t fill_remaining_nodes(PartiteGraph& g, std::size_t partite, const FeatureTable& rows, NodeFill& fill);

} // namespace syngraph
