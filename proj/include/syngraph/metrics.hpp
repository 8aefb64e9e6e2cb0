#pragma once

// Fidelity metrics between a real and a synthetic attributed graph.

#include "syngraph/graph.hpp"
#include "syngraph/structure.hpp"
#include "syngraph/table.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace syngraph {

// Mean relative error between two degree-distribution curves sampled at
// `points` log-spaced degrees. Degree 0 is excluded; each curve interpolates
// linearly in log-degree between its non-zero counts and is 0 outside them.
// The normalized form divides degrees by each graph's max degree and counts
// by each graph's max count; the raw form compares counts directly over
// [1, max real degree].
double dcc_normalized(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points = 100);
double dcc_raw(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points = 100);
// Raw form when both graphs have the same edge count, normalized otherwise.
double dcc(const DegreeDistribution& real, const DegreeDistribution& synth, std::size_t points = 100);
double degree_dist_score(const DegreeDistribution& real, const DegreeDistribution& synth);

// U(x | y) in nats; 0 when x is constant.
double theils_u(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y);
double correlation_ratio(std::span<const std::uint32_t> category, std::span<const double> value);
// |Pearson r|; 0 when either side has zero variance.
double abs_pearson(std::span<const double> x, std::span<const double> y);

struct AssociationMatrix {
    std::vector<std::string> columns;
    std::vector<double> values; // row-major, entry (i, j) = association of column i given column j

    [[nodiscard]] std::size_t size() const noexcept { return columns.size(); }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
    friend bool operator==(const AssociationMatrix&, const AssociationMatrix&) = default;
};

AssociationMatrix association_matrix(const FeatureTable& table);

// 1 - mean |real_ij - synth_ij| over off-diagonal entries; 1 with a
// diagnostic when there are none.
double feature_corr_score(const AssociationMatrix& real, const AssociationMatrix& synth,
                          std::vector<std::string>* diagnostics = nullptr);
double feature_corr_score(const FeatureTable& real, const FeatureTable& synth);

// Degree buckets: 0, 1, 2-3, 4-7, ..., capped at 2^20 and above.
inline constexpr std::size_t degree_buckets = 22;
inline constexpr std::size_t feature_bins = 16;
std::size_t degree_bucket(std::uint64_t degree);

// Feature binning fixed from the real data: quantile cuts for continuous
// columns, the 15 most frequent labels plus "other" for categorical ones.
struct ColumnBinning {
    std::string name;
    bool categorical = false;
    std::vector<double> cuts;
    std::vector<std::string> labels;

    [[nodiscard]] std::size_t bin(const FeatureTable& table, std::size_t row, std::size_t col) const;
    friend bool operator==(const ColumnBinning&, const ColumnBinning&) = default;
};

ColumnBinning make_binning(const FeatureTable& real, std::size_t col);

// Jensen-Shannon divergence in bits of two histograms (normalized here).
double js_divergence(std::span<const double> p, std::span<const double> q);

struct EdgeTypeSummary {
    std::string name;
    DegreeDistribution out;
    DegreeDistribution in;
    AssociationMatrix association;
    std::vector<ColumnBinning> bins;
    // Per column, degree_buckets x feature_bins counts keyed by the source
    // (destination) endpoint's total degree.
    std::vector<std::vector<double>> src_hist;
    std::vector<std::vector<double>> dst_hist;
};

struct GraphSummary {
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;
    std::vector<EdgeTypeSummary> edge_types;
    HopPlot hop;
};

struct SummaryOptions {
    std::size_t hop_sources = 1000;
    std::size_t max_hops = 30;
    std::uint64_t seed = 0;
};

// Everything evaluation needs from one graph. Feature bins come from
// `reference` when given (the real summary), otherwise from g itself.
GraphSummary summarize(const PartiteGraph& g, const GraphSummary* reference = nullptr,
                       const SummaryOptions& options = {});

struct EdgeTypeReport {
    std::string name;
    double dcc_out = 0.0;
    double dcc_in = 0.0;
    double feature_corr = 1.0;
    double degree_feature_js = 0.0;
};

struct MetricsReport {
    double degree_dist_score = 0.0;
    double dcc_raw = 0.0; // mean DCC over edge types and directions
    double feature_corr_score = 1.0;
    double degree_feature_js = 0.0;
    HopPlot real_hop;
    HopPlot synth_hop;
    std::vector<EdgeTypeReport> edge_types;
    std::vector<std::string> diagnostics;
};

// Throws DataError naming the differing edge types or columns.
MetricsReport compare(const GraphSummary& real, const GraphSummary& synth);

} // namespace syngraph
