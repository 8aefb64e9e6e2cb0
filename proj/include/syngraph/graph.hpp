#pragma once

#include "syngraph/table.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace syngraph {

using NodeId = std::uint64_t;

// Endpoints are indices local to the edge type's source / destination partite.
struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Partite {
    std::string name;
    std::uint64_t size = 0;
};

struct EdgeType {
    std::string name;
    std::size_t src_partite = 0;
    std::size_t dst_partite = 0;
};

// Directed n-partite graph with optional node and edge feature tables.
// Treated as immutable once validate() has passed.
struct PartiteGraph {
    std::vector<Partite> partites;
    std::vector<EdgeType> edge_types;
    std::vector<std::vector<Edge>> edges;                   // per edge type
    std::vector<std::optional<FeatureTable>> node_features; // per partite
    std::vector<std::optional<FeatureTable>> edge_features; // per edge type

    [[nodiscard]] std::uint64_t total_nodes() const;
    [[nodiscard]] std::uint64_t total_edges() const;
    // Global node id of partite-local id 0.
    [[nodiscard]] std::uint64_t offset(std::size_t partite) const;
    [[nodiscard]] std::optional<std::size_t> find_partite(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> find_edge_type(std::string_view name) const;

    // Ranges, table row counts, and the no-duplicate-edge rule.
    void validate() const;
};

enum class Direction { in, out };

struct DegreeDistribution {
    Direction direction = Direction::out;
    std::map<std::uint64_t, std::uint64_t> counts; // degree -> nodes, zero degree included

    [[nodiscard]] std::uint64_t node_count() const;
    [[nodiscard]] std::uint64_t max_degree() const;
    // Sum of k * c_k; equals the edge count of the edge type.
    [[nodiscard]] std::uint64_t degree_sum() const;
    friend bool operator==(const DegreeDistribution&, const DegreeDistribution&) = default;
};

DegreeDistribution degree_distribution(const PartiteGraph& g, std::size_t edge_type, Direction direction);

// in + out degree of every node, indexed by global id, over all edge types.
std::vector<std::uint64_t> total_degrees(const PartiteGraph& g);

// Rules for turning a table into a graph: every partite is keyed by the
// concatenation of its key columns; every edge type connects the two
// partites' keys that co-occur in the same row.
struct PartiteRule {
    std::string name;
    std::vector<std::string> key_columns;
    std::vector<std::string> feature_columns; // node features, first row wins
};

struct EdgeRule {
    std::string name = "edges";
    std::string src;
    std::string dst;
};

struct ConstructionSpec {
    std::vector<PartiteRule> partites;
    std::vector<EdgeRule> edge_types;

    [[nodiscard]] std::vector<std::string> referenced_columns() const;
};

// One node per distinct key (dense ids in first-appearance order), one edge
// per row and edge type; duplicate (src, dst) rows keep the first row's
// features. Columns not used as keys or node features become edge features.
PartiteGraph build_graph_from_table(const FeatureTable& table, const ConstructionSpec& spec);

// Edge list of one edge type as a table with `src`, `dst` id columns
// (categorical labels) followed by the edge features.
FeatureTable edge_table(const PartiteGraph& g, std::size_t edge_type);

// Column blocks of the edge-centric view of one edge type.
struct JointLayout {
    std::size_t edge = 0; // edge feature columns
    std::size_t src = 0;  // "src:" node feature columns of the source partite
    std::size_t dst = 0;  // "dst:" node feature columns of the destination partite

    [[nodiscard]] std::size_t width() const noexcept { return edge + src + dst; }
    friend bool operator==(const JointLayout&, const JointLayout&) = default;
};

JointLayout joint_layout(const PartiteGraph& g, std::size_t edge_type);

// One row per edge: edge features, then the source node's features, then the
// destination node's features, with the node columns prefixed "src:"/"dst:".
FeatureTable joint_feature_table(const PartiteGraph& g, std::size_t edge_type);

} // namespace syngraph
