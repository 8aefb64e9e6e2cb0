#include "syngraph/graph.hpp"

#include "syngraph/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace syngraph {

std::uint64_t PartiteGraph::total_nodes() const {
    std::uint64_t total = 0;
    for (const auto& p : partites) {
        total += p.size;
    }
    return total;
}

std::uint64_t PartiteGraph::total_edges() const {
    std::uint64_t total = 0;
    for (const auto& list : edges) {
        total += list.size();
    }
    return total;
}

std::uint64_t PartiteGraph::offset(std::size_t partite) const {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < partite; ++i) {
        total += partites[i].size;
    }
    return total;
}

std::optional<std::size_t> PartiteGraph::find_partite(std::string_view name) const {
    for (std::size_t i = 0; i < partites.size(); ++i) {
        if (partites[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> PartiteGraph::find_edge_type(std::string_view name) const {
    for (std::size_t i = 0; i < edge_types.size(); ++i) {
        if (edge_types[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

void PartiteGraph::validate() const {
    if (edges.size() != edge_types.size()) {
        throw DataError("edge list count does not match edge type count");
    }
    if (!node_features.empty() && node_features.size() != partites.size()) {
        throw DataError("node feature slots do not match partites");
    }
    if (!edge_features.empty() && edge_features.size() != edge_types.size()) {
        throw DataError("edge feature slots do not match edge types");
    }
    for (std::size_t t = 0; t < edge_types.size(); ++t) {
        const auto& type = edge_types[t];
        if (type.src_partite >= partites.size() || type.dst_partite >= partites.size()) {
            throw DataError("edge type '" + type.name + "' references an unknown partite");
        }
        const auto rows = partites[type.src_partite].size;
        const auto cols = partites[type.dst_partite].size;
        std::vector<Edge> sorted = edges[t];
        for (const auto& e : sorted) {
            if (e.src >= rows || e.dst >= cols) {
                throw DataError("edge type '" + type.name + "' has an out-of-range endpoint");
            }
        }
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DataError("edge type '" + type.name + "' has duplicate edges");
        }
        if (!edge_features.empty() && edge_features[t] && edge_features[t]->num_rows() != edges[t].size()) {
            throw DataError("edge feature rows of '" + type.name + "' do not match its edge count");
        }
    }
    for (std::size_t p = 0; p < node_features.size(); ++p) {
        if (node_features[p] && node_features[p]->num_rows() != partites[p].size) {
            throw DataError("node feature rows of '" + partites[p].name + "' do not match its node count");
        }
    }
}

std::uint64_t DegreeDistribution::node_count() const {
    std::uint64_t total = 0;
    for (auto [k, c] : counts) {
        total += c;
    }
    return total;
}

std::uint64_t DegreeDistribution::max_degree() const {
    for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
        if (it->second > 0) {
            return it->first;
        }
    }
    return 0;
}

std::uint64_t DegreeDistribution::degree_sum() const {
    std::uint64_t total = 0;
    for (auto [k, c] : counts) {
        total += k * c;
    }
    return total;
}

DegreeDistribution degree_distribution(const PartiteGraph& g, std::size_t edge_type, Direction direction) {
    const auto& type = g.edge_types.at(edge_type);
    const auto partite = direction == Direction::out ? type.src_partite : type.dst_partite;
    std::vector<std::uint64_t> degree(g.partites.at(partite).size, 0);
    for (const auto& e : g.edges.at(edge_type)) {
        ++degree[direction == Direction::out ? e.src : e.dst];
    }
    DegreeDistribution dd;
    dd.direction = direction;
    for (auto k : degree) {
        ++dd.counts[k];
    }
    return dd;
}

std::vector<std::uint64_t> total_degrees(const PartiteGraph& g) {
    std::vector<std::uint64_t> degree(g.total_nodes(), 0);
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto src_off = g.offset(g.edge_types[t].src_partite);
        const auto dst_off = g.offset(g.edge_types[t].dst_partite);
        for (const auto& e : g.edges[t]) {
            ++degree[src_off + e.src];
            ++degree[dst_off + e.dst];
        }
    }
    return degree;
}

std::vector<std::string> ConstructionSpec::referenced_columns() const {
    std::vector<std::string> out;
    for (const auto& p : partites) {
        out.insert(out.end(), p.key_columns.begin(), p.key_columns.end());
        out.insert(out.end(), p.feature_columns.begin(), p.feature_columns.end());
    }
    return out;
}

namespace {

std::size_t require_column(const FeatureTable& table, const std::string& name) {
    auto c = table.find_column(name);
    if (!c) {
        throw ConfigError("construction rule references missing column '" + name + "'");
    }
    return *c;
}

struct Uint128Hash {
    std::size_t operator()(const Edge& e) const noexcept {
        return std::hash<std::uint64_t>{}(e.src * 0x9E3779B97F4A7C15ULL ^ e.dst);
    }
};

struct EdgeEq {
    bool operator()(const Edge& a, const Edge& b) const noexcept { return a.src == b.src && a.dst == b.dst; }
};

} // namespace

PartiteGraph build_graph_from_table(const FeatureTable& table, const ConstructionSpec& spec) {
    if (spec.partites.empty() || spec.edge_types.empty()) {
        throw ConfigError("construction spec needs at least one partite and one edge type");
    }
    std::vector<std::vector<std::size_t>> key_cols(spec.partites.size());
    std::vector<std::vector<std::size_t>> node_cols(spec.partites.size());
    std::set<std::size_t> used;
    for (std::size_t p = 0; p < spec.partites.size(); ++p) {
        if (spec.partites[p].key_columns.empty()) {
            throw ConfigError("partite '" + spec.partites[p].name + "' has no key columns");
        }
        for (const auto& name : spec.partites[p].key_columns) {
            key_cols[p].push_back(require_column(table, name));
            used.insert(key_cols[p].back());
        }
        for (const auto& name : spec.partites[p].feature_columns) {
            node_cols[p].push_back(require_column(table, name));
            used.insert(node_cols[p].back());
        }
    }
    if (table.num_rows() == 0) {
        throw DataError("input table is empty");
    }

    PartiteGraph g;
    auto partite_index = [&](const std::string& name) {
        for (std::size_t p = 0; p < spec.partites.size(); ++p) {
            if (spec.partites[p].name == name) {
                return p;
            }
        }
        throw ConfigError("edge rule references unknown partite '" + name + "'");
    };
    for (const auto& rule : spec.edge_types) {
        g.edge_types.push_back({rule.name, partite_index(rule.src), partite_index(rule.dst)});
    }

    // Dense node ids per partite in first-appearance order.
    const std::size_t rows = table.num_rows();
    std::vector<std::vector<NodeId>> row_node(spec.partites.size(), std::vector<NodeId>(rows));
    std::vector<std::vector<std::size_t>> first_row(spec.partites.size());
    for (std::size_t p = 0; p < spec.partites.size(); ++p) {
        std::unordered_map<std::string, NodeId> ids;
        std::string key;
        for (std::size_t r = 0; r < rows; ++r) {
            key.clear();
            for (std::size_t j = 0; j < key_cols[p].size(); ++j) {
                if (j > 0) {
                    key.push_back('\x1f');
                }
                key += table.label(r, key_cols[p][j]);
            }
            auto [it, inserted] = ids.try_emplace(key, static_cast<NodeId>(ids.size()));
            if (inserted) {
                first_row[p].push_back(r);
            }
            row_node[p][r] = it->second;
        }
        g.partites.push_back({spec.partites[p].name, ids.size()});
    }

    std::vector<std::size_t> edge_cols;
    for (std::size_t c = 0; c < table.num_cols(); ++c) {
        if (!used.contains(c)) {
            edge_cols.push_back(c);
        }
    }
    const FeatureTable edge_source = table.select_columns(edge_cols);

    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto& type = g.edge_types[t];
        std::unordered_set<Edge, Uint128Hash, EdgeEq> seen;
        std::vector<Edge> list;
        std::vector<std::size_t> kept_rows;
        for (std::size_t r = 0; r < rows; ++r) {
            Edge e{row_node[type.src_partite][r], row_node[type.dst_partite][r]};
            if (seen.insert(e).second) {
                list.push_back(e);
                kept_rows.push_back(r);
            }
        }
        g.edges.push_back(std::move(list));
        g.edge_features.push_back(edge_source.select_rows(kept_rows));
    }

    for (std::size_t p = 0; p < spec.partites.size(); ++p) {
        if (node_cols[p].empty()) {
            g.node_features.emplace_back();
        } else {
            g.node_features.push_back(table.select_columns(node_cols[p]).select_rows(first_row[p]));
        }
    }
    g.validate();
    return g;
}

FeatureTable edge_table(const PartiteGraph& g, std::size_t edge_type) {
    const auto& list = g.edges.at(edge_type);
    ColumnSpec src{"src", ColumnKind::categorical, {}};
    ColumnSpec dst{"dst", ColumnKind::categorical, {}};
    std::unordered_map<NodeId, std::uint32_t> src_codes;
    std::unordered_map<NodeId, std::uint32_t> dst_codes;
    std::vector<double> src_col(list.size());
    std::vector<double> dst_col(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto [si, s_new] = src_codes.try_emplace(list[i].src, static_cast<std::uint32_t>(src_codes.size()));
        if (s_new) {
            src.vocabulary.push_back(std::to_string(list[i].src));
        }
        auto [di, d_new] = dst_codes.try_emplace(list[i].dst, static_cast<std::uint32_t>(dst_codes.size()));
        if (d_new) {
            dst.vocabulary.push_back(std::to_string(list[i].dst));
        }
        src_col[i] = si->second;
        dst_col[i] = di->second;
    }
    FeatureTable ids({src, dst});
    ids.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const double row[2] = {src_col[i], dst_col[i]};
        ids.append_row(row);
    }
    const auto& features = g.edge_features.empty() ? std::nullopt : g.edge_features.at(edge_type);
    if (!features) {
        return ids;
    }
    const FeatureTable parts[2] = {std::move(ids), *features};
    return hstack(parts);
}

JointLayout joint_layout(const PartiteGraph& g, std::size_t edge_type) {
    const auto& type = g.edge_types.at(edge_type);
    auto width = [](const std::optional<FeatureTable>& t) { return t ? t->num_cols() : std::size_t{0}; };
    JointLayout layout;
    if (edge_type < g.edge_features.size()) {
        layout.edge = width(g.edge_features[edge_type]);
    }
    if (type.src_partite < g.node_features.size()) {
        layout.src = width(g.node_features[type.src_partite]);
    }
    if (type.dst_partite < g.node_features.size()) {
        layout.dst = width(g.node_features[type.dst_partite]);
    }
    return layout;
}

FeatureTable joint_feature_table(const PartiteGraph& g, std::size_t edge_type) {
    const auto& type = g.edge_types.at(edge_type);
    const auto& list = g.edges.at(edge_type);
    const auto layout = joint_layout(g, edge_type);
    std::vector<ColumnSpec> schema;
    const FeatureTable* edge_part = layout.edge ? &*g.edge_features[edge_type] : nullptr;
    const FeatureTable* src_part = layout.src ? &*g.node_features[type.src_partite] : nullptr;
    const FeatureTable* dst_part = layout.dst ? &*g.node_features[type.dst_partite] : nullptr;
    if (edge_part) {
        schema = edge_part->schema();
    }
    for (auto [part, prefix] : {std::pair{src_part, "src:"}, std::pair{dst_part, "dst:"}}) {
        if (part) {
            for (auto spec : part->schema()) {
                spec.name = prefix + spec.name;
                schema.push_back(std::move(spec));
            }
        }
    }
    FeatureTable out(std::move(schema));
    out.reserve(list.size());
    std::vector<double> row;
    for (std::size_t i = 0; i < list.size(); ++i) {
        row.clear();
        if (edge_part) {
            auto r = edge_part->row(i);
            row.insert(row.end(), r.begin(), r.end());
        }
        if (src_part) {
            auto r = src_part->row(list[i].src);
            row.insert(row.end(), r.begin(), r.end());
        }
        if (dst_part) {
            auto r = dst_part->row(list[i].dst);
            row.insert(row.end(), r.begin(), r.end());
        }
        out.append_row(row);
    }
    return out;
}

} // namespace syngraph
