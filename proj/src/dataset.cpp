#include "syngraph/dataset.hpp"

#include "syngraph/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace syngraph {

namespace fs = std::filesystem;

bool is_safe_name(const std::string& name) {
    if (name.empty() || name == "." || name == "..") {
        return false;
    }
    for (unsigned char ch : name) {
        if (!(std::isalnum(ch) || ch == '_' || ch == '-' || ch == '.')) {
            return false;
        }
    }
    return true;
}

std::string edge_file_name(const std::string& edge_type) {
    return edge_type + ".csv";
}

std::string node_file_name(const std::string& partite) {
    return "nodes_" + partite + ".csv";
}

Json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str(), path.string());
}

void write_text_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

namespace {

void append_u64(std::string& out, std::uint64_t v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

void append_cell(std::string& out, const FeatureTable& t, std::size_t row, std::size_t col) {
    out.push_back(',');
    if (t.schema()[col].is_categorical()) {
        out += csv_escape(t.schema()[col].vocabulary[t.code(row, col)]);
    } else {
        out += format_double(t.value(row, col));
    }
}

void append_header(std::string& out, std::string_view first, std::string_view second,
                   const std::optional<FeatureTable>& t) {
    out += first;
    if (!second.empty()) {
        out.push_back(',');
        out += second;
    }
    if (t) {
        for (const auto& spec : t->schema()) {
            out.push_back(',');
            out += csv_escape(spec.name);
        }
    }
    out.push_back('\n');
}

FeatureTable parse_features(const CsvData& csv, std::size_t skip, const std::vector<ColumnSpec>& schema,
                            const std::string& file) {
    if (csv.header.size() != skip + schema.size()) {
        throw DataError(file + ": expected " + std::to_string(skip + schema.size()) + " columns");
    }
    std::vector<std::unordered_map<std::string, std::uint32_t>> codes(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (csv.header[skip + c] != schema[c].name) {
            throw DataError(file + ": column " + std::to_string(skip + c) + " is '" + csv.header[skip + c] +
                            "', expected '" + schema[c].name + "'");
        }
        for (std::uint32_t k = 0; k < schema[c].vocabulary.size(); ++k) {
            codes[c].emplace(schema[c].vocabulary[k], k);
        }
    }
    FeatureTable t(schema);
    t.reserve(csv.rows.size());
    std::vector<double> row(schema.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const auto& cell = csv.rows[r][skip + c];
            if (schema[c].is_categorical()) {
                auto it = codes[c].find(cell);
                if (it == codes[c].end()) {
                    throw DataError(file + ": unknown label '" + cell + "' in column '" + schema[c].name + "'");
                }
                row[c] = it->second;
            } else if (!parse_double(cell, row[c])) {
                throw DataError(file + ": invalid number '" + cell + "' in column '" + schema[c].name + "'");
            }
        }
        t.append_row(row);
    }
    return t;
}

std::uint64_t parse_id(const std::string& cell, const std::string& file) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError(file + ": invalid node id '" + cell + "'");
    }
    return v;
}

double density_of(std::uint64_t edges, std::uint64_t rows, std::uint64_t cols) {
    return static_cast<double>(edges) / (static_cast<double>(rows) * static_cast<double>(cols));
}

} // namespace

void write_dataset(const fs::path& dir, const PartiteGraph& g, const DatasetInfo& info) {
    g.validate();
    for (const auto& p : g.partites) {
        if (!is_safe_name(p.name)) {
            throw ConfigError("partite name '" + p.name + "' cannot be used as a file name");
        }
    }
    for (const auto& t : g.edge_types) {
        if (!is_safe_name(t.name)) {
            throw ConfigError("edge type name '" + t.name + "' cannot be used as a file name");
        }
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create " + dir.string() + ": " + ec.message());
    }

    Json partites = Json::array();
    for (std::size_t p = 0; p < g.partites.size(); ++p) {
        const auto& features = p < g.node_features.size() ? g.node_features[p] : std::optional<FeatureTable>{};
        std::string text;
        append_header(text, "id", "", features);
        for (std::uint64_t v = 0; v < g.partites[p].size; ++v) {
            append_u64(text, v);
            if (features) {
                for (std::size_t c = 0; c < features->num_cols(); ++c) {
                    append_cell(text, *features, v, c);
                }
            }
            text.push_back('\n');
        }
        const auto file = node_file_name(g.partites[p].name);
        write_text_file(dir / file, text);
        const std::vector<ColumnSpec> none;
        partites.push_back({{"name", g.partites[p].name},
                            {"size", g.partites[p].size},
                            {"file", file},
                            {"schema", schema_to_json(features ? features->schema() : none)}});
    }

    Json types = Json::array();
    double cells = 0.0;
    for (std::size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto& type = g.edge_types[t];
        const auto& features = t < g.edge_features.size() ? g.edge_features[t] : std::optional<FeatureTable>{};
        const auto& list = g.edges[t];
        std::string text;
        text.reserve(list.size() * 16);
        append_header(text, "src", "dst", features);
        for (std::size_t i = 0; i < list.size(); ++i) {
            append_u64(text, list[i].src);
            text.push_back(',');
            append_u64(text, list[i].dst);
            if (features) {
                for (std::size_t c = 0; c < features->num_cols(); ++c) {
                    append_cell(text, *features, i, c);
                }
            }
            text.push_back('\n');
        }
        const auto file = edge_file_name(type.name);
        write_text_file(dir / file, text);
        const auto rows = g.partites[type.src_partite].size;
        const auto cols = g.partites[type.dst_partite].size;
        cells += static_cast<double>(rows) * static_cast<double>(cols);
        const std::vector<ColumnSpec> none;
        types.push_back({{"name", type.name},
                         {"src", g.partites[type.src_partite].name},
                         {"dst", g.partites[type.dst_partite].name},
                         {"edges", list.size()},
                         {"density", density_of(list.size(), rows, cols)},
                         {"file", file},
                         {"schema", schema_to_json(features ? features->schema() : none)},
                         {"level_noise", t < info.level_noise.size() ? info.level_noise[t] : std::vector<double>{}}});
    }

    const Json manifest{{"format_version", dataset_format_version},
                        {"kind", "dataset"},
                        {"nodes", g.total_nodes()},
                        {"edges", g.total_edges()},
                        {"density", cells > 0.0 ? static_cast<double>(g.total_edges()) / cells : 0.0},
                        {"seed", info.seed},
                        {"scale", info.scale},
                        {"workers", info.workers},
                        {"partites", std::move(partites)},
                        {"edge_types", std::move(types)},
                        {"timings", info.timings}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

PartiteGraph read_dataset(const fs::path& dir, Json* manifest_out) {
    const Json manifest = read_json_file(dir / "manifest.json");
    if (manifest.value("kind", "") != "dataset") {
        throw DataError(dir.string() + " is not a dataset directory");
    }
    if (manifest.value("format_version", 0) != dataset_format_version) {
        throw DataError(dir.string() + ": unsupported dataset format version");
    }
    PartiteGraph g;
    try {
        for (const auto& p : manifest.at("partites")) {
            const auto name = p.at("name").get<std::string>();
            const auto size = p.at("size").get<std::uint64_t>();
            g.partites.push_back({name, size});
            const auto schema = schema_from_json(p.at("schema"));
            const auto file = p.at("file").get<std::string>();
            if (!is_safe_name(file)) {
                throw DataError("unsafe file name '" + file + "' in manifest");
            }
            const auto csv = read_csv(dir / file);
            if (csv.header.empty() || csv.header[0] != "id") {
                throw DataError(file + ": first column must be 'id'");
            }
            if (csv.rows.size() != size) {
                throw DataError(file + ": expected " + std::to_string(size) + " nodes");
            }
            for (std::size_t r = 0; r < csv.rows.size(); ++r) {
                if (parse_id(csv.rows[r][0], file) != r) {
                    throw DataError(file + ": node ids must be 0..size-1 in order");
                }
            }
            if (schema.empty()) {
                g.node_features.emplace_back();
            } else {
                g.node_features.emplace_back(parse_features(csv, 1, schema, file));
            }
        }
        for (const auto& t : manifest.at("edge_types")) {
            EdgeType type;
            type.name = t.at("name").get<std::string>();
            const auto src = g.find_partite(t.at("src").get<std::string>());
            const auto dst = g.find_partite(t.at("dst").get<std::string>());
            if (!src || !dst) {
                throw DataError("edge type '" + type.name + "' refers to an unknown partite");
            }
            type.src_partite = *src;
            type.dst_partite = *dst;
            const auto schema = schema_from_json(t.at("schema"));
            const auto file = t.at("file").get<std::string>();
            if (!is_safe_name(file)) {
                throw DataError("unsafe file name '" + file + "' in manifest");
            }
            const auto csv = read_csv(dir / file);
            if (csv.header.size() < 2 || csv.header[0] != "src" || csv.header[1] != "dst") {
                throw DataError(file + ": first columns must be 'src,dst'");
            }
            std::vector<Edge> edges(csv.rows.size());
            for (std::size_t r = 0; r < csv.rows.size(); ++r) {
                edges[r] = {parse_id(csv.rows[r][0], file), parse_id(csv.rows[r][1], file)};
            }
            g.edge_types.push_back(type);
            g.edges.push_back(std::move(edges));
            if (schema.empty()) {
                g.edge_features.emplace_back();
            } else {
                g.edge_features.emplace_back(parse_features(csv, 2, schema, file));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(dir.string() + "/manifest.json: " + e.what());
    }
    g.validate();
    if (manifest_out) {
        *manifest_out = manifest;
    }
    return g;
}

} // namespace syngraph
