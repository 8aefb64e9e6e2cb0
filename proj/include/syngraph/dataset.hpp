#pragma once

// On-disk attributed graph: manifest.json, one CSV per edge type
// (src,dst,edge features) and one per partite (id, node features). Node ids
// are local to their partite.

#include "syngraph/graph.hpp"
#include "syngraph/serialize.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace syngraph {

inline constexpr int dataset_format_version = 1;

struct DatasetInfo {
    std::uint64_t seed = 0;
    double scale = 1.0;
    unsigned workers = 1;
    std::vector<std::vector<double>> level_noise; // per edge type, may be empty
    Json timings = Json::object();
};

std::string edge_file_name(const std::string& edge_type);
std::string node_file_name(const std::string& partite);

// Letters, digits, '_', '-', '.'; used for names that become file names.
bool is_safe_name(const std::string& name);

void write_dataset(const std::filesystem::path& dir, const PartiteGraph& g, const DatasetInfo& info);

// Reads a dataset written by write_dataset. The manifest is returned through
// `manifest` when given.
PartiteGraph read_dataset(const std::filesystem::path& dir, Json* manifest = nullptr);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace syngraph
