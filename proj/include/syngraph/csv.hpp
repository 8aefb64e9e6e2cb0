#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace syngraph {

// Header row plus string cells, RFC-4180 quoting rules.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvData parse_csv(std::string_view text);
CsvData read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

// Shortest representation that parses back to the same double.
std::string format_double(double value);
bool parse_double(std::string_view text, double& value);

} // namespace syngraph
