#include "syngraph/table.hpp"

#include "syngraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace syngraph {

std::string_view to_string(ColumnKind kind) {
    return kind == ColumnKind::continuous ? "continuous" : "categorical";
}

ColumnKind column_kind_from_string(std::string_view text) {
    if (text == "continuous") {
        return ColumnKind::continuous;
    }
    if (text == "categorical") {
        return ColumnKind::categorical;
    }
    throw ConfigError("unknown column kind '" + std::string(text) + "'");
}

std::optional<std::uint32_t> ColumnSpec::find_code(std::string_view label) const {
    auto it = std::find(vocabulary.begin(), vocabulary.end(), label);
    if (it == vocabulary.end()) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - vocabulary.begin());
}

FeatureTable::FeatureTable(std::vector<ColumnSpec> schema) : schema_(std::move(schema)) {}

std::string FeatureTable::label(std::size_t row, std::size_t col) const {
    const auto& spec = schema_[col];
    if (spec.is_categorical()) {
        return spec.vocabulary.at(code(row, col));
    }
    return format_double(value(row, col));
}

std::vector<double> FeatureTable::column(std::size_t col) const {
    std::vector<double> out(num_rows());
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = value(r, col);
    }
    return out;
}

std::optional<std::size_t> FeatureTable::find_column(std::string_view name) const {
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        if (schema_[c].name == name) {
            return c;
        }
    }
    return std::nullopt;
}

void FeatureTable::append_row(std::span<const double> row) {
    if (row.size() != num_cols()) {
        throw DataError("row width " + std::to_string(row.size()) + " does not match schema width " +
                        std::to_string(num_cols()));
    }
    if (schema_.empty()) {
        ++rows_without_columns_;
        return;
    }
    values_.insert(values_.end(), row.begin(), row.end());
}

void FeatureTable::resize_rows(std::size_t rows) {
    if (schema_.empty()) {
        rows_without_columns_ = rows;
        return;
    }
    values_.resize(rows * num_cols(), 0.0);
}

FeatureTable FeatureTable::select_columns(std::span<const std::size_t> cols) const {
    std::vector<ColumnSpec> schema;
    for (auto c : cols) {
        schema.push_back(schema_.at(c));
    }
    FeatureTable out(std::move(schema));
    const std::size_t rows = num_rows();
    if (cols.empty()) {
        out.rows_without_columns_ = rows;
        return out;
    }
    out.values_.resize(rows * cols.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out.values_[r * cols.size() + j] = value(r, cols[j]);
        }
    }
    return out;
}

FeatureTable FeatureTable::select_rows(std::span<const std::size_t> rows) const {
    FeatureTable out(schema_);
    if (schema_.empty()) {
        out.rows_without_columns_ = rows.size();
        return out;
    }
    out.values_.reserve(rows.size() * num_cols());
    for (auto r : rows) {
        auto src = row(r);
        out.values_.insert(out.values_.end(), src.begin(), src.end());
    }
    return out;
}

void FeatureTable::validate() const {
    const std::size_t rows = num_rows();
    for (std::size_t c = 0; c < num_cols(); ++c) {
        const auto& spec = schema_[c];
        if (spec.is_categorical() && spec.vocabulary.empty()) {
            throw DataError("categorical column '" + spec.name + "' has an empty vocabulary");
        }
        for (std::size_t r = 0; r < rows; ++r) {
            const double v = value(r, c);
            if (!std::isfinite(v)) {
                throw DataError("column '" + spec.name + "' row " + std::to_string(r) + " is not finite");
            }
            if (spec.is_categorical() &&
                (v < 0 || v != std::floor(v) || v >= static_cast<double>(spec.vocabulary.size()))) {
                throw DataError("column '" + spec.name + "' row " + std::to_string(r) +
                                " is outside the vocabulary");
            }
        }
    }
}

FeatureTable table_from_csv(const CsvData& csv, const std::map<std::string, ColumnKind>& kinds) {
    const std::size_t cols = csv.header.size();
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (csv.rows[r][c].empty()) {
                throw DataError("missing value in column '" + csv.header[c] + "' at data row " +
                                std::to_string(r + 1));
            }
        }
    }

    std::vector<ColumnSpec> schema(cols);
    std::vector<std::vector<double>> parsed(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        schema[c].name = csv.header[c];
        auto forced = kinds.find(csv.header[c]);
        bool numeric = true;
        if (forced == kinds.end() || forced->second == ColumnKind::continuous) {
            parsed[c].resize(csv.rows.size());
            for (std::size_t r = 0; r < csv.rows.size() && numeric; ++r) {
                numeric = parse_double(csv.rows[r][c], parsed[c][r]);
            }
        }
        if (forced != kinds.end()) {
            if (forced->second == ColumnKind::continuous && !numeric) {
                throw DataError("column '" + csv.header[c] + "' is declared continuous but holds non-numeric values");
            }
            schema[c].kind = forced->second;
        } else {
            schema[c].kind = (numeric && !csv.rows.empty()) ? ColumnKind::continuous : ColumnKind::categorical;
        }
        if (schema[c].is_categorical()) {
            std::unordered_map<std::string, std::uint32_t> codes;
            parsed[c].assign(csv.rows.size(), 0.0);
            for (std::size_t r = 0; r < csv.rows.size(); ++r) {
                const auto& cell = csv.rows[r][c];
                auto [it, inserted] = codes.try_emplace(cell, static_cast<std::uint32_t>(codes.size()));
                if (inserted) {
                    schema[c].vocabulary.push_back(cell);
                }
                parsed[c][r] = it->second;
            }
        }
    }

    FeatureTable table(std::move(schema));
    table.reserve(csv.rows.size());
    std::vector<double> row(cols);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] = parsed[c][r];
        }
        table.append_row(row);
    }
    return table;
}

FeatureTable hstack(std::span<const FeatureTable> parts) {
    std::vector<ColumnSpec> schema;
    std::optional<std::size_t> rows;
    for (const auto& part : parts) {
        if (rows && *rows != part.num_rows()) {
            throw DataError("hstack: row counts differ");
        }
        rows = part.num_rows();
        schema.insert(schema.end(), part.schema().begin(), part.schema().end());
    }
    FeatureTable out(std::move(schema));
    const std::size_t n = rows.value_or(0);
    out.reserve(n);
    std::vector<double> row;
    for (std::size_t r = 0; r < n; ++r) {
        row.clear();
        for (const auto& part : parts) {
            auto src = part.row(r);
            row.insert(row.end(), src.begin(), src.end());
        }
        out.append_row(row);
    }
    return out;
}

} // namespace syngraph
