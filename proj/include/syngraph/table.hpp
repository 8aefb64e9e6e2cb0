#pragma once

#include "syngraph/csv.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace syngraph {

enum class ColumnKind { continuous, categorical };

std::string_view to_string(ColumnKind kind);
ColumnKind column_kind_from_string(std::string_view text);

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::string> vocabulary; // categorical only, code order

    [[nodiscard]] bool is_categorical() const noexcept { return kind == ColumnKind::categorical; }
    [[nodiscard]] std::optional<std::uint32_t> find_code(std::string_view label) const;
    friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

// Row-major table of doubles. Categorical cells hold the vocabulary code.
class FeatureTable {
public:
    FeatureTable() = default;
    explicit FeatureTable(std::vector<ColumnSpec> schema);

    [[nodiscard]] const std::vector<ColumnSpec>& schema() const noexcept { return schema_; }
    [[nodiscard]] std::vector<ColumnSpec>& schema() noexcept { return schema_; }
    [[nodiscard]] std::size_t num_cols() const noexcept { return schema_.size(); }
    [[nodiscard]] std::size_t num_rows() const noexcept {
        return schema_.empty() ? rows_without_columns_ : values_.size() / schema_.size();
    }

    [[nodiscard]] double value(std::size_t row, std::size_t col) const { return values_[row * num_cols() + col]; }
    [[nodiscard]] std::uint32_t code(std::size_t row, std::size_t col) const {
        return static_cast<std::uint32_t>(value(row, col));
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * num_cols(), num_cols()};
    }
    [[nodiscard]] std::string label(std::size_t row, std::size_t col) const;
    [[nodiscard]] std::vector<double> column(std::size_t col) const;
    [[nodiscard]] std::optional<std::size_t> find_column(std::string_view name) const;

    void reserve(std::size_t rows) { values_.reserve(rows * num_cols()); }
    // New rows are zero (code 0 for categorical columns).
    void resize_rows(std::size_t rows);
    void set(std::size_t row, std::size_t col, double v) { values_[row * num_cols() + col] = v; }
    void append_row(std::span<const double> row);
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] FeatureTable select_columns(std::span<const std::size_t> cols) const;
    [[nodiscard]] FeatureTable select_rows(std::span<const std::size_t> rows) const;

    // Throws DataError when a categorical code is outside its vocabulary or a
    // continuous cell is non-finite.
    void validate() const;

private:
    std::vector<ColumnSpec> schema_;
    std::vector<double> values_;
    std::size_t rows_without_columns_ = 0;
};

// Builds a table from parsed CSV. Columns listed in `kinds` get that kind;
// others are continuous when every cell parses as a finite number, otherwise
// categorical. Empty cells are rejected.
FeatureTable table_from_csv(const CsvData& csv, const std::map<std::string, ColumnKind>& kinds = {});

// Column-wise horizontal concatenation of tables with equal row counts.
FeatureTable hstack(std::span<const FeatureTable> parts);

} // namespace syngraph
