#include "syngraph/csv.hpp"
#include "syngraph/error.hpp"
#include "syngraph/rng.hpp"
#include "syngraph/table.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace syngraph;

TEST(Csv, QuotedFieldsAndLineEndings) {
    const auto csv = parse_csv("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n\r\n2,\"multi\nline\",z\n");
    ASSERT_EQ(csv.header, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(csv.rows.size(), 2U);
    EXPECT_EQ(csv.rows[0][1], "x, y");
    EXPECT_EQ(csv.rows[0][2], "say \"hi\"");
    EXPECT_EQ(csv.rows[1][1], "multi\nline");
    EXPECT_EQ(csv.rows[1][2], "z");
}

TEST(Csv, FieldCountMismatchIsDataError) {
    EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), DataError);
}

TEST(Csv, EscapeRoundTrip) {
    const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
    std::ostringstream out;
    write_csv_row(out, std::vector<std::string>{"h1", "h2", "h3", "h4", "h5"});
    write_csv_row(out, fields);
    const auto back = parse_csv(out.str());
    ASSERT_EQ(back.rows.size(), 1U);
    EXPECT_EQ(back.rows[0], fields);
}

TEST(Csv, DoubleFormattingRoundTrips) {
    Engine engine = make_stream(11);
    for (int i = 0; i < 10000; ++i) {
        const double v = std::ldexp(uniform01(engine) - 0.5, static_cast<int>(uniform_below(engine, 200)) - 100);
        double back = 0.0;
        ASSERT_TRUE(parse_double(format_double(v), back));
        ASSERT_EQ(back, v);
    }
    double v = 0.0;
    EXPECT_FALSE(parse_double("abc", v));
    EXPECT_FALSE(parse_double("1.5x", v));
    EXPECT_FALSE(parse_double("inf", v));
    EXPECT_FALSE(parse_double("", v));
    EXPECT_TRUE(parse_double("+2.5", v));
    EXPECT_EQ(v, 2.5);
}

TEST(Table, KindInferenceAndForcedKinds) {
    const auto csv = parse_csv("id,amount,label,zip\n1,2.5,x,01234\n2,3.5,y,02345\n3,4.5,x,01234\n");
    const auto t = table_from_csv(csv, {{"id", ColumnKind::categorical}, {"zip", ColumnKind::categorical}});
    ASSERT_EQ(t.num_cols(), 4U);
    EXPECT_TRUE(t.schema()[0].is_categorical());
    EXPECT_FALSE(t.schema()[1].is_categorical());
    EXPECT_TRUE(t.schema()[2].is_categorical());
    EXPECT_TRUE(t.schema()[3].is_categorical());
    EXPECT_EQ(t.schema()[2].vocabulary, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(t.label(1, 3), "02345");
    EXPECT_EQ(t.value(2, 1), 4.5);
    EXPECT_EQ(t.code(2, 2), 0U);
}

TEST(Table, MissingValuesAreRejected) {
    EXPECT_THROW(table_from_csv(parse_csv("a,b\n1,\n")), DataError);
}

TEST(Table, DeclaredContinuousMustParse) {
    EXPECT_THROW(table_from_csv(parse_csv("a\nx\n"), {{"a", ColumnKind::continuous}}), DataError);
}

TEST(Table, SelectAndStack) {
    const auto t = table_from_csv(parse_csv("a,b,c\n1,2,3\n4,5,6\n"));
    const std::size_t cols[] = {2, 0};
    const auto s = t.select_columns(cols);
    EXPECT_EQ(s.schema()[0].name, "c");
    EXPECT_EQ(s.value(1, 1), 4.0);
    const std::size_t rows[] = {1, 1, 0};
    const auto r = t.select_rows(rows);
    EXPECT_EQ(r.num_rows(), 3U);
    EXPECT_EQ(r.value(0, 0), 4.0);
    const FeatureTable parts[] = {s, t};
    const auto h = hstack(parts);
    EXPECT_EQ(h.num_cols(), 5U);
    EXPECT_EQ(h.value(1, 4), 6.0);
    const FeatureTable bad[] = {t, r};
    EXPECT_THROW(hstack(bad), DataError);
}

TEST(Table, EmptySchemaKeepsRowCount) {
    const auto t = table_from_csv(parse_csv("a\n1\n2\n"));
    const auto s = t.select_columns(std::span<const std::size_t>{});
    EXPECT_EQ(s.num_rows(), 2U);
    EXPECT_EQ(s.num_cols(), 0U);
}

TEST(Table, ValidateCatchesBadCodes) {
    ColumnSpec spec{"c", ColumnKind::categorical, {"x"}};
    FeatureTable t({spec});
    const double row[] = {1.0};
    t.append_row(row);
    EXPECT_THROW(t.validate(), DataError);
    FeatureTable u({ColumnSpec{"v", ColumnKind::continuous, {}}});
    const double nan_row[] = {std::numeric_limits<double>::quiet_NaN()};
    u.append_row(nan_row);
    EXPECT_THROW(u.validate(), DataError);
}
