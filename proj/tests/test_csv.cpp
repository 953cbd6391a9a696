#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "crashbench/csv.hpp"
#include "crashbench/error.hpp"

using namespace crashbench;

TEST(Csv, QuotedFieldsAndEmbeddedNewlines) {
    auto t = parse_csv("a,b,c\n1,\"x,y\",\"he said \"\"hi\"\"\"\n2,\"line1\nline2\",\n");
    ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][1], "x,y");
    EXPECT_EQ(t.rows[0][2], "he said \"hi\"");
    EXPECT_EQ(t.rows[1][1], "line1\nline2");
    EXPECT_EQ(t.rows[1][2], "");
    EXPECT_EQ(t.line_numbers, (std::vector<std::size_t>{2, 3}));
}

TEST(Csv, CrlfAndMissingFinalNewline) {
    auto t = parse_csv("a,b\r\n1,2\r\n3,4");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][1], "2");
    EXPECT_EQ(t.rows[1][1], "4");
}

TEST(Csv, RaggedRowsKeepTheirWidth) {
    auto t = parse_csv("a,b,c\n1,2\n1,2,3,4\n");
    EXPECT_EQ(t.rows[0].size(), 2u);
    EXPECT_EQ(t.rows[1].size(), 4u);
}

TEST(Csv, UnterminatedQuoteIsParseError) { EXPECT_THROW(parse_csv("a\n\"open\n"), ParseError); }

TEST(Csv, DelimiterSniffing) {
    EXPECT_EQ(sniff_delimiter("a\tb\tc\n1\t2\t3\n"), '\t');
    EXPECT_EQ(sniff_delimiter("a,b\tc\n"), ',');
    EXPECT_EQ(sniff_delimiter("a\n"), ',');
    auto t = parse_csv("x\ty\n1\t2\n");
    EXPECT_EQ(t.rows[0][1], "2");
}

TEST(Csv, RequireColumnNamesTheMissingColumn) {
    auto t = parse_csv("a,b\n");
    EXPECT_EQ(t.column("b"), 1u);
    EXPECT_FALSE(t.column("z"));
    try {
        t.require_column("z", "thing.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("z"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("thing.csv"), std::string::npos);
    }
}

// Records end in CRLF.
TEST(Csv, WriterQuotesOnlyWhenNeeded) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row({"plain", "with,comma", "with \"quote\"", "", "multi\nline"});
    EXPECT_EQ(os.str(), "plain,\"with,comma\",\"with \"\"quote\"\"\",,\"multi\nline\"\r\n");
}

// Property: anything the writer emits, the reader returns unchanged.
TEST(Csv, WriterReaderRoundTrip) {
    const std::vector<std::vector<std::string>> rows{
        {"h1", "h2", "h3"}, {"", ",", "\""}, {"a\r\nb", " lead", "trail "}, {"\"\"", "x,y,z", "é"}};
    std::ostringstream os;
    CsvWriter w(os);
    for (const auto& r : rows) w.row(r);
    auto t = parse_csv(os.str());
    EXPECT_EQ(t.header, rows[0]);
    ASSERT_EQ(t.rows.size(), rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(t.rows[i - 1], rows[i]);
}

TEST(Numbers, FormatDoubleRoundTrips) {
    for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, 31.159e6, -41.1,
                     std::numeric_limits<double>::max(), std::numeric_limits<double>::denorm_min()}) {
        auto s = format_double(v);
        auto back = parse_double(s);
        ASSERT_TRUE(back) << s;
        EXPECT_EQ(*back, v) << s;
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Numbers, FixedFormatting) {
    EXPECT_EQ(format_fixed(2.085, 2), "2.08");  // binary value sits below the tie
    EXPECT_EQ(format_fixed(-41.14, 1), "-41.1");
    EXPECT_EQ(format_fixed(0.0, 0), "0");
}

TEST(Numbers, StrictParsing) {
    EXPECT_EQ(parse_double("1.5"), 1.5);
    EXPECT_EQ(parse_double(" 2 "), 2.0);
    EXPECT_EQ(parse_double("inf"), std::numeric_limits<double>::infinity());
    EXPECT_FALSE(parse_double("1.5x"));
    EXPECT_FALSE(parse_double(""));
    EXPECT_EQ(parse_int("42"), 42);
    EXPECT_FALSE(parse_int("4.2"));
    EXPECT_EQ(parse_bool("Yes"), true);
    EXPECT_EQ(parse_bool("n"), false);
    EXPECT_EQ(parse_bool("0"), false);
    EXPECT_FALSE(parse_bool("maybe"));
}

TEST(Text, TrimAndLower) {
    EXPECT_EQ(trim("  a b \t"), "a b");
    EXPECT_EQ(trim(""), "");
    EXPECT_EQ(to_lower("MiXeD"), "mixed");
}

TEST(Files, MissingFileIsIoError) {
    EXPECT_THROW(read_text_file("/nonexistent/crashbench/file.csv"), IoError);
}
