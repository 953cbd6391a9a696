#include <gtest/gtest.h>

#include <cmath>

#include "crashbench/report.hpp"
#include "fixture_support.hpp"

using namespace crashbench;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
        start = end + 1;
    }
    return out;
}

const std::vector<OutcomeLevel> kInjuryAirbag{OutcomeLevel::AnyInjuryReported, OutcomeLevel::AirbagDeployment};

} // namespace

TEST(Display, PercentAndInterval) {
    EXPECT_EQ(display_percent(-63.13), "-63");
    EXPECT_EQ(display_percent(-0.4), "0");
    EXPECT_EQ(display_percent(INFINITY), "inf");
    RateRatio s;
    s.percent_ci = {-71.2, -50.6};
    EXPECT_EQ(display_ci(s), "[-71%, -51%]");
    s.upper_unbounded = true;
    s.percent_ci = {-100, INFINITY};
    EXPECT_EQ(display_ci(s), "[-100%, unbounded]");
    EXPECT_EQ(parse_report_format("md"), ReportFormat::Markdown);
    EXPECT_EQ(extension(ReportFormat::Csv), ".csv");
    EXPECT_EQ(extension(ReportFormat::Markdown), ".md");
    EXPECT_THROW(parse_report_format("html"), InvalidInput);
}

TEST(ComparisonCsv, RoundTripIsExact) {
    auto run = fixture::published_comparison(fixture::request(all_crash_type_keys()));
    ASSERT_FALSE(run.results.empty());
    const auto text = comparison_csv(run.results);
    auto back = comparison_from_csv(parse_csv(text));
    ASSERT_EQ(back.size(), run.results.size());
    EXPECT_EQ(comparison_csv(back), text);
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].key, run.results[i].key);
        EXPECT_EQ(back[i].variant, run.results[i].variant);
        EXPECT_EQ(back[i].stats.percent_ci.lower, run.results[i].stats.percent_ci.lower);
        EXPECT_EQ(back[i].expected_count_delta, run.results[i].expected_count_delta);
    }
}

TEST(ComparisonCsv, EmptyInputIsHeaderOnly) {
    const auto text = comparison_csv({});
    auto l = lines(text);
    ASSERT_EQ(l.size(), 1u);
    EXPECT_EQ(parse_csv(text).header, comparison_columns());
    EXPECT_TRUE(comparison_from_csv(parse_csv(text)).empty());
    EXPECT_EQ(lines(gaps_csv({})).size(), 1u);
}

TEST(ComparisonCsv, UnboundedUpperWrittenAsInf) {
    AdsCounts ads;
    CellKey key{Location::phoenix(), OutcomeLevel::AirbagDeployment, CrashTypeKey::aggregate()};
    ads.counts[key] = 3;
    ads.miles[Location::phoenix()] = 1e6;
    BenchmarkRate b;
    b.location = Location::phoenix();
    b.outcome = OutcomeLevel::AirbagDeployment;
    b.rate = 0.0;
    b.effective_count = 0.0;
    b.exposure = 1e8;
    b.applied = {false, true};
    CompareRequest req;
    req.locations = {Location::phoenix()};
    req.outcomes = {OutcomeLevel::AirbagDeployment};
    req.crash_types = {CrashTypeKey::aggregate()};
    req.variant = {false, true};
    auto run = compare(ads, BenchmarkSet({b}), req);
    ASSERT_EQ(run.results.size(), 1u);
    auto table = parse_csv(comparison_csv(run.results));
    EXPECT_EQ(table.rows[0][*table.column("ci_upper")], "inf");
    EXPECT_EQ(table.rows[0][*table.column("upper_unbounded")], "true");
    auto back = comparison_from_csv(table);
    EXPECT_TRUE(std::isinf(back[0].stats.percent_ci.upper));
}

TEST(ComparisonMarkdown, OneRowPerResult) {
    auto run = fixture::published_comparison(fixture::request({CrashTypeKey::aggregate()}));
    auto l = lines(comparison_markdown(run.results));
    ASSERT_EQ(l.size(), run.results.size() + 4);  // header, rule, rows, blank, footnote
    EXPECT_EQ(l[0].front(), '|');
    EXPECT_NE(l[1].find("---"), std::string::npos);
    EXPECT_NE(l[2].find("-63%*"), std::string::npos);  // Phoenix any-injury
    EXPECT_NE(l.back().find("excludes 0"), std::string::npos);
}

TEST(EventCounts, TextForms) {
    auto records = fixture::ads_records();
    auto counts = event_counts(records);
    auto csv = lines(event_counts_text(counts, ReportFormat::Csv));
    ASSERT_EQ(csv.size(), kCrashGroupCount + 2);  // header, groups, total
    EXPECT_EQ(csv.back(), "Total,48,18,2");
    auto phx = event_counts(records, kTableOutcomes, Location::phoenix());
    double phx_total = phx.totals[0];
    auto sf = event_counts(records, kTableOutcomes, Location::san_francisco());
    EXPECT_LT(phx_total + sf.totals[0], counts.totals[0] + 1e-9);
}

TEST(F2RSplit, RolesSumToGroup) {
    auto records = fixture::ads_records();
    auto l = lines(f2r_counts_text(records, ReportFormat::Csv));
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[1], "V2VF2R:Striking,0,0,0");
    EXPECT_EQ(l[2], "V2VF2R:Struck,25,7,0");
    EXPECT_EQ(l[3], "V2VF2R,25,7,0");
}

TEST(Movement, CountsByCategory) {
    auto records = fixture::ads_records();
    auto text = movement_counts_text(records, ReportFormat::Csv);
    auto table = parse_csv(text);
    ASSERT_EQ(table.rows.size(), 4u);
    auto col = *table.column("AnyInjuryReported");
    double total = 0.0;
    for (const auto& r : table.rows) total += *parse_double(r[col]);
    EXPECT_EQ(total, 25.0);
}

TEST(Sensitivity, UnderreportingScalesOnlyAnyInjury) {
    auto build = fixture::phoenix_build(kInjuryAirbag, {CrashTypeKey::aggregate()});
    const auto records = fixture::ads_records();
    auto in = fixture::phoenix_inputs();
    const std::vector<CrashTypeKey> types{CrashTypeKey::aggregate()};
    auto ads = tally_ads(records, in.ads_exposure, kInjuryAirbag, types);
    CompareRequest req;
    req.locations = {Location::phoenix()};
    req.outcomes = kInjuryAirbag;
    req.crash_types = types;
    auto grid = sensitivity_grid(ads, build.set, req);
    EXPECT_TRUE(grid.gaps.empty());
    ASSERT_EQ(grid.rows.size(), 8u);
    for (const auto& row : grid.rows) {
        const bool injury = row.result.key.outcome == OutcomeLevel::AnyInjuryReported;
        EXPECT_EQ(row.underreporting_insensitive, !injury);
        if (!row.requested.underreporting) continue;
        for (const auto& other : grid.rows) {
            if (other.result.key != row.result.key || other.requested.underreporting ||
                other.requested.dynamic != row.requested.dynamic)
                continue;
            if (injury) {
                EXPECT_NEAR(row.result.human_ipmm, 1.47 * other.result.human_ipmm, 1e-12);
            } else {
                EXPECT_EQ(row.result.human_ipmm, other.result.human_ipmm);
                EXPECT_EQ(row.result.stats.percent_ci.lower, other.result.stats.percent_ci.lower);
                EXPECT_EQ(row.result.stats.percent_ci.upper, other.result.stats.percent_ci.upper);
            }
        }
    }
    auto text = sensitivity_text(grid, ReportFormat::Csv);
    EXPECT_EQ(lines(text).size(), 9u);
    EXPECT_NE(text.find("insensitive"), std::string::npos);
}

TEST(Sensitivity, MissingVariantIsAGap) {
    // Published rates carry one variant per outcome.
    const auto records = fixture::ads_records();
    const std::vector<CrashTypeKey> types{CrashTypeKey::aggregate()};
    auto ads = tally_ads(records, fixture::ads_exposure(), kInjuryAirbag, types);
    CompareRequest req;
    req.locations = {Location::phoenix()};
    req.outcomes = kInjuryAirbag;
    req.crash_types = types;
    auto grid = sensitivity_grid(ads, fixture::published_benchmarks(), req);
    EXPECT_FALSE(grid.gaps.empty());
}
