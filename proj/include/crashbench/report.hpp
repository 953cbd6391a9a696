#pragma once
// Comparison tables, event-count tables and the sensitivity grid, as CSV and
// markdown.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "crashbench/classify.hpp"
#include "crashbench/csv.hpp"
#include "crashbench/stats.hpp"

namespace crashbench {

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_report_format(std::string_view text);  // "csv" | "md"
std::string_view extension(ReportFormat format);

// Display columns first (rates to 2 decimals, percentages as integers), then
// the full-precision columns the CSV reader uses.
const std::vector<std::string>& comparison_columns();
std::string comparison_csv(std::span<const ComparisonResult> results);
std::string comparison_markdown(std::span<const ComparisonResult> results);
std::vector<ComparisonResult> comparison_from_csv(const CsvTable& table);

std::string gaps_csv(std::span<const ComparisonGap> gaps);

// Display helpers shared by the emitters.
std::string display_percent(double percent);  // "-63", "inf"
std::string display_ci(const RateRatio& stats);  // "[-71%, -51%]", "[-100%, unbounded]"

inline constexpr std::array<OutcomeLevel, 3> kTableOutcomes = {
    OutcomeLevel::AnyInjuryReported, OutcomeLevel::AirbagDeployment, OutcomeLevel::SuspectedSeriousInjuryPlus};

struct EventCounts {
    std::vector<OutcomeLevel> outcomes;
    // [group][outcome index]
    std::array<std::vector<double>, kCrashGroupCount> by_group;
    std::vector<double> totals;
};

// Records at any location when `location` is empty.
EventCounts event_counts(std::span<const ClassifiedRecord> records,
                         std::span<const OutcomeLevel> outcomes = kTableOutcomes,
                         const std::optional<Location>& location = std::nullopt);
std::string event_counts_text(const EventCounts& counts, ReportFormat format);

// F2R records split by role (rows Striking, Struck, All).
std::string f2r_counts_text(std::span<const ClassifiedRecord> records, ReportFormat format);
// F2R struck records by pre-crash movement category.
std::string movement_counts_text(std::span<const ClassifiedRecord> records, ReportFormat format);

struct SensitivityRow {
    BenchmarkVariant requested;
    ComparisonResult result;
    bool significance_flip = false;  // significance differs within this cell's four variants
    bool underreporting_insensitive = false;  // benchmarks identical across the underreporting switch
};

// Runs the comparison under all four switch settings. Cells missing any
// variant are reported as gaps.
struct SensitivityGrid {
    std::vector<SensitivityRow> rows;
    std::vector<ComparisonGap> gaps;
};
SensitivityGrid sensitivity_grid(const AdsCounts& ads, const BenchmarkSet& benchmarks, CompareRequest base);
std::string sensitivity_text(const SensitivityGrid& grid, ReportFormat format);

} // namespace crashbench
