#pragma once
// Human benchmark rates: passenger-mile adjustment, underreporting
// correction, cell-level spatial reweighting and mileage blending.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashbench/classify.hpp"
#include "crashbench/csv.hpp"
#include "crashbench/model.hpp"

namespace crashbench {

inline constexpr double kDefaultUnderreportingFactor = 1.47;

// Throws InvalidInput when miles <= 0 or count < 0.
double ipmm(double count, double miles);

// Throws InvalidInput when share is outside [0, 1] or miles < 0.
double passenger_adjust(double total_miles, double vm4_passenger_share);

// Scales AnyInjuryReported counts only. Throws InvalidInput when factor < 1.
double underreporting_adjust(double count, OutcomeLevel outcome, double factor, bool enabled);

// ads_count - human_rate * ads_miles / 1e6. Throws InvalidInput when ads_miles <= 0.
double expected_count_delta(double human_rate, double ads_miles, double ads_count);

// Switches actually in effect for a benchmark. Underreporting is only ever
// in effect for AnyInjuryReported.
struct BenchmarkVariant {
    bool underreporting = false;
    bool dynamic = false;

    // The variant stored for `outcome` when the user asks for these switches.
    BenchmarkVariant effective_for(OutcomeLevel outcome) const {
        return {underreporting && outcome == OutcomeLevel::AnyInjuryReported, dynamic};
    }
    auto operator<=>(const BenchmarkVariant&) const = default;
};

struct BenchmarkRate {
    Location location;
    OutcomeLevel outcome = OutcomeLevel::AnyInjuryReported;
    CrashTypeKey crash_type;
    double rate = 0.0;             // IPMM
    double effective_count = 0.0;  // fractional
    double exposure = 0.0;         // miles
    BenchmarkVariant applied;

    bool operator==(const BenchmarkRate&) const = default;
};

// ---------------------------------------------------------------------------
// Spatial reweighting
// ---------------------------------------------------------------------------

struct CellInput {
    CellId cell;
    double human_crashes = 0.0;
    double human_miles = 0.0;
    double ads_miles = 0.0;
};

struct CellWeight {
    CellId cell;
    double ads_mile_share = 0.0;
    double human_mile_share = 0.0;
    double weight = 0.0;  // ads share / human share; 0 where the ADS never drove
};

enum class ZeroHumanMilesPolicy { Abort, Fallback };

struct DynamicResult {
    double rate = 0.0;              // IPMM
    double human_exposure = 0.0;    // human miles over ADS-visited cells
    double effective_count = 0.0;   // rate * human_exposure / 1e6
    std::vector<CellWeight> weights;
    std::vector<CellId> fallback_cells;
};

// rate = sum_c (crashes_c / human_miles_c) * (ads_miles_c / sum ads_miles).
// A cell with ADS miles but no human miles throws DataGapError listing the
// cells under Abort, and uses `fallback_rate` (IPMM) for it under Fallback.
DynamicResult dynamic_reweight(std::span<const CellInput> cells,
                               ZeroHumanMilesPolicy policy = ZeroHumanMilesPolicy::Abort,
                               std::optional<double> fallback_rate = std::nullopt);

// Mileage-weighted average of per-location rates. The result is labelled
// AllLocations; its effective count is the sum of the inputs' counts.
// Throws InvalidInput on mismatched outcome / crash type / variant.
BenchmarkRate blend_locations(std::span<const BenchmarkRate> rates, std::span<const double> ads_miles);

// ---------------------------------------------------------------------------
// Benchmark sets
// ---------------------------------------------------------------------------

class BenchmarkSet {
public:
    BenchmarkSet() = default;
    explicit BenchmarkSet(std::vector<BenchmarkRate> rates);

    // Lookup by requested switches; the stored variant is
    // `requested.effective_for(outcome)`.
    const BenchmarkRate* find(const Location& location, OutcomeLevel outcome, const CrashTypeKey& type,
                              BenchmarkVariant requested) const;
    const std::vector<BenchmarkRate>& rates() const { return rates_; }
    bool has_location(const Location& location) const;

private:
    std::vector<BenchmarkRate> rates_;  // sorted by (location, outcome, type, variant)
};

std::string benchmarks_to_csv(const BenchmarkSet& set);
// Throws ParseError on malformed rows or when rate disagrees with
// 1e6 * effective_count / exposure beyond 1e-9 relative.
BenchmarkSet benchmarks_from_csv(const CsvTable& table);

// Per-cell mileage and crash counts for one location, the input shape of the
// dynamic benchmark. Crash counts are keyed "<Outcome>" or "<Outcome>:<type>".
struct CellMileageRow {
    CellId cell;
    Location location;
    double human_miles = 0.0;  // passenger-adjusted
    double ads_miles = 0.0;
    std::map<std::string, double> crashes;

    bool operator==(const CellMileageRow&) const = default;
};

std::string crash_column_key(OutcomeLevel outcome, const CrashTypeKey& type);
std::string cell_mileage_to_csv(std::span<const CellMileageRow> rows);
std::vector<CellMileageRow> cell_mileage_from_csv(const CsvTable& table);

struct BenchmarkOptions {
    double underreporting_factor = kDefaultUnderreportingFactor;
    int cell_level = 13;
    ZeroHumanMilesPolicy zero_human_miles = ZeroHumanMilesPolicy::Abort;
    std::vector<OutcomeLevel> outcomes;
    std::vector<CrashTypeKey> crash_types;
    unsigned threads = 1;
};

struct BenchmarkBuild {
    BenchmarkSet set;
    std::vector<CellMileageRow> cells;
    std::vector<std::string> notes;  // skipped dynamic variants, fallback cells, dropped records
};

// Builds every variant for each location that has human exposure and a
// passenger share: unadjusted and dynamic, with and without underreporting
// (underreporting variants only for AnyInjuryReported). Dynamic variants need
// cell miles for both populations at that location. F2R role benchmarks are
// half of the F2R benchmark.
BenchmarkBuild build_benchmarks(std::span<const ClassifiedRecord> human_records, const ExposureTable& human_exposure,
                                const ExposureTable& ads_exposure,
                                const std::map<Location, double>& vm4_passenger_share,
                                const BenchmarkOptions& options);

} // namespace crashbench
