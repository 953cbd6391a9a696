#pragma once
// Exact intervals for a binomial proportion and for the ratio of two Poisson
// rates, plus the per-cell ADS/benchmark comparison built on them.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crashbench/benchmark.hpp"
#include "crashbench/classify.hpp"
#include "crashbench/model.hpp"

namespace crashbench {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

// Inverse of the regularized incomplete beta function in x, by bracketed
// bisection to full double resolution. a, b > 0; p in [0, 1].
double beta_quantile(double p, double a, double b);

// Exact limits for `successes` out of `trials`. Non-integer arguments use the
// continuous beta form. Throws InvalidInput when successes > trials, either
// is negative, trials is zero, or alpha is outside (0, 1).
Interval clopper_pearson(double successes, double trials, double alpha);

struct RateRatio {
    double x_a = 0.0, t_a = 0.0;
    double x_b = 0.0, t_b = 0.0;
    double ratio = 0.0;  // (x_a / t_a) / (x_b / t_b); inf when x_b = 0
    Interval ratio_ci;
    bool upper_unbounded = false;
    double percent_difference = 0.0;
    Interval percent_ci;
    bool significant = false;  // percent_ci excludes 0
};

// Conditional-binomial interval for rate_a / rate_b. Throws InvalidInput when
// both counts are zero or an exposure is not positive.
RateRatio rate_ratio_ci(double x_a, double t_a, double x_b, double t_b, double alpha);

// Exact interval for a Poisson mean given `count` events (gamma quantiles).
Interval poisson_mean_ci(double count, double alpha);

// ---------------------------------------------------------------------------
// Comparison of ADS counts against benchmark rates
// ---------------------------------------------------------------------------

struct CellKey {
    Location location;
    OutcomeLevel outcome = OutcomeLevel::AnyInjuryReported;
    CrashTypeKey crash_type;

    auto operator<=>(const CellKey&) const = default;
};

struct AdsCounts {
    std::map<CellKey, double> counts;
    std::map<Location, double> miles;  // per location, surface streets
};

// Tallies classified ADS records per (location, outcome, crash type key).
// Cells with zero events are present for every location that has miles.
AdsCounts tally_ads(std::span<const ClassifiedRecord> records, const ExposureTable& ads_exposure,
                    std::span<const OutcomeLevel> outcomes, std::span<const CrashTypeKey> types);

struct ComparisonResult {
    CellKey key;
    BenchmarkVariant variant;
    double ads_count = 0.0;
    double ads_miles = 0.0;
    double ads_ipmm = 0.0;
    double human_ipmm = 0.0;
    double human_effective_count = 0.0;
    double human_exposure = 0.0;
    RateRatio stats;
    double expected_count_delta = 0.0;
};

struct ComparisonGap {
    CellKey key;
    std::string reason;
};

struct ComparisonRun {
    std::vector<ComparisonResult> results;
    std::vector<ComparisonGap> gaps;
};

struct CompareRequest {
    std::vector<Location> locations;  // AllLocations adds a blended row
    std::vector<OutcomeLevel> outcomes;
    std::vector<CrashTypeKey> crash_types;
    BenchmarkVariant variant;
    double alpha = 0.05;
    unsigned threads = 1;
};

// One result per requested (location, outcome, crash type), in request order.
// Blended rows use an AllLocations benchmark when the set has one and
// otherwise blend the per-location benchmarks by ADS miles. Cells without a
// benchmark, without ADS miles, or with no events on either side are gaps.
ComparisonRun compare(const AdsCounts& ads, const BenchmarkSet& benchmarks, const CompareRequest& request);

} // namespace crashbench
