#include "crashbench/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "crashbench/field_types.hpp"
#include "crashbench/parallel.hpp"

namespace crashbench {

double beta_quantile(double p, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("beta_quantile: shape parameters must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("beta_quantile: probability outside [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    // I_x(a, b) is increasing in x; stop once the bracket is a few ulps wide.
    for (int i = 0; i < 2000; ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (boost::math::ibeta(a, b, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return lo + 0.5 * (hi - lo);
}

Interval clopper_pearson(double x, double n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (!(x >= 0.0) || !(n > 0.0)) throw InvalidInput("clopper_pearson: need successes >= 0 and trials > 0");
    if (x > n) throw InvalidInput("clopper_pearson: successes exceed trials");
    Interval out;
    out.lower = x == 0.0 ? 0.0 : beta_quantile(alpha / 2.0, x, n - x + 1.0);
    out.upper = x == n ? 1.0 : beta_quantile(1.0 - alpha / 2.0, x + 1.0, n - x);
    return out;
}

Interval poisson_mean_ci(double count, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (!(count >= 0.0)) throw InvalidInput("poisson_mean_ci: count must be non-negative");
    Interval out;
    out.lower = count == 0.0 ? 0.0 : boost::math::gamma_p_inv(count, alpha / 2.0);
    out.upper = boost::math::gamma_p_inv(count + 1.0, 1.0 - alpha / 2.0);
    return out;
}

RateRatio rate_ratio_ci(double x_a, double t_a, double x_b, double t_b, double alpha) {
    if (!(t_a > 0.0) || !(t_b > 0.0)) throw InvalidInput("rate_ratio_ci: exposures must be positive");
    if (!(x_a >= 0.0) || !(x_b >= 0.0)) throw InvalidInput("rate_ratio_ci: counts must be non-negative");
    if (x_a + x_b == 0.0) throw InvalidInput("rate_ratio_ci: undefined comparison, both counts are zero");

    RateRatio r;
    r.x_a = x_a;
    r.t_a = t_a;
    r.x_b = x_b;
    r.t_b = t_b;
    const double inf = std::numeric_limits<double>::infinity();
    const double scale = t_b / t_a;
    r.ratio = x_b == 0.0 ? inf : (x_a / t_a) / (x_b / t_b);
    const auto p = clopper_pearson(x_a, x_a + x_b, alpha);
    auto odds = [&](double q) { return q >= 1.0 ? inf : q / (1.0 - q) * scale; };
    r.ratio_ci = {odds(p.lower), odds(p.upper)};
    r.upper_unbounded = std::isinf(r.ratio_ci.upper);
    r.percent_difference = 100.0 * (r.ratio - 1.0);
    r.percent_ci = {100.0 * (r.ratio_ci.lower - 1.0), 100.0 * (r.ratio_ci.upper - 1.0)};
    r.significant = r.ratio_ci.upper < 1.0 || r.ratio_ci.lower > 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

AdsCounts tally_ads(std::span<const ClassifiedRecord> records, const ExposureTable& ads_exposure,
                    std::span<const OutcomeLevel> outcomes, std::span<const CrashTypeKey> types) {
    AdsCounts out;
    for (const auto& loc : ads_exposure.locations()) {
        const double miles = ads_exposure.surface_miles(loc);
        if (miles > 0.0) out.miles[loc] = miles;
    }
    for (const auto& [loc, miles] : out.miles) {
        for (auto o : outcomes) {
            for (const auto& k : types) out.counts[{loc, o, k}] = 0.0;
        }
    }
    for (const auto& c : records) {
        for (auto o : outcomes) {
            if (!c.outcomes.contains(o)) continue;
            for (const auto& k : types) {
                if (k.matches(c.crash_type)) out.counts[{c.record.location, o, k}] += c.record.weight;
            }
        }
    }
    return out;
}

namespace {

struct Resolved {
    std::optional<ComparisonResult> result;
    std::optional<ComparisonGap> gap;
};

Resolved resolve(const CellKey& key, const AdsCounts& ads, const BenchmarkSet& benchmarks,
                 const CompareRequest& request) {
    auto gap = [&](std::string reason) { return Resolved{std::nullopt, ComparisonGap{key, std::move(reason)}}; };

    double ads_count = 0.0;
    double ads_miles = 0.0;
    BenchmarkRate bench;
    if (key.location.is_blended()) {
        std::vector<BenchmarkRate> parts;
        std::vector<double> part_miles;
        std::string missing;
        for (const auto& [loc, miles] : ads.miles) {
            ads_miles += miles;
            auto it = ads.counts.find({loc, key.outcome, key.crash_type});
            if (it != ads.counts.end()) ads_count += it->second;
            if (auto* b = benchmarks.find(loc, key.outcome, key.crash_type, request.variant)) {
                parts.push_back(*b);
                part_miles.push_back(miles);
            } else {
                missing += (missing.empty() ? "" : ", ") + format_location(loc);
            }
        }
        if (ads.miles.empty()) return gap("no ADS miles");
        if (auto* b = benchmarks.find(key.location, key.outcome, key.crash_type, request.variant)) {
            bench = *b;
        } else if (missing.empty()) {
            bench = blend_locations(parts, part_miles);
        } else {
            return gap("no blended benchmark and no location benchmark for " + missing);
        }
    } else {
        auto m = ads.miles.find(key.location);
        if (m == ads.miles.end()) return gap("no ADS miles");
        ads_miles = m->second;
        auto it = ads.counts.find(key);
        if (it != ads.counts.end()) ads_count = it->second;
        auto* b = benchmarks.find(key.location, key.outcome, key.crash_type, request.variant);
        if (!b) return gap("no benchmark");
        bench = *b;
    }
    if (ads_count + bench.effective_count == 0.0) return gap("no events on either side");

    ComparisonResult r;
    r.key = key;
    r.variant = bench.applied;
    r.ads_count = ads_count;
    r.ads_miles = ads_miles;
    r.ads_ipmm = ipmm(ads_count, ads_miles);
    r.human_ipmm = bench.rate;
    r.human_effective_count = bench.effective_count;
    r.human_exposure = bench.exposure;
    r.stats = rate_ratio_ci(ads_count, ads_miles, bench.effective_count, bench.exposure, request.alpha);
    r.expected_count_delta = expected_count_delta(bench.rate, ads_miles, ads_count);
    return Resolved{std::move(r), std::nullopt};
}

} // namespace

ComparisonRun compare(const AdsCounts& ads, const BenchmarkSet& benchmarks, const CompareRequest& request) {
    if (!(request.alpha > 0.0 && request.alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    std::vector<CellKey> keys;
    for (const auto& loc : request.locations) {
        for (auto o : request.outcomes) {
            for (const auto& k : request.crash_types) keys.push_back({loc, o, k});
        }
    }
    std::vector<Resolved> resolved(keys.size());
    parallel_for(keys.size(), request.threads,
                 [&](std::size_t i) { resolved[i] = resolve(keys[i], ads, benchmarks, request); });
    ComparisonRun run;
    for (auto& r : resolved) {
        if (r.result) run.results.push_back(std::move(*r.result));
        if (r.gap) run.gaps.push_back(std::move(*r.gap));
    }
    return run;
}

} // namespace crashbench
