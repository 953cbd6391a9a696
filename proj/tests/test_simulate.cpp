#include <gtest/gtest.h>

#include <cmath>

#include "crashbench/benchmark.hpp"
#include "crashbench/classify.hpp"
#include "crashbench/ingest.hpp"
#include "crashbench/simulate.hpp"

using namespace crashbench;

namespace {

const char* kGrid = R"(
seed: 42
location: Phoenix
cell_level: 12
true_ratio: 0.5
grid:
  rows: 4
  cols: 5
  origin: {lat: 33.40, lon: -112.10}
  human_rate: {min: 1.0, max: 6.0}
  human_miles: {min: 2.0e6, max: 9.0e6}
  ads_miles_total: 3.0e7
  ads_shares: %SHARES%
)";

Scenario grid_scenario(const std::string& shares, std::uint64_t seed = 42) {
    std::string text = kGrid;
    text.replace(text.find("%SHARES%"), 8, shares);
    auto s = parse_scenario(text, "grid");
    s.seed = seed;
    return s;
}

BenchmarkBuild build_for(const Simulation& sim, const Scenario& s) {
    BenchmarkOptions o;
    o.cell_level = s.cell_level;
    o.outcomes = {OutcomeLevel::AnyInjuryReported};
    o.crash_types = {CrashTypeKey::aggregate()};
    return build_benchmarks(classify_all(sim.human_records), sim.human_exposure, sim.ads_exposure,
                            {{s.location, 1.0}}, o);
}

} // namespace

TEST(Rng, UniformRangeAndDeterminism) {
    Rng a(7), b(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = a.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_EQ(u, b.uniform());
    }
    EXPECT_NE(Rng(1).uniform(), Rng(2).uniform());
}

TEST(Rng, PoissonMeanAndVariance) {
    for (double mean : {0.3, 2.0, 9.9, 10.0, 37.5, 150.0}) {
        Rng rng(static_cast<std::uint64_t>(mean * 1000));
        const int n = 40000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            sum += k;
            sum2 += k * k;
        }
        const double m = sum / n;
        const double var = sum2 / n - m * m;
        EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / n)) << mean;
        // Var of the sample variance is about (2 mean^2 + mean) / n.
        EXPECT_NEAR(var, mean, 5.0 * std::sqrt((2.0 * mean * mean + mean) / n)) << mean;
    }
}

TEST(Rng, PoissonEdges) {
    Rng rng(1);
    EXPECT_EQ(rng.poisson(0.0), 0u);
    EXPECT_THROW(rng.poisson(-1.0), InvalidInput);
    EXPECT_THROW(rng.poisson(NAN), InvalidInput);
}

TEST(Scenario, Validation) {
    EXPECT_THROW(parse_scenario("true_ratio: 1\n", "s"), ConfigError);
    EXPECT_THROW(parse_scenario("true_ratio: 0\ncells: [{lat: 0, lon: 0, human_rate: 1, human_miles: 1, ads_miles: 1}]\n", "s"),
                 ConfigError);
    EXPECT_THROW(parse_scenario("true_ratio: 1\ncells: [{lat: 0, lon: 0, human_rate: -1, human_miles: 1, ads_miles: 1}]\n", "s"),
                 ConfigError);
    EXPECT_THROW(parse_scenario("true_ratio: 1\ncells: [{lat: 0, lon: 0, human_rate: 1, human_miles: 0, ads_miles: 1}]\n", "s"),
                 ConfigError);
    EXPECT_THROW(parse_scenario("true_ratio: 1\ncells: [{lat: 0, lon: 0, human_rate: 1, human_miles: 1, ads_miles: 0}]\n", "s"),
                 ConfigError);
    EXPECT_THROW(parse_scenario("true_ratio: 1\ncells: [{lat: 95, lon: 0, human_rate: 1, human_miles: 1, ads_miles: 1}]\n", "s"),
                 ConfigError);
    EXPECT_THROW(parse_scenario("true_ratio: 1\nbogus: 3\ncells: [{lat: 0, lon: 0, human_rate: 1, human_miles: 1, ads_miles: 1}]\n", "s"),
                 ConfigError);
    auto ok = parse_scenario("true_ratio: 2\ncells: [{lat: 0, lon: 0, human_rate: 1, human_miles: 1e6, ads_miles: 1e6}]\n", "s");
    EXPECT_EQ(ok.cells.size(), 1u);
    EXPECT_EQ(grid_scenario("human").cells.size(), 20u);
}

TEST(Simulate, DeterministicGivenSeed) {
    auto s = grid_scenario("random");
    auto a = simulate(s);
    auto b = simulate(s);
    EXPECT_EQ(a.human_records, b.human_records);
    EXPECT_EQ(a.ads_records, b.ads_records);
    EXPECT_EQ(a.human_exposure.rows, b.human_exposure.rows);
    EXPECT_EQ(truth_json(a.truth), truth_json(b.truth));
    EXPECT_EQ(records_to_csv(a.human_records), records_to_csv(b.human_records));
    auto c = simulate(grid_scenario("random", 43));
    EXPECT_NE(records_to_csv(a.human_records), records_to_csv(c.human_records));
}

TEST(Simulate, TruthIsConsistent) {
    auto s = grid_scenario("random");
    auto sim = simulate(s);
    const auto& t = sim.truth;
    EXPECT_NEAR(t.ads_miles, 3.0e7, 1e-3);
    EXPECT_NEAR(t.ads_rate, 0.5 * t.human_ads_weighted_rate, 1e-12);
    EXPECT_NEAR(t.expected_ads_count, t.ads_rate * t.ads_miles / 1e6, 1e-9);
    EXPECT_NEAR(t.human_pooled_rate, 1e6 * t.expected_human_count / t.human_miles, 1e-12);
    for (const auto& r : sim.human_records) {
        EXPECT_NO_THROW(validate(r));
        EXPECT_TRUE(classify(r).outcomes.contains(OutcomeLevel::AnyInjuryReported));
    }
    EXPECT_TRUE(sim.human_exposure.inconsistent_locations(1e-9).empty());
}

// With ADS miles spread like human miles the reweighted rate is the pooled rate.
TEST(Simulate, EqualSharesDynamicMatchesUnadjusted) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto s = grid_scenario("human", seed);
        auto sim = simulate(s);
        auto build = build_for(sim, s);
        auto* stat = build.set.find(s.location, OutcomeLevel::AnyInjuryReported, CrashTypeKey::aggregate(), {false, false});
        auto* dyn = build.set.find(s.location, OutcomeLevel::AnyInjuryReported, CrashTypeKey::aggregate(), {false, true});
        ASSERT_NE(stat, nullptr);
        ASSERT_NE(dyn, nullptr);
        EXPECT_NEAR(dyn->rate, stat->rate, 1e-9 * stat->rate) << seed;
    }
}

TEST(Simulate, SingleCellSupportGivesThatCellsRate) {
    auto s = grid_scenario("single");
    auto sim = simulate(s);
    auto build = build_for(sim, s);
    auto* dyn = build.set.find(s.location, OutcomeLevel::AnyInjuryReported, CrashTypeKey::aggregate(), {false, true});
    ASSERT_NE(dyn, nullptr);
    const auto first = cell_of(cell_center(s.cells[0].point, s.cell_level), s.cell_level);
    double crashes = 0.0;
    for (const auto& r : sim.human_records)
        if (cell_of(*r.coordinates, s.cell_level) == first) crashes += 1.0;
    EXPECT_NEAR(dyn->rate, 1e6 * crashes / s.cells[0].human_miles, 1e-9);
}
