#pragma once
// Synthetic crash corpora with known rates, for checking interval coverage
// and the reweighting identities.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "crashbench/model.hpp"

namespace crashbench {

// mt19937_64 with explicit conversions, so draws are identical on every
// platform (the std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Poisson(mean); inversion for small means, PTRS rejection otherwise.
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

struct ScenarioCell {
    LatLon point;
    double human_rate = 0.0;   // IPMM
    double human_miles = 0.0;
    double ads_miles = 0.0;
};

struct Scenario {
    std::uint64_t seed = 1;
    Location location = Location::phoenix();
    int cell_level = 12;
    double true_ratio = 1.0;  // ADS rate / human rate in every cell
    std::vector<ScenarioCell> cells;
};

// Throws ConfigError for unknown keys, non-positive rates, ratios or human
// miles, negative ADS miles, or no ADS miles at all.
Scenario parse_scenario(const std::string& yaml_text, const std::string& origin);
Scenario load_scenario(const std::filesystem::path& path);

struct Truth {
    double true_ratio = 0.0;
    double human_pooled_rate = 0.0;       // sum of expected crashes / human miles
    double human_ads_weighted_rate = 0.0; // human cell rates weighted by ADS miles
    double ads_rate = 0.0;
    double ads_miles = 0.0;
    double human_miles = 0.0;
    double expected_ads_count = 0.0;
    double expected_human_count = 0.0;
    std::uint64_t seed = 0;
};

struct Simulation {
    std::vector<CrashRecord> ads_records;
    std::vector<CrashRecord> human_records;
    ExposureTable ads_exposure;
    ExposureTable human_exposure;
    Truth truth;
};

Simulation simulate(const Scenario& scenario);
std::string truth_json(const Truth& truth);

// Center of the grid cell at `level` that contains `point`.
LatLon cell_center(LatLon point, int level);

} // namespace crashbench
