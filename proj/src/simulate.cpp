#include "crashbench/simulate.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "crashbench/field_types.hpp"
#include "yaml_support.hpp"

namespace crashbench {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidInput("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        // Sequential inversion of the CDF.
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u >= cdf && p > 0.0) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Hormann's transformed rejection with squeeze.
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

LatLon cell_center(LatLon point, int level) {
    const auto grid = EqualAngleGrid::for_level(level);
    auto [row, col] = grid.index_of(point);
    const double w = grid.cell_width();
    return {-90.0 + (static_cast<double>(row) + 0.5) * w, -180.0 + (static_cast<double>(col) + 0.5) * w};
}

namespace {

struct Range {
    double min = 0.0;
    double max = 0.0;
};

Range read_range(const yaml::Reader& in, const YAML::Node& n, const std::string& what) {
    if (n.IsScalar()) {
        double v = in.number(n, what);
        return {v, v};
    }
    in.only_keys(n, {"min", "max"});
    Range r{in.number(n["min"], what + ".min"), in.number(n["max"], what + ".max")};
    if (r.max < r.min) in.fail(what + ": max below min", n);
    return r;
}

} // namespace

Scenario parse_scenario(const std::string& yaml_text, const std::string& origin) {
    yaml::Reader in(origin);
    auto root = in.load(yaml_text);
    in.only_keys(root, {"seed", "location", "cell_level", "true_ratio", "cells", "grid"});
    Scenario s;
    if (root["seed"]) s.seed = static_cast<std::uint64_t>(in.integer(root["seed"], "seed"));
    if (root["location"]) {
        auto loc = parse_location_label(in.text(root["location"], "location"));
        if (!loc) in.fail("unknown location", root["location"]);
        s.location = *loc;
    }
    if (root["cell_level"]) {
        s.cell_level = static_cast<int>(in.integer(root["cell_level"], "cell_level"));
        if (s.cell_level < 0 || s.cell_level > 30) in.fail("cell_level must lie in [0, 30]", root["cell_level"]);
    }
    if (!root["true_ratio"]) in.fail("true_ratio is required", root);
    s.true_ratio = in.number(root["true_ratio"], "true_ratio");
    if (!(s.true_ratio > 0.0)) in.fail("true_ratio must be positive", root["true_ratio"]);
    if (root["cells"].IsDefined() == root["grid"].IsDefined()) in.fail("give exactly one of 'cells' or 'grid'", root);

    if (auto cells = root["cells"]) {
        if (!cells.IsSequence() || cells.size() == 0) in.fail("cells must be a non-empty list", cells);
        for (const auto& c : cells) {
            in.only_keys(c, {"lat", "lon", "human_rate", "human_miles", "ads_miles"});
            ScenarioCell cell;
            cell.point = {in.number(c["lat"], "lat"), in.number(c["lon"], "lon")};
            try {
                check_coordinates(cell.point);
            } catch (const InvalidInput& e) {
                in.fail(e.what(), c);
            }
            cell.human_rate = in.number(c["human_rate"], "human_rate");
            cell.human_miles = in.number(c["human_miles"], "human_miles");
            cell.ads_miles = in.number(c["ads_miles"], "ads_miles");
            s.cells.push_back(cell);
        }
    } else {
        auto g = root["grid"];
        in.only_keys(g, {"rows", "cols", "origin", "human_rate", "human_miles", "ads_miles_total", "ads_shares"});
        const long rows = static_cast<long>(in.integer(g["rows"], "grid.rows"));
        const long cols = static_cast<long>(in.integer(g["cols"], "grid.cols"));
        if (rows < 1 || cols < 1) in.fail("grid needs at least one row and column", g);
        in.only_keys(g["origin"], {"lat", "lon"});
        const LatLon origin_point{in.number(g["origin"]["lat"], "origin.lat"), in.number(g["origin"]["lon"], "origin.lon")};
        const Range rate = read_range(in, g["human_rate"], "human_rate");
        const Range miles = read_range(in, g["human_miles"], "human_miles");
        const double ads_total = in.number(g["ads_miles_total"], "ads_miles_total");
        const std::string shares = g["ads_shares"] ? in.text(g["ads_shares"], "ads_shares") : "human";
        if (shares != "human" && shares != "random" && shares != "single") {
            in.fail("ads_shares must be human, random or single", g["ads_shares"]);
        }
        // Cell properties come from their own stream so they do not depend on
        // the crash draws.
        Rng rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
        const double w = EqualAngleGrid::for_level(s.cell_level).cell_width();
        const LatLon base = cell_center(origin_point, s.cell_level);
        double human_total = 0.0;
        std::vector<double> ads_weight;
        for (long i = 0; i < rows; ++i) {
            for (long j = 0; j < cols; ++j) {
                ScenarioCell cell;
                cell.point = {base.lat + static_cast<double>(i) * w, base.lon + static_cast<double>(j) * w};
                if (cell.point.lat > 90.0 || cell.point.lon > 180.0) in.fail("grid runs off the globe", g);
                cell.human_rate = rate.min + (rate.max - rate.min) * rng.uniform();
                cell.human_miles = miles.min + (miles.max - miles.min) * rng.uniform();
                human_total += cell.human_miles;
                s.cells.push_back(cell);
                ads_weight.push_back(shares == "random" ? rng.uniform() : 0.0);
            }
        }
        double weight_total = 0.0;
        for (double v : ads_weight) weight_total += v;
        for (std::size_t k = 0; k < s.cells.size(); ++k) {
            auto& cell = s.cells[k];
            if (shares == "human") cell.ads_miles = ads_total * cell.human_miles / human_total;
            if (shares == "random") cell.ads_miles = ads_total * ads_weight[k] / weight_total;
            if (shares == "single") cell.ads_miles = k == 0 ? ads_total : 0.0;
        }
    }

    double ads_total = 0.0;
    std::map<CellId, int> seen;
    for (const auto& c : s.cells) {
        if (!(c.human_rate > 0.0)) in.fail("human_rate must be positive", root);
        if (!(c.human_miles > 0.0)) in.fail("human_miles must be positive", root);
        if (!(c.ads_miles >= 0.0)) in.fail("ads_miles must be non-negative", root);
        ads_total += c.ads_miles;
        if (++seen[cell_of(c.point, s.cell_level)] > 1) in.fail("two scenario cells share one grid cell", root);
    }
    if (!(ads_total > 0.0)) in.fail("scenario has no ADS miles", root);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_text_file(path), path.string());
}

namespace {

CrashRecord synthetic_record(std::string id, const Location& loc, LatLon point) {
    CrashRecord r;
    r.crash_id = std::move(id);
    r.location = loc;
    r.coordinates = point;
    r.road_class = RoadClass::SurfaceStreet;
    r.partner = Actor{BodyClass::PassengerVehicle, 2, true};
    r.configuration = Configuration::IntersectionTurningOrCrossing;
    r.severity.max_injury = InjuryLevel::C;
    r.severity.police_reported = true;
    r.severity.police_confirmed_serious = false;
    return r;
}

std::string sequence_id(char prefix, std::size_t n) {
    std::ostringstream os;
    os << prefix << std::setw(7) << std::setfill('0') << n;
    return os.str();
}

} // namespace

Simulation simulate(const Scenario& s) {
    Simulation out;
    out.ads_exposure.population = Population::Ads;
    out.human_exposure.population = Population::Human;
    Rng rng(s.seed);
    Truth& t = out.truth;
    t.true_ratio = s.true_ratio;
    t.seed = s.seed;
    double expected_human = 0.0;
    for (const auto& c : s.cells) {
        t.ads_miles += c.ads_miles;
        t.human_miles += c.human_miles;
        expected_human += c.human_rate * c.human_miles / 1e6;
    }
    for (const auto& c : s.cells) {
        t.human_ads_weighted_rate += c.human_rate * c.ads_miles / t.ads_miles;
    }
    t.human_pooled_rate = 1e6 * expected_human / t.human_miles;
    t.ads_rate = s.true_ratio * t.human_ads_weighted_rate;
    t.expected_ads_count = t.ads_rate * t.ads_miles / 1e6;
    t.expected_human_count = expected_human;

    std::size_t human_n = 0;
    std::size_t ads_n = 0;
    for (const auto& c : s.cells) {
        const LatLon point = cell_center(c.point, s.cell_level);
        const CellId cell = cell_of(point, s.cell_level);
        const auto human_count = rng.poisson(c.human_rate * c.human_miles / 1e6);
        const auto ads_count = rng.poisson(s.true_ratio * c.human_rate * c.ads_miles / 1e6);
        for (std::uint64_t k = 0; k < human_count; ++k)
            out.human_records.push_back(synthetic_record(sequence_id('H', ++human_n), s.location, point));
        for (std::uint64_t k = 0; k < ads_count; ++k)
            out.ads_records.push_back(synthetic_record(sequence_id('A', ++ads_n), s.location, point));
        out.human_exposure.rows.push_back({s.location, RoadClass::SurfaceStreet, VehicleClass::All, cell, c.human_miles});
        out.ads_exposure.rows.push_back({s.location, RoadClass::SurfaceStreet, VehicleClass::All, cell, c.ads_miles});
    }
    out.human_exposure.rows.push_back({s.location, RoadClass::SurfaceStreet, VehicleClass::All, std::nullopt, t.human_miles});
    out.ads_exposure.rows.push_back({s.location, RoadClass::SurfaceStreet, VehicleClass::All, std::nullopt, t.ads_miles});
    return out;
}

std::string truth_json(const Truth& t) {
    nlohmann::ordered_json j;
    j["seed"] = t.seed;
    j["true_ratio"] = t.true_ratio;
    j["human_pooled_rate"] = t.human_pooled_rate;
    j["human_ads_weighted_rate"] = t.human_ads_weighted_rate;
    j["ads_rate"] = t.ads_rate;
    j["ads_miles"] = t.ads_miles;
    j["human_miles"] = t.human_miles;
    j["expected_ads_count"] = t.expected_ads_count;
    j["expected_human_count"] = t.expected_human_count;
    return j.dump(2) + "\n";
}

} // namespace crashbench
