#include "crashbench/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include <spdlog/spdlog.h>

#include "crashbench/field_types.hpp"
#include "crashbench/parallel.hpp"

namespace crashbench {

double ipmm(double count, double miles) {
    if (!(miles > 0.0)) throw InvalidInput("ipmm: miles must be positive, got " + format_double(miles));
    if (!(count >= 0.0)) throw InvalidInput("ipmm: count must be non-negative, got " + format_double(count));
    return 1e6 * count / miles;
}

double passenger_adjust(double total_miles, double share) {
    if (!(share >= 0.0 && share <= 1.0)) {
        throw InvalidInput("VM-4 passenger share must lie in [0, 1], got " + format_double(share));
    }
    if (!(total_miles >= 0.0)) throw InvalidInput("miles must be non-negative");
    return total_miles * share;
}

double underreporting_adjust(double count, OutcomeLevel outcome, double factor, bool enabled) {
    if (!(factor >= 1.0)) throw InvalidInput("underreporting factor must be >= 1, got " + format_double(factor));
    if (enabled && outcome == OutcomeLevel::AnyInjuryReported) return count * factor;
    return count;
}

double expected_count_delta(double human_rate, double ads_miles, double ads_count) {
    if (!(ads_miles > 0.0)) throw InvalidInput("expected_count_delta: ADS miles must be positive");
    return ads_count - human_rate * ads_miles / 1e6;
}

DynamicResult dynamic_reweight(std::span<const CellInput> cells, ZeroHumanMilesPolicy policy,
                               std::optional<double> fallback_rate) {
    double total_ads = 0.0;
    double total_human = 0.0;
    for (const auto& c : cells) {
        if (!(c.ads_miles >= 0.0) || !(c.human_miles >= 0.0) || !(c.human_crashes >= 0.0)) {
            throw InvalidInput("cell '" + c.cell.id + "': negative miles or crashes");
        }
        total_ads += c.ads_miles;
        total_human += c.human_miles;
    }
    if (!(total_ads > 0.0)) throw DataGapError("dynamic benchmark: no ADS miles in any cell");

    DynamicResult out;
    std::vector<CellId> missing;
    for (const auto& c : cells) {
        CellWeight w{c.cell, c.ads_miles / total_ads, total_human > 0.0 ? c.human_miles / total_human : 0.0, 0.0};
        if (c.ads_miles > 0.0) {
            if (c.human_miles > 0.0) {
                out.rate += 1e6 * c.human_crashes / c.human_miles * w.ads_mile_share;
                out.human_exposure += c.human_miles;
                w.weight = w.ads_mile_share / w.human_mile_share;
            } else {
                missing.push_back(c.cell);
            }
        }
        out.weights.push_back(std::move(w));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id.id;
        if (policy == ZeroHumanMilesPolicy::Abort) {
            throw DataGapError("dynamic benchmark: cells with ADS miles but no human miles: " + list);
        }
        if (!fallback_rate) throw InvalidInput("dynamic benchmark: fallback policy needs a fallback rate");
        for (const auto& w : out.weights) {
            if (std::find(missing.begin(), missing.end(), w.cell) != missing.end())
                out.rate += *fallback_rate * w.ads_mile_share;
        }
        spdlog::warn("dynamic benchmark: region rate substituted for cells {}", list);
        out.fallback_cells = std::move(missing);
    }
    if (!(out.human_exposure > 0.0)) {
        throw DataGapError("dynamic benchmark: no human miles in any ADS-visited cell");
    }
    out.effective_count = out.rate * out.human_exposure / 1e6;
    return out;
}

BenchmarkRate blend_locations(std::span<const BenchmarkRate> rates, std::span<const double> ads_miles) {
    if (rates.empty() || rates.size() != ads_miles.size()) {
        throw InvalidInput("blend_locations: need one ADS mileage per rate");
    }
    BenchmarkRate out;
    out.location = Location::all_locations();
    out.outcome = rates[0].outcome;
    out.crash_type = rates[0].crash_type;
    out.applied = rates[0].applied;
    double weighted = 0.0;
    double total_miles = 0.0;
    double human_exposure = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const auto& r = rates[i];
        if (r.outcome != out.outcome || r.crash_type != out.crash_type || r.applied != out.applied) {
            throw InvalidInput("blend_locations: rates differ in outcome, crash type or variant");
        }
        if (!(ads_miles[i] > 0.0)) throw InvalidInput("blend_locations: ADS miles must be positive");
        weighted += r.rate * ads_miles[i];
        total_miles += ads_miles[i];
        out.effective_count += r.effective_count;
        human_exposure += r.exposure;
    }
    out.rate = weighted / total_miles;
    // Keep rate = 1e6 * count / exposure for the blended row.
    out.exposure = out.rate > 0.0 ? 1e6 * out.effective_count / out.rate : human_exposure;
    return out;
}

// ---------------------------------------------------------------------------
// BenchmarkSet
// ---------------------------------------------------------------------------

namespace {

auto sort_key(const BenchmarkRate& r) { return std::tie(r.location, r.outcome, r.crash_type, r.applied); }

std::string describe(const BenchmarkRate& r) {
    return format_location(r.location) + "/" + std::string(to_string(r.outcome)) + "/" + r.crash_type.label();
}

} // namespace

BenchmarkSet::BenchmarkSet(std::vector<BenchmarkRate> rates) : rates_(std::move(rates)) {
    std::sort(rates_.begin(), rates_.end(), [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });
    for (std::size_t i = 1; i < rates_.size(); ++i) {
        if (sort_key(rates_[i - 1]) == sort_key(rates_[i])) {
            throw InvalidInput("duplicate benchmark " + describe(rates_[i]));
        }
    }
}

const BenchmarkRate* BenchmarkSet::find(const Location& location, OutcomeLevel outcome, const CrashTypeKey& type,
                                        BenchmarkVariant requested) const {
    BenchmarkRate probe;
    probe.location = location;
    probe.outcome = outcome;
    probe.crash_type = type;
    probe.applied = requested.effective_for(outcome);
    auto it = std::lower_bound(rates_.begin(), rates_.end(), probe,
                               [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });
    if (it == rates_.end() || sort_key(*it) != sort_key(probe)) return nullptr;
    return &*it;
}

bool BenchmarkSet::has_location(const Location& location) const {
    return std::any_of(rates_.begin(), rates_.end(), [&](const auto& r) { return r.location == location; });
}

namespace {

const std::vector<std::string> kBenchmarkColumns = {
    "location", "outcome", "crash_type", "rate", "effective_count", "exposure", "underreporting_applied",
    "dynamic_applied"};

std::string tf(bool b) { return b ? "true" : "false"; }

} // namespace

std::string benchmarks_to_csv(const BenchmarkSet& set) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row(kBenchmarkColumns);
    for (const auto& r : set.rates()) {
        w.row({format_location(r.location), std::string(to_string(r.outcome)), r.crash_type.label(),
               format_double(r.rate), format_double(r.effective_count), format_double(r.exposure),
               tf(r.applied.underreporting), tf(r.applied.dynamic)});
    }
    return os.str();
}

BenchmarkSet benchmarks_from_csv(const CsvTable& table) {
    std::vector<std::size_t> cols;
    for (const auto& c : kBenchmarkColumns) cols.push_back(table.require_column(c, "benchmark file"));
    std::vector<BenchmarkRate> rates;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "benchmark file: line " + std::to_string(table.line_numbers[i]);
        if (row.size() != table.header.size()) throw ParseError(where + " has the wrong field count");
        auto at = [&](std::size_t k) { return trim(row[cols[k]]); };
        try {
            BenchmarkRate r;
            auto loc = parse_any_location(at(0));
            if (!loc) throw InvalidInput("unknown location '" + std::string(at(0)) + "'");
            r.location = *loc;
            r.outcome = parse_enum<OutcomeLevel>(at(1));
            r.crash_type = CrashTypeKey::parse(at(2));
            auto rate = parse_double(at(3));
            auto count = parse_double(at(4));
            auto exposure = parse_double(at(5));
            auto u = parse_bool(at(6));
            auto d = parse_bool(at(7));
            if (!rate || !count || !exposure || !u || !d) throw InvalidInput("malformed numeric or flag field");
            if (!(*count >= 0.0) || !(*exposure > 0.0)) {
                throw InvalidInput("effective_count must be >= 0 and exposure > 0");
            }
            const double implied = 1e6 * *count / *exposure;
            if (std::abs(implied - *rate) > 1e-9 * std::max(std::abs(*rate), 1e-300) && implied != *rate) {
                throw InvalidInput("rate " + format_double(*rate) + " disagrees with 1e6*count/exposure = " +
                                   format_double(implied));
            }
            r.rate = *rate;
            r.effective_count = *count;
            r.exposure = *exposure;
            r.applied = {*u, *d};
            if (r.applied.underreporting && r.outcome != OutcomeLevel::AnyInjuryReported) {
                throw InvalidInput("underreporting applies to AnyInjuryReported only");
            }
            rates.push_back(std::move(r));
        } catch (const InvalidInput& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    try {
        return BenchmarkSet(std::move(rates));
    } catch (const InvalidInput& e) {
        throw ParseError(std::string("benchmark file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Cell mileage files
// ---------------------------------------------------------------------------

std::string crash_column_key(OutcomeLevel outcome, const CrashTypeKey& type) {
    std::string key(to_string(outcome));
    if (!type.is_aggregate()) key += ":" + type.label();
    return key;
}

std::string cell_mileage_to_csv(std::span<const CellMileageRow> rows) {
    std::set<std::string> keys;
    for (const auto& r : rows) {
        for (const auto& [k, v] : r.crashes) keys.insert(k);
    }
    std::ostringstream os;
    CsvWriter w(os);
    std::vector<std::string> header = {"cell_id", "location", "human_miles", "ads_miles"};
    for (const auto& k : keys) header.push_back("crashes:" + k);
    w.row(header);
    for (const auto& r : rows) {
        std::vector<std::string> f = {r.cell.id, format_location(r.location), format_double(r.human_miles),
                                      format_double(r.ads_miles)};
        for (const auto& k : keys) {
            auto it = r.crashes.find(k);
            f.push_back(format_double(it == r.crashes.end() ? 0.0 : it->second));
        }
        w.row(f);
    }
    return os.str();
}

std::vector<CellMileageRow> cell_mileage_from_csv(const CsvTable& table) {
    const auto cell_col = table.require_column("cell_id", "cell mileage file");
    const auto loc_col = table.require_column("location", "cell mileage file");
    const auto human_col = table.require_column("human_miles", "cell mileage file");
    const auto ads_col = table.require_column("ads_miles", "cell mileage file");
    std::vector<std::pair<std::size_t, std::string>> crash_cols;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        auto h = trim(table.header[i]);
        if (h.starts_with("crashes:")) crash_cols.emplace_back(i, std::string(h.substr(8)));
    }
    std::vector<CellMileageRow> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "cell mileage file: line " + std::to_string(table.line_numbers[i]);
        if (row.size() != table.header.size()) throw ParseError(where + " has the wrong field count");
        CellMileageRow r;
        r.cell = CellId{std::string(trim(row[cell_col]))};
        auto loc = parse_location_label(row[loc_col]);
        auto human = parse_double(trim(row[human_col]));
        auto ads = parse_double(trim(row[ads_col]));
        if (r.cell.id.empty() || !loc || !human || !ads || *human < 0 || *ads < 0) {
            throw ParseError(where + ": malformed cell id, location or miles");
        }
        r.location = *loc;
        r.human_miles = *human;
        r.ads_miles = *ads;
        for (const auto& [col, key] : crash_cols) {
            auto v = parse_double(trim(row[col]));
            if (!v || *v < 0) throw ParseError(where + ": malformed crash count in 'crashes:" + key + "'");
            r.crashes[key] = *v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// build_benchmarks
// ---------------------------------------------------------------------------

namespace {

bool is_f2r_role(const CrashTypeKey& k) { return k.group == CrashGroup::V2VF2R && k.f2r_role.has_value(); }

// Counting key for a type: F2R roles count from the F2R total and are halved.
CrashTypeKey counting_key(const CrashTypeKey& k) { return is_f2r_role(k) ? CrashTypeKey::of(CrashGroup::V2VF2R) : k; }
double counting_share(const CrashTypeKey& k) { return is_f2r_role(k) ? 0.5 : 1.0; }

double weighted_count(std::span<const ClassifiedRecord* const> records, OutcomeLevel outcome,
                      const CrashTypeKey& key) {
    double n = 0.0;
    for (const auto* c : records) {
        if (c->outcomes.contains(outcome) && key.matches(c->crash_type)) n += c->record.weight;
    }
    return n;
}

struct LocationBuild {
    std::vector<BenchmarkRate> rates;
    std::vector<CellMileageRow> cells;
    std::vector<std::string> notes;
};

LocationBuild build_location(const Location& loc, double share, std::span<const ClassifiedRecord* const> records,
                             const ExposureTable& human_exposure, const ExposureTable& ads_exposure,
                             const BenchmarkOptions& opt) {
    LocationBuild out;
    const std::string name = format_location(loc);
    const double miles = passenger_adjust(human_exposure.surface_miles(loc), share);
    if (!(miles > 0.0)) {
        out.notes.push_back(name + ": no human passenger miles; no benchmark");
        return out;
    }

    std::vector<CrashTypeKey> counting_keys;
    for (const auto& k : opt.crash_types) {
        auto ck = counting_key(k);
        if (std::find(counting_keys.begin(), counting_keys.end(), ck) == counting_keys.end()) counting_keys.push_back(ck);
    }

    // Unadjusted benchmarks; also the fallback rates for the dynamic form.
    std::map<std::tuple<OutcomeLevel, CrashTypeKey, bool>, double> region_rate;
    for (auto outcome : opt.outcomes) {
        for (const auto& k : opt.crash_types) {
            const double raw = weighted_count(records, outcome, counting_key(k)) * counting_share(k);
            for (bool u : {false, true}) {
                if (u && outcome != OutcomeLevel::AnyInjuryReported) continue;
                const double count = underreporting_adjust(raw, outcome, opt.underreporting_factor, u);
                BenchmarkRate r{loc, outcome, k, ipmm(count, miles), count, miles, {u, false}};
                region_rate[{outcome, k, u}] = r.rate;
                out.rates.push_back(std::move(r));
            }
        }
    }

    const auto human_cells = human_exposure.cell_miles(loc);
    const auto ads_cells = ads_exposure.cell_miles(loc);
    if (human_cells.empty() || ads_cells.empty()) {
        out.notes.push_back(name + ": dynamic benchmark skipped, " +
                            (human_cells.empty() ? "no human cell miles" : "no ADS cell miles"));
        return out;
    }

    std::map<CellId, CellMileageRow> cells;
    for (const auto& [id, m] : human_cells) {
        auto& row = cells[id];
        row.cell = id;
        row.location = loc;
        row.human_miles = passenger_adjust(m, share);
    }
    for (const auto& [id, m] : ads_cells) {
        auto& row = cells[id];
        row.cell = id;
        row.location = loc;
        row.ads_miles = m;
    }
    std::size_t without_coordinates = 0;
    for (const auto* c : records) {
        if (!c->record.coordinates) {
            ++without_coordinates;
            continue;
        }
        auto id = cell_of(*c->record.coordinates, opt.cell_level);
        auto& row = cells[id];
        row.cell = id;
        row.location = loc;
        for (auto outcome : opt.outcomes) {
            if (!c->outcomes.contains(outcome)) continue;
            for (const auto& k : counting_keys) {
                if (k.matches(c->crash_type)) row.crashes[crash_column_key(outcome, k)] += c->record.weight;
            }
        }
    }
    if (without_coordinates > 0) {
        out.notes.push_back(name + ": " + std::to_string(without_coordinates) +
                            " human records without coordinates left out of the dynamic benchmark");
    }
    for (auto& [id, row] : cells) {
        for (auto outcome : opt.outcomes) {
            for (const auto& k : counting_keys) row.crashes.try_emplace(crash_column_key(outcome, k), 0.0);
        }
        out.cells.push_back(row);
    }

    for (auto outcome : opt.outcomes) {
        for (const auto& k : opt.crash_types) {
            const auto column = crash_column_key(outcome, counting_key(k));
            for (bool u : {false, true}) {
                if (u && outcome != OutcomeLevel::AnyInjuryReported) continue;
                std::vector<CellInput> inputs;
                inputs.reserve(out.cells.size());
                for (const auto& row : out.cells) {
                    const double raw = row.crashes.at(column) * counting_share(k);
                    inputs.push_back({row.cell, underreporting_adjust(raw, outcome, opt.underreporting_factor, u),
                                      row.human_miles, row.ads_miles});
                }
                auto d = dynamic_reweight(inputs, opt.zero_human_miles, region_rate.at({outcome, k, u}));
                if (!d.fallback_cells.empty() && outcome == opt.outcomes.front() && k.is_aggregate() && !u) {
                    out.notes.push_back(name + ": region rate used for " + std::to_string(d.fallback_cells.size()) +
                                        " cells without human miles");
                }
                out.rates.push_back({loc, outcome, k, d.rate, d.effective_count, d.human_exposure, {u, true}});
            }
        }
    }
    return out;
}

} // namespace

BenchmarkBuild build_benchmarks(std::span<const ClassifiedRecord> human_records, const ExposureTable& human_exposure,
                                const ExposureTable& ads_exposure, const std::map<Location, double>& shares,
                                const BenchmarkOptions& options) {
    if (options.outcomes.empty() || options.crash_types.empty()) {
        throw InvalidInput("benchmark: at least one outcome and one crash type are required");
    }
    std::vector<Location> locations;
    std::vector<double> share_list;
    for (const auto& [loc, share] : shares) {
        locations.push_back(loc);
        share_list.push_back(share);
    }
    std::vector<std::vector<const ClassifiedRecord*>> by_location(locations.size());
    for (const auto& c : human_records) {
        auto it = std::find(locations.begin(), locations.end(), c.record.location);
        if (it != locations.end()) by_location[it - locations.begin()].push_back(&c);
    }

    std::vector<LocationBuild> parts(locations.size());
    parallel_for(locations.size(), options.threads, [&](std::size_t i) {
        parts[i] = build_location(locations[i], share_list[i], by_location[i], human_exposure, ads_exposure, options);
    });

    BenchmarkBuild out;
    std::vector<BenchmarkRate> rates;
    for (auto& p : parts) {
        rates.insert(rates.end(), p.rates.begin(), p.rates.end());
        out.cells.insert(out.cells.end(), p.cells.begin(), p.cells.end());
        out.notes.insert(out.notes.end(), p.notes.begin(), p.notes.end());
    }
    for (const auto& loc : human_exposure.locations()) {
        if (!shares.count(loc)) out.notes.push_back(loc.label() + ": no VM-4 passenger share; no benchmark");
    }
    out.set = BenchmarkSet(std::move(rates));
    return out;
}

} // namespace crashbench
