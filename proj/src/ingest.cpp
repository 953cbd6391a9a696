#include "crashbench/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "crashbench/error.hpp"
#include "crashbench/field_types.hpp"

namespace crashbench {

namespace {

constexpr std::size_t kMaxRowErrors = 50;

using Values = std::map<std::string, std::string, std::less<>>;

std::string_view value_of(const Values& v, std::string_view key) {
    auto it = v.find(key);
    return it == v.end() ? std::string_view{} : trim(it->second);
}

class Tally {
public:
    void add(const std::string& column, const std::string& value) { ++counts_[{column, value}]; }

    std::vector<ValueTally> list() const {
        std::vector<ValueTally> out;
        for (const auto& [key, n] : counts_) out.push_back({key.first, key.second, n});
        return out;
    }

private:
    std::map<std::pair<std::string, std::string>, std::size_t> counts_;
};

void note_error(IngestReport& report, std::size_t line, const std::string& what) {
    if (report.row_errors.size() < kMaxRowErrors) {
        report.row_errors.push_back("line " + std::to_string(line) + ": " + what);
    }
}

void drop(IngestReport& report, const char* rule) { ++report.rows_dropped_by_rule[rule]; }

template <class E>
std::optional<E> optional_enum(const Values& v, std::string_view key) {
    auto s = value_of(v, key);
    if (s.empty()) return std::nullopt;
    return parse_enum<E>(s);
}

template <class E>
E enum_or(const Values& v, std::string_view key, E fallback) {
    return optional_enum<E>(v, key).value_or(fallback);
}

std::optional<double> optional_double(const Values& v, std::string_view key) {
    auto s = value_of(v, key);
    if (s.empty()) return std::nullopt;
    auto d = parse_double(s);
    if (!d) throw InvalidInput(std::string(key) + ": '" + std::string(s) + "' is not a number");
    return d;
}

std::optional<long long> optional_int(const Values& v, std::string_view key) {
    auto s = value_of(v, key);
    if (s.empty()) return std::nullopt;
    auto d = parse_int(s);
    if (!d) throw InvalidInput(std::string(key) + ": '" + std::string(s) + "' is not an integer");
    return d;
}

std::optional<bool> optional_bool(const Values& v, std::string_view key) {
    auto s = value_of(v, key);
    if (s.empty()) return std::nullopt;
    auto d = parse_bool(s);
    if (!d) throw InvalidInput(std::string(key) + ": '" + std::string(s) + "' is not a boolean");
    return d;
}

Location location_of(const Values& v) {
    auto s = value_of(v, "location");
    auto loc = parse_location_label(s);
    if (!loc) throw InvalidInput("location: unknown label '" + std::string(s) + "'");
    return *loc;
}

// Canonical field values -> record. Throws InvalidInput on malformed values.
CrashRecord build_record(const Values& v) {
    CrashRecord r;
    r.crash_id = std::string(value_of(v, "crash_id"));
    if (r.crash_id.empty()) throw InvalidInput("crash_id is empty");
    r.location = location_of(v);

    auto lat = optional_double(v, "latitude");
    auto lon = optional_double(v, "longitude");
    if (lat.has_value() != lon.has_value()) throw InvalidInput("latitude and longitude must both be present");
    if (lat) {
        r.coordinates = LatLon{*lat, *lon};
        check_coordinates(*r.coordinates);
    }
    r.road_class = enum_or(v, "road_class", RoadClass::Unknown);
    r.sequence_position = static_cast<int>(optional_int(v, "sequence_position").value_or(1));
    r.configuration = enum_or(v, "configuration", Configuration::OtherOrUnknown);

    auto body = value_of(v, "subject.body_class");
    if (body.empty()) throw InvalidInput("subject.body_class is empty");
    r.subject.body_class = parse_enum<BodyClass>(body);
    r.subject.role_order = static_cast<int>(optional_int(v, "subject.role_order").value_or(1));
    r.subject.in_transport = optional_bool(v, "subject.in_transport").value_or(true);

    auto partner = value_of(v, "partner.body_class");
    if (!partner.empty() && partner != "None") {
        Actor a;
        a.body_class = parse_enum<BodyClass>(partner);
        a.role_order = static_cast<int>(
            optional_int(v, "partner.role_order").value_or(r.subject.role_order == 1 ? 2 : 1));
        a.in_transport = optional_bool(v, "partner.in_transport").value_or(true);
        r.partner = a;
    }

    r.severity.max_injury = enum_or(v, "max_injury", InjuryLevel::None);
    r.severity.any_airbag_any_vehicle = optional_bool(v, "any_airbag_any_vehicle").value_or(false);
    r.severity.police_reported = optional_bool(v, "police_reported").value_or(false);
    r.severity.police_confirmed_serious = optional_bool(v, "police_confirmed_serious");

    r.annotations.initiator_role = optional_enum<InitiatorRole>(v, "initiator_role");
    r.annotations.f2r_role = optional_enum<F2RRole>(v, "f2r_role");
    auto stopped = optional_double(v, "stopped_duration_s");
    auto decel = optional_double(v, "peak_deceleration_mps2");
    if (stopped || decel) {
        r.annotations.pre_crash_kinematics = Kinematics{stopped.value_or(0.0), decel.value_or(0.0)};
    }
    if (auto w = optional_double(v, "weight")) r.weight = *w;
    return r;
}

int injury_rank(InjuryLevel level) {
    switch (level) {
    case InjuryLevel::None: return 0;
    case InjuryLevel::UnknownWithInjuryAllegation: return 1;
    case InjuryLevel::C: return 2;
    case InjuryLevel::B: return 3;
    case InjuryLevel::A: return 4;
    case InjuryLevel::K: return 5;
    }
    return 0;
}

std::unordered_map<std::string, std::size_t> index_header(const CsvTable& table) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < table.header.size(); ++i) index.emplace(std::string(trim(table.header[i])), i);
    return index;
}

void require_columns(const CsvTable& table, const MappingConfig& config) {
    auto index = index_header(table);
    for (const auto& col : config.referenced_columns()) {
        if (!index.count(col)) {
            throw ConfigError("config '" + config.source_name + "' references column '" + col +
                              "' which is missing from the input header");
        }
    }
}

// Applies the field map to one row. Returns false when a value was unmapped.
bool map_row(const SourceRow& row, const MappingConfig& config, Values& out, Tally& unmapped,
             Tally& ambiguous) {
    bool ok = true;
    for (const auto& f : config.field_map) {
        if (f.predicate) {
            out[f.canonical_field] = f.predicate->evaluate(row) ? "true" : "false";
            continue;
        }
        std::string joined;
        for (std::size_t i = 0; i < f.columns.size(); ++i) {
            if (i) joined += '|';
            joined += row.get(f.columns[i]);
        }
        if (f.value_map.empty()) {
            out[f.canonical_field] = joined;
            continue;
        }
        const ValuePattern* first = nullptr;
        const ValuePattern* second = nullptr;
        for (const auto& p : f.value_map) {
            if (!p.matches(joined)) continue;
            if (!first) {
                first = &p;
            } else {
                second = &p;
                break;
            }
        }
        if (second) {
            if (!f.first_match) {
                throw ConfigError("config '" + config.source_name + "': ambiguous value_map for column '" +
                                  f.column_label() + "': value '" + joined + "' matches patterns '" +
                                  first->pattern + "' and '" + second->pattern + "'");
            }
            ambiguous.add(f.column_label(), joined);
        }
        if (first) {
            out[f.canonical_field] = first->value;
        } else if (f.default_value) {
            out[f.canonical_field] = *f.default_value;
        } else {
            unmapped.add(f.column_label(), joined);
            ok = false;
        }
    }
    return ok;
}

std::string canonical_to_column(std::string_view field) {
    std::string out(field);
    std::replace(out.begin(), out.end(), '.', '_');
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// IngestReport
// ---------------------------------------------------------------------------

std::size_t IngestReport::rows_dropped() const {
    std::size_t n = 0;
    for (const auto& [rule, count] : rows_dropped_by_rule) n += count;
    return n;
}

std::size_t IngestReport::dropped(const std::string& rule) const {
    auto it = rows_dropped_by_rule.find(rule);
    return it == rows_dropped_by_rule.end() ? 0 : it->second;
}

std::string IngestReport::to_json() const {
    nlohmann::ordered_json j;
    j["source"] = source;
    j["rows_read"] = rows_read;
    j["rows_emitted"] = rows_emitted;
    j["rows_dropped_by_rule"] = nlohmann::ordered_json::object();
    for (const auto& [rule, n] : rows_dropped_by_rule) j["rows_dropped_by_rule"][rule] = n;
    auto tallies = [](const std::vector<ValueTally>& list) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& t : list) arr.push_back({{"column", t.column}, {"value", t.value}, {"count", t.count}});
        return arr;
    };
    j["unmapped_values"] = tallies(unmapped_values);
    j["ambiguous_values"] = tallies(ambiguous_values);
    j["row_errors"] = row_errors;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Human crash extracts
// ---------------------------------------------------------------------------

CrashParseResult parse_crash_table(const CsvTable& table, const MappingConfig& config,
                                   const std::string& source) {
    if (config.kind != MappingKind::Crash) {
        throw ConfigError("config '" + config.source_name + "' is not a crash config");
    }
    require_columns(table, config);
    const auto index = index_header(table);

    struct Candidate {
        std::size_t line;
        CrashRecord record;
        bool passenger_rule;
        bool surface_rule;
        bool transport_rule;
    };

    CrashParseResult result;
    IngestReport& report = result.report;
    report.source = source;
    Tally unmapped;
    Tally ambiguous;
    std::vector<Candidate> candidates;

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& fields = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        ++report.rows_read;
        if (fields.size() != table.header.size()) {
            drop(report, drop_rule::kParseError);
            note_error(report, line, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
            continue;
        }
        SourceRow row(index, fields);
        Values values(config.defaults.begin(), config.defaults.end());
        if (!map_row(row, config, values, unmapped, ambiguous)) {
            drop(report, drop_rule::kUnmappedValue);
            continue;
        }
        try {
            Candidate c{line, build_record(values), true, true, true};
            if (config.passenger_vehicle_rules) c.passenger_rule = config.passenger_vehicle_rules->evaluate(row);
            if (config.surface_street_rules) c.surface_rule = config.surface_street_rules->evaluate(row);
            if (config.in_transport_rules) c.transport_rule = config.in_transport_rules->evaluate(row);
            candidates.push_back(std::move(c));
        } catch (const InvalidInput& e) {
            drop(report, drop_rule::kParseError);
            note_error(report, line, e.what());
        }
    }

    // Crash-level severity: every party of the crash contributes, including
    // parties the subselection rules drop below.
    const auto& levels = config.crash_level_fields;
    const bool fold_injury = std::find(levels.begin(), levels.end(), "max_injury") != levels.end();
    const bool fold_airbag = std::find(levels.begin(), levels.end(), "any_airbag_any_vehicle") != levels.end();
    if (fold_injury || fold_airbag) {
        std::map<std::string, Severity> per_crash;
        for (const auto& c : candidates) {
            auto& s = per_crash[c.record.crash_id];
            if (injury_rank(c.record.severity.max_injury) > injury_rank(s.max_injury))
                s.max_injury = c.record.severity.max_injury;
            s.any_airbag_any_vehicle = s.any_airbag_any_vehicle || c.record.severity.any_airbag_any_vehicle;
        }
        for (auto& c : candidates) {
            const auto& s = per_crash[c.record.crash_id];
            if (fold_injury) c.record.severity.max_injury = s.max_injury;
            if (fold_airbag) c.record.severity.any_airbag_any_vehicle = s.any_airbag_any_vehicle;
        }
    }

    const bool road_mapped = config.provides("road_class");
    const bool transport_mapped = config.provides("subject.in_transport");
    const bool confirmed_mapped = config.provides("police_confirmed_serious");

    for (auto& c : candidates) {
        CrashRecord& r = c.record;
        const auto body = r.subject.body_class;
        if (!c.passenger_rule || (body != BodyClass::PassengerVehicle && body != BodyClass::UnknownVehicle)) {
            drop(report, drop_rule::kPassengerVehicle);
            continue;
        }
        if (config.surface_street_rules) {
            if (c.surface_rule && !road_mapped) r.road_class = RoadClass::SurfaceStreet;
            if (!c.surface_rule) r.road_class = road_mapped ? r.road_class : RoadClass::FreewayOrInterstate;
        }
        if (!c.surface_rule || r.road_class != RoadClass::SurfaceStreet) {
            drop(report, drop_rule::kSurfaceStreet);
            continue;
        }
        if (config.in_transport_rules && !transport_mapped) r.subject.in_transport = c.transport_rule;
        if (!c.transport_rule || !r.subject.in_transport) {
            drop(report, drop_rule::kInTransport);
            continue;
        }
        if (body == BodyClass::UnknownVehicle) r.weight = config.unknown_vehicle_weight;
        // Police extracts carry the police severity directly.
        if (!confirmed_mapped && r.severity.police_reported) {
            r.severity.police_confirmed_serious =
                r.severity.max_injury == InjuryLevel::A || r.severity.max_injury == InjuryLevel::K;
        }
        try {
            validate(r);
        } catch (const InvalidInput& e) {
            drop(report, drop_rule::kInvalidRecord);
            note_error(report, c.line, e.what());
            continue;
        }
        result.records.push_back(std::move(r));
    }

    std::stable_sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.crash_id, a.subject.role_order) < std::tie(b.crash_id, b.subject.role_order);
    });
    report.rows_emitted = result.records.size();
    report.unmapped_values = unmapped.list();
    report.ambiguous_values = ambiguous.list();
    return result;
}

CrashParseResult parse_crash_file(const std::filesystem::path& path, const MappingConfig& config) {
    return parse_crash_table(read_csv_file(path, config.delimiter), config, path.string());
}

// ---------------------------------------------------------------------------
// SGO-shaped ADS reports
// ---------------------------------------------------------------------------

std::optional<InjuryLevel> sgo_severity(std::string_view token, bool narrative_injury) {
    auto t = to_lower(trim(token));
    auto starts = [&](std::string_view prefix) { return std::string_view(t).starts_with(prefix); };
    if (t == "no injuries reported" || t == "no injured reported" || t == "none") return InjuryLevel::None;
    if (starts("minor")) return InjuryLevel::C;
    if (starts("moderate")) return InjuryLevel::B;
    if (starts("serious")) return InjuryLevel::A;
    if (starts("fatality")) return InjuryLevel::K;
    if (t == "unknown") return narrative_injury ? InjuryLevel::UnknownWithInjuryAllegation : InjuryLevel::None;
    return std::nullopt;
}

namespace {

Location sgo_location(std::string_view service_area, std::string_view city) {
    if (!service_area.empty()) {
        if (auto loc = parse_location_label(service_area)) return *loc;
        return Location::other(std::string(service_area));
    }
    static const std::map<std::string, Location> cities = {
        {"phoenix", Location::phoenix()},       {"tempe", Location::phoenix()},
        {"chandler", Location::phoenix()},      {"mesa", Location::phoenix()},
        {"scottsdale", Location::phoenix()},    {"gilbert", Location::phoenix()},
        {"san francisco", Location::san_francisco()},
        {"los angeles", Location::los_angeles()}, {"santa monica", Location::los_angeles()},
        {"west hollywood", Location::los_angeles()}, {"inglewood", Location::los_angeles()},
        {"austin", Location::austin()},
    };
    auto it = cities.find(to_lower(city));
    if (it != cities.end()) return it->second;
    if (city.empty()) throw InvalidInput("no service area or city");
    return Location::other(std::string(city));
}

std::optional<BodyClass> sgo_partner(std::string_view crash_with) {
    auto t = to_lower(trim(crash_with));
    if (t.empty()) return std::nullopt;
    if (t == "passenger car" || t == "suv" || t == "pickup truck" || t == "van") return BodyClass::PassengerVehicle;
    if (t == "heavy truck" || t == "bus") return BodyClass::HeavyVehicle;
    if (t == "motorcycle") return BodyClass::Motorcycle;
    if (t == "cyclist") return BodyClass::Cyclist;
    if (t == "pedestrian" || t == "non-motorist: other") return BodyClass::Pedestrian;
    if (t == "fixed object" || t == "other fixed object" || t == "animal" || t == "pole / tree")
        return BodyClass::FixedObjectOrGround;
    return BodyClass::UnknownVehicle;
}

RoadClass sgo_road(std::string_view roadway_type) {
    auto t = to_lower(trim(roadway_type));
    if (t.empty() || t == "unknown") return RoadClass::Unknown;
    if (t.find("highway") != std::string::npos || t.find("freeway") != std::string::npos)
        return RoadClass::FreewayOrInterstate;
    return RoadClass::SurfaceStreet;
}

bool yes(std::string_view v) { return parse_bool(v).value_or(false); }

} // namespace

CrashParseResult parse_sgo_table(const CsvTable& table, const std::string& source) {
    table.require_column(sgo::kReportId, source);
    table.require_column(sgo::kSeverity, source);
    const auto index = index_header(table);

    CrashParseResult result;
    IngestReport& report = result.report;
    report.source = source;
    Tally unknown_tokens;

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& fields = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        ++report.rows_read;
        if (fields.size() != table.header.size()) {
            drop(report, drop_rule::kParseError);
            note_error(report, line, "field count mismatch");
            continue;
        }
        SourceRow row(index, fields);
        auto token = row.get(sgo::kSeverity);
        auto injury = sgo_severity(token, yes(row.get(sgo::kNarrativeInjury)));
        if (!injury) {
            drop(report, drop_rule::kSeverityToken);
            unknown_tokens.add(sgo::kSeverity, std::string(token));
            note_error(report, line, "unknown severity token '" + std::string(token) + "'");
            continue;
        }
        try {
            CrashRecord r;
            r.crash_id = std::string(row.get(sgo::kReportId));
            if (r.crash_id.empty()) throw InvalidInput("empty report id");
            r.location = sgo_location(row.get(sgo::kServiceArea), row.get(sgo::kCity));
            auto lat = parse_double(row.get(sgo::kLatitude));
            auto lon = parse_double(row.get(sgo::kLongitude));
            if (lat && lon) r.coordinates = LatLon{*lat, *lon};
            r.road_class = sgo_road(row.get(sgo::kRoadwayType));
            r.subject = Actor{BodyClass::PassengerVehicle, 1, parse_bool(row.get(sgo::kInTransport)).value_or(true)};
            if (auto seq = parse_int(row.get(sgo::kSequencePosition))) r.sequence_position = static_cast<int>(*seq);
            if (auto cfg = row.get(sgo::kConfiguration); !cfg.empty()) r.configuration = parse_enum<Configuration>(cfg);

            std::optional<BodyClass> partner;
            auto override_partner = row.get(sgo::kPartnerBodyClass);
            if (!override_partner.empty()) {
                if (override_partner != "None") partner = parse_enum<BodyClass>(override_partner);
            } else {
                partner = sgo_partner(row.get(sgo::kCrashWith));
            }
            if (partner) r.partner = Actor{*partner, 2, true};

            r.severity.max_injury = *injury;
            r.severity.any_airbag_any_vehicle =
                yes(row.get(sgo::kSvAirbag)) || yes(row.get(sgo::kCpAirbag)) || yes(row.get(sgo::kAnyVehicleAirbag));
            r.severity.police_reported = yes(row.get(sgo::kLawEnforcement));
            if (auto police = row.get(sgo::kPoliceSeverity); !police.empty()) {
                auto level = parse_enum<InjuryLevel>(police == "O" ? std::string_view("None") : police);
                r.severity.police_confirmed_serious = level == InjuryLevel::A || level == InjuryLevel::K;
            }
            if (auto role = row.get(sgo::kInitiatorRole); !role.empty())
                r.annotations.initiator_role = parse_enum<InitiatorRole>(role);
            if (auto role = row.get(sgo::kF2RRole); !role.empty()) r.annotations.f2r_role = parse_enum<F2RRole>(role);
            auto stopped = row.get(sgo::kStoppedDuration);
            auto decel = row.get(sgo::kPeakDecel);
            if (!stopped.empty() || !decel.empty()) {
                auto s = stopped.empty() ? std::optional<double>(0.0) : parse_double(stopped);
                auto d = decel.empty() ? std::optional<double>(0.0) : parse_double(decel);
                if (!s || !d) throw InvalidInput("non-numeric kinematics annotation");
                r.annotations.pre_crash_kinematics = Kinematics{*s, *d};
            }

            if (r.road_class != RoadClass::SurfaceStreet) {
                drop(report, drop_rule::kSurfaceStreet);
                continue;
            }
            if (!r.subject.in_transport) {
                drop(report, drop_rule::kInTransport);
                continue;
            }
            if (!parse_bool(row.get(sgo::kImpacted)).value_or(true)) {
                drop(report, drop_rule::kNotImpacted);
                continue;
            }
            validate(r);
            result.records.push_back(std::move(r));
        } catch (const InvalidInput& e) {
            drop(report, drop_rule::kInvalidRecord);
            note_error(report, line, e.what());
        }
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const auto& a, const auto& b) { return a.crash_id < b.crash_id; });
    report.rows_emitted = result.records.size();
    report.unmapped_values = unknown_tokens.list();
    return result;
}

CrashParseResult parse_sgo_file(const std::filesystem::path& path) {
    return parse_sgo_table(read_csv_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Exposure
// ---------------------------------------------------------------------------

ExposureParseResult parse_exposure_table(const CsvTable& table, const MappingConfig& config,
                                         Population population, const std::string& source) {
    if (config.kind != MappingKind::Exposure) {
        throw ConfigError("config '" + config.source_name + "' is not an exposure config");
    }
    require_columns(table, config);
    const auto index = index_header(table);

    ExposureParseResult result;
    result.table.population = population;
    IngestReport& report = result.report;
    report.source = source;
    Tally unmapped;
    Tally ambiguous;

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& fields = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        ++report.rows_read;
        if (fields.size() != table.header.size()) {
            drop(report, drop_rule::kParseError);
            note_error(report, line, "field count mismatch");
            continue;
        }
        SourceRow row(index, fields);
        Values values(config.defaults.begin(), config.defaults.end());
        if (!map_row(row, config, values, unmapped, ambiguous)) {
            drop(report, drop_rule::kUnmappedValue);
            continue;
        }
        auto loc = parse_location_label(value_of(values, "location"));
        if (!loc) {
            drop(report, drop_rule::kUnknownLocation);
            note_error(report, line, "unknown location '" + std::string(value_of(values, "location")) + "'");
            continue;
        }
        auto miles = parse_double(value_of(values, "miles"));
        if (!miles) {
            drop(report, drop_rule::kParseError);
            note_error(report, line, "miles is not a number");
            continue;
        }
        if (*miles < 0.0) {
            drop(report, drop_rule::kNegativeMiles);
            note_error(report, line, "negative miles");
            continue;
        }
        try {
            ExposureRow r;
            r.location = *loc;
            r.road_class = enum_or(values, "road_class", RoadClass::SurfaceStreet);
            r.vehicle_class = enum_or(values, "vehicle_class", VehicleClass::All);
            if (auto cell = value_of(values, "cell_id"); !cell.empty()) r.cell = CellId{std::string(cell)};
            r.miles = *miles;
            result.table.rows.push_back(std::move(r));
        } catch (const InvalidInput& e) {
            drop(report, drop_rule::kParseError);
            note_error(report, line, e.what());
        }
    }
    report.rows_emitted = result.table.rows.size();
    report.unmapped_values = unmapped.list();
    report.ambiguous_values = ambiguous.list();
    return result;
}

ExposureParseResult parse_exposure(const std::filesystem::path& path, const MappingConfig& config,
                                   Population population) {
    return parse_exposure_table(read_csv_file(path, config.delimiter), config, population, path.string());
}

// ---------------------------------------------------------------------------
// Canonical CSV
// ---------------------------------------------------------------------------

const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> columns = [] {
        std::vector<std::string> out;
        for (const auto& f : canonical_crash_fields()) out.push_back(canonical_to_column(f));
        out.push_back("weight");
        return out;
    }();
    return columns;
}

std::vector<std::string> record_fields(const CrashRecord& r) {
    auto opt_bool = [](const std::optional<bool>& b) { return b ? std::string(*b ? "true" : "false") : ""; };
    auto tf = [](bool b) { return std::string(b ? "true" : "false"); };
    std::vector<std::string> f;
    f.reserve(record_columns().size());
    f.push_back(r.crash_id);
    f.push_back(format_location(r.location));
    f.push_back(r.coordinates ? format_double(r.coordinates->lat) : "");
    f.push_back(r.coordinates ? format_double(r.coordinates->lon) : "");
    f.emplace_back(to_string(r.road_class));
    f.push_back(std::to_string(r.sequence_position));
    f.emplace_back(to_string(r.configuration));
    f.emplace_back(to_string(r.subject.body_class));
    f.push_back(std::to_string(r.subject.role_order));
    f.push_back(tf(r.subject.in_transport));
    f.push_back(r.partner ? std::string(to_string(r.partner->body_class)) : "None");
    f.push_back(r.partner ? std::to_string(r.partner->role_order) : "");
    f.push_back(r.partner ? tf(r.partner->in_transport) : "");
    f.emplace_back(to_string(r.severity.max_injury));
    f.push_back(tf(r.severity.any_airbag_any_vehicle));
    f.push_back(tf(r.severity.police_reported));
    f.push_back(opt_bool(r.severity.police_confirmed_serious));
    f.push_back(r.annotations.initiator_role ? std::string(to_string(*r.annotations.initiator_role)) : "");
    f.push_back(r.annotations.f2r_role ? std::string(to_string(*r.annotations.f2r_role)) : "");
    const auto& k = r.annotations.pre_crash_kinematics;
    f.push_back(k ? format_double(k->stopped_duration_s) : "");
    f.push_back(k ? format_double(k->peak_deceleration_mps2) : "");
    f.push_back(format_double(r.weight));
    return f;
}

CrashRecord record_from_fields(const CsvTable& table, const std::vector<std::string>& row) {
    Values values;
    const auto& fields = canonical_crash_fields();
    for (const auto& field : fields) {
        auto col = table.column(canonical_to_column(field));
        if (!col) throw ParseError("canonical record file lacks column '" + canonical_to_column(field) + "'");
        if (*col < row.size()) values[field] = row[*col];
    }
    if (auto w = table.column("weight"); w && *w < row.size()) values["weight"] = row[*w];
    CrashRecord r = build_record(values);
    validate(r);
    return r;
}

std::string records_to_csv(std::span<const CrashRecord> records) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row(record_columns());
    for (const auto& r : records) w.row(record_fields(r));
    return os.str();
}

std::vector<CrashRecord> records_from_csv(const CsvTable& table) {
    std::vector<CrashRecord> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != table.header.size())
            throw ParseError("canonical record file: line " + std::to_string(table.line_numbers[i]) +
                             " has the wrong field count");
        try {
            out.push_back(record_from_fields(table, table.rows[i]));
        } catch (const InvalidInput& e) {
            throw ParseError("canonical record file: line " + std::to_string(table.line_numbers[i]) + ": " +
                             e.what());
        }
    }
    return out;
}

const std::vector<std::string>& exposure_columns() {
    static const std::vector<std::string> columns = {"population", "location",  "road_class",
                                                     "vehicle_class", "cell_id", "miles"};
    return columns;
}

std::string exposure_to_csv(const ExposureTable& table) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row(exposure_columns());
    for (const auto& r : table.rows) {
        w.row({std::string(to_string(table.population)), format_location(r.location),
               std::string(to_string(r.road_class)), std::string(to_string(r.vehicle_class)),
               r.cell ? r.cell->id : "", format_double(r.miles)});
    }
    return os.str();
}

ExposureTable exposure_from_csv(const CsvTable& table) {
    std::vector<std::size_t> cols;
    for (const auto& c : exposure_columns()) cols.push_back(table.require_column(c, "canonical exposure file"));
    ExposureTable out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        auto at = [&](std::size_t k) -> std::string_view { return cols[k] < row.size() ? trim(row[cols[k]]) : ""; };
        try {
            auto pop = parse_enum<Population>(at(0));
            if (i == 0) out.population = pop;
            else if (pop != out.population) throw ParseError("mixed populations in one exposure file");
            ExposureRow r;
            auto loc = parse_location_label(at(1));
            if (!loc) throw InvalidInput("unknown location '" + std::string(at(1)) + "'");
            r.location = *loc;
            r.road_class = parse_enum<RoadClass>(at(2));
            r.vehicle_class = parse_enum<VehicleClass>(at(3));
            if (!at(4).empty()) r.cell = CellId{std::string(at(4))};
            auto miles = parse_double(at(5));
            if (!miles || *miles < 0) throw InvalidInput("miles must be a non-negative number");
            r.miles = *miles;
            out.rows.push_back(std::move(r));
        } catch (const InvalidInput& e) {
            throw ParseError("canonical exposure file: line " + std::to_string(table.line_numbers[i]) + ": " +
                             e.what());
        }
    }
    return out;
}

} // namespace crashbench
