#include "crashbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crashbench {

std::string_view to_string(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::DataGap: return "data-gap";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::InvalidInput: return "invalid-input";
    }
    return "unknown";
}

Location Location::other(std::string name) {
    if (name.empty()) throw InvalidInput("location name must not be empty");
    return Location(LocationKind::Other, std::move(name));
}

Location Location::parse(std::string_view label) {
    if (label == "Phoenix") return phoenix();
    if (label == "SanFrancisco") return san_francisco();
    if (label == "LosAngeles") return los_angeles();
    if (label == "Austin") return austin();
    if (label == "AllLocations") return all_locations();
    return other(std::string(label));
}

std::vector<OutcomeLevel> OutcomeSet::levels() const {
    std::vector<OutcomeLevel> out;
    for (auto l : all_values<OutcomeLevel>()) {
        if (contains(l)) out.push_back(l);
    }
    return out;
}

std::string OutcomeSet::to_string() const {
    std::string out;
    for (auto l : levels()) {
        if (!out.empty()) out += '|';
        out += crashbench::to_string(l);
    }
    return out;
}

OutcomeSet OutcomeSet::parse(std::string_view text) {
    OutcomeSet set;
    while (!text.empty()) {
        auto bar = text.find('|');
        set.insert(parse_enum<OutcomeLevel>(text.substr(0, bar)));
        if (bar == std::string_view::npos) break;
        text.remove_prefix(bar + 1);
    }
    return set;
}

bool role_orders_contiguous(std::span<const Actor> actors) {
    std::vector<int> orders;
    orders.reserve(actors.size());
    for (const auto& a : actors) orders.push_back(a.role_order);
    std::sort(orders.begin(), orders.end());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] != static_cast<int>(i) + 1) return false;
    }
    return true;
}

bool injury_reported(InjuryLevel level) { return level != InjuryLevel::None; }

void validate(const CrashRecord& r) {
    auto fail = [&](const std::string& what) {
        throw InvalidInput("record '" + r.crash_id + "': " + what);
    };
    if (r.crash_id.empty()) throw InvalidInput("record with empty crash_id");
    if (r.location.is_blended() || r.location.label().empty()) fail("invalid location");
    if (r.subject.role_order < 1) fail("subject role_order must be >= 1");
    if (r.partner) {
        if (r.partner->role_order < 1) fail("partner role_order must be >= 1");
        if (r.partner->role_order == r.subject.role_order) fail("subject and partner share a role_order");
    }
    if (r.sequence_position < 1) fail("sequence_position must be >= 1");
    if (!(r.weight >= 0.0 && r.weight <= 1.0)) fail("weight must lie in [0, 1]");
    if (r.subject.body_class == BodyClass::PassengerVehicle && r.weight != 1.0)
        fail("known passenger vehicles carry weight 1");
    if (r.severity.police_confirmed_serious.value_or(false) &&
        r.severity.max_injury != InjuryLevel::A && r.severity.max_injury != InjuryLevel::K)
        fail("police_confirmed_serious requires max_injury A or K");
    if (r.coordinates) check_coordinates(*r.coordinates);
    if (r.annotations.pre_crash_kinematics) {
        const auto& k = *r.annotations.pre_crash_kinematics;
        if (k.stopped_duration_s < 0 || k.peak_deceleration_mps2 < 0) fail("negative kinematics");
    }
}

void check_coordinates(LatLon p) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
        std::ostringstream os;
        os << "coordinates out of range: (" << p.lat << ", " << p.lon << ")";
        throw InvalidInput(os.str());
    }
}

namespace {

std::string width_prefix(double width) {
    std::ostringstream os;
    os.precision(17);
    os << 'W' << width;
    return os.str();
}

} // namespace

EqualAngleGrid::EqualAngleGrid(double cell_width_deg)
    : EqualAngleGrid(cell_width_deg, width_prefix(cell_width_deg)) {}

EqualAngleGrid::EqualAngleGrid(double width, std::string prefix)
    : width_(width), rows_(0), cols_(0), prefix_(std::move(prefix)) {
    if (!(width > 0.0) || width > 180.0)
        throw InvalidInput("cell width must lie in (0, 180] degrees");
    rows_ = static_cast<long>(std::ceil(180.0 / width - 1e-12));
    cols_ = static_cast<long>(std::ceil(360.0 / width - 1e-12));
}

EqualAngleGrid EqualAngleGrid::for_level(int level) {
    if (level < 0 || level > 30) throw InvalidInput("cell level must lie in [0, 30]");
    return EqualAngleGrid(std::ldexp(180.0, -level), "L" + std::to_string(level));
}

std::pair<long, long> EqualAngleGrid::index_of(LatLon p) const {
    check_coordinates(p);
    long row = static_cast<long>(std::floor((p.lat + 90.0) / width_));
    long col = static_cast<long>(std::floor((p.lon + 180.0) / width_));
    return {std::clamp(row, 0L, rows_ - 1), std::clamp(col, 0L, cols_ - 1)};
}

CellId EqualAngleGrid::cell_of(LatLon p) const {
    auto [row, col] = index_of(p);
    return CellId{prefix_ + ":" + std::to_string(row) + ":" + std::to_string(col)};
}

std::string EqualAngleGrid::describe() const {
    return "equal-angle grid " + prefix_;
}

CellId cell_of(LatLon point, int level) {
    return EqualAngleGrid::for_level(level).cell_of(point);
}

std::vector<Location> ExposureTable::locations() const {
    std::set<Location> seen;
    for (const auto& r : rows) seen.insert(r.location);
    return {seen.begin(), seen.end()};
}

double ExposureTable::surface_miles(const Location& location) const {
    double total = 0.0;
    double cells = 0.0;
    bool has_total = false;
    for (const auto& r : rows) {
        if (r.location != location || r.road_class != RoadClass::SurfaceStreet) continue;
        if (r.cell) {
            cells += r.miles;
        } else {
            total += r.miles;
            has_total = true;
        }
    }
    return has_total ? total : cells;
}

std::map<CellId, double> ExposureTable::cell_miles(const Location& location) const {
    std::map<CellId, double> out;
    for (const auto& r : rows) {
        if (r.location != location || !r.cell || r.road_class != RoadClass::SurfaceStreet) continue;
        out[*r.cell] += r.miles;
    }
    return out;
}

std::vector<Location> ExposureTable::inconsistent_locations(double relative_tolerance) const {
    std::vector<Location> out;
    for (const auto& loc : locations()) {
        double total = 0.0;
        double cells = 0.0;
        bool has_total = false;
        bool has_cells = false;
        for (const auto& r : rows) {
            if (r.location != loc || r.road_class != RoadClass::SurfaceStreet) continue;
            if (r.cell) {
                cells += r.miles;
                has_cells = true;
            } else {
                total += r.miles;
                has_total = true;
            }
        }
        if (!has_total || !has_cells) continue;
        double scale = std::max(std::abs(total), 1.0);
        if (std::abs(total - cells) > relative_tolerance * scale) out.push_back(loc);
    }
    return out;
}

} // namespace crashbench
