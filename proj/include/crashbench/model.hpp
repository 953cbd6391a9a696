#pragma once
// Canonical domain types shared by every pipeline stage. No I/O and no
// statistics live here.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crashbench/error.hpp"

namespace crashbench {

// ---------------------------------------------------------------------------
// Enumerations and their canonical labels
// ---------------------------------------------------------------------------

enum class OutcomeLevel : std::uint8_t {
    AnyPropertyDamageOrInjury,
    PoliceReported,
    AnyInjuryReported,
    AirbagDeployment,
    SuspectedSeriousInjuryPlus,
};

enum class CrashGroup : std::uint8_t {
    Cyclist,
    Motorcycle,
    Pedestrian,
    SecondaryCrash,
    SingleVehicle,
    V2VBacking,
    V2VF2R,
    V2VOppositeDirection,
    V2VIntersection,
    V2VLateral,
    Other,
};

inline constexpr std::size_t kCrashGroupCount = 11;

enum class F2RRole : std::uint8_t { Striking, Struck };

enum class BodyClass : std::uint8_t {
    PassengerVehicle,
    Motorcycle,
    Cyclist,
    Pedestrian,
    HeavyVehicle,
    FixedObjectOrGround,
    UnknownVehicle,
};

enum class RoadClass : std::uint8_t { SurfaceStreet, FreewayOrInterstate, Unknown };

enum class Configuration : std::uint8_t {
    Backing,
    FrontToRear,
    OppositeDirection,
    IntersectionTurningOrCrossing,
    LateralSameDirection,
    SingleVehicle,
    OtherOrUnknown,
};

// KABCO ladder plus the SGO "Unknown severity, injury mentioned" state.
enum class InjuryLevel : std::uint8_t { None, C, B, A, K, UnknownWithInjuryAllegation };

enum class InitiatorRole : std::uint8_t { Initiator, Responder, Unknown };

enum class VehicleClass : std::uint8_t { All, PassengerOnly };

enum class Population : std::uint8_t { Ads, Human };

enum class PreCrashMovement : std::uint8_t {
    Stopped5s,
    ConstantOrAccelerating,
    ModerateBraking,
    HardBraking,
};

template <class E>
struct EnumTable;

#define CRASHBENCH_ENUM_TABLE(E, N, ...)                                     \
    template <>                                                              \
    struct EnumTable<E> {                                                    \
        static constexpr std::array<std::pair<E, std::string_view>, N> entries{{__VA_ARGS__}}; \
        static constexpr std::string_view name = #E;                         \
    };

CRASHBENCH_ENUM_TABLE(OutcomeLevel, 5,
    {OutcomeLevel::AnyPropertyDamageOrInjury, "AnyPropertyDamageOrInjury"},
    {OutcomeLevel::PoliceReported, "PoliceReported"},
    {OutcomeLevel::AnyInjuryReported, "AnyInjuryReported"},
    {OutcomeLevel::AirbagDeployment, "AirbagDeployment"},
    {OutcomeLevel::SuspectedSeriousInjuryPlus, "SuspectedSeriousInjuryPlus"})

CRASHBENCH_ENUM_TABLE(CrashGroup, 11,
    {CrashGroup::Cyclist, "Cyclist"},
    {CrashGroup::Motorcycle, "Motorcycle"},
    {CrashGroup::Pedestrian, "Pedestrian"},
    {CrashGroup::SecondaryCrash, "SecondaryCrash"},
    {CrashGroup::SingleVehicle, "SingleVehicle"},
    {CrashGroup::V2VBacking, "V2VBacking"},
    {CrashGroup::V2VF2R, "V2VF2R"},
    {CrashGroup::V2VOppositeDirection, "V2VOppositeDirection"},
    {CrashGroup::V2VIntersection, "V2VIntersection"},
    {CrashGroup::V2VLateral, "V2VLateral"},
    {CrashGroup::Other, "Other"})

CRASHBENCH_ENUM_TABLE(F2RRole, 2,
    {F2RRole::Striking, "Striking"},
    {F2RRole::Struck, "Struck"})

CRASHBENCH_ENUM_TABLE(BodyClass, 7,
    {BodyClass::PassengerVehicle, "PassengerVehicle"},
    {BodyClass::Motorcycle, "Motorcycle"},
    {BodyClass::Cyclist, "Cyclist"},
    {BodyClass::Pedestrian, "Pedestrian"},
    {BodyClass::HeavyVehicle, "HeavyVehicle"},
    {BodyClass::FixedObjectOrGround, "FixedObjectOrGround"},
    {BodyClass::UnknownVehicle, "UnknownVehicle"})

CRASHBENCH_ENUM_TABLE(RoadClass, 3,
    {RoadClass::SurfaceStreet, "SurfaceStreet"},
    {RoadClass::FreewayOrInterstate, "FreewayOrInterstate"},
    {RoadClass::Unknown, "Unknown"})

CRASHBENCH_ENUM_TABLE(Configuration, 7,
    {Configuration::Backing, "Backing"},
    {Configuration::FrontToRear, "FrontToRear"},
    {Configuration::OppositeDirection, "OppositeDirection"},
    {Configuration::IntersectionTurningOrCrossing, "IntersectionTurningOrCrossing"},
    {Configuration::LateralSameDirection, "LateralSameDirection"},
    {Configuration::SingleVehicle, "SingleVehicle"},
    {Configuration::OtherOrUnknown, "OtherOrUnknown"})

CRASHBENCH_ENUM_TABLE(InjuryLevel, 6,
    {InjuryLevel::None, "None"},
    {InjuryLevel::C, "C"},
    {InjuryLevel::B, "B"},
    {InjuryLevel::A, "A"},
    {InjuryLevel::K, "K"},
    {InjuryLevel::UnknownWithInjuryAllegation, "UnknownWithInjuryAllegation"})

CRASHBENCH_ENUM_TABLE(InitiatorRole, 3,
    {InitiatorRole::Initiator, "Initiator"},
    {InitiatorRole::Responder, "Responder"},
    {InitiatorRole::Unknown, "Unknown"})

CRASHBENCH_ENUM_TABLE(VehicleClass, 2,
    {VehicleClass::All, "All"},
    {VehicleClass::PassengerOnly, "PassengerOnly"})

CRASHBENCH_ENUM_TABLE(Population, 2,
    {Population::Ads, "ADS"},
    {Population::Human, "Human"})

CRASHBENCH_ENUM_TABLE(PreCrashMovement, 4,
    {PreCrashMovement::Stopped5s, "Stopped5s"},
    {PreCrashMovement::ConstantOrAccelerating, "ConstantOrAccelerating"},
    {PreCrashMovement::ModerateBraking, "ModerateBraking"},
    {PreCrashMovement::HardBraking, "HardBraking"})

#undef CRASHBENCH_ENUM_TABLE

template <class E>
constexpr std::string_view to_string(E value) {
    for (const auto& [v, label] : EnumTable<E>::entries) {
        if (v == value) return label;
    }
    return "?";
}

template <class E>
constexpr std::optional<E> try_parse(std::string_view label) {
    for (const auto& [v, l] : EnumTable<E>::entries) {
        if (l == label) return v;
    }
    return std::nullopt;
}

template <class E>
E parse_enum(std::string_view label) {
    if (auto v = try_parse<E>(label)) return *v;
    throw InvalidInput("unknown " + std::string(EnumTable<E>::name) + " label '" +
                       std::string(label) + "'");
}

template <class E>
constexpr auto all_values() {
    std::array<E, EnumTable<E>::entries.size()> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = EnumTable<E>::entries[i].first;
    return out;
}

// ---------------------------------------------------------------------------
// Location
// ---------------------------------------------------------------------------

enum class LocationKind : std::uint8_t {
    Phoenix,
    SanFrancisco,
    LosAngeles,
    Austin,
    Other,
    AllLocations,  // blended rows only; never on a record or exposure row
};

class Location {
public:
    Location() = default;

    static Location phoenix() { return Location(LocationKind::Phoenix, "Phoenix"); }
    static Location san_francisco() { return Location(LocationKind::SanFrancisco, "SanFrancisco"); }
    static Location los_angeles() { return Location(LocationKind::LosAngeles, "LosAngeles"); }
    static Location austin() { return Location(LocationKind::Austin, "Austin"); }
    static Location all_locations() { return Location(LocationKind::AllLocations, "AllLocations"); }
    static Location other(std::string name);

    // Canonical labels map to their kind; any other non-empty label is Other(label).
    static Location parse(std::string_view label);

    LocationKind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    bool is_blended() const noexcept { return kind_ == LocationKind::AllLocations; }

    auto operator<=>(const Location&) const = default;

private:
    Location(LocationKind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

    LocationKind kind_ = LocationKind::Other;
    std::string label_;
};

// ---------------------------------------------------------------------------
// Outcome sets and crash types
// ---------------------------------------------------------------------------

class OutcomeSet {
public:
    constexpr OutcomeSet() = default;
    constexpr OutcomeSet(std::initializer_list<OutcomeLevel> levels) {
        for (auto l : levels) insert(l);
    }

    constexpr void insert(OutcomeLevel l) { bits_ |= bit(l); }
    constexpr bool contains(OutcomeLevel l) const { return (bits_ & bit(l)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }

    std::vector<OutcomeLevel> levels() const;
    // "A|B|C" in canonical enum order; empty string for the empty set.
    std::string to_string() const;
    static OutcomeSet parse(std::string_view text);

    constexpr bool operator==(const OutcomeSet&) const = default;

private:
    static constexpr std::uint8_t bit(OutcomeLevel l) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l));
    }
    std::uint8_t bits_ = 0;
};

struct CrashType {
    CrashGroup group = CrashGroup::Other;
    std::optional<F2RRole> f2r_role;  // present iff group == V2VF2R

    bool valid() const { return f2r_role.has_value() == (group == CrashGroup::V2VF2R); }
    auto operator<=>(const CrashType&) const = default;
};

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct Actor {
    BodyClass body_class = BodyClass::PassengerVehicle;
    int role_order = 1;
    bool in_transport = true;

    bool operator==(const Actor&) const = default;
};

// Role orders of the actors in one crash must be 1..n with no repeats.
bool role_orders_contiguous(std::span<const Actor> actors);

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const LatLon&) const = default;
};

struct Kinematics {
    double stopped_duration_s = 0.0;
    double peak_deceleration_mps2 = 0.0;

    bool operator==(const Kinematics&) const = default;
};

struct Severity {
    InjuryLevel max_injury = InjuryLevel::None;
    bool any_airbag_any_vehicle = false;
    bool police_reported = false;
    std::optional<bool> police_confirmed_serious;

    bool operator==(const Severity&) const = default;
};

struct Annotations {
    std::optional<InitiatorRole> initiator_role;
    std::optional<F2RRole> f2r_role;
    std::optional<Kinematics> pre_crash_kinematics;

    bool operator==(const Annotations&) const = default;
};

// One crashed vehicle's view of a crash.
struct CrashRecord {
    std::string crash_id;
    Actor subject;
    std::optional<Actor> partner;
    Location location;
    std::optional<LatLon> coordinates;
    RoadClass road_class = RoadClass::Unknown;
    int sequence_position = 1;
    Configuration configuration = Configuration::OtherOrUnknown;
    Severity severity;
    Annotations annotations;
    double weight = 1.0;

    bool operator==(const CrashRecord&) const = default;
};

// Throws InvalidInput naming the first violated invariant.
void validate(const CrashRecord& record);

bool injury_reported(InjuryLevel level);

// ---------------------------------------------------------------------------
// Spatial cells
// ---------------------------------------------------------------------------

struct CellId {
    std::string id;
    auto operator<=>(const CellId&) const = default;
};

class CellScheme {
public:
    virtual ~CellScheme() = default;
    // Throws InvalidInput for lat outside [-90, 90] or lon outside [-180, 180].
    virtual CellId cell_of(LatLon point) const = 0;
    virtual std::string describe() const = 0;
};

// Equal-angle latitude/longitude grid with square cells of `cell_width_deg`.
// Row 0 starts at -90 lat, column 0 at -180 lon. Points on the +90 / +180
// edges fall into the last row / column.
class EqualAngleGrid final : public CellScheme {
public:
    explicit EqualAngleGrid(double cell_width_deg);
    // Level L: cell width 180 / 2^L degrees.
    static EqualAngleGrid for_level(int level);

    CellId cell_of(LatLon point) const override;
    std::string describe() const override;

    double cell_width() const noexcept { return width_; }
    std::pair<long, long> index_of(LatLon point) const;
    long rows() const noexcept { return rows_; }
    long cols() const noexcept { return cols_; }

private:
    EqualAngleGrid(double width, std::string prefix);

    double width_;
    long rows_;
    long cols_;
    std::string prefix_;
};

CellId cell_of(LatLon point, int level);

void check_coordinates(LatLon point);

// ---------------------------------------------------------------------------
// Exposure
// ---------------------------------------------------------------------------

struct ExposureRow {
    Location location;
    RoadClass road_class = RoadClass::SurfaceStreet;
    VehicleClass vehicle_class = VehicleClass::All;
    std::optional<CellId> cell;
    double miles = 0.0;

    bool operator==(const ExposureRow&) const = default;
};

struct ExposureTable {
    Population population = Population::Human;
    std::vector<ExposureRow> rows;

    std::vector<Location> locations() const;

    // Surface-street miles for one location. Location-level rows (no cell)
    // take precedence; when a location only has cell rows their sum is used.
    double surface_miles(const Location& location) const;

    // Surface-street miles per cell for one location.
    std::map<CellId, double> cell_miles(const Location& location) const;

    // Locations whose cell rows disagree with their location-level total by
    // more than `relative_tolerance`.
    std::vector<Location> inconsistent_locations(double relative_tolerance = 1e-3) const;
};

} // namespace crashbench
