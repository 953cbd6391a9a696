#include "crashbench/field_types.hpp"

#include "crashbench/csv.hpp"

namespace crashbench {

FieldType field_type(std::string_view f) {
    if (f == "location") return FieldType::Location;
    if (f == "latitude" || f == "longitude" || f == "stopped_duration_s" ||
        f == "peak_deceleration_mps2" || f == "miles")
        return FieldType::Double;
    if (f == "sequence_position" || f == "subject.role_order" || f == "partner.role_order")
        return FieldType::Int;
    if (f == "subject.in_transport" || f == "partner.in_transport" || f == "any_airbag_any_vehicle" ||
        f == "police_reported" || f == "police_confirmed_serious")
        return FieldType::Bool;
    if (f == "subject.body_class" || f == "partner.body_class") return FieldType::BodyClass;
    if (f == "road_class") return FieldType::RoadClass;
    if (f == "configuration") return FieldType::Configuration;
    if (f == "max_injury") return FieldType::InjuryLevel;
    if (f == "initiator_role") return FieldType::InitiatorRole;
    if (f == "f2r_role") return FieldType::F2RRole;
    if (f == "vehicle_class") return FieldType::VehicleClass;
    if (f == "cell_id") return FieldType::CellId;
    return FieldType::String;
}

bool field_optional(std::string_view f) {
    return f.starts_with("partner.") || f == "police_confirmed_serious" || f == "initiator_role" ||
           f == "f2r_role" || f == "stopped_duration_s" || f == "peak_deceleration_mps2" ||
           f == "latitude" || f == "longitude" || f == "cell_id";
}

std::optional<Location> parse_location_label(std::string_view label) {
    label = trim(label);
    if (label == "Phoenix") return Location::phoenix();
    if (label == "SanFrancisco") return Location::san_francisco();
    if (label == "LosAngeles") return Location::los_angeles();
    if (label == "Austin") return Location::austin();
    if (label.starts_with("Other:") && label.size() > 6) return Location::other(std::string(label.substr(6)));
    return std::nullopt;
}

std::string format_location(const Location& location) {
    if (location.kind() == LocationKind::Other) return "Other:" + location.label();
    return location.label();
}

std::optional<Location> parse_any_location(std::string_view label) {
    if (trim(label) == "AllLocations") return Location::all_locations();
    return parse_location_label(label);
}

bool canonical_value_valid(std::string_view field, std::string_view value) {
    value = trim(value);
    if (value.empty()) return field_optional(field) || field_type(field) == FieldType::String;
    switch (field_type(field)) {
    case FieldType::String:
    case FieldType::CellId: return true;
    case FieldType::Location: return parse_location_label(value).has_value();
    case FieldType::Double: return parse_double(value).has_value();
    case FieldType::Int: return parse_int(value).has_value();
    case FieldType::Bool: return parse_bool(value).has_value();
    case FieldType::BodyClass:
        return try_parse<BodyClass>(value).has_value() || (field == "partner.body_class" && value == "None");
    case FieldType::RoadClass: return try_parse<RoadClass>(value).has_value();
    case FieldType::Configuration: return try_parse<Configuration>(value).has_value();
    case FieldType::InjuryLevel: return try_parse<InjuryLevel>(value).has_value();
    case FieldType::InitiatorRole: return try_parse<InitiatorRole>(value).has_value();
    case FieldType::F2RRole: return try_parse<F2RRole>(value).has_value();
    case FieldType::VehicleClass: return try_parse<VehicleClass>(value).has_value();
    }
    return false;
}

} // namespace crashbench
