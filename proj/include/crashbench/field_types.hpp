#pragma once
// Value typing for canonical fields named in mapping configs.

#include <optional>
#include <string_view>

#include "crashbench/model.hpp"

namespace crashbench {

enum class FieldType {
    String,
    Location,
    Double,
    Int,
    Bool,
    BodyClass,
    RoadClass,
    Configuration,
    InjuryLevel,
    InitiatorRole,
    F2RRole,
    VehicleClass,
    CellId,
};

FieldType field_type(std::string_view canonical_field);

// Fields whose empty value means "absent".
bool field_optional(std::string_view canonical_field);

// "Phoenix" | "SanFrancisco" | "LosAngeles" | "Austin" | "Other:<name>".
std::optional<Location> parse_location_label(std::string_view label);

// Inverse of parse_location_label; blended rows print "AllLocations".
std::string format_location(const Location& location);
// parse_location_label plus "AllLocations".
std::optional<Location> parse_any_location(std::string_view label);

bool canonical_value_valid(std::string_view canonical_field, std::string_view value);

} // namespace crashbench
