#pragma once
// Crash-type group, outcome levels and pre-crash movement for canonical records.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashbench/csv.hpp"
#include "crashbench/model.hpp"

namespace crashbench {

// Precedence: secondary, VRU partner, single vehicle, V2V geometry, Other.
CrashType classify_crash_type(const CrashRecord& record);

OutcomeSet classify_outcomes(const CrashRecord& record);

// Throws InvalidInput on negative inputs. Threshold values fall into the
// higher-braking category.
PreCrashMovement classify_pre_crash_movement(const Kinematics& kinematics);

inline constexpr double kStoppedThresholdS = 5.0;
inline constexpr double kConstantDecelLimit = 0.75;
inline constexpr double kModerateDecelLimit = 3.5;

// Selects records by crash type. No group means every record; a V2VF2R group
// without a role means both roles.
struct CrashTypeKey {
    std::optional<CrashGroup> group;
    std::optional<F2RRole> f2r_role;

    static CrashTypeKey aggregate() { return {}; }
    static CrashTypeKey of(CrashGroup g) { return {g, std::nullopt}; }
    static CrashTypeKey f2r(F2RRole role) { return {CrashGroup::V2VF2R, role}; }

    bool is_aggregate() const { return !group; }
    bool matches(const CrashType& type) const;
    // "All", "<Group>", or "V2VF2R:<Role>".
    std::string label() const;
    static CrashTypeKey parse(std::string_view label);

    auto operator<=>(const CrashTypeKey&) const = default;
};

// All, the 11 groups, and the two F2R roles, in that order.
std::vector<CrashTypeKey> all_crash_type_keys();

std::string crash_type_label(const CrashType& type);

struct ClassifiedRecord {
    CrashRecord record;
    CrashType crash_type;
    OutcomeSet outcomes;
    std::optional<PreCrashMovement> movement;  // F2R struck records with kinematics

    bool operator==(const ClassifiedRecord&) const = default;
};

ClassifiedRecord classify(const CrashRecord& record);
std::vector<ClassifiedRecord> classify_all(std::span<const CrashRecord> records, unsigned threads = 1);

// Canonical record columns followed by crash_type, outcomes, pre_crash_movement.
std::string classified_to_csv(std::span<const ClassifiedRecord> records);
// Labels are recomputed from the record fields; a stored label that disagrees
// is a ParseError.
std::vector<ClassifiedRecord> classified_from_csv(const CsvTable& table);

} // namespace crashbench
