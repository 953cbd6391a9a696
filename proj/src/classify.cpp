#include "crashbench/classify.hpp"

#include <sstream>

#include "crashbench/ingest.hpp"
#include "crashbench/parallel.hpp"

namespace crashbench {

namespace {

F2RRole f2r_role_of(const CrashRecord& r) {
    if (r.annotations.f2r_role) return *r.annotations.f2r_role;
    // Without an annotation the lead party in the police sequence is taken as the striker.
    return r.subject.role_order < r.partner->role_order ? F2RRole::Striking : F2RRole::Struck;
}

} // namespace

CrashType classify_crash_type(const CrashRecord& r) {
    if (r.sequence_position > 1) return {CrashGroup::SecondaryCrash, std::nullopt};
    if (r.partner) {
        switch (r.partner->body_class) {
        case BodyClass::Pedestrian: return {CrashGroup::Pedestrian, std::nullopt};
        case BodyClass::Cyclist: return {CrashGroup::Cyclist, std::nullopt};
        case BodyClass::Motorcycle: return {CrashGroup::Motorcycle, std::nullopt};
        default: break;
        }
    }
    if (!r.partner || r.partner->body_class == BodyClass::FixedObjectOrGround)
        return {CrashGroup::SingleVehicle, std::nullopt};
    switch (r.configuration) {
    case Configuration::Backing: return {CrashGroup::V2VBacking, std::nullopt};
    case Configuration::FrontToRear: return {CrashGroup::V2VF2R, f2r_role_of(r)};
    case Configuration::OppositeDirection: return {CrashGroup::V2VOppositeDirection, std::nullopt};
    case Configuration::IntersectionTurningOrCrossing: return {CrashGroup::V2VIntersection, std::nullopt};
    case Configuration::LateralSameDirection: return {CrashGroup::V2VLateral, std::nullopt};
    case Configuration::SingleVehicle:
    case Configuration::OtherOrUnknown: break;
    }
    return {CrashGroup::Other, std::nullopt};
}

OutcomeSet classify_outcomes(const CrashRecord& r) {
    OutcomeSet out;
    if (r.subject.in_transport) out.insert(OutcomeLevel::AnyPropertyDamageOrInjury);
    if (r.severity.police_reported) out.insert(OutcomeLevel::PoliceReported);
    if (injury_reported(r.severity.max_injury)) out.insert(OutcomeLevel::AnyInjuryReported);
    if (r.severity.any_airbag_any_vehicle) out.insert(OutcomeLevel::AirbagDeployment);
    if (r.severity.police_confirmed_serious.value_or(false)) out.insert(OutcomeLevel::SuspectedSeriousInjuryPlus);
    return out;
}

PreCrashMovement classify_pre_crash_movement(const Kinematics& k) {
    if (!(k.stopped_duration_s >= 0.0) || !(k.peak_deceleration_mps2 >= 0.0)) {
        throw InvalidInput("pre-crash kinematics must be non-negative");
    }
    if (k.stopped_duration_s >= kStoppedThresholdS) return PreCrashMovement::Stopped5s;
    if (k.peak_deceleration_mps2 < kConstantDecelLimit) return PreCrashMovement::ConstantOrAccelerating;
    if (k.peak_deceleration_mps2 < kModerateDecelLimit) return PreCrashMovement::ModerateBraking;
    return PreCrashMovement::HardBraking;
}

bool CrashTypeKey::matches(const CrashType& type) const {
    if (!group) return true;
    if (*group != type.group) return false;
    return !f2r_role || type.f2r_role == f2r_role;
}

std::string CrashTypeKey::label() const {
    if (!group) return "All";
    std::string out(to_string(*group));
    if (f2r_role) out += ":" + std::string(to_string(*f2r_role));
    return out;
}

CrashTypeKey CrashTypeKey::parse(std::string_view label) {
    label = trim(label);
    if (label == "All") return aggregate();
    auto colon = label.find(':');
    CrashTypeKey key{parse_enum<CrashGroup>(label.substr(0, colon)), std::nullopt};
    if (colon != std::string_view::npos) {
        if (key.group != CrashGroup::V2VF2R) throw InvalidInput("only V2VF2R takes a role: '" + std::string(label) + "'");
        key.f2r_role = parse_enum<F2RRole>(label.substr(colon + 1));
    }
    return key;
}

std::vector<CrashTypeKey> all_crash_type_keys() {
    std::vector<CrashTypeKey> keys{CrashTypeKey::aggregate()};
    for (auto g : all_values<CrashGroup>()) keys.push_back(CrashTypeKey::of(g));
    keys.push_back(CrashTypeKey::f2r(F2RRole::Striking));
    keys.push_back(CrashTypeKey::f2r(F2RRole::Struck));
    return keys;
}

std::string crash_type_label(const CrashType& type) {
    return CrashTypeKey{type.group, type.f2r_role}.label();
}

ClassifiedRecord classify(const CrashRecord& record) {
    ClassifiedRecord c{record, classify_crash_type(record), classify_outcomes(record), std::nullopt};
    if (c.crash_type.f2r_role == F2RRole::Struck && record.annotations.pre_crash_kinematics) {
        c.movement = classify_pre_crash_movement(*record.annotations.pre_crash_kinematics);
    }
    return c;
}

std::vector<ClassifiedRecord> classify_all(std::span<const CrashRecord> records, unsigned threads) {
    std::vector<ClassifiedRecord> out(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) { out[i] = classify(records[i]); });
    return out;
}

std::string classified_to_csv(std::span<const ClassifiedRecord> records) {
    std::ostringstream os;
    CsvWriter w(os);
    auto header = record_columns();
    header.insert(header.end(), {"crash_type", "outcomes", "pre_crash_movement"});
    w.row(header);
    for (const auto& c : records) {
        auto fields = record_fields(c.record);
        fields.push_back(crash_type_label(c.crash_type));
        fields.push_back(c.outcomes.to_string());
        fields.push_back(c.movement ? std::string(to_string(*c.movement)) : "");
        w.row(fields);
    }
    return os.str();
}

std::vector<ClassifiedRecord> classified_from_csv(const CsvTable& table) {
    const auto type_col = table.require_column("crash_type", "classified record file");
    const auto outcome_col = table.require_column("outcomes", "classified record file");
    const auto movement_col = table.require_column("pre_crash_movement", "classified record file");
    std::vector<ClassifiedRecord> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "classified record file: line " + std::to_string(table.line_numbers[i]);
        if (row.size() != table.header.size()) throw ParseError(where + " has the wrong field count");
        try {
            auto c = classify(record_from_fields(table, row));
            const bool agrees = crash_type_label(c.crash_type) == trim(row[type_col]) &&
                                c.outcomes == OutcomeSet::parse(trim(row[outcome_col])) &&
                                (c.movement ? std::string(to_string(*c.movement)) : "") == trim(row[movement_col]);
            if (!agrees) throw ParseError(where + ": stored labels disagree with the record fields");
            out.push_back(std::move(c));
        } catch (const InvalidInput& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return out;
}

} // namespace crashbench
