#pragma once
// Source-file ingestion: state crash extracts and mileage tables through
// mapping configs, SGO-shaped ADS reports through a fixed column schema, and
// the canonical CSV formats that later stages read.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crashbench/csv.hpp"
#include "crashbench/mapping_config.hpp"
#include "crashbench/model.hpp"

namespace crashbench {

struct ValueTally {
    std::string column;
    std::string value;
    std::size_t count = 0;

    bool operator==(const ValueTally&) const = default;
};

// Invariant: rows_read == rows_emitted + sum(rows_dropped_by_rule).
struct IngestReport {
    std::string source;
    std::size_t rows_read = 0;
    std::size_t rows_emitted = 0;
    std::map<std::string, std::size_t> rows_dropped_by_rule;
    std::vector<ValueTally> unmapped_values;
    std::vector<ValueTally> ambiguous_values;
    // First few row-level messages, "line N: ...".
    std::vector<std::string> row_errors;

    std::size_t rows_dropped() const;
    bool conserved() const { return rows_read == rows_emitted + rows_dropped(); }
    std::size_t dropped(const std::string& rule) const;
    std::string to_json() const;
};

// Rule names used as rows_dropped_by_rule keys.
namespace drop_rule {
inline constexpr const char* kParseError = "parse_error";
inline constexpr const char* kUnmappedValue = "unmapped_value";
inline constexpr const char* kInvalidRecord = "invalid_record";
inline constexpr const char* kPassengerVehicle = "passenger_vehicle";
inline constexpr const char* kSurfaceStreet = "surface_street";
inline constexpr const char* kInTransport = "in_transport";
inline constexpr const char* kNotImpacted = "not_impacted";
inline constexpr const char* kSeverityToken = "severity_token";
inline constexpr const char* kNegativeMiles = "negative_miles";
inline constexpr const char* kUnknownLocation = "unknown_location";
} // namespace drop_rule

struct CrashParseResult {
    std::vector<CrashRecord> records;  // sorted by (crash_id, subject role_order)
    IngestReport report;
};

struct ExposureParseResult {
    ExposureTable table;
    IngestReport report;
};

// Human crash extract, one row per crash-involved vehicle. Throws ConfigError
// when the config references a column missing from the header.
CrashParseResult parse_crash_table(const CsvTable& table, const MappingConfig& config,
                                   const std::string& source);
CrashParseResult parse_crash_file(const std::filesystem::path& path, const MappingConfig& config);

// SGO-shaped ADS report file. Throws ParseError when a required column is
// missing; unknown severity tokens are tallied and the row dropped.
CrashParseResult parse_sgo_table(const CsvTable& table, const std::string& source);
CrashParseResult parse_sgo_file(const std::filesystem::path& path);

// Mileage rows of (location, road class, miles) or (cell id, miles).
// Non-surface road classes are kept and flagged; ExposureTable queries skip them.
ExposureParseResult parse_exposure_table(const CsvTable& table, const MappingConfig& config,
                                         Population population, const std::string& source);
ExposureParseResult parse_exposure(const std::filesystem::path& path, const MappingConfig& config,
                                   Population population);

// SGO column names.
namespace sgo {
inline constexpr const char* kReportId = "Report ID";
inline constexpr const char* kSeverity = "Highest Injury Severity Alleged";
inline constexpr const char* kSvAirbag = "SV Any Air Bags Deployed?";
inline constexpr const char* kCpAirbag = "CP Any Air Bags Deployed?";
inline constexpr const char* kCrashWith = "Crash With";
inline constexpr const char* kRoadwayType = "Roadway Type";
inline constexpr const char* kCity = "City";
inline constexpr const char* kLatitude = "Latitude";
inline constexpr const char* kLongitude = "Longitude";
inline constexpr const char* kNarrative = "Narrative";
inline constexpr const char* kLawEnforcement = "Law Enforcement Investigating?";
// Supplemental manual-review annotations.
inline constexpr const char* kServiceArea = "Annot Service Area";
inline constexpr const char* kNarrativeInjury = "Annot Narrative Injury";
inline constexpr const char* kAnyVehicleAirbag = "Annot Any Vehicle Airbag";
inline constexpr const char* kPoliceSeverity = "Annot Police Severity";
inline constexpr const char* kInTransport = "Annot In Transport";
inline constexpr const char* kImpacted = "Annot Impacted";
inline constexpr const char* kSequencePosition = "Annot Sequence Position";
inline constexpr const char* kConfiguration = "Annot Configuration";
inline constexpr const char* kPartnerBodyClass = "Annot Partner Body Class";
inline constexpr const char* kInitiatorRole = "Annot Initiator Role";
inline constexpr const char* kF2RRole = "Annot F2R Role";
inline constexpr const char* kStoppedDuration = "Annot Stopped Duration S";
inline constexpr const char* kPeakDecel = "Annot Peak Decel Mps2";
} // namespace sgo

// SGO severity token -> KABCO level. "Unknown" resolves to
// UnknownWithInjuryAllegation only when the narrative mentions an injury.
std::optional<InjuryLevel> sgo_severity(std::string_view token, bool narrative_injury);

// Canonical record CSV (fixed column order, RFC-4180).
const std::vector<std::string>& record_columns();
std::vector<std::string> record_fields(const CrashRecord& record);
CrashRecord record_from_fields(const CsvTable& table, const std::vector<std::string>& row);
std::string records_to_csv(std::span<const CrashRecord> records);
std::vector<CrashRecord> records_from_csv(const CsvTable& table);

const std::vector<std::string>& exposure_columns();
std::string exposure_to_csv(const ExposureTable& table);
ExposureTable exposure_from_csv(const CsvTable& table);

} // namespace crashbench
