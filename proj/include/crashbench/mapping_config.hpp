#pragma once
// Declarative source-schema -> canonical-field rules for one state or provider
// dataset. The YAML schema is documented in configs/README.md.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crashbench {

// Read access to one source row by column name.
class SourceRow {
public:
    SourceRow(const std::unordered_map<std::string, std::size_t>& index,
              const std::vector<std::string>& fields)
        : index_(index), fields_(fields) {}

    // Trimmed cell value; empty when the column is absent from this file.
    std::string_view get(std::string_view column) const;

private:
    const std::unordered_map<std::string, std::size_t>& index_;
    const std::vector<std::string>& fields_;
};

// Boolean expression over source columns.
//   {column: C, in: [..]} | {column: C, not_in: [..]} | {column: C, equals: v}
//   {column: C, matches: regex} | {column: C, empty: bool}
//   {column: C, lt|le|gt|ge: number}
//   {all: [..]} | {any: [..]} | {not: p} | true | false
class Predicate {
public:
    struct Node;

    Predicate() = default;
    explicit Predicate(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static Predicate always(bool value);

    bool evaluate(const SourceRow& row) const;
    void collect_columns(std::set<std::string>& out) const;
    bool defined() const { return node_ != nullptr; }

private:
    std::shared_ptr<const Node> node_;
};

struct ValuePattern {
    std::string pattern;  // literal, or "re:<ECMAScript regex>" matched against the whole value
    std::string value;    // canonical label
    std::shared_ptr<const std::regex> regex;

    bool matches(std::string_view source_value) const;
};

struct FieldMapping {
    // Several columns are joined with '|' before matching.
    std::vector<std::string> columns;
    std::string canonical_field;
    std::vector<ValuePattern> value_map;
    std::optional<std::string> default_value;
    bool first_match = false;
    // Boolean fields may be computed from a predicate instead of a column.
    std::optional<Predicate> predicate;

    std::string column_label() const;
};

enum class MappingKind { Crash, Exposure };

struct MappingConfig {
    std::string source_name;
    MappingKind kind = MappingKind::Crash;
    std::optional<char> delimiter;
    std::vector<FieldMapping> field_map;
    std::map<std::string, std::string> defaults;
    std::optional<Predicate> passenger_vehicle_rules;
    std::optional<Predicate> surface_street_rules;
    std::optional<Predicate> in_transport_rules;
    double unknown_vehicle_weight = 1.0;
    // Canonical severity fields folded to their crash-level maximum over all
    // rows sharing a crash_id (max_injury, any_airbag_any_vehicle).
    std::vector<std::string> crash_level_fields;

    std::set<std::string> referenced_columns() const;
    const FieldMapping* mapping_for(std::string_view canonical_field) const;
    bool provides(std::string_view canonical_field) const;
};

const std::vector<std::string>& canonical_crash_fields();
const std::vector<std::string>& canonical_exposure_fields();

// Throws ConfigError for unknown canonical fields, unparseable canonical values,
// duplicate literal patterns, bad regexes, or an out-of-range imputation weight.
MappingConfig parse_mapping_config(std::string_view yaml_text, const std::string& origin = "<config>");
MappingConfig load_mapping_config(const std::filesystem::path& path);

} // namespace crashbench
