#include <gtest/gtest.h>

#include <filesystem>

#include "crashbench/csv.hpp"
#include "crashbench/ingest.hpp"
#include "crashbench/mapping_config.hpp"

using namespace crashbench;

namespace {

const std::filesystem::path kConfigs = CRASHBENCH_CONFIGS;

// Minimal crash config header; the required fields come from defaults.
const std::string kHead = "source_name: t\nkind: crash\n"
                          "defaults: {location: Phoenix, subject.body_class: PassengerVehicle, road_class: SurfaceStreet}\n";

bool eval(const std::string& predicate_yaml, const std::string& csv) {
    auto cfg = parse_mapping_config(kHead + "fields:\n  - {field: crash_id, column: a}\nrules:\n  surface_street: " + predicate_yaml + "\n");
    auto table = parse_csv(csv);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < table.header.size(); ++i) index.emplace(table.header[i], i);
    return cfg.surface_street_rules->evaluate(SourceRow(index, table.rows.at(0)));
}

} // namespace

TEST(Predicates, Leaves) {
    const std::string row = "a,n\nfoo,3.5\n";
    EXPECT_TRUE(eval("{column: a, in: [foo, bar]}", row));
    EXPECT_FALSE(eval("{column: a, not_in: [foo]}", row));
    EXPECT_TRUE(eval("{column: a, equals: foo}", row));
    EXPECT_TRUE(eval("{column: a, matches: \"f.*\"}", row));
    EXPECT_FALSE(eval("{column: a, matches: \"o+\"}", row));  // whole-value match
    EXPECT_FALSE(eval("{column: a, empty: true}", row));
    EXPECT_TRUE(eval("{column: missing, empty: true}", row));
    EXPECT_TRUE(eval("{column: n, lt: 4}", row));
    EXPECT_TRUE(eval("{column: n, le: 3.5}", row));
    EXPECT_FALSE(eval("{column: n, gt: 3.5}", row));
    EXPECT_TRUE(eval("{column: n, ge: 3.5}", row));
    EXPECT_FALSE(eval("{column: a, ge: 1}", row));  // non-numeric never compares
    EXPECT_TRUE(eval("true", row));
    EXPECT_FALSE(eval("false", row));
}

TEST(Predicates, Combinators) {
    const std::string row = "a,n\nfoo,3.5\n";
    EXPECT_TRUE(eval("{all: [{column: a, equals: foo}, {column: n, gt: 1}]}", row));
    EXPECT_FALSE(eval("{all: [{column: a, equals: foo}, {column: n, gt: 9}]}", row));
    EXPECT_TRUE(eval("{any: [{column: a, equals: no}, {column: n, gt: 1}]}", row));
    EXPECT_TRUE(eval("{not: {column: a, equals: bar}}", row));
    EXPECT_THROW(eval("{all: []}", row), ConfigError);
    EXPECT_THROW(eval("{any: []}", row), ConfigError);
}

TEST(MappingConfig, RejectsBadConfigs) {
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: crash\nfields:\n  - {field: nonsense, column: x}\n"),
                 ConfigError);
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: crash\nfields:\n"
                                      "  - field: max_injury\n    column: s\n    values:\n"
                                      "      - {match: X, value: Q}\n"),
                 ConfigError);
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: crash\nfields:\n"
                                      "  - field: max_injury\n    column: s\n    values:\n"
                                      "      - {match: X, value: A}\n      - {match: X, value: B}\n"),
                 ConfigError);
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: crash\nfields:\n"
                                      "  - field: max_injury\n    column: s\n    values:\n"
                                      "      - {match: \"re:(\", value: A}\n"),
                 ConfigError);
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: crash\nunknown_vehicle_weight: 1.2\n"), ConfigError);
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: sideways\n"), ConfigError);
    EXPECT_THROW(parse_mapping_config("source_name: t\nkind: crash\nrules:\n  surface_street: {column: a, near: 3}\n"),
                 ConfigError);
    EXPECT_THROW(parse_mapping_config("[unclosed"), ConfigError);
}

TEST(MappingConfig, ReferencedColumns) {
    auto cfg = load_mapping_config(kConfigs / "az_adot_maricopa.yaml");
    auto cols = cfg.referenced_columns();
    for (const char* c : {"IncidentId", "UnitType", "OtherBodyStyle", "GeocodeOnRoad", "PostedSpeed", "InjuryStatus"})
        EXPECT_TRUE(cols.count(c)) << c;
    EXPECT_TRUE(cfg.provides("max_injury"));
    EXPECT_TRUE(cfg.provides("police_reported"));  // through defaults
    EXPECT_FALSE(cfg.provides("initiator_role"));
    EXPECT_DOUBLE_EQ(cfg.unknown_vehicle_weight, 0.89);
}

TEST(MappingConfig, ShippedConfigsLoad) {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(kConfigs)) {
        if (e.path().extension() != ".yaml") continue;
        const auto text = read_text_file(e.path());
        if (text.find("kind:") == std::string::npos) continue;  // pipeline configs
        EXPECT_NO_THROW(load_mapping_config(e.path())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 8);
}

// Two patterns matching one value is a config defect unless first_match is
// set; then the first wins and the overlap is still tallied.
TEST(FieldMapping, FirstMatchResolvesOverlaps) {
    const std::string csv = "id,a,b\n1,x,y\n";
    auto ambiguous = parse_mapping_config(kHead + "fields:\n"
                                          "  - {field: crash_id, column: id}\n"
                                          "  - field: configuration\n    columns: [a, b]\n    values:\n"
                                          "      - {match: \"re:x\\\\|.*\", value: Backing}\n"
                                          "      - {match: \"re:.*\\\\|y\", value: FrontToRear}\n");
    EXPECT_THROW(parse_crash_table(parse_csv(csv), ambiguous, "t"), ConfigError);

    auto ordered = ambiguous;
    ordered.field_map[1].first_match = true;
    auto res = parse_crash_table(parse_csv(csv), ordered, "t");
    ASSERT_EQ(res.records.size(), 1u) << res.report.to_json();
    EXPECT_EQ(res.records[0].configuration, Configuration::Backing);
    ASSERT_EQ(res.report.ambiguous_values.size(), 1u);
    EXPECT_EQ(res.report.ambiguous_values[0].value, "x|y");
}

TEST(FieldMapping, UnmappedValuesAreTallied) {
    auto cfg = parse_mapping_config(kHead + "fields:\n"
                                    "  - {field: crash_id, column: id}\n"
                                    "  - field: max_injury\n    column: s\n    values:\n"
                                    "      - {match: F, value: K}\n");
    auto res = parse_crash_table(parse_csv("id,s\n1,F\n2,Q\n3,Q\n"), cfg, "t");
    EXPECT_EQ(res.report.dropped(drop_rule::kUnmappedValue), 2u);
    ASSERT_EQ(res.report.unmapped_values.size(), 1u);
    EXPECT_EQ(res.report.unmapped_values[0].column, "s");
    EXPECT_EQ(res.report.unmapped_values[0].count, 2u);
    EXPECT_TRUE(res.report.conserved());
}
