#include "crashbench/mapping_config.hpp"

#include <algorithm>
#include <yaml-cpp/yaml.h>

#include "crashbench/csv.hpp"
#include "crashbench/error.hpp"
#include "crashbench/field_types.hpp"

namespace crashbench {

std::string_view SourceRow::get(std::string_view column) const {
    auto it = index_.find(std::string(column));
    if (it == index_.end() || it->second >= fields_.size()) return {};
    return trim(fields_[it->second]);
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

struct Predicate::Node {
    enum class Op { Const, In, NotIn, Matches, Empty, Lt, Le, Gt, Ge, All, Any, Not };
    Op op = Op::Const;
    bool constant = false;
    std::string column;
    std::vector<std::string> values;
    double number = 0.0;
    std::shared_ptr<const std::regex> regex;
    std::vector<Predicate> children;
};

Predicate Predicate::always(bool value) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::Const;
    n->constant = value;
    return Predicate(std::move(n));
}

bool Predicate::evaluate(const SourceRow& row) const {
    if (!node_) return true;
    using Op = Node::Op;
    const Node& n = *node_;
    switch (n.op) {
    case Op::Const: return n.constant;
    case Op::In:
    case Op::NotIn: {
        auto v = row.get(n.column);
        bool hit = std::find(n.values.begin(), n.values.end(), v) != n.values.end();
        return n.op == Op::In ? hit : !hit;
    }
    case Op::Matches: {
        std::string v(row.get(n.column));
        return std::regex_match(v, *n.regex);
    }
    case Op::Empty: return row.get(n.column).empty() == n.constant;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
        auto v = parse_double(row.get(n.column));
        if (!v) return false;
        if (n.op == Op::Lt) return *v < n.number;
        if (n.op == Op::Le) return *v <= n.number;
        if (n.op == Op::Gt) return *v > n.number;
        return *v >= n.number;
    }
    case Op::All:
        return std::all_of(n.children.begin(), n.children.end(),
                           [&](const Predicate& p) { return p.evaluate(row); });
    case Op::Any:
        return std::any_of(n.children.begin(), n.children.end(),
                           [&](const Predicate& p) { return p.evaluate(row); });
    case Op::Not: return !n.children.front().evaluate(row);
    }
    return false;
}

void Predicate::collect_columns(std::set<std::string>& out) const {
    if (!node_) return;
    if (!node_->column.empty()) out.insert(node_->column);
    for (const auto& c : node_->children) c.collect_columns(out);
}

bool ValuePattern::matches(std::string_view source_value) const {
    if (regex) {
        std::string v(source_value);
        return std::regex_match(v, *regex);
    }
    return source_value == pattern;
}

std::string FieldMapping::column_label() const {
    std::string out;
    for (const auto& c : columns) {
        if (!out.empty()) out += '|';
        out += c;
    }
    return out;
}

std::set<std::string> MappingConfig::referenced_columns() const {
    std::set<std::string> out;
    for (const auto& f : field_map) {
        out.insert(f.columns.begin(), f.columns.end());
        if (f.predicate) f.predicate->collect_columns(out);
    }
    for (const auto* rule : {&passenger_vehicle_rules, &surface_street_rules, &in_transport_rules}) {
        if (*rule) (*rule)->collect_columns(out);
    }
    return out;
}

const FieldMapping* MappingConfig::mapping_for(std::string_view canonical_field) const {
    for (const auto& f : field_map) {
        if (f.canonical_field == canonical_field) return &f;
    }
    return nullptr;
}

bool MappingConfig::provides(std::string_view canonical_field) const {
    return mapping_for(canonical_field) != nullptr ||
           defaults.find(std::string(canonical_field)) != defaults.end();
}

const std::vector<std::string>& canonical_crash_fields() {
    static const std::vector<std::string> fields = {
        "crash_id", "location", "latitude", "longitude", "road_class", "sequence_position",
        "configuration", "subject.body_class", "subject.role_order", "subject.in_transport",
        "partner.body_class", "partner.role_order", "partner.in_transport", "max_injury",
        "any_airbag_any_vehicle", "police_reported", "police_confirmed_serious",
        "initiator_role", "f2r_role", "stopped_duration_s", "peak_deceleration_mps2",
    };
    return fields;
}

const std::vector<std::string>& canonical_exposure_fields() {
    static const std::vector<std::string> fields = {
        "location", "road_class", "vehicle_class", "cell_id", "miles",
    };
    return fields;
}

// ---------------------------------------------------------------------------
// YAML loading
// ---------------------------------------------------------------------------

namespace {

struct Loader {
    std::string origin;

    [[noreturn]] void fail(const std::string& what, const YAML::Node& at = {}) const {
        std::string where = origin;
        if (at && at.Mark().line >= 0) where += ":" + std::to_string(at.Mark().line + 1);
        throw ConfigError(where + ": " + what);
    }

    std::string scalar(const YAML::Node& n, const std::string& what) const {
        if (!n || !n.IsScalar()) fail(what + " must be a scalar", n);
        return n.as<std::string>();
    }

    std::vector<std::string> string_list(const YAML::Node& n, const std::string& what) const {
        std::vector<std::string> out;
        if (n.IsScalar()) {
            out.push_back(n.as<std::string>());
            return out;
        }
        if (!n.IsSequence()) fail(what + " must be a list", n);
        for (const auto& item : n) out.push_back(scalar(item, what));
        return out;
    }

    std::shared_ptr<const std::regex> compile(const std::string& pattern, const YAML::Node& at) const {
        try {
            return std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            fail("invalid regex '" + pattern + "': " + e.what(), at);
        }
    }

    Predicate predicate(const YAML::Node& n) const {
        using Op = Predicate::Node::Op;
        if (n.IsScalar()) {
            auto b = parse_bool(n.as<std::string>());
            if (!b) fail("predicate scalar must be true or false", n);
            return Predicate::always(*b);
        }
        if (!n.IsMap()) fail("predicate must be a map", n);
        auto node = std::make_shared<Predicate::Node>();
        auto children = [&](const YAML::Node& list, const char* key) {
            if (!list.IsSequence() || list.size() == 0) fail(std::string(key) + " needs a non-empty list", list);
            for (const auto& c : list) node->children.push_back(predicate(c));
        };
        if (n["all"]) {
            node->op = Op::All;
            children(n["all"], "all");
        } else if (n["any"]) {
            node->op = Op::Any;
            children(n["any"], "any");
        } else if (n["not"]) {
            node->op = Op::Not;
            node->children.push_back(predicate(n["not"]));
        } else {
            node->column = scalar(n["column"], "predicate column");
            static const std::pair<const char*, Op> numeric[] = {
                {"lt", Op::Lt}, {"le", Op::Le}, {"gt", Op::Gt}, {"ge", Op::Ge}};
            bool matched = false;
            if (n["in"]) {
                node->op = Op::In;
                node->values = string_list(n["in"], "in");
                matched = true;
            } else if (n["not_in"]) {
                node->op = Op::NotIn;
                node->values = string_list(n["not_in"], "not_in");
                matched = true;
            } else if (n["equals"]) {
                node->op = Op::In;
                node->values = {scalar(n["equals"], "equals")};
                matched = true;
            } else if (n["matches"]) {
                node->op = Op::Matches;
                node->regex = compile(scalar(n["matches"], "matches"), n["matches"]);
                matched = true;
            } else if (n["empty"]) {
                node->op = Op::Empty;
                auto b = parse_bool(scalar(n["empty"], "empty"));
                if (!b) fail("empty must be true or false", n["empty"]);
                node->constant = *b;
                matched = true;
            } else {
                for (const auto& [key, op] : numeric) {
                    if (!n[key]) continue;
                    auto v = parse_double(scalar(n[key], key));
                    if (!v) fail(std::string(key) + " needs a number", n[key]);
                    node->op = op;
                    node->number = *v;
                    matched = true;
                    break;
                }
            }
            if (!matched) fail("predicate on '" + node->column + "' has no operator", n);
        }
        return Predicate(std::move(node));
    }

    void check_value(const std::string& field, const std::string& value, const YAML::Node& at) const {
        if (!canonical_value_valid(field, value)) {
            fail("value '" + value + "' is not valid for canonical field '" + field + "'", at);
        }
    }

    FieldMapping field(const YAML::Node& n, MappingKind kind) const {
        if (!n.IsMap()) fail("field entries must be maps", n);
        FieldMapping f;
        f.canonical_field = scalar(n["field"], "field");
        const auto& known = kind == MappingKind::Crash ? canonical_crash_fields() : canonical_exposure_fields();
        if (std::find(known.begin(), known.end(), f.canonical_field) == known.end()) {
            fail("unknown canonical field '" + f.canonical_field + "'", n["field"]);
        }
        if (n["column"]) f.columns.push_back(scalar(n["column"], "column"));
        if (n["columns"]) {
            auto more = string_list(n["columns"], "columns");
            f.columns.insert(f.columns.end(), more.begin(), more.end());
        }
        if (n["predicate"]) {
            if (!f.columns.empty()) fail("field '" + f.canonical_field + "' sets both column and predicate", n);
            if (field_type(f.canonical_field) != FieldType::Bool)
                fail("predicate mappings need a boolean canonical field", n);
            f.predicate = predicate(n["predicate"]);
        } else if (f.columns.empty()) {
            fail("field '" + f.canonical_field + "' needs column(s) or a predicate", n);
        }
        if (n["first_match"]) {
            auto b = parse_bool(scalar(n["first_match"], "first_match"));
            if (!b) fail("first_match must be boolean", n["first_match"]);
            f.first_match = *b;
        }
        if (n["default"]) {
            f.default_value = scalar(n["default"], "default");
            check_value(f.canonical_field, *f.default_value, n["default"]);
        }
        if (const auto& values = n["values"]) {
            if (!values.IsSequence()) fail("values must be a list", values);
            std::set<std::string> literals;
            for (const auto& v : values) {
                ValuePattern p;
                p.pattern = scalar(v["match"], "match");
                p.value = scalar(v["value"], "value");
                check_value(f.canonical_field, p.value, v["value"]);
                if (p.pattern.starts_with("re:")) {
                    p.regex = compile(p.pattern.substr(3), v["match"]);
                } else if (!literals.insert(p.pattern).second) {
                    fail("ambiguous value_map for '" + f.canonical_field + "': pattern '" + p.pattern +
                             "' appears twice",
                         v["match"]);
                }
                f.value_map.push_back(std::move(p));
            }
        }
        return f;
    }

    MappingConfig load(const YAML::Node& root) const {
        if (!root.IsMap()) fail("top level must be a map", root);
        MappingConfig cfg;
        cfg.source_name = root["source_name"] ? scalar(root["source_name"], "source_name") : origin;
        if (root["kind"]) {
            auto k = scalar(root["kind"], "kind");
            if (k == "crash") cfg.kind = MappingKind::Crash;
            else if (k == "exposure") cfg.kind = MappingKind::Exposure;
            else fail("kind must be crash or exposure", root["kind"]);
        }
        if (root["delimiter"]) {
            auto d = scalar(root["delimiter"], "delimiter");
            if (d == "\\t" || d == "tab" || d == "\t") cfg.delimiter = '\t';
            else if (d.size() == 1) cfg.delimiter = d[0];
            else fail("delimiter must be one character or 'tab'", root["delimiter"]);
        }
        if (root["unknown_vehicle_weight"]) {
            auto w = parse_double(scalar(root["unknown_vehicle_weight"], "unknown_vehicle_weight"));
            if (!w || *w < 0.0 || *w > 1.0) fail("unknown_vehicle_weight must lie in [0, 1]", root["unknown_vehicle_weight"]);
            cfg.unknown_vehicle_weight = *w;
        }
        const auto& known = cfg.kind == MappingKind::Crash ? canonical_crash_fields() : canonical_exposure_fields();
        if (const auto& d = root["defaults"]) {
            if (!d.IsMap()) fail("defaults must be a map", d);
            for (const auto& kv : d) {
                auto key = kv.first.as<std::string>();
                if (std::find(known.begin(), known.end(), key) == known.end())
                    fail("unknown canonical field '" + key + "' in defaults", kv.first);
                auto value = scalar(kv.second, key);
                check_value(key, value, kv.second);
                cfg.defaults[key] = value;
            }
        }
        if (const auto& fields = root["fields"]) {
            if (!fields.IsSequence()) fail("fields must be a list", fields);
            for (const auto& f : fields) cfg.field_map.push_back(field(f, cfg.kind));
        }
        if (const auto& rules = root["rules"]) {
            if (!rules.IsMap()) fail("rules must be a map", rules);
            for (const auto& kv : rules) {
                auto key = kv.first.as<std::string>();
                if (key == "passenger_vehicle") cfg.passenger_vehicle_rules = predicate(kv.second);
                else if (key == "surface_street") cfg.surface_street_rules = predicate(kv.second);
                else if (key == "in_transport") cfg.in_transport_rules = predicate(kv.second);
                else fail("unknown rule '" + key + "'", kv.first);
            }
        }
        if (root["crash_level"]) {
            cfg.crash_level_fields = string_list(root["crash_level"], "crash_level");
            for (const auto& f : cfg.crash_level_fields) {
                if (f != "max_injury" && f != "any_airbag_any_vehicle")
                    fail("crash_level supports max_injury and any_airbag_any_vehicle, not '" + f + "'", root["crash_level"]);
            }
        }
        if (cfg.kind == MappingKind::Crash) {
            for (const char* required : {"crash_id", "location", "subject.body_class"}) {
                if (!cfg.provides(required)) fail(std::string("crash configs must map '") + required + "'", root);
            }
        } else {
            for (const char* required : {"location", "miles"}) {
                if (!cfg.provides(required)) fail(std::string("exposure configs must map '") + required + "'", root);
            }
        }
        return cfg;
    }
};

} // namespace

MappingConfig parse_mapping_config(std::string_view yaml_text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return Loader{origin}.load(root);
}

MappingConfig load_mapping_config(const std::filesystem::path& path) {
    return parse_mapping_config(read_text_file(path), path.string());
}

} // namespace crashbench
