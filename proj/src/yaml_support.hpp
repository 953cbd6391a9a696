#pragma once
// Small helpers for reading validated YAML configs with line-numbered errors.

#include <initializer_list>
#include <optional>
#include <set>
#include <string>

#include <yaml-cpp/yaml.h>

#include "crashbench/csv.hpp"
#include "crashbench/error.hpp"

namespace crashbench::yaml {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& what, const YAML::Node& at = {}) const {
        std::string where = origin_;
        if (at && at.Mark().line >= 0) where += ":" + std::to_string(at.Mark().line + 1);
        throw ConfigError(where + ": " + what);
    }

    YAML::Node load(const std::string& text) const {
        try {
            auto root = YAML::Load(text);
            if (!root.IsMap()) fail("top level must be a mapping", root);
            return root;
        } catch (const YAML::Exception& e) {
            fail(e.what());
        }
    }

    void only_keys(const YAML::Node& map, std::initializer_list<const char*> allowed) const {
        if (!map.IsMap()) fail("expected a mapping", map);
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) fail("unknown key '" + key + "'", kv.first);
        }
    }

    std::string text(const YAML::Node& n, const std::string& what) const {
        if (!n || !n.IsScalar()) fail(what + " must be a scalar", n);
        return n.as<std::string>();
    }

    double number(const YAML::Node& n, const std::string& what) const {
        auto v = parse_double(text(n, what));
        if (!v) fail(what + " must be a number", n);
        return *v;
    }

    long long integer(const YAML::Node& n, const std::string& what) const {
        auto v = parse_int(text(n, what));
        if (!v) fail(what + " must be an integer", n);
        return *v;
    }

    bool boolean(const YAML::Node& n, const std::string& what) const {
        auto s = text(n, what);
        if (s == "on") return true;
        if (s == "off") return false;
        auto v = parse_bool(s);
        if (!v) fail(what + " must be a boolean", n);
        return *v;
    }

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
};

} // namespace crashbench::yaml
