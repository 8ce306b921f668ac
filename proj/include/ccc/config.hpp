#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/majority_rule.hpp"
#include "ccc/scales.hpp"

namespace ccc {

// Run configuration: one flat [section] key = value file, with CLI flags
// overriding file values.  Every key must be consumed by the selected
// experiment; leftovers are rejected by name.

class RunConfig {
  public:
    RunConfig() = default;

    static RunConfig parse(const std::string& text) {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = strip(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
                section = strip(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
            std::string k = strip(s.substr(0, eq));
            std::string v = strip(s.substr(eq + 1));
            if (k.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
            if (section.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
            cfg.values_[section + "." + k] = v;
        }
        return cfg;
    }

    void set(const std::string& dotted_key, const std::string& value) { values_[dotted_key] = value; }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        consumed_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        consumed_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required config key: " + key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        consumed_.insert(key);
        return it == values_.end() ? fallback : parse_double(key, it->second);
    }

    double require_double(const std::string& key) const {
        return parse_double(key, require_string(key));
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        consumed_.insert(key);
        return it == values_.end() ? fallback : parse_int(key, it->second);
    }

    std::int64_t require_int(const std::string& key) const {
        return parse_int(key, require_string(key));
    }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        auto it = values_.find(key);
        consumed_.insert(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stoull(it->second);
        } catch (...) {
            throw ConfigError("config key " + key + " is not an unsigned integer: " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        consumed_.insert(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
        if (it->second == "false" || it->second == "0" || it->second == "no") return false;
        throw ConfigError("config key " + key + " is not a boolean: " + it->second);
    }

    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const {
        auto it = values_.find(key);
        consumed_.insert(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        for (const std::string& part : split(it->second, ',')) out.push_back(parse_double(key, part));
        return out;
    }

    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           std::vector<std::int64_t> fallback) const {
        auto it = values_.find(key);
        consumed_.insert(key);
        if (it == values_.end()) return fallback;
        std::vector<std::int64_t> out;
        for (const std::string& part : split(it->second, ',')) out.push_back(parse_int(key, part));
        return out;
    }

    /// Rejects keys nobody consumed, naming them.
    void ensure_all_consumed() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : values_)
            if (consumed_.count(k) == 0) unknown.push_back(k);
        if (!unknown.empty()) {
            std::string msg = "unknown config keys:";
            for (const auto& k : unknown) msg += " " + k;
            throw ConfigError(msg);
        }
    }

    /// Canonical text form used for hashing and the manifest.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                out.push_back(strip(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(strip(cur));
        return out;
    }

  private:
    static std::string strip(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    static double parse_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (...) {
            throw ConfigError("config key " + key + " is not a number: " + v);
        }
    }

    static std::int64_t parse_int(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            std::int64_t i = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return i;
        } catch (...) {
            throw ConfigError("config key " + key + " is not an integer: " + v);
        }
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

/// [scales] section -> ScaleParams plus k_max.
inline std::pair<ScaleParams, int> scale_params_from_config(const RunConfig& cfg) {
    ScaleParams p;
    p.epsilon_star = cfg.get_double("scales.epsilon_star", 0.5);
    p.k_star = static_cast<int>(cfg.get_int("scales.k_star", 1));
    int k_max = static_cast<int>(cfg.get_int("scales.k_max", p.k_star + 2));
    p.alpha = cfg.get_double("scales.alpha", 0.0);
    std::string ell = cfg.get_string("scales.ell", "default");
    if (ell != "default") {
        p.ell_schedule = EllSchedule::custom;
        for (const std::string& part : RunConfig::split(ell, ','))
            p.ell_custom.push_back(std::stoll(part));
    }
    std::string h = cfg.get_string("scales.h", "none");
    if (h == "power_law") {
        p.h_schedule = HSchedule::power_law;
    } else if (h != "none") {
        p.h_schedule = HSchedule::custom;
        for (const std::string& part : RunConfig::split(h, ','))
            p.h_custom.push_back(std::stod(part));
    }
    return {p, k_max};
}

/// [rule] section (prefix selects e.g. "rule" or "phase.rule").
inline MajorityRule rule_from_config(const RunConfig& cfg, const std::string& prefix = "rule") {
    std::string kind = cfg.get_string(prefix + ".kind", "pure");
    if (kind == "pure") return MajorityRule::pure_majority();
    if (kind == "identity") return MajorityRule::identity();
    if (kind == "linear")
        return MajorityRule::linear(cfg.require_double(prefix + ".lambda"),
                                    cfg.require_double(prefix + ".delta"));
    if (kind == "tanh") return MajorityRule::tanh_rule(cfg.require_double(prefix + ".slope"));
    if (kind == "tilde") {
        std::string base_kind = cfg.get_string(prefix + ".base_kind", "linear");
        MajorityRule base = MajorityRule::pure_majority();
        if (base_kind == "identity")
            base = MajorityRule::identity();
        else if (base_kind == "linear")
            base = MajorityRule::linear(cfg.require_double(prefix + ".base_lambda"),
                                        cfg.require_double(prefix + ".base_delta"));
        else if (base_kind == "tanh")
            base = MajorityRule::tanh_rule(cfg.require_double(prefix + ".base_slope"));
        else
            throw ConfigError(prefix + ".base_kind must be identity, linear or tanh");
        return MajorityRule::tilde(base, cfg.require_double(prefix + ".lambda"),
                                   cfg.require_double(prefix + ".delta"));
    }
    if (kind == "custom") {
        std::vector<std::pair<double, double>> pts;
        for (const std::string& part : RunConfig::split(cfg.require_string(prefix + ".points"), ',')) {
            auto colon = part.find(':');
            if (colon == std::string::npos)
                throw ConfigError(prefix + ".points must be z:phi pairs separated by commas");
            pts.emplace_back(std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1)));
        }
        return MajorityRule::custom(std::move(pts));
    }
    throw ConfigError(prefix + ".kind must be pure, identity, linear, tanh, tilde or custom");
}

inline MajorityRule rule_by_name(const std::string& name) {
    if (name == "pure") return MajorityRule::pure_majority();
    if (name == "identity") return MajorityRule::identity();
    throw ConfigError("rule name must be pure or identity in grid lists; got " + name);
}

}  // namespace ccc
