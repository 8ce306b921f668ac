#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ccc/environment.hpp"
#include "ccc/errors.hpp"
#include "ccc/stats.hpp"

namespace ccc {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; '.' decimal separator always.
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// RFC-4180 field escaping.
inline std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        append_row(header);
    }

    void append_row(const std::vector<std::string>& fields) {
        if (fields.size() != columns_) throw ConfigError("CSV row width mismatch");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ += ',';
            out_ += csv_escape(fields[i]);
        }
        out_ += "\r\n";
    }

    const std::string& str() const { return out_; }

  private:
    std::size_t columns_;
    std::string out_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw ConfigError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Environment export: first line a JSON header with window and seed, second
/// line one ASCII 0/1 per position.
inline std::string environment_to_text(const Environment& env) {
    ordered_json header;
    header["window"] = {env.window().lo, env.window().hi};
    header["seed"] = env.seed().value;
    std::string out = header.dump();
    out += '\n';
    for (std::int64_t t = env.window().lo; t <= env.window().hi; ++t)
        out += env.bit(t) ? '1' : '0';
    out += '\n';
    return out;
}

inline Environment environment_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string header_line, bits_line;
    if (!std::getline(in, header_line) || !std::getline(in, bits_line))
        throw ConfigError("malformed environment file");
    ordered_json header = ordered_json::parse(header_line);
    Interval w{header.at("window").at(0).get<std::int64_t>(),
               header.at("window").at(1).get<std::int64_t>()};
    std::vector<std::uint8_t> bits;
    bits.reserve(bits_line.size());
    for (char c : bits_line) {
        if (c == '0') bits.push_back(0);
        else if (c == '1') bits.push_back(1);
        else throw ConfigError("environment file bits must be 0 or 1");
    }
    return Environment::from_bits(w, std::move(bits), {header.at("seed").get<std::uint64_t>()});
}

/// Block report: one row per block, all scales of the hierarchy.  Active set
/// and classification are left blank where the window cannot decide them.
inline std::string block_report_csv(const BlockHierarchy& hier) {
    CsvWriter csv({"scale", "a", "b", "diam", "determinate", "act", "good"});
    for (int k = hier.k_lo(); k <= hier.k_hi(); ++k) {
        for (const Block& b : hier.blocks(k)) {
            std::string act, good;
            if (b.determinate) {
                try {
                    act = std::to_string(hier.active_points(b).size());
                    good = hier.classify_block(b) ? "1" : "0";
                } catch (const BoundaryUndetermined&) {
                } catch (const ConfigError&) {
                }
            }
            csv.append_row({std::to_string(k), std::to_string(b.a), std::to_string(b.b),
                            std::to_string(b.diam()), b.determinate ? "1" : "0", act, good});
        }
    }
    return csv.str();
}

inline ordered_json mc_report_json(const stats::McReport& r) {
    ordered_json j;
    j["quantity"] = r.quantity;
    j["estimate"] = r.estimate;
    j["half_width"] = r.half_width;
    j["replicas"] = r.replicas;
    j["seed"] = r.seed;
    j["reference"] = r.reference;
    j["tolerance"] = r.tolerance;
    switch (r.kind) {
        case stats::CheckKind::two_sided: j["check"] = "two_sided"; break;
        case stats::CheckKind::one_sided_upper: j["check"] = "one_sided_upper"; break;
        case stats::CheckKind::exact: j["check"] = "exact"; break;
        case stats::CheckKind::informative: j["check"] = "informative"; break;
    }
    j["bound_certified"] = r.bound_certified;
    j["pass"] = r.pass;
    j["note"] = r.note;
    return j;
}

inline void mc_reports_csv(CsvWriter& csv, const std::vector<stats::McReport>& reports) {
    for (const auto& r : reports) {
        csv.append_row({r.quantity, fmt_double(r.estimate), fmt_double(r.half_width),
                        std::to_string(r.replicas), fmt_double(r.reference),
                        fmt_double(r.tolerance), r.bound_certified ? "1" : "0",
                        r.pass ? "1" : "0", r.note});
    }
}

inline std::vector<std::string> mc_reports_csv_header() {
    return {"quantity", "estimate", "half_width", "replicas", "reference",
            "tolerance", "bound_certified", "pass", "note"};
}

/// FNV-1a over the canonical config text.
inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace ccc
