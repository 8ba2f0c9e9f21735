#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "latsch/domain.hpp"
#include "latsch/errors.hpp"
#include "latsch/field.hpp"

namespace latsch {

using json = nlohmann::ordered_json;

/// Fixed-format float for byte-stable reports.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Field JSON: {dimension, entries: [[coords...], re, im]}
// ---------------------------------------------------------------------------

inline json field_to_json(const FieldC& f) {
    json j;
    j["dimension"] = f.dim();
    json entries = json::array();
    for (const auto& [n, v] : f.entries()) {
        json e = json::array();
        json c = json::array();
        for (int i = 0; i < n.dim(); ++i) c.push_back(n[i]);
        e.push_back(c);
        e.push_back(v.real());
        e.push_back(v.imag());
        entries.push_back(e);
    }
    j["entries"] = entries;
    return j;
}

inline FieldC field_from_json(const json& j) {
    FieldC f(j.at("dimension").get<int>());
    for (const auto& e : j.at("entries")) {
        std::vector<int> c = e.at(0).get<std::vector<int>>();
        f.set(Site(c), {e.at(1).get<double>(), e.at(2).get<double>()});
    }
    return f;
}

// ---------------------------------------------------------------------------
// Domain description JSON: {dimension, obstacle: [[int,...],...], bounding_radius}
// ---------------------------------------------------------------------------

inline json domain_to_json(const ExteriorDomain& d) {
    json j;
    j["dimension"] = d.dim();
    json obs = json::array();
    for (const Site& n : d.obstacle()) {
        json c = json::array();
        for (int i = 0; i < n.dim(); ++i) c.push_back(n[i]);
        obs.push_back(c);
    }
    j["obstacle"] = obs;
    j["bounding_radius"] = d.bounding_radius();
    return j;
}

inline ExteriorDomain domain_from_json(const json& j) {
    int dim = j.at("dimension").get<int>();
    std::set<Site> obstacle;
    for (const auto& c : j.at("obstacle")) obstacle.insert(Site(c.get<std::vector<int>>()));
    return ExteriorDomain(dim, std::move(obstacle), j.at("bounding_radius").get<int>());
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open for reading: " + path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

/// Fail-closed key check for config blocks: anything unknown is an error.
inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
    if (!j.is_object()) return;
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw UsageError("unknown field '" + k + "' in " + where);
}

/// Deterministic CSV accumulation: fixed %.17g floats, LF line ends.
class CsvWriter {
  public:
    explicit CsvWriter(std::string header) { buf_ = std::move(header) + "\n"; }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_ += ',';
            buf_ += cells[i];
        }
        buf_ += '\n';
    }
    const std::string& str() const { return buf_; }
    void save(const std::string& path) const { write_text_file(path, buf_); }

  private:
    std::string buf_;
};

}  // namespace latsch
