// Scenario files (JSON, schema_version 1), report emission (RFC-4180 CSV and a
// fixed-layout JSON summary), and the potential factory the CLI builds from.
// Every scenario accessor failure names the JSON path of the offending key.
#ifndef MAUPERTUIS_SCENARIO_HPP
#define MAUPERTUIS_SCENARIO_HPP

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "maupertuis/common.hpp"
#include "maupertuis/potential.hpp"

namespace maup {

inline constexpr const char* toolkit_version = "v1.0.0";

// ---------------------------------------------------------------------------
// Scenario access

class scenario_node {
 public:
  scenario_node(const nlohmann::json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  scenario_node child(const char* key) const {
    require(key);
    return scenario_node((*j_)[key], path_ + "/" + key);
  }

  double number(const char* key) const {
    require(key);
    const auto& v = (*j_)[key];
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double number_or(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer(const char* key) const {
    require(key);
    const auto& v = (*j_)[key];
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }
  int integer_or(const char* key, int fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::string text(const char* key) const {
    require(key);
    const auto& v = (*j_)[key];
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string text_or(const char* key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  vecd numbers(const char* key) const {
    require(key);
    const auto& v = (*j_)[key];
    if (!v.is_array()) fail(key, "expected an array of numbers");
    vecd out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<vecd> vectors(const char* key) const {
    require(key);
    const auto& v = (*j_)[key];
    if (!v.is_array()) fail(key, "expected an array of arrays");
    std::vector<vecd> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& e = v[i];
      if (!e.is_array()) fail(key, "expected an array of arrays");
      vecd row;
      for (const auto& c : e) {
        if (!c.is_number()) fail(key, "expected numeric entries");
        row.push_back(c.get<double>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  void require(const char* key) const {
    if (!has(key)) fail(key, "missing key");
  }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw config_error(std::string(what) + " at " + path_ + "/" + key);
  }

  const nlohmann::json* j_;
  std::string path_;
};

inline nlohmann::json load_scenario_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open scenario file " + file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("scenario parse failure in " + file + ": " + e.what());
  }
  scenario_node root(j, "");
  const int version = root.integer("schema_version");
  if (version != 1) throw config_error("unsupported value at /schema_version (expected 1)");
  return j;
}

inline potential make_potential(const scenario_node& node) {
  const std::string fam = node.text("family");
  const int dim = node.integer("dim");
  const double mass = node.number_or("mass", 1.0);
  const double hbar = node.number_or("hbar", 1.0);
  if (fam == "free") return potential::free_particle(dim, mass, hbar);
  if (fam == "harmonic")
    return potential::harmonic(dim, node.number_or("omega", 1.0), mass, hbar);
  if (fam == "quartic")
    return potential::quartic(dim, node.number_or("lambda", 1.0), mass, hbar);
  if (fam == "gaussian-well")
    return potential::gaussian_well(dim, node.number("depth"), node.number("width"), mass, hbar);
  if (fam == "coulomb-regularized")
    return potential::coulomb_regularized(dim, node.number_or("epsilon", 1e-3), mass, hbar);
  if (fam == "tabulated") {
    scenario_node axes_node = node.child("axes");
    std::vector<vecd> raw = node.vectors("axes");
    std::vector<axis_spec> axes;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i].size() != 3)
        throw config_error("expected [min, step, count] triples at " + axes_node.path());
      axes.push_back(axis_spec{raw[i][0], raw[i][1], static_cast<int>(raw[i][2])});
    }
    return potential::tabulated(std::move(axes), node.numbers("values"), mass, hbar);
  }
  throw config_error("unknown potential family '" + fam + "' at " + node.path() + "/family");
}

// ---------------------------------------------------------------------------
// Report emission

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC-4180: CRLF record separators, fields quoted when they contain
// commas, quotes, or line breaks.
class csv_writer {
 public:
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += escape(cells[i]);
    }
    buf_ += "\r\n";
  }
  const std::string& str() const { return buf_; }

 private:
  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      out += c;
      if (c == '"') out += '"';
    }
    out += '"';
    return out;
  }
  std::string buf_;
};

struct criterion_result {
  int id;
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

inline std::string escape_json(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed-layout summary: numbers at 17 significant digits, keys in a fixed order,
// so reruns are byte-comparable.
inline std::string summary_to_string(const std::string& scenario_name,
                                     const std::vector<criterion_result>& criteria) {
  std::string out = "{\n  \"criteria\": [\n";
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const criterion_result& c = criteria[i];
    out += "    {\"id\": " + std::to_string(c.id) + ", \"name\": \"" + escape_json(c.name) +
           "\", \"pass\": " + (c.pass ? "true" : "false") +
           ", \"tolerance\": " + fmt17(c.tolerance) + ", \"value\": " + fmt17(c.value) + "}";
    if (i + 1 < criteria.size()) out += ',';
    out += '\n';
  }
  out += "  ],\n  \"scenario\": \"" + escape_json(scenario_name) + "\",\n  \"version\": \"" +
         toolkit_version + "\"\n}\n";
  return out;
}

inline std::string criteria_to_csv(const std::vector<criterion_result>& criteria) {
  csv_writer csv;
  csv.row({"id", "name", "value", "tolerance", "pass"});
  for (const criterion_result& c : criteria)
    csv.row({std::to_string(c.id), c.name, fmt17(c.value), fmt17(c.tolerance),
             c.pass ? "true" : "false"});
  return csv.str();
}

inline void write_text_file(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw config_error("cannot write " + file.string());
  out << content;
}

}  // namespace maup

#endif
