#include "app.hpp"

#include <cmath>
#include <sstream>

namespace gronwall::app {

bool Report::all_pass() const {
  for (const auto& c : oracle_comparisons)
    if (!c.pass) return false;
  return true;
}

json Report::to_json() const {
  json comps = json::array();
  for (const auto& c : oracle_comparisons) {
    comps.push_back({{"name", c.name}, {"max_abs_gap", c.max_abs_gap}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  return {{"spec_echo", spec_echo}, {"results", results}, {"oracle_comparisons", comps}, {"timing_ms", timing_ms}};
}

std::string Report::deterministic_payload() const {
  json j = to_json();
  j.erase("timing_ms");
  return j.dump();
}

namespace {

// Returns the path of the first non-finite or null leaf, or "".
std::string find_bad_number(const json& j, const std::string& path) {
  if (j.is_null()) return path;
  if (j.is_number_float() && !std::isfinite(j.get<double>())) return path;
  if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) {
      auto bad = find_bad_number(j[i], path + "[" + std::to_string(i) + "]");
      if (!bad.empty()) return bad;
    }
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      auto bad = find_bad_number(v, path + "." + k);
      if (!bad.empty()) return bad;
    }
  }
  return "";
}

bool is_hex16(const json& j) {
  if (!j.is_string()) return false;
  const auto s = j.get<std::string>();
  if (s.size() != 16) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

}  // namespace

std::string validate_report(const json& j) {
  if (!j.is_object()) return "report must be an object";
  for (const char* key : {"spec_echo", "results", "oracle_comparisons", "timing_ms"})
    if (!j.contains(key)) return std::string("missing field '") + key + "'";
  if (j.size() != 4) return "unexpected top-level field";

  const json& echo = j.at("spec_echo");
  if (!echo.is_object() || !echo.contains("kind") || !echo.contains("digest") || !echo.contains("spec"))
    return "spec_echo must hold kind, digest and spec";
  if (!echo.at("kind").is_string()) return "spec_echo.kind must be a string";
  if (!is_hex16(echo.at("digest"))) return "spec_echo.digest must be 16 lowercase hex digits";
  if (spec_digest(echo.at("spec")) != echo.at("digest").get<std::string>()) return "spec_echo.digest mismatch";

  if (!j.at("results").is_object()) return "results must be an object";
  if (auto bad = find_bad_number(j.at("results"), "results"); !bad.empty()) return "non-finite value at " + bad;

  const json& comps = j.at("oracle_comparisons");
  if (!comps.is_array()) return "oracle_comparisons must be an array";
  for (const auto& c : comps) {
    if (!c.is_object() || c.size() != 4) return "oracle comparison must have exactly name, max_abs_gap, tolerance, pass";
    if (!c.contains("name") || !c.at("name").is_string()) return "oracle comparison name must be a string";
    for (const char* key : {"max_abs_gap", "tolerance"}) {
      if (!c.contains(key) || !c.at(key).is_number()) return std::string("oracle comparison ") + key + " must be a number";
      const double v = c.at(key).get<double>();
      if (!std::isfinite(v) || v < 0) return std::string("oracle comparison ") + key + " must be finite and >= 0";
    }
    if (!c.contains("pass") || !c.at("pass").is_boolean()) return "oracle comparison pass must be a boolean";
    const bool expect = c.at("max_abs_gap").get<double>() <= c.at("tolerance").get<double>();
    if (c.at("pass").get<bool>() != expect) return "oracle comparison '" + c.at("name").get<std::string>() +
                                                   "': pass flag inconsistent with gap and tolerance";
  }

  const json& t = j.at("timing_ms");
  if (!t.is_number() || !std::isfinite(t.get<double>()) || t.get<double>() < 0)
    return "timing_ms must be a finite nonnegative number";
  return "";
}

std::string report_csv(const Report& r) {
  const json& res = r.results;
  std::vector<std::pair<std::string, const json*>> cols;
  const char* abscissa = res.contains("nodes") ? "nodes" : nullptr;
  for (const auto& [k, v] : res.items()) {
    if (!v.is_array() || v.empty() || !v[0].is_number() || k == "nodes") continue;
    cols.emplace_back(k, &v);
  }
  size_t rows = 0;
  for (const auto& c : cols) rows = std::max(rows, c.second->size());

  std::ostringstream out;
  out.precision(17);
  out << (abscissa ? "t" : "index");
  for (const auto& c : cols) out << ',' << c.first;
  out << '\n';
  for (size_t i = 0; i < rows; ++i) {
    if (abscissa && i < res.at("nodes").size()) out << res.at("nodes")[i].get<double>();
    else out << i;
    for (const auto& c : cols) {
      out << ',';
      if (i < c.second->size()) out << (*c.second)[i].get<double>();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gronwall::app
