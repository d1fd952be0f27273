#pragma once

// Scenario reports: named outputs, checks against declared targets, notes,
// and the data files that accompany them.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sqz/csv.hpp"
#include "sqz/error.hpp"

namespace sqz {

using ParamValue = std::variant<double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

/// A reference value the scenario should reproduce.
struct Target {
  std::string name;  ///< refers to an output of the same name
  double value = 0.0;
  double tolerance = 0.0;
};

struct Output {
  std::string name;
  double value = 0.0;
  std::string unit;
};

struct TargetCheck {
  std::string name;
  double expected = 0.0;
  double got = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// A file written next to the report, held in memory until emitted.
struct ReportFile {
  std::string name;
  std::string content;
};

struct ScenarioReport {
  std::string scenario_id;
  nlohmann::ordered_json inputs;  ///< same schema as a scenario config file
  std::vector<Output> outputs;
  std::vector<TargetCheck> target_checks;
  std::vector<std::string> notes;
  std::vector<ReportFile> files;

  void add(std::string name, double value, std::string unit = {}) {
    outputs.push_back({std::move(name), value, std::move(unit)});
  }

  const Output* find(const std::string& name) const {
    for (const auto& o : outputs)
      if (o.name == name) return &o;
    return nullptr;
  }

  double value(const std::string& name) const {
    const auto* o = find(name);
    if (!o) throw ConfigError("report has no output '" + name + "'");
    return o->value;
  }

  const ReportFile* file(const std::string& name) const {
    for (const auto& f : files)
      if (f.name == name) return &f;
    return nullptr;
  }

  bool all_passed() const {
    for (const auto& c : target_checks)
      if (!c.pass) return false;
    return true;
  }

  /// Checks every target against the output of the same name. Targets with
  /// no matching output are noted and skipped.
  void check_targets(const std::vector<Target>& targets) {
    for (const auto& t : targets) {
      const auto* o = find(t.name);
      if (!o) {
        notes.push_back("target '" + t.name + "' skipped: no such output in this run");
        continue;
      }
      const bool pass = std::isfinite(o->value) && std::abs(o->value - t.value) <= t.tolerance;
      target_checks.push_back({t.name, t.value, o->value, t.tolerance, pass});
    }
  }
};

inline nlohmann::ordered_json to_json(const ScenarioReport& r, bool with_svg = true) {
  using json = nlohmann::ordered_json;
  auto number = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json out;
  out["scenario"] = r.scenario_id;
  out["inputs"] = r.inputs;
  json outputs = json::array();
  for (const auto& o : r.outputs)
    outputs.push_back({{"name", o.name}, {"value", number(o.value)}, {"unit", o.unit}});
  out["outputs"] = outputs;
  json checks = json::array();
  for (const auto& c : r.target_checks)
    checks.push_back({{"name", c.name},
                      {"expected", c.expected},
                      {"got", number(c.got)},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  out["target_checks"] = checks;
  out["passed"] = r.all_passed();
  out["notes"] = r.notes;
  json files = json::array();
  for (const auto& f : r.files)
    if (with_svg || !f.name.ends_with(".svg")) files.push_back(f.name);
  out["files"] = files;
  return out;
}

inline std::string to_text(const ScenarioReport& r) {
  std::ostringstream out;
  out << "scenario: " << r.scenario_id << "\n\noutputs:\n";
  for (const auto& o : r.outputs) {
    out << "  " << o.name << " = " << format_fixed(o.value, 6);
    if (!o.unit.empty()) out << " " << o.unit;
    out << '\n';
  }
  out << "\ntarget checks:\n";
  for (const auto& c : r.target_checks) {
    out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name
        << ": expected " << format_number(c.expected) << " +- " << format_number(c.tolerance)
        << ", got " << format_fixed(c.got, 6) << '\n';
  }
  if (r.target_checks.empty()) out << "  (none)\n";
  if (!r.notes.empty()) {
    out << "\nnotes:\n";
    for (const auto& n : r.notes) out << "  - " << n << '\n';
  }
  out << "\nresult: " << (r.all_passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

/// Writes `content` to `path` through a sibling temporary and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

/// Writes report.json, report.txt and the attached data files into `dir`.
/// SVG attachments are skipped unless `with_svg`.
inline std::vector<std::filesystem::path> emit_report(const ScenarioReport& r,
                                                      const std::filesystem::path& dir,
                                                      bool with_svg = false) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file_atomic(dir / name, content);
    written.push_back(dir / name);
  };
  for (const auto& f : r.files) {
    if (!with_svg && f.name.ends_with(".svg")) continue;
    put(f.name, f.content);
  }
  put("report.json", to_json(r, with_svg).dump(2) + "\n");
  put("report.txt", to_text(r));
  return written;
}

}  // namespace sqz
