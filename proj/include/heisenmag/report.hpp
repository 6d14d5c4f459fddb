#pragma once
// Report rows with tolerance verdicts, the JSON envelope and the CSV table.
// Key order is sorted and doubles print in shortest round-trip form, so a
// report is a deterministic function of its contents.

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "heisenmag/errors.hpp"
#include "json.hpp"

namespace heisenmag {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "heisenmag-report/1";

// Process exit status.
enum class ExitCode : int { kPass = 0, kVerdictFailure = 1, kUsage = 2, kNumerical = 3 };

// How value is compared with target:
//   abs       |value - target| <= tolerance
//   rel       |value - target| <= tolerance * |target|
//   at_least  value >= target - tolerance
//   at_most   value <= target + tolerance
enum class Relation { kAbs, kRel, kAtLeast, kAtMost };

inline std::string relation_name(Relation r) {
  switch (r) {
    case Relation::kAbs: return "abs";
    case Relation::kRel: return "rel";
    case Relation::kAtLeast: return "at_least";
    case Relation::kAtMost: return "at_most";
  }
  return "abs";
}

struct Check {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  double value = 0, target = 0, tolerance = 0;
  Relation relation = Relation::kAbs;

  // NaN never passes.
  bool pass() const {
    if (std::isnan(value) || std::isnan(target)) return false;
    switch (relation) {
      case Relation::kAbs: return std::abs(value - target) <= tolerance;
      case Relation::kRel: return std::abs(value - target) <= tolerance * std::abs(target);
      case Relation::kAtLeast: return value >= target - tolerance;
      case Relation::kAtMost: return value <= target + tolerance;
    }
    return false;
  }
};

inline Check check_abs(std::string name, double value, double target, double tol,
                       nlohmann::json params = nlohmann::json::object()) {
  return {std::move(name), std::move(params), value, target, tol, Relation::kAbs};
}
inline Check check_rel(std::string name, double value, double target, double tol,
                       nlohmann::json params = nlohmann::json::object()) {
  return {std::move(name), std::move(params), value, target, tol, Relation::kRel};
}
inline Check check_at_least(std::string name, double value, double target, double tol,
                            nlohmann::json params = nlohmann::json::object()) {
  return {std::move(name), std::move(params), value, target, tol, Relation::kAtLeast};
}
inline Check check_at_most(std::string name, double value, double target, double tol,
                           nlohmann::json params = nlohmann::json::object()) {
  return {std::move(name), std::move(params), value, target, tol, Relation::kAtMost};
}
// Boolean claim as value 1 / 0 against target 1.
inline Check check_true(std::string name, bool ok,
                        nlohmann::json params = nlohmann::json::object()) {
  return {std::move(name), std::move(params), ok ? 1.0 : 0.0, 1.0, 0.0, Relation::kAbs};
}

// Non-finite doubles become null.
inline nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const Check& c) {
  return {{"name", c.name},
          {"params", c.params},
          {"value", number(c.value)},
          {"target", number(c.target)},
          {"tolerance", number(c.tolerance)},
          {"relation", relation_name(c.relation)},
          {"verdict", c.pass() ? "pass" : "fail"}};
}

struct Report {
  std::string command;
  nlohmann::json config = nlohmann::json::object();  // echo, always carries seed and threads
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;
  nlohmann::json timings;  // null unless requested

  void add(Check c) { checks.push_back(std::move(c)); }
  void add(const std::vector<Check>& cs) { checks.insert(checks.end(), cs.begin(), cs.end()); }

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
  std::vector<const Check*> failures() const {
    std::vector<const Check*> out;
    for (const auto& c : checks)
      if (!c.pass()) out.push_back(&c);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : checks) rows.push_back(heisenmag::to_json(c));
    nlohmann::json j = {{"schema", kReportSchema},
                        {"tool", "heisenmag"},
                        {"version", kToolVersion},
                        {"command", command},
                        {"config", config},
                        {"results", results},
                        {"checks", rows},
                        {"verdict", all_pass() ? "pass" : "fail"}};
    if (!timings.is_null()) j["timings"] = timings;
    return j;
  }

  std::string json_text() const { return to_json().dump(2) + "\n"; }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  return nlohmann::json(v).dump();
}

// "n=10;alpha=0.5" from a flat params object.
inline std::string param_string(const nlohmann::json& p) {
  std::string s;
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (!s.empty()) s += ';';
    s += it.key() + "=" + (it->is_string() ? it->get<std::string>() : it->dump());
  }
  return s;
}

}  // namespace detail

// One line per check: command,check,params,value,target,tolerance,relation,verdict
inline std::string csv_text(const Report& r) {
  std::ostringstream os;
  os << "command,check,params,value,target,tolerance,relation,verdict\n";
  for (const auto& c : r.checks)
    os << r.command << ',' << detail::csv_field(c.name) << ','
       << detail::csv_field(detail::param_string(c.params)) << ',' << detail::csv_number(c.value)
       << ',' << detail::csv_number(c.target) << ',' << detail::csv_number(c.tolerance) << ','
       << relation_name(c.relation) << ',' << (c.pass() ? "pass" : "fail") << '\n';
  return os.str();
}

// Exit status for an error escaping a computation.
inline ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const IntegrationError*>(&e))
    return ExitCode::kNumerical;
  if (dynamic_cast<const Error*>(&e)) return ExitCode::kUsage;
  return ExitCode::kNumerical;
}

}  // namespace heisenmag
