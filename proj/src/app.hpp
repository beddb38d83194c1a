#pragma once

// Spec ingestion, report assembly and property suites behind the CLI.

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gronwall::app {

using json = nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitAdmissibility = 2,
  kExitCheckFailed = 3,
};

/// Malformed, unreadable or schema-invalid input.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double a = 0;
  double b = 1;
  long long n = 101;
};

struct ProblemSpec {
  std::string kind;
  GridSpec grid;
  json data;
  json options;
  /// Canonical form used for the digest.
  json canonical;
};

inline const std::vector<std::string>& problem_kinds() {
  static const std::vector<std::string> kinds{"classic", "varcoef",   "kernel",     "matrix",
                                              "discrete", "maxprin", "semilinear", "resolvent"};
  return kinds;
}

ProblemSpec parse_spec(const json& j);
ProblemSpec load_spec(const std::string& path);

struct OracleComparison {
  std::string name;
  double max_abs_gap = 0;
  double tolerance = 0;
  bool pass = false;
};

struct Report {
  json spec_echo;
  json results;
  std::vector<OracleComparison> oracle_comparisons;
  double timing_ms = 0;

  bool all_pass() const;
  json to_json() const;
  /// The report without timing, serialized; identical for identical inputs.
  std::string deterministic_payload() const;
};

struct RunOptions {
  std::optional<double> tol;
  std::uint64_t seed = 0;
};

/// Dispatches a spec to its module. Library errors propagate unchanged.
Report run_spec(const ProblemSpec& spec, const RunOptions& opts);

/// Empty when `j` conforms to the report schema, otherwise the first problem found.
std::string validate_report(const json& j);

/// FNV-1a 64 of the canonical spec dump, as 16 hex digits.
std::string spec_digest(const json& canonical);

/// "t,bound" rows (plus extra vector columns) for plotting.
std::string report_csv(const Report& r);

struct InvariantTally {
  std::string name;
  long long passed = 0;
  long long failed = 0;
};

struct SuiteSummary {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<InvariantTally> invariants;
  bool all_pass() const;
  std::string table() const;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lattice", "discrete", "volterra", "resolvent",
                                              "maxprin", "semilinear", "all"};
  return names;
}

/// Throws SpecError for an unknown suite name.
SuiteSummary run_suite(const std::string& name, std::uint64_t seed);

/// Full command-line entry point; returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gronwall::app
