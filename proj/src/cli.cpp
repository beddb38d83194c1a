#include "app.hpp"

#include "gronwall/gronwall.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>

namespace gronwall::app {
namespace {

void emit_error(std::ostream& err, const json& payload) { err << payload.dump() << '\n'; }

json error_json(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path);
  if (!f || !(f << content)) {
    emit_error(err, error_json("io", "cannot write '" + path + "'"));
    return false;
  }
  return true;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gronwall-type bounds, maximum principles and their oracle checks"};
  std::string spec_path, suite, out_path;
  std::uint64_t seed = 0;
  double tol = 0;
  bool csv = false, quiet = false;
  auto* spec_opt = app.add_option("--spec", spec_path, "Problem specification (JSON)");
  auto* suite_opt = app.add_option("--suite", suite, "Property suite: lattice, discrete, volterra, resolvent, "
                                                     "maxprin, semilinear or all");
  spec_opt->excludes(suite_opt);
  app.add_option("--seed", seed, "Seed for suites and randomized probes");
  auto* tol_opt = app.add_option("--tol", tol, "Override the oracle tolerance of the spec")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "Also write the JSON report (or suite table) to this file");
  app.add_flag("--csv", csv, "Print bound vectors as CSV instead of the JSON report");
  app.add_flag("--quiet", quiet, "Print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, error_json("usage", e.what()));
    return kExitInput;
  }
  if (spec_path.empty() && suite.empty()) {
    emit_error(err, error_json("usage", "one of --spec or --suite is required"));
    return kExitInput;
  }

  try {
    if (!suite.empty()) {
      const auto summary = run_suite(suite, seed);
      const auto table = summary.table();
      if (!quiet) out << table;
      if (!out_path.empty() && !write_file(out_path, table, err)) return kExitInput;
      return summary.all_pass() ? kExitOk : kExitCheckFailed;
    }

    const auto spec = load_spec(spec_path);
    RunOptions opts;
    opts.seed = seed;
    if (*tol_opt) opts.tol = tol;
    const auto report = run_spec(spec, opts);
    const json j = report.to_json();
    if (auto problem = validate_report(j); !problem.empty()) {
      emit_error(err, error_json("internal", "report failed schema validation: " + problem));
      return kExitCheckFailed;
    }
    if (!quiet) out << (csv ? report_csv(report) : j.dump(2) + "\n");
    if (!out_path.empty() && !write_file(out_path, j.dump(2) + "\n", err)) return kExitInput;
    if (!report.all_pass()) {
      for (const auto& c : report.oracle_comparisons) {
        if (!c.pass)
          emit_error(err, {{"error", "oracle_check_failed"},
                           {"message", c.name},
                           {"max_abs_gap", c.max_abs_gap},
                           {"tolerance", c.tolerance}});
      }
      return kExitCheckFailed;
    }
    return kExitOk;
  } catch (const SpecError& e) {
    emit_error(err, error_json("spec", e.what()));
    return kExitInput;
  } catch (const AdmissibilityError& e) {
    emit_error(err, {{"error", "admissibility"},
                     {"hypothesis", e.hypothesis},
                     {"provenance", e.provenance},
                     {"value", e.value},
                     {"message", e.what()}});
    return kExitAdmissibility;
  } catch (const Error& e) {
    emit_error(err, error_json(to_string(e.kind()), e.what()));
    switch (e.kind()) {
      case ErrorKind::dimension:
      case ErrorKind::invariant:
      case ErrorKind::parameter:
      case ErrorKind::precondition:
        return kExitInput;
      default:
        return kExitCheckFailed;
    }
  } catch (const std::exception& e) {
    emit_error(err, error_json("internal", e.what()));
    return kExitCheckFailed;
  }
}

}  // namespace gronwall::app
