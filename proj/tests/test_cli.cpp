#include "doctest.h"

#include "app.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using gronwall::app::json;
namespace app = gronwall::app;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gronwall");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = app::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_spec(const std::string& name, const json& spec) {
  const auto path = fs::temp_directory_path() / ("gronwall_cli_test_" + name + ".json");
  std::ofstream(path) << spec.dump();
  return path.string();
}

json classic_spec() {
  return {{"kind", "classic"}, {"grid", {{"a", 0.0}, {"b", 1.0}, {"n", 101}}}, {"data", {{"A", 1.0}, {"B", 1.0}}}};
}

}  // namespace

TEST_CASE("classic spec") {
  const auto r = cli({"--spec", write_spec("classic", classic_spec())});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["results"]["bound_at_b"].get<double>() == doctest::Approx(2.71828).epsilon(1e-6));
  CHECK(j["results"]["bound"].size() == 101);
  CHECK(app::validate_report(j).empty());
  CHECK(j["spec_echo"]["kind"] == "classic");
}

TEST_CASE("discrete spec") {
  const json spec = {{"kind", "discrete"}, {"data", {{"A", {1, 1, 1}}, {"B", {1, 1}}}}};
  const auto r = cli({"--spec", write_spec("discrete", spec)});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["results"]["bound"] == json({1.0, 2.0, 4.0}));
  for (const auto& c : j["oracle_comparisons"]) CHECK(c["pass"].get<bool>());
  CHECK(j["oracle_comparisons"][0]["name"] == "brute_force_discrete");
}

TEST_CASE("inadmissible matrix spec exits with 2") {
  const json spec = {{"kind", "matrix"}, {"data", {{"K", {{2, 1}, {1, 2}}}, {"A", {1, 1}}, {"B", 0.5}}}};
  const auto r = cli({"--spec", write_spec("inadmissible", spec)});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  const json e = json::parse(r.err);
  CHECK(e["error"] == "admissibility");
  CHECK(e["hypothesis"] == "B*rho_K<1");
  CHECK(e["value"].get<double>() == doctest::Approx(1.5));
  CHECK(r.err.find('\n') == r.err.size() - 1);

  const json mp = {{"kind", "maxprin"}, {"data", {{"n", 20}, {"B", 20.0}, {"x", {{"form", "eigenvector"}}}}}};
  const auto rm = cli({"--spec", write_spec("maxprin_bad", mp)});
  CHECK(rm.code == 2);
  CHECK(json::parse(rm.err)["hypothesis"] == "B<lambda_1");

  const json sl = {{"kind", "semilinear"},
                   {"data", {{"K", {{1, 1}, {1, 1}}}, {"x0", {1, 1}}, {"N", {{"name", "sin"}}}, {"C", 1.0}}}};
  const auto rs = cli({"--spec", write_spec("semilinear_bad", sl)});
  CHECK(rs.code == 2);
  CHECK(json::parse(rs.err)["hypothesis"] == "C*rho_K<1");
}

TEST_CASE("input errors exit with 1") {
  CHECK(cli({"--spec", "/nonexistent/spec.json"}).code == 1);
  CHECK(cli({"--suite", "bogus"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"--spec", "x.json", "--suite", "lattice"}).code == 1);
  CHECK(cli({"--spec", write_spec("tol", classic_spec()), "--tol", "-1"}).code == 1);

  const auto path = (fs::temp_directory_path() / "gronwall_cli_test_garbage.json").string();
  std::ofstream(path) << "{not json";
  const auto g = cli({"--spec", path});
  CHECK(g.code == 1);
  CHECK(json::parse(g.err)["error"] == "spec");

  json neg = {{"kind", "discrete"}, {"data", {{"A", {1, 1}}, {"B", {-1}}}}};
  CHECK(cli({"--spec", write_spec("neg", neg)}).code == 1);
  json wrong_len = {{"kind", "discrete"}, {"data", {{"A", {1, 1}}, {"B", {1, 1}}}}};
  CHECK(cli({"--spec", write_spec("len", wrong_len)}).code == 1);
  json unknown = {{"kind", "spline"}, {"data", json::object()}};
  CHECK(cli({"--spec", write_spec("unknown", unknown)}).code == 1);
  json no_grid = {{"kind", "classic"}, {"data", {{"A", 1}, {"B", 1}}}};
  CHECK(cli({"--spec", write_spec("no_grid", no_grid)}).code == 1);
}

TEST_CASE("every kind runs and round-trips the report schema") {
  const json grid = {{"a", 0.0}, {"b", 1.0}, {"n", 51}};
  const std::vector<json> specs{
      classic_spec(),
      {{"kind", "varcoef"},
       {"grid", grid},
       {"data",
        {{"A", {{"form", "linear"}, {"intercept", 1}, {"slope", 1}}},
         {"B", {{"form", "exp"}, {"scale", 0.5}, {"rate", 1}}},
         {"C", {{"form", "sin"}, {"offset", 1}, {"amplitude", 0.2}}}}}},
      {{"kind", "kernel"}, {"grid", grid}, {"data", {{"kernel", {{"form", "exp_decay"}, {"rate", 2}}}, {"A", 1.0}}}},
      {{"kind", "kernel"},
       {"grid", grid},
       {"data", {{"kernel", {{"form", "separable"}, {"C", 1.0}, {"B", {{"form", "constant"}, {"value", 2}}}}}, {"A", 1}}}},
      {{"kind", "matrix"}, {"data", {{"K", {{0.2, 0.1}, {0.3, 0.4}}}, {"A", {1, -0.5}}, {"B", 1.5}}}},
      {{"kind", "discrete"}, {"data", {{"A", {1, 2, 3}}, {"B", {0.5, 0.5}}, {"C", {1, 2, 1}}}}},
      {{"kind", "maxprin"}, {"data", {{"n", 30}, {"B", 3.0}, {"x", {{"form", "green"}, {"g", std::vector<double>(30, 1.0)}}}}}},
      {{"kind", "semilinear"},
       {"grid", grid},
       {"data",
        {{"K", {{"form", "volterra"}, {"rule", "explicit_trapezoid"}}},
         {"x0", 1.0},
         {"x0_hat", 1.1},
         {"N", {{"name", "polynomial"}, {"coefficients", {0, 1}}}},
         {"C", 1.0}}}},
      {{"kind", "resolvent"}, {"data", {{"K", {{0.5, 0.2}, {0.1, 0.3}}}, {"A", {1, 2}}, {"s", 2.0}}}},
  };
  int i = 0;
  for (const auto& spec : specs) {
    CAPTURE(spec.dump());
    const auto r = cli({"--spec", write_spec("kind" + std::to_string(i++), spec)});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(app::validate_report(j) == "");
    CHECK_FALSE(j["oracle_comparisons"].empty());
    // Exact float round-trip through the serialized text.
    CHECK(json::parse(j.dump()) == j);
  }
}

TEST_CASE("report determinism excludes timing") {
  const auto spec = app::parse_spec(classic_spec());
  const auto a = app::run_spec(spec, {});
  const auto b = app::run_spec(spec, {});
  CHECK(a.deterministic_payload() == b.deterministic_payload());
  CHECK(a.deterministic_payload().find("timing_ms") == std::string::npos);
  CHECK(app::spec_digest(spec.canonical) == a.spec_echo["digest"].get<std::string>());

  json other = classic_spec();
  other["data"]["A"] = 2.0;
  CHECK(app::spec_digest(app::parse_spec(other).canonical) != app::spec_digest(spec.canonical));
}

TEST_CASE("validate_report rejects malformed reports") {
  const auto good = app::run_spec(app::parse_spec(classic_spec()), {}).to_json();
  REQUIRE(app::validate_report(good).empty());

  json bad = good;
  bad["oracle_comparisons"][0]["pass"] = !bad["oracle_comparisons"][0]["pass"].get<bool>();
  CHECK_FALSE(app::validate_report(bad).empty());
  bad = good;
  bad["results"]["bound"][3] = nullptr;
  CHECK_FALSE(app::validate_report(bad).empty());
  bad = good;
  bad.erase("timing_ms");
  CHECK_FALSE(app::validate_report(bad).empty());
  bad = good;
  bad["spec_echo"]["spec"]["data"]["A"] = 5.0;
  CHECK_FALSE(app::validate_report(bad).empty());
}

TEST_CASE("--out, --csv and --quiet") {
  const auto spec = write_spec("flags", classic_spec());
  const auto out_path = (fs::temp_directory_path() / "gronwall_cli_test_report.json").string();
  const auto q = cli({"--spec", spec, "--quiet", "--out", out_path});
  CHECK(q.code == 0);
  CHECK(q.out.empty());
  std::ifstream in(out_path);
  const json j = json::parse(in);
  CHECK(app::validate_report(j).empty());

  const auto c = cli({"--spec", spec, "--csv"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("t,bound\n", 0) == 0);
  CHECK(std::count(c.out.begin(), c.out.end(), '\n') == 102);

  const auto t = cli({"--spec", spec, "--tol", "1e-30"});
  CHECK(t.code == 3);
  CHECK(json::parse(t.err)["error"] == "oracle_check_failed");
}

TEST_CASE("suites") {
  const auto lat = cli({"--suite", "lattice", "--seed", "42"});
  CHECK(lat.code == 0);
  CHECK(lat.out.find("lattice/join_commutative") != std::string::npos);
  CHECK(lat.out.find("FAIL") == std::string::npos);

  const auto d = app::run_suite("discrete", 7);
  CHECK(d.all_pass());
  bool found = false;
  for (const auto& t : d.invariants)
    if (t.name == "discrete/closed_form_equals_brute_force") {
      found = true;
      CHECK(t.passed == 1000);
    }
  CHECK(found);

  const auto a1 = cli({"--suite", "all", "--seed", "1"});
  const auto a2 = cli({"--suite", "all", "--seed", "1"});
  CHECK(a1.code == 0);
  CHECK(a1.out == a2.out);
  CHECK_THROWS_AS(app::run_suite("nope", 1), app::SpecError);
}
