#include "app.hpp"
#include "ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gronwall::app {
namespace ingest {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw SpecError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SpecError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SpecError(where + ": number must be finite");
  return x;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return number(obj.at(key), where + "." + key);
}

long long integer_or(const json& obj, const char* key, long long fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw SpecError(where + "." + key + ": expected an integer");
  return v.get<long long>();
}

VectorXd vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw SpecError(where + ": expected an array of numbers");
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], where);
  return out;
}

MatrixXd matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw SpecError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = static_cast<Eigen::Index>(v[0].is_array() ? v[0].size() : 0);
  MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const VectorXd row = vector(v[static_cast<size_t>(i)], where);
    if (row.size() != cols) throw SpecError(where + ": ragged matrix rows");
    out.row(i) = row.transpose();
  }
  return out;
}

VectorXd coefficient(const json& v, const std::optional<Grid<double>>& g, const std::string& where) {
  if (v.is_array()) {
    VectorXd out = vector(v, where);
    if (g && out.size() != g->size())
      throw SpecError(where + ": node table has " + std::to_string(out.size()) + " entries, grid has " +
                      std::to_string(g->size()));
    return out;
  }
  if (!g) throw SpecError(where + ": named or scalar coefficients need a grid");
  if (v.is_number()) return VectorXd::Constant(g->size(), number(v, where));
  if (!v.is_object()) throw SpecError(where + ": expected a number, an array or a {form: ...} object");
  const json& form = require(v, "form", where);
  if (!form.is_string()) throw SpecError(where + ".form: expected a string");
  const auto f = form.get<std::string>();
  if (f == "constant") {
    const double c = number(require(v, "value", where), where + ".value");
    return VectorXd::Constant(g->size(), c);
  }
  if (f == "linear") {
    const double c0 = number_or(v, "intercept", 0.0, where), c1 = number_or(v, "slope", 0.0, where);
    return g->sample([&](double t) { return c0 + c1 * t; });
  }
  if (f == "exp") {
    const double s = number_or(v, "scale", 1.0, where), r = number_or(v, "rate", 1.0, where);
    return g->sample([&](double t) { return s * std::exp(r * t); });
  }
  if (f == "sin") {
    const double a = number_or(v, "amplitude", 1.0, where), w = number_or(v, "frequency", 1.0, where);
    const double p = number_or(v, "phase", 0.0, where), c = number_or(v, "offset", 0.0, where);
    return g->sample([&](double t) { return c + a * std::sin(w * t + p); });
  }
  throw SpecError(where + ": unknown coefficient form '" + f + "'");
}

Grid<double> grid(const GridSpec& gs) {
  try {
    return Grid<double>(gs.a, gs.b, static_cast<Eigen::Index>(gs.n));
  } catch (const Error& e) {
    throw SpecError(std::string("grid: ") + e.what());
  }
}

VolterraKernel<double> kernel(const json& v, const Grid<double>& g) {
  const std::string where = "data.kernel";
  if (!v.is_object()) throw SpecError(where + ": expected an object");
  const json& form = require(v, "form", where);
  if (!form.is_string()) throw SpecError(where + ".form: expected a string");
  const auto f = form.get<std::string>();
  try {
    if (f == "constant") return VolterraKernel<double>::constant(g, number(require(v, "value", where), where));
    if (f == "separable")
      return VolterraKernel<double>::separable(g, coefficient(require(v, "C", where), g, where + ".C"),
                                               coefficient(require(v, "B", where), g, where + ".B"));
    if (f == "table") {
      const MatrixXd t = matrix(require(v, "values", where), where + ".values");
      if (t.rows() != g.size() || t.cols() != g.size())
        throw SpecError(where + ".values: must be n x n with n = grid.n");
      return VolterraKernel<double>::tabulated(g, t);
    }
    if (f == "exp_decay") {
      const double s = number_or(v, "scale", 1.0, where), r = number_or(v, "rate", 1.0, where);
      return VolterraKernel<double>::closure(g, [s, r](double t, double u) { return s * std::exp(-r * (t - u)); });
    }
  } catch (const Error& e) {
    throw SpecError(where + ": " + e.what());
  }
  throw SpecError(where + ": unknown kernel form '" + f + "'");
}

Nonlinearity<double> nonlinearity(const json& v) {
  const std::string where = "data.N";
  if (!v.is_object()) throw SpecError(where + ": expected an object");
  const json& name = require(v, "name", where);
  if (!name.is_string()) throw SpecError(where + ".name: expected a string");
  const auto n = name.get<std::string>();
  if (n == "linear") {
    const double c = number_or(v, "c", 1.0, where);
    return pointwise<double>([c](double x) { return c * x; });
  }
  if (n == "sin") {
    const double a = number_or(v, "amplitude", 1.0, where), w = number_or(v, "frequency", 1.0, where);
    return pointwise<double>([a, w](double x) { return a * std::sin(w * x); });
  }
  if (n == "exp") {
    const double s = number_or(v, "scale", 1.0, where), r = number_or(v, "rate", 1.0, where);
    return pointwise<double>([s, r](double x) { return s * std::exp(r * x); });
  }
  if (n == "polynomial") {
    const VectorXd c = vector(require(v, "coefficients", where), where + ".coefficients");
    if (c.size() == 0) throw SpecError(where + ".coefficients: must not be empty");
    return pointwise<double>([c](double x) {
      double acc = 0;
      for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * x + c[k];
      return acc;
    });
  }
  throw SpecError(where + ": unknown nonlinearity '" + n + "'");
}

NonnegMatrix<double> semilinear_operator(const json& v, const std::optional<Grid<double>>& g) {
  const std::string where = "data.K";
  try {
    if (v.is_array()) return NonnegMatrix<double>(matrix(v, where));
    if (!v.is_object()) throw SpecError(where + ": expected a matrix or a {form: volterra} object");
    const json& form = require(v, "form", where);
    if (form != "volterra") throw SpecError(where + ": the only operator form is 'volterra'");
    if (!g) throw SpecError(where + ": the volterra form needs a grid");
    QuadratureRule rule = QuadratureRule::left_endpoint;
    if (v.contains("rule")) {
      const json& r = v.at("rule");
      if (r == "explicit_trapezoid") rule = QuadratureRule::explicit_trapezoid;
      else if (r != "left_endpoint") throw SpecError(where + ".rule: expected left_endpoint or explicit_trapezoid");
    }
    const double k = number_or(v, "value", 1.0, where);
    return discretize_kernel(VolterraKernel<double>::constant(*g, k), rule);
  } catch (const Error& e) {
    throw SpecError(where + ": " + e.what());
  }
}

}  // namespace ingest

namespace {

bool needs_grid(const std::string& kind, const json& data) {
  if (kind == "classic" || kind == "varcoef" || kind == "kernel") return true;
  if (kind == "semilinear") return data.is_object() && data.contains("K") && data.at("K").is_object();
  return false;
}

void check_nonnegative(const VectorXd& v, const std::string& where) {
  if ((v.array() < 0).any()) throw SpecError(where + ": entries must be nonnegative");
}

// Builds every object the run will need so that schema and invariant errors
// surface before dispatch.
void check_data(const ProblemSpec& s) {
  using namespace ingest;
  const json& d = s.data;
  std::optional<Grid<double>> g;
  if (needs_grid(s.kind, d)) g = grid(s.grid);

  if (s.kind == "classic") {
    number(require(d, "A", "data"), "data.A");
    if (number(require(d, "B", "data"), "data.B") < 0) throw SpecError("data.B: must be nonnegative");
  } else if (s.kind == "varcoef") {
    coefficient(require(d, "A", "data"), g, "data.A");
    check_nonnegative(coefficient(require(d, "B", "data"), g, "data.B"), "data.B");
    if (d.contains("C")) check_nonnegative(coefficient(d.at("C"), g, "data.C"), "data.C");
  } else if (s.kind == "kernel") {
    kernel(require(d, "kernel", "data"), *g);
    coefficient(require(d, "A", "data"), g, "data.A");
  } else if (s.kind == "matrix" || s.kind == "resolvent") {
    const MatrixXd K = matrix(require(d, "K", "data"), "data.K");
    if (K.rows() != K.cols()) throw SpecError("data.K: must be square");
    if ((K.array() < 0).any()) throw SpecError("data.K: entries must be nonnegative");
    if (vector(require(d, "A", "data"), "data.A").size() != K.rows())
      throw SpecError("data.A: length must match data.K");
    const char* scalar = s.kind == "matrix" ? "B" : "s";
    const double v = number(require(d, scalar, "data"), std::string("data.") + scalar);
    if (s.kind == "matrix" && v < 0) throw SpecError("data.B: must be nonnegative");
  } else if (s.kind == "discrete") {
    const VectorXd A = vector(require(d, "A", "data"), "data.A");
    const VectorXd B = vector(require(d, "B", "data"), "data.B");
    if (A.size() == 0) throw SpecError("data.A: must not be empty");
    if (B.size() != A.size() - 1) throw SpecError("data.B: length must be len(A) - 1");
    check_nonnegative(B, "data.B");
    if (d.contains("C")) {
      const VectorXd C = vector(d.at("C"), "data.C");
      if (C.size() != A.size()) throw SpecError("data.C: length must match data.A");
      check_nonnegative(C, "data.C");
    }
  } else if (s.kind == "maxprin") {
    const json& nj = require(d, "n", "data");
    if (!nj.is_number_integer()) throw SpecError("data.n: expected an integer");
    const auto n = nj.get<long long>();
    if (n < 2 || n > kMaxDenseLaplacianNodes)
      throw SpecError("data.n: must lie in [2, " + std::to_string(kMaxDenseLaplacianNodes) + "]");
    if (number(require(d, "B", "data"), "data.B") < 0) throw SpecError("data.B: must be nonnegative");
    const json& x = require(d, "x", "data");
    if (x.is_array()) {
      if (vector(x, "data.x").size() != n) throw SpecError("data.x: length must equal data.n");
    } else if (x.is_object()) {
      const json& form = require(x, "form", "data.x");
      if (form == "green") {
        const VectorXd gv = vector(require(x, "g", "data.x"), "data.x.g");
        if (gv.size() != n) throw SpecError("data.x.g: length must equal data.n");
      } else if (form == "eigenvector") {
        number_or(x, "scale", 1.0, "data.x");
      } else {
        throw SpecError("data.x.form: expected eigenvector or green");
      }
    } else {
      throw SpecError("data.x: expected an array or a {form: ...} object");
    }
    if (d.contains("boundary")) {
      if (vector(d.at("boundary"), "data.boundary").size() != 2) throw SpecError("data.boundary: expected [left, right]");
    }
  } else if (s.kind == "semilinear") {
    const auto K = semilinear_operator(require(d, "K", "data"), g);
    const VectorXd x0 = coefficient(require(d, "x0", "data"), g, "data.x0");
    if (x0.size() != K.dim()) throw SpecError("data.x0: length must match the operator");
    nonlinearity(require(d, "N", "data"));
    if (number(require(d, "C", "data"), "data.C") < 0) throw SpecError("data.C: must be nonnegative");
    if (d.contains("x0_hat") && coefficient(d.at("x0_hat"), g, "data.x0_hat").size() != K.dim())
      throw SpecError("data.x0_hat: length must match the operator");
  }
}

}  // namespace

ProblemSpec parse_spec(const json& j) {
  if (!j.is_object()) throw SpecError("spec: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "grid" && key != "data" && key != "options")
      throw SpecError("spec: unknown top-level field '" + key + "'");
  }
  ProblemSpec s;
  const json& kind = ingest::require(j, "kind", "spec");
  if (!kind.is_string()) throw SpecError("spec.kind: expected a string");
  s.kind = kind.get<std::string>();
  const auto& kinds = problem_kinds();
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
    throw SpecError("spec.kind: unknown kind '" + s.kind + "'");

  s.data = ingest::require(j, "data", "spec");
  if (!s.data.is_object()) throw SpecError("spec.data: expected an object");
  s.options = j.value("options", json::object());
  if (!s.options.is_object()) throw SpecError("spec.options: expected an object");
  if (s.options.contains("tol") && !(ingest::number(s.options.at("tol"), "options.tol") > 0))
    throw SpecError("options.tol: must be positive");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) throw SpecError("spec.grid: expected an object");
    s.grid.a = ingest::number_or(g, "a", 0.0, "grid");
    s.grid.b = ingest::number_or(g, "b", 1.0, "grid");
    s.grid.n = ingest::integer_or(g, "n", 101, "grid");
    if (s.grid.n < 2 || s.grid.n > 100000) throw SpecError("grid.n: must lie in [2, 100000]");
    if (!(s.grid.b > s.grid.a)) throw SpecError("grid: need b > a");
  } else if (needs_grid(s.kind, s.data)) {
    throw SpecError("spec: kind '" + s.kind + "' needs a grid");
  }

  check_data(s);

  s.canonical = json::object();
  s.canonical["kind"] = s.kind;
  s.canonical["data"] = s.data;
  s.canonical["options"] = s.options;
  if (j.contains("grid")) s.canonical["grid"] = {{"a", s.grid.a}, {"b", s.grid.b}, {"n", s.grid.n}};
  return s;
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  return parse_spec(j);
}

std::string spec_digest(const json& canonical) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace gronwall::app
