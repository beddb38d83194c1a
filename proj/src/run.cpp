#include "app.hpp"
#include "ingest.hpp"

#include <chrono>

namespace gronwall::app {
namespace {

json to_json(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

double scale_of(const VectorXd& v) { return std::max(1.0, sup_norm(v)); }

double positive_excess(const VectorXd& lhs, const VectorXd& rhs) {
  return std::max(0.0, (lhs - rhs).maxCoeff());
}

void compare(Report& r, std::string name, double gap, double tol) {
  r.oracle_comparisons.push_back({std::move(name), gap, tol, gap <= tol});
}

double tol_or(const ProblemSpec& s, const RunOptions& o, double fallback) {
  if (o.tol) return *o.tol;
  return ingest::number_or(s.options, "tol", fallback, "options");
}

json admissibility_json(const Admissibility& a) {
  return {{"B_times_rho_upper", a.B_times_rho_upper}, {"admissible", a.admissible}};
}

void fill_bound(json& res, const BoundReport<double>& b) {
  res["method"] = std::string(to_string(b.method));
  res["bound"] = to_json(b.bound);
  res["admissibility"] = admissibility_json(b.admissibility);
  if (b.sharpness_residual) res["sharpness_residual"] = *b.sharpness_residual;
  if (b.tail_bound) res["tail_bound"] = *b.tail_bound;
  if (b.terms) res["terms"] = *b.terms;
}

void run_classic(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const auto g = ingest::grid(s.grid);
  const double A = ingest::number(s.data.at("A"), "data.A");
  const double B = ingest::number(s.data.at("B"), "data.B");
  const VectorXd y = classic_bound(A, B, g);
  r.results["method"] = "classic_exp";
  r.results["nodes"] = to_json(g.nodes());
  r.results["bound"] = to_json(y);
  r.results["bound_at_b"] = y[y.size() - 1];

  const CoefficientTriple<double> c(g, VectorXd::Constant(g.size(), A), VectorXd::Constant(g.size(), B),
                                    VectorXd::Ones(g.size()));
  const VectorXd sharp = varcoef_sharp_bound(c).bound;
  compare(r, "varcoef_sharp_constant_data", sup_norm(VectorXd(sharp - y)), tol_or(s, o, 1e-10) * scale_of(y));
}

void run_varcoef(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const auto g = ingest::grid(s.grid);
  const CoefficientTriple<double> c(
      g, ingest::coefficient(s.data.at("A"), g, "data.A"), ingest::coefficient(s.data.at("B"), g, "data.B"),
      s.data.contains("C") ? ingest::coefficient(s.data.at("C"), g, "data.C") : VectorXd(VectorXd::Ones(g.size())));
  const auto sharp = varcoef_sharp_bound(c);
  r.results["nodes"] = to_json(g.nodes());
  fill_bound(r.results, sharp);

  try {
    const auto simple = varcoef_simple_bound(c);
    r.results["simple_bound"] = to_json(simple.bound);
    r.results["simple_bound_applicable"] = true;
    compare(r, "sharp_below_simple", positive_excess(sharp.bound, simple.bound), 1e-9 * scale_of(simple.bound));
  } catch (const PreconditionError&) {
    r.results["simple_bound_applicable"] = false;
  }

  // Independent route: the separable kernel C(t) B(s) through the resolvent series.
  try {
    const auto k = VolterraKernel<double>::separable(g, c.C, c.B);
    const auto series = resolvent_kernel_bound(k, c.A, 1e-10);
    compare(r, "resolvent_kernel_series", sup_norm(VectorXd(series.bound - sharp.bound)),
            tol_or(s, o, g.step()) * scale_of(sharp.bound));
  } catch (const ResourceError&) {
    r.results["resolvent_kernel_series_skipped"] = true;
  }
}

void run_kernel(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const auto g = ingest::grid(s.grid);
  const auto k = ingest::kernel(s.data.at("kernel"), g);
  const VectorXd A = ingest::coefficient(s.data.at("A"), g, "data.A");
  const double tail_tol = ingest::number_or(s.options, "tail_tol", 1e-10, "options");
  const auto max_terms = ingest::integer_or(s.options, "max_terms", 400, "options");
  const auto res = resolvent_kernel_bound(k, A, tail_tol, static_cast<int>(max_terms));
  const auto hat = hat_majorant_bound(k, A);
  r.results["nodes"] = to_json(g.nodes());
  fill_bound(r.results, res);
  r.results["hat_bound"] = to_json(hat.bound);

  // The two routes coincide analytically for t-independent data; allow for
  // the O(h^2) trapezoid error of the series.
  const double x = k.sup_norm_bound() * g.length();
  const double h2 = g.step() * g.step() * (1 + x) * (1 + x);
  compare(r, "resolvent_below_hat", positive_excess(res.bound, hat.bound), (1e-9 + h2) * scale_of(hat.bound));
  const auto M = discretize_kernel(k, QuadratureRule::explicit_trapezoid);
  const VectorXd discrete = matrix_gronwall(M, A, 1.0).bound;
  const double budget = g.step() * (1 + x);
  compare(r, "discretized_matrix_gronwall", sup_norm(VectorXd(discrete - res.bound)),
          tol_or(s, o, budget) * scale_of(res.bound) + *res.tail_bound);
}

void run_matrix(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const NonnegMatrix<double> K = NonnegMatrix<double>(ingest::matrix(s.data.at("K"), "data.K")).with_bracket();
  const VectorXd A = ingest::vector(s.data.at("A"), "data.A");
  const double B = ingest::number(s.data.at("B"), "data.B");
  const auto rep = matrix_gronwall(K, A, B);
  fill_bound(r.results, rep);
  r.results["spectral_bracket"] = {{"lower", K.cached_bracket()->lower}, {"upper", K.cached_bracket()->upper}};

  const double tol = tol_or(s, o, 1e-10);
  compare(r, "fixed_point_residual", *rep.sharpness_residual, tol * (1 + sup_norm(A)) * (1 + B * K.inf_norm()));
  if (B > 0) {
    try {
      const auto neu = neumann_resolvent(K, 1 / B, VectorXd(A / B), 200000, 1e-13 * scale_of(rep.bound));
      compare(r, "neumann_series", sup_norm(VectorXd(neu.value - rep.bound)), 1e-8 * scale_of(rep.bound));
    } catch (const ConvergenceError&) {
      r.results["neumann_series_skipped"] = true;
    }
  }
}

void run_discrete(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const VectorXd A = ingest::vector(s.data.at("A"), "data.A");
  const VectorXd B = ingest::vector(s.data.at("B"), "data.B");
  std::optional<VectorXd> C;
  if (s.data.contains("C")) C = ingest::vector(s.data.at("C"), "data.C");
  const DiscreteInequality<double> ineq = C ? DiscreteInequality<double>(A, B, *C) : DiscreteInequality<double>(A, B);
  const auto rep = discrete_bound(ineq);
  fill_bound(r.results, rep);

  const double tol = tol_or(s, o, 1e-12) * scale_of(rep.bound);
  compare(r, "brute_force_discrete", sup_norm(VectorXd(brute_force_discrete(ineq) - rep.bound)), tol);
  const VectorXd via = matrix_gronwall(build_proof_matrix(ineq.B, ineq.C), ineq.A, 1.0).bound;
  compare(r, "proof_matrix_route", sup_norm(VectorXd(via - rep.bound)), tol);
}

void run_maxprin(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const auto n = s.data.at("n").get<long long>();
  const DirichletLaplacian1D<double> op(static_cast<Eigen::Index>(n));
  const double B = ingest::number(s.data.at("B"), "data.B");
  const double tol = tol_or(s, o, 1e-9);
  std::pair<double, double> boundary{0, 0};
  if (s.data.contains("boundary")) {
    const VectorXd b = ingest::vector(s.data.at("boundary"), "data.boundary");
    boundary = {b[0], b[1]};
  }
  const json& xs = s.data.at("x");
  VectorXd x;
  if (xs.is_array()) {
    x = ingest::vector(xs, "data.x");
  } else if (xs.at("form") == "eigenvector") {
    x = ingest::number_or(xs, "scale", 1.0, "data.x") * op.first_eigenvector();
  } else {
    const VectorXd gv = ingest::vector(xs.at("g"), "data.x.g");
    x = -green_apply(op, gv);
  }

  const auto mp = max_principle_check(op, x, boundary, B, tol);
  r.results["nodes"] = to_json(op.nodes());
  r.results["x"] = to_json(x);
  r.results["lambda1"] = op.lambda1();
  r.results["lambda1_closed_form"] = op.lambda1_closed_form();
  r.results["green_bracket"] = {{"lower", op.green_bracket().lower}, {"upper", op.green_bracket().upper}};
  r.results["premises_hold"] = mp.premises_hold;
  r.results["conclusion_holds"] = mp.conclusion_holds;
  r.results["certificate"] = to_json(mp.certificate);

  compare(r, "lambda1_closed_form", std::abs(op.lambda1() - op.lambda1_closed_form()), 1e-10 * op.lambda1());
  compare(r, "certificate_dominates_x", positive_excess(x, mp.certificate), 1e-8 * scale_of(mp.certificate));
  compare(r, "premises_imply_conclusion", mp.premises_hold && !mp.conclusion_holds ? x.maxCoeff() : 0.0, tol);
}

void run_semilinear(const ProblemSpec& s, const RunOptions& o, Report& r) {
  std::optional<Grid<double>> g;
  if (s.data.at("K").is_object()) g = ingest::grid(s.grid);
  const auto K = ingest::semilinear_operator(s.data.at("K"), g);
  const SemilinearProblem<double> p(K, ingest::coefficient(s.data.at("x0"), g, "data.x0"),
                                    ingest::nonlinearity(s.data.at("N")), ingest::number(s.data.at("C"), "data.C"));
  detail::require_c_rho(p, "semilinear");
  const double tol = tol_or(s, o, 1e-12);
  const int max_iter = static_cast<int>(ingest::integer_or(s.options, "max_iter", 10000, "options"));

  const auto sol = picard_solve(p, tol, max_iter);
  if (g) r.results["nodes"] = to_json(g->nodes());
  r.results["x"] = to_json(sol.x);
  r.results["trace"] = {{"iterations", sol.trace.iterations},
                        {"converged", sol.trace.converged},
                        {"final_residual", sol.trace.final_residual},
                        {"iterate_norms", sol.trace.iterate_norms}};
  r.results["spectral_bracket_upper"] = p.K.bracket().upper;
  compare(r, "picard_converged", sol.trace.converged ? 0.0 : sol.trace.iterate_norms.back(), tol);

  // Empirical Lipschitz probe over the range of the solution.
  Rng rng(o.seed);
  const double lo = sol.x.minCoeff() - 1, hi = sol.x.maxCoeff() + 1;
  std::vector<std::pair<VectorXd, VectorXd>> samples;
  for (int i = 0; i < 64; ++i) samples.emplace_back(rng.vector(p.K.dim(), lo, hi), rng.vector(p.K.dim(), lo, hi));
  const double est = lattice_lipschitz_estimate(p.N, samples);
  r.results["lipschitz_estimate"] = est;
  compare(r, "declared_C_dominates_estimate", std::max(0.0, est - p.C), 1e-9 * std::max(1.0, p.C));

  const auto second = picard_solve(p, tol, max_iter, std::optional<VectorXd>(VectorXd::Zero(p.K.dim())));
  const double res_tol = std::max(sol.trace.final_residual, second.trace.final_residual) * (1 + 1e-9) + 1e-300;
  const auto u = uniqueness_certificate(p, sol.x, second.x, res_tol);
  r.results["amplification"] = u.amplification;
  compare(r, "uniqueness_second_start", u.gap, 2 * res_tol * u.amplification);

  if (s.data.contains("x0_hat")) {
    const VectorXd x0h = ingest::coefficient(s.data.at("x0_hat"), g, "data.x0_hat");
    const SemilinearProblem<double> ph(K, x0h, p.N, p.C);
    const auto solh = picard_solve(ph, tol, max_iter);
    const VectorXd bound = continuous_dependence_bound(p, x0h);
    r.results["x_hat"] = to_json(solh.x);
    r.results["dependence_bound"] = to_json(bound);
    const double slack = 10 * u.amplification * (sol.trace.final_residual + solh.trace.final_residual) + 1e-12;
    compare(r, "continuous_dependence", positive_excess(abs_val(VectorXd(sol.x - solh.x)), bound), slack);
  }
}

void run_resolvent(const ProblemSpec& s, const RunOptions& o, Report& r) {
  const NonnegMatrix<double> K = NonnegMatrix<double>(ingest::matrix(s.data.at("K"), "data.K")).with_bracket();
  const VectorXd A = ingest::vector(s.data.at("A"), "data.A");
  const double sv = ingest::number(s.data.at("s"), "data.s");
  const VectorXd direct = resolvent_direct(K, sv, A);
  const double upper = K.cached_bracket()->upper;
  r.results["spectral_bracket"] = {{"lower", K.cached_bracket()->lower}, {"upper", upper}};
  r.results["direct"] = to_json(direct);
  r.results["direct_residual"] = resolvent_residual(K, sv, A, direct);

  const double tail_tol = tol_or(s, o, 1e-8);
  const auto steps = static_cast<int>(ingest::integer_or(s.options, "steps", 2000, "options"));
  const double gap = sv - upper;
  const double horizon = laplace_horizon(gap, sup_norm(A), tail_tol);
  const VectorXd lap = resolvent_laplace(K, sv, A, horizon, steps);
  const double trunc = sup_norm(A) * std::exp(-horizon * gap) / gap;
  const double quad = std::pow(horizon / steps * (sv + K.inf_norm()), 4) * horizon * sup_norm(A);
  r.results["laplace"] = to_json(lap);
  r.results["laplace_horizon"] = horizon;
  compare(r, "laplace_vs_direct", sup_norm(VectorXd(lap - direct)), trunc + quad + 1e-12 * scale_of(direct));

  try {
    const auto neu = neumann_resolvent(K, sv, A, 200000, 1e-13 * scale_of(direct));
    r.results["neumann"] = to_json(neu.value);
    r.results["neumann_terms"] = neu.terms;
    compare(r, "neumann_vs_direct", sup_norm(VectorXd(neu.value - direct)), 1e-8 * scale_of(direct));
  } catch (const ConvergenceError&) {
    r.results["neumann_skipped"] = true;
  }
}

}  // namespace

Report run_spec(const ProblemSpec& spec, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.spec_echo = {{"kind", spec.kind}, {"digest", spec_digest(spec.canonical)}, {"spec", spec.canonical}};
  r.results = json::object();
  if (spec.kind == "classic") run_classic(spec, opts, r);
  else if (spec.kind == "varcoef") run_varcoef(spec, opts, r);
  else if (spec.kind == "kernel") run_kernel(spec, opts, r);
  else if (spec.kind == "matrix") run_matrix(spec, opts, r);
  else if (spec.kind == "discrete") run_discrete(spec, opts, r);
  else if (spec.kind == "maxprin") run_maxprin(spec, opts, r);
  else if (spec.kind == "semilinear") run_semilinear(spec, opts, r);
  else if (spec.kind == "resolvent") run_resolvent(spec, opts, r);
  else throw SpecError("unknown kind '" + spec.kind + "'");
  r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace gronwall::app
