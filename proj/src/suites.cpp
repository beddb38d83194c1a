#include "app.hpp"

#include "gronwall/gronwall.hpp"

#include <functional>
#include <iomanip>
#include <sstream>

namespace gronwall::app {
namespace {

class Tally {
 public:
  explicit Tally(std::string prefix, std::vector<InvariantTally>& out) : prefix_(std::move(prefix)), out_(out) {}

  void record(const std::string& name, bool ok) {
    const auto full = prefix_ + "/" + name;
    for (auto& t : out_) {
      if (t.name == full) {
        (ok ? t.passed : t.failed)++;
        return;
      }
    }
    out_.push_back({full, ok ? 1 : 0, ok ? 0 : 1});
  }

 private:
  std::string prefix_;
  std::vector<InvariantTally>& out_;
};

double gap(const VectorXd& a, const VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

double rel_gap(const VectorXd& a, const VectorXd& b) {
  return gap(a, b) / std::max({1.0, sup_norm(a), sup_norm(b)});
}

void lattice_suite(Rng& rng, Tally& t) {
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = rng.integer(1, 12);
    const VectorXd x = rng.vector(n, -5, 5), y = rng.vector(n, -5, 5), z = rng.vector(n, -5, 5);
    t.record("join_commutative", join(x, y) == join(y, x));
    t.record("join_associative", join(join(x, y), z) == join(x, join(y, z)));
    t.record("join_upper_bound", leq(x, join(x, y)) && leq(y, join(x, y)));
    t.record("meet_duality", meet(x, y) == -join(VectorXd(-x), VectorXd(-y)));
    t.record("translation_invariance", leq(VectorXd(x + z), VectorXd(join(x, y) + z)));
    t.record("abs_triangle", leq(abs_val(VectorXd(x + y)), VectorXd(abs_val(x) + abs_val(y))));
    const VectorXd shrunk = x.cwiseProduct(rng.vector(n, 0, 1));
    t.record("norm_monotone", sup_norm(shrunk) <= sup_norm(x));
  }
}

void discrete_suite(Rng& rng, Tally& t) {
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = rng.integer(1, 20);
    const VectorXd A = rng.vector(n, 0, 2), B = rng.vector(n - 1, 0, 2);
    const bool with_c = trial % 2 == 1;
    const DiscreteInequality<double> ineq =
        with_c ? DiscreteInequality<double>(A, B, rng.vector(n, 0, 2)) : DiscreteInequality<double>(A, B);
    const VectorXd closed = discrete_bound(ineq).bound;
    t.record("closed_form_equals_brute_force", rel_gap(closed, brute_force_discrete(ineq)) <= 1e-12);
    const VectorXd via = matrix_gronwall(build_proof_matrix(ineq.B, ineq.C), ineq.A, 1.0).bound;
    t.record("closed_form_equals_proof_matrix", rel_gap(closed, via) <= 1e-12);
    const DiscreteInequality<double> bigger(VectorXd(A + rng.vector(n, 0, 1)), VectorXd(B + rng.vector(n - 1, 0, 1)));
    if (!with_c) t.record("monotone_in_data", leq(closed, discrete_bound(bigger).bound, 1e-12));
  }
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = rng.integer(1, 10);
    const NonnegMatrix<double> K(rng.matrix(n, n, 0, 1));
    const double B = 0.9 / (K.bracket().upper + 1e-3);
    const VectorXd A = rng.vector(n, -1, 2);
    const VectorXd x = matrix_gronwall(K, VectorXd(A - rng.vector(n, 0, 1)), B).bound;
    t.record("feasible_below_bound", verify_bound(K, A, B, x, 1e-9).bounded);
  }
}

void volterra_suite(Rng& rng, Tally& t) {
  const Grid<double> g(0.0, 1.0, 41);
  for (int trial = 0; trial < 100; ++trial) {
    const double c0 = rng.uniform(0.1, 1.5), c1 = rng.uniform(0, 1), w = rng.uniform(0.5, 4);
    const auto k = VolterraKernel<double>::closure(
        g, [=](double a, double b) { return c0 + c1 * a * b + 0.5 * std::pow(std::sin(w * (a - b)), 2); });
    const double a0 = rng.uniform(0.5, 2), a1 = rng.uniform(0, 2);
    const VectorXd A = g.sample([=](double s) { return a0 + a1 * s + 0.3 * std::sin(5 * s); });
    const auto res = resolvent_kernel_bound(k, A, 1e-10);
    const auto hat = hat_majorant_bound(k, A);
    t.record("resolvent_below_hat", leq(res.bound, hat.bound, 1e-9 * sup_norm(hat.bound)));

    const CoefficientTriple<double> c(g, g.sample([=](double s) { return a0 + a1 * s; }),
                                      g.sample([=](double s) { return c0 + c1 * s; }),
                                      g.sample([=](double s) { return 1 + c1 * s; }));
    const auto sharp = varcoef_sharp_bound(c).bound;
    t.record("sharp_below_simple", leq(sharp, varcoef_simple_bound(c).bound, 1e-9 * sup_norm(sharp)));
    t.record("sharp_residual_order_h",
             *varcoef_sharp_bound(c).sharpness_residual <= 10 * g.step() * std::max(1.0, sup_norm(sharp)));
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = rng.integer(2, 12);
    const Grid<double> gn(0.0, rng.uniform(0.2, 2), n);
    const auto M = discretize_kernel(VolterraKernel<double>::tabulated(gn, rng.matrix(n, n, 0, 2)));
    const VectorXd A = rng.vector(n, -1, 2);
    const VectorXd x = matrix_gronwall(M, VectorXd(A - rng.vector(n, 0, 1)), 1.0).bound;
    t.record("discretized_implication", leq(x, matrix_gronwall(M, A, 1.0).bound, 1e-10));
    t.record("discretized_nilpotent", spectral_bound(M, 1e-10).upper == 0);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Grid<double> gq(0.0, rng.uniform(0.5, 2), 60);
    const auto q = quasinilpotence_check(VolterraKernel<double>::tabulated(gq, rng.matrix(60, 60, 0, 1)), 20);
    t.record("gelfand_below_envelope", q.decreasing_to_zero);
  }
}

void resolvent_suite(Rng& rng, Tally& t) {
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = rng.integer(1, 12);
    const NonnegMatrix<double> K = NonnegMatrix<double>(rng.matrix(n, n, 0, 1)).with_bracket();
    const double upper = K.cached_bracket()->upper;
    const double s = upper * rng.uniform(1.05, 3) + 0.01;
    const VectorXd A = rng.vector(n, 0, 1);
    const VectorXd y = resolvent_direct(K, s, A);
    t.record("positive_on_cone", is_nonnegative(y));
    t.record("direct_residual", resolvent_residual(K, s, A, y) <= 1e-10);
    const VectorXd y2 = resolvent_direct(K, s, VectorXd(A + rng.vector(n, 0, 1)));
    t.record("monotone_in_A", leq(y, y2, 1e-12));
    try {
      const auto neu = neumann_resolvent(K, s, A, 100000, 1e-13);
      t.record("neumann_agrees", rel_gap(neu.value, y) <= 1e-8);
    } catch (const ConvergenceError&) {
      t.record("neumann_agrees", false);
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = rng.integer(1, 8);
    const NonnegMatrix<double> K = NonnegMatrix<double>(rng.matrix(n, n, 0, 1)).with_bracket();
    const double upper = K.cached_bracket()->upper;
    const double s = 2 * upper + 1;
    const VectorXd A = rng.vector(n, 0, 1);
    const double r = laplace_horizon(s - upper, sup_norm(A), 1e-8);
    const VectorXd lap = resolvent_laplace(K, s, A, r, 2000);
    t.record("laplace_agrees", rel_gap(lap, resolvent_direct(K, s, A)) <= 1e-4);
  }
}

void maxprin_suite(Rng& rng, Tally& t) {
  std::vector<DirichletLaplacian1D<double>> ops;
  for (Eigen::Index n : {2, 9, 30, 64}) ops.emplace_back(n);
  for (const auto& op : ops) {
    t.record("green_nonnegative", op.min_green_entry() >= -1e-12);
    t.record("lambda1_closed_form", std::abs(op.lambda1() - op.lambda1_closed_form()) <= 1e-10 * op.lambda1());
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& op = ops[static_cast<size_t>(rng.integer(0, static_cast<long long>(ops.size()) - 1))];
    const double B = rng.uniform(0, 0.95) * op.lambda1();
    const std::pair<double, double> bd{rng.uniform(-1, 0), rng.uniform(-1, 0)};
    const VectorXd harm = op.harmonic_part(bd);
    const VectorXd g = rng.vector(op.size(), 0, 1);
    const VectorXd x = harm + matrix_gronwall(op.green(), VectorXd(op.green() * VectorXd(B * harm - g)), B).bound;
    const auto res = max_principle_check(op, x, bd, B, 1e-9);
    t.record("constructive_soundness", res.premises_hold && res.conclusion_holds);
  }
  const auto& op = ops.back();
  const auto ev = evaluate_premises(op, op.first_eigenvector(), {0.0, 0.0}, 1.5 * op.lambda1(), 1e-12);
  t.record("witness_beyond_lambda1", ev.premises_hold && !ev.conclusion_holds);
}

void semilinear_suite(Rng& rng, Tally& t) {
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = rng.integer(1, 10);
    const MatrixXd K = rng.matrix(n, n, 0, 1);
    const VectorXd x = rng.vector(n, -1, 1);
    t.record("abs_transport", leq(abs_val(VectorXd(K * x)), VectorXd(K * abs_val(x)), 1e-14));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = rng.integer(2, 10);
    MatrixXd Km = rng.matrix(n, n, 0, 1);
    Km *= rng.uniform(0.2, 0.9) / Km.rowwise().sum().maxCoeff();
    const NonnegMatrix<double> K(Km);
    const auto N = pointwise<double>([](double v) { return std::sin(v); });
    const VectorXd x0 = rng.vector(n, -1, 1);
    const SemilinearProblem<double> p(K, x0, N, 1.0);
    const auto r = picard_solve(p, 1e-13, 1000);
    bool ratio_ok = r.trace.converged;
    const auto& d = r.trace.iterate_norms;
    for (size_t k = 1; k < d.size(); ++k)
      if (d[k - 1] > 1e-12 && d[k] / d[k - 1] > K.inf_norm() + 1e-6) ratio_ok = false;
    t.record("contraction_ratio", ratio_ok);

    const VectorXd x0h = x0 + rng.vector(n, -0.2, 0.2);
    const auto rh = picard_solve(SemilinearProblem<double>(K, x0h, N, 1.0), 1e-13, 1000);
    const VectorXd bound = continuous_dependence_bound(p, x0h);
    t.record("dependence_sound", leq(abs_val(VectorXd(r.x - rh.x)), bound, 1e-10));
  }
  for (int n : {50, 200}) {
    const Grid<double> g(0.0, 1.0, n);
    const auto K = discretize_kernel(VolterraKernel<double>::constant(g, 1.0), QuadratureRule::explicit_trapezoid);
    const SemilinearProblem<double> p(K, VectorXd::Ones(n), pointwise<double>([](double v) { return 5 * v; }), 5.0);
    const auto r = picard_solve(p, 1e-9, 5000);
    t.record("beyond_contraction_converges", r.trace.converged && std::abs(r.x[n - 1] / std::exp(5.0) - 1) < 0.05);
  }
}

using SuiteFn = void (*)(Rng&, Tally&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"lattice", lattice_suite}, {"discrete", discrete_suite},     {"volterra", volterra_suite},
      {"resolvent", resolvent_suite}, {"maxprin", maxprin_suite}, {"semilinear", semilinear_suite}};
  return r;
}

}  // namespace

bool SuiteSummary::all_pass() const {
  for (const auto& t : invariants)
    if (t.failed > 0) return false;
  return !invariants.empty();
}

std::string SuiteSummary::table() const {
  std::ostringstream out;
  size_t width = 9;
  for (const auto& t : invariants) width = std::max(width, t.name.size());
  out << "suite " << suite << ", seed " << seed << '\n';
  out << std::left << std::setw(static_cast<int>(width)) << "invariant" << "  " << std::right << std::setw(8)
      << "passed" << "  " << std::setw(8) << "failed" << "  status\n";
  long long p = 0, f = 0;
  for (const auto& t : invariants) {
    out << std::left << std::setw(static_cast<int>(width)) << t.name << "  " << std::right << std::setw(8)
        << t.passed << "  " << std::setw(8) << t.failed << "  " << (t.failed == 0 ? "PASS" : "FAIL") << '\n';
    p += t.passed;
    f += t.failed;
  }
  out << "total: " << p << " passed, " << f << " failed\n";
  return out.str();
}

SuiteSummary run_suite(const std::string& name, std::uint64_t seed) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw SpecError("unknown suite '" + name + "'");
  SuiteSummary s;
  s.suite = name;
  s.seed = seed;
  std::uint64_t index = 0;
  for (const auto& [suite, fn] : registry()) {
    // Each suite draws from its own stream so that "all" reproduces the
    // individual suites exactly.
    if (name == "all" || name == suite) {
      Rng rng(seed * 1000003ULL + index);
      Tally t(suite, s.invariants);
      fn(rng, t);
    }
    ++index;
  }
  return s;
}

}  // namespace gronwall::app
