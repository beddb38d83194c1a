#include "doctest.h"
#include "test_support.hpp"

using namespace gronwall;
using gronwall::test::mat;
using gronwall::test::max_abs_diff;
using gronwall::test::vec;

namespace {

DiscreteInequality<double> random_inequality(Rng& rng, bool with_c) {
  const auto n = rng.integer(1, 20);
  VectorXd A = rng.vector(n, 0, 2);
  VectorXd B = rng.vector(n - 1, 0, 2);
  if (with_c) return {A, B, rng.vector(n, 0, 2)};
  return {A, B};
}

double rel_gap(const VectorXd& a, const VectorXd& b) {
  return max_abs_diff(a, b) / std::max(1.0, std::max(sup_norm(a), sup_norm(b)));
}

}  // namespace

TEST_CASE("matrix_gronwall examples") {
  const VectorXd A = vec({1, -2, 0.5});
  const auto r0 = matrix_gronwall(NonnegMatrix<double>::zero(3), A, 0.7);
  CHECK(max_abs_diff(r0.bound, A) == 0);
  CHECK(r0.method == BoundMethod::matrix_sharp);

  // x1 <= 1, x2 <= 1 + x1  =>  bound (1, 2).
  const NonnegMatrix<double> K(mat({{0, 0}, {1, 0}}));
  const auto r = matrix_gronwall(K, vec({1, 1}), 1.0);
  CHECK(max_abs_diff(r.bound, vec({1, 2})) <= 1e-15);
  CHECK(r.admissibility.admissible);
  CHECK(r.admissibility.B_times_rho_upper == 0);
  CHECK(*r.sharpness_residual <= 1e-15);

  const NonnegMatrix<double> P(mat({{2, 1}, {1, 2}}));
  CHECK_THROWS_AS(matrix_gronwall(P, vec({1, 1}), 0.5), AdmissibilityError);
  try {
    matrix_gronwall(P, vec({1, 1}), 0.3);
  } catch (const AdmissibilityError& e) {
    FAIL("B = 0.3 with rho = 3 is admissible: " << e.what());
  }
  CHECK_THROWS_AS(matrix_gronwall(P, vec({1, 1}), -1.0), ParameterError);
}

TEST_CASE("matrix_gronwall dominates every constructed feasible vector") {
  Rng rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = rng.integer(1, 10);
    const NonnegMatrix<double> K(rng.matrix(n, n, 0, 1));
    const double B = 0.9 / (K.bracket().upper + 1e-3);
    const VectorXd A = rng.vector(n, -1, 2);
    const auto rep = matrix_gronwall(K, A, B);
    CHECK(*rep.sharpness_residual <= 1e-10 * (1 + sup_norm(A)));

    // x = (I - BK)^{-1}(A - w) with w >= 0 is feasible.
    const VectorXd w = rng.vector(n, 0, 1);
    const VectorXd x = matrix_gronwall(K, VectorXd(A - w), B).bound;
    const auto v = verify_bound(K, A, B, x, 1e-9);
    CHECK(v.feasible);
    CHECK(v.bounded);
  }
}

TEST_CASE("verify_bound at the fixed point and below it") {
  Rng rng(43);
  const NonnegMatrix<double> K(rng.matrix(4, 4, 0, 1));
  const double B = 0.5 / K.bracket().upper;
  const VectorXd A = rng.vector(4, 0, 1);
  const VectorXd y = matrix_gronwall(K, A, B).bound;
  const auto at = verify_bound(K, A, B, y, 1e-10);
  CHECK(at.feasible);
  CHECK(at.bounded);

  const auto Z = NonnegMatrix<double>::zero(4);
  const auto below = verify_bound(Z, A, 1.0, VectorXd(A.array() - 0.1), 0.0);
  CHECK(below.feasible);
  CHECK(below.bounded);

  const auto above = verify_bound(Z, A, 1.0, VectorXd(A.array() + 0.1), 0.0);
  CHECK_FALSE(above.feasible);
  CHECK_FALSE(above.bounded);
  CHECK_THROWS_AS(verify_bound(Z, A, 1.0, vec({1}), 0.0), DimensionError);
}

TEST_CASE("build_proof_matrix") {
  const auto K1 = build_proof_matrix(vec({0.7}));
  CHECK(K1.matrix() == mat({{0, 0}, {0.7, 0}}));
  const auto K0 = build_proof_matrix(VectorXd(0));
  CHECK(K0.dim() == 1);
  CHECK(K0(0, 0) == 0);
  const auto K2 = build_proof_matrix(vec({1, 1}));
  const MatrixXd K2m = K2.matrix();
  CHECK(K2m == mat({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}));
  CHECK((K2m * K2m * K2m).isZero(0));
  const auto br = spectral_bound(K2, 1e-10);
  CHECK(br.upper == 0);
  CHECK_THROWS_AS(build_proof_matrix(vec({-1})), InvariantViolation);
}

TEST_CASE("discrete_bound examples") {
  const DiscreteInequality<double> ex(vec({1, 1, 1}), vec({1, 1}));
  CHECK(max_abs_diff(discrete_bound(ex).bound, vec({1, 2, 4})) == 0);
  CHECK(max_abs_diff(brute_force_discrete(ex), vec({1, 2, 4})) == 0);
  CHECK(discrete_bound(ex).method == BoundMethod::discrete_closed_form);

  const VectorXd A = vec({3, -1, 2, 0.5});
  const DiscreteInequality<double> noB(A, VectorXd::Zero(3));
  CHECK(max_abs_diff(discrete_bound(noB).bound, A) == 0);

  // One step with C: y1 = A1 + c2 * b * A0.
  const double b = 0.3, c1 = 0.8, c2 = 1.7;
  const DiscreteInequality<double> withC(vec({1, 1}), vec({b}), vec({c1, c2}));
  const auto rc = discrete_bound(withC);
  CHECK(rc.method == BoundMethod::discrete_varcoef);
  CHECK(max_abs_diff(rc.bound, vec({1, 1 + c2 * b})) <= 1e-15);

  const DiscreteInequality<double> homog(VectorXd::Zero(6), vec({1, 2, 3, 4, 5}));
  CHECK(brute_force_discrete(homog).isZero(0));

  const DiscreteInequality<double> single(vec({2.5}), VectorXd(0));
  CHECK(discrete_bound(single).bound == vec({2.5}));

  CHECK_THROWS_AS(DiscreteInequality<double>(vec({1, 1}), vec({-1})), InvariantViolation);
  CHECK_THROWS_AS(DiscreteInequality<double>(vec({1, 1}), vec({1, 1})), DimensionError);
  CHECK_THROWS_AS(DiscreteInequality<double>(vec({1, 1}), vec({1}), vec({1, -1})), InvariantViolation);
}

TEST_CASE("three routes to the discrete bound agree") {
  Rng rng(47);
  for (int trial = 0; trial < 1000; ++trial) {
    const bool with_c = trial % 2 == 1;
    const auto ineq = random_inequality(rng, with_c);
    const VectorXd closed = discrete_bound(ineq).bound;
    const VectorXd brute = brute_force_discrete(ineq);
    const VectorXd via_matrix = matrix_gronwall(build_proof_matrix(ineq.B, ineq.C), ineq.A, 1.0).bound;
    CHECK(rel_gap(closed, brute) <= 1e-12);
    CHECK(rel_gap(closed, via_matrix) <= 1e-12);
    CHECK(*discrete_bound(ineq).sharpness_residual <= 1e-12 * std::max(1.0, sup_norm(closed)));
  }
}

TEST_CASE("abstract maximum principle, constructive form") {
  // x = P + B K x + K g with P <= 0 and g <= 0 must satisfy x <= 0.
  Rng rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = rng.integer(1, 12);
    const NonnegMatrix<double> K(rng.matrix(n, n, 0, 1));
    const double B = rng.uniform(0, 0.99) / K.bracket().upper;
    const VectorXd P = rng.vector(n, -1, 0);
    const VectorXd g = rng.vector(n, -1, 0);
    const VectorXd x = matrix_gronwall(K, VectorXd(P + K.matrix() * g), B).bound;
    CHECK(leq(x, VectorXd::Zero(n), 1e-9));
  }
}

TEST_CASE("discrete bound is monotone in A and B") {
  Rng rng(59);
  for (int trial = 0; trial < 500; ++trial) {
    const auto ineq = random_inequality(rng, false);
    const auto n = ineq.size();
    const DiscreteInequality<double> bigger(VectorXd(ineq.A + rng.vector(n, 0, 1)),
                                            VectorXd(ineq.B + rng.vector(n - 1, 0, 1)));
    CHECK(leq(discrete_bound(ineq).bound, discrete_bound(bigger).bound, 1e-12));
  }
}
