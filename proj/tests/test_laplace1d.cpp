#include "doctest.h"
#include "test_support.hpp"

#include <numbers>

using namespace gronwall;
using gronwall::test::max_abs_diff;

namespace {

// Constructive instance: x = harmonic(p, q) + y with (L_h - B) y = B harmonic - g,
// g >= 0 and p, q <= 0, so that L_h x - B x = -g <= 0.
VectorXd constructive_x(const DirichletLaplacian1D<double>& op, double B, const VectorXd& g,
                        std::pair<double, double> boundary) {
  const VectorXd harm = op.harmonic_part(boundary);
  const VectorXd rhs = op.green() * VectorXd(B * harm - g);
  return harm + matrix_gronwall(op.green(), rhs, B).bound;
}

}  // namespace

TEST_CASE("n = 3 example") {
  const DirichletLaplacian1D<double> op(3);
  CHECK(op.step() == 0.25);
  const MatrixXd L = op.laplacian_matrix();
  CHECK(L(0, 0) == 32);
  CHECK(L(1, 0) == -16);
  CHECK(L(0, 2) == 0);
  CHECK(op.lambda1() == doctest::Approx(9.37258300203048).epsilon(1e-12));
  CHECK(op.lambda1() == doctest::Approx(64 * std::pow(std::sin(std::numbers::pi / 8), 2)).epsilon(1e-12));
  CHECK(op.green_bracket().contains(1 / op.lambda1(), 1e-14));
}

TEST_CASE("Green matrix structure") {
  for (Eigen::Index n : {2, 5, 50, 400}) {
    const DirichletLaplacian1D<double> op(n);
    const MatrixXd& G = op.green().matrix();
    CHECK(max_abs_diff(G, MatrixXd(G.transpose())) <= 1e-12 * G.maxCoeff());
    CHECK(op.min_green_entry() >= -1e-12);
    const MatrixXd LG = op.laplacian_matrix() * G;
    CHECK(max_abs_diff(LG, MatrixXd::Identity(n, n)) <= 1e-10 * std::max<double>(1, n));
    CHECK(std::abs(op.lambda1() - op.lambda1_closed_form()) <= 1e-10 * op.lambda1());
  }
  CHECK_THROWS_AS(DirichletLaplacian1D<double>(1), ParameterError);
  CHECK_THROWS_AS(DirichletLaplacian1D<double>(kMaxDenseLaplacianNodes + 1), ResourceError);
}

TEST_CASE("continuum limit of lambda1 is second order") {
  std::vector<double> err, hs;
  for (Eigen::Index n : {50, 100, 200, 400}) {
    const DirichletLaplacian1D<double> op(n);
    err.push_back(std::abs(op.lambda1() - std::numbers::pi * std::numbers::pi));
    hs.push_back(op.step());
  }
  for (size_t k = 1; k < err.size(); ++k) {
    const double order = std::log(err[k - 1] / err[k]) / std::log(hs[k - 1] / hs[k]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.05));
    // C = err / h^2 tends to pi^4 / 12.
    CHECK(err[k] / (hs[k] * hs[k]) == doctest::Approx(std::pow(std::numbers::pi, 4) / 12).epsilon(1e-3));
  }
}

TEST_CASE("green_apply") {
  const DirichletLaplacian1D<double> op(99);
  const VectorXd z = green_apply(op, VectorXd::Ones(99));
  const VectorXd exact = (op.nodes().array() * (1 - op.nodes().array()) / 2).matrix();
  // The discrete solution of -u'' = 1 is exact at the nodes (u is quadratic).
  CHECK(max_abs_diff(z, exact) <= 1e-12);
  CHECK(max_abs_diff(op.apply(z), VectorXd::Ones(99)) <= 1e-9);

  const VectorXd& v1 = op.first_eigenvector();
  CHECK(v1.minCoeff() > 0);
  CHECK(max_abs_diff(green_apply(op, v1), VectorXd(v1 / op.lambda1())) <= 1e-9);

  Rng rng(79);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorXd f = rng.vector(99, 0, 1);
    CHECK(is_nonnegative(green_apply(op, f)));
  }
  CHECK_THROWS_AS(green_apply(op, VectorXd::Ones(3)), DimensionError);
}

TEST_CASE("apply and harmonic_part") {
  const DirichletLaplacian1D<double> op(20);
  // Affine functions are discrete-harmonic.
  const auto bd = std::make_pair(-0.3, 1.7);
  CHECK(sup_norm(op.apply(op.harmonic_part(bd), bd)) <= 1e-9);
  const VectorXd q = (op.nodes().array() * op.nodes().array()).matrix();
  CHECK(max_abs_diff(op.apply(q, {0.0, 1.0}), VectorXd::Constant(20, -2.0)) <= 1e-9);
}

TEST_CASE("continuous Green oracle") {
  CHECK(continuous_green_oracle(0.3, 0.3) == doctest::Approx(0.21));
  CHECK(continuous_green_oracle(0.0, 0.4) == 0);
  CHECK(continuous_green_oracle(1.0, 0.4) == 0);
  CHECK(continuous_green_oracle(0.2, 0.7) == continuous_green_oracle(0.7, 0.2));
  CHECK_THROWS_AS(continuous_green_oracle(-0.1, 0.5), ParameterError);
  CHECK_THROWS_AS(continuous_green_oracle(0.5, 1.5), ParameterError);

  std::vector<double> C;
  for (Eigen::Index n : {100, 200, 400}) {
    const DirichletLaplacian1D<double> op(n);
    double gap = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        gap = std::max(gap, std::abs(op.green()(i, j) / op.step() -
                                     continuous_green_oracle(op.nodes()[i], op.nodes()[j])));
    C.push_back(gap / (op.step() * op.step()));
  }
  // The 1D three-point scheme reproduces G exactly at the nodes.
  for (double c : C) CHECK(c <= 1.0);
}

TEST_CASE("max_principle_check examples") {
  const DirichletLaplacian1D<double> op(40);
  const VectorXd& v1 = op.first_eigenvector();
  const auto r = max_principle_check(op, VectorXd(-v1), {0.0, 0.0}, op.lambda1() / 2, 1e-12);
  CHECK(r.premises_hold);
  CHECK(r.conclusion_holds);
  CHECK(leq(r.certificate, VectorXd::Zero(40), 1e-12));

  const auto z = max_principle_check(op, VectorXd::Zero(40), {0.0, 0.0}, 3.0, 0.0);
  CHECK(z.premises_hold);
  CHECK(z.conclusion_holds);

  Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd x = -green_apply(op, rng.vector(40, 0, 1));
    const auto res = max_principle_check(op, x, {0.0, 0.0}, 0.0, 1e-12);
    CHECK(res.premises_hold);
    CHECK(res.conclusion_holds);
  }

  CHECK_THROWS_AS(max_principle_check(op, v1, {0.0, 0.0}, op.lambda1(), 1e-12), AdmissibilityError);
  CHECK_THROWS_AS(max_principle_check(op, v1, {0.0, 0.0}, -1.0, 1e-12), ParameterError);
  CHECK_THROWS_AS(max_principle_check(op, VectorXd::Zero(3), {0.0, 0.0}, 1.0, 1e-12), DimensionError);
}

TEST_CASE("certificate dominates x") {
  const DirichletLaplacian1D<double> op(25);
  Rng rng(89);
  for (int trial = 0; trial < 500; ++trial) {
    const VectorXd x = rng.vector(25, -1, 1);
    const auto bd = std::make_pair(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double B = rng.uniform(0, 0.95) * op.lambda1();
    const auto res = max_principle_check(op, x, bd, B, 0.0);
    CHECK(leq(x, res.certificate, 1e-8 * (1 + sup_norm(res.certificate))));
  }
}

TEST_CASE("maximum principle soundness, randomized") {
  std::vector<DirichletLaplacian1D<double>> ops;
  for (Eigen::Index n : {2, 7, 16, 33, 60}) ops.emplace_back(n);
  Rng rng(97);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto& op = ops[static_cast<size_t>(rng.integer(0, static_cast<long long>(ops.size()) - 1))];
    const double B = rng.uniform(0, 0.95) * op.lambda1();
    const VectorXd g = rng.vector(op.size(), 0, 1);
    const auto bd = std::make_pair(rng.uniform(-1, 0), rng.uniform(-1, 0));
    const VectorXd x = constructive_x(op, B, g, bd);
    const auto res = max_principle_check(op, x, bd, B, 1e-9);
    REQUIRE(res.premises_hold);
    CHECK(res.conclusion_holds);
    CHECK(x.maxCoeff() <= 1e-9);
  }
}

TEST_CASE("beyond lambda1 the conclusion can fail") {
  const DirichletLaplacian1D<double> op(50);
  const VectorXd x = op.first_eigenvector();
  const auto ev = evaluate_premises(op, x, {0.0, 0.0}, 1.5 * op.lambda1(), 1e-12);
  CHECK(ev.premises_hold);
  CHECK_FALSE(ev.conclusion_holds);
}
