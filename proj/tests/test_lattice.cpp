#include "doctest.h"
#include "test_support.hpp"

#include <limits>

using namespace gronwall;
using gronwall::test::vec;

TEST_CASE("join, meet and abs_val on small vectors") {
  CHECK(join(vec({1, -2}), vec({0, 3})) == vec({1, 3}));
  CHECK(join(vec({-1, -1}), vec({-2, 0})) == vec({-1, 0}));
  CHECK(meet(vec({1, -2}), vec({0, 3})) == vec({0, -2}));
  CHECK(meet(vec({5}), vec({-5})) == vec({-5}));
  CHECK(abs_val(vec({-3, 2, 0})) == vec({3, 2, 0}));
  CHECK(abs_val(VectorXd::Zero(4)) == VectorXd::Zero(4));

  const VectorXd x = vec({0.25, -7, 3});
  CHECK(join(x, x) == x);
  CHECK(meet(x, x) == x);
}

TEST_CASE("leq and sup_norm") {
  CHECK(leq(vec({1, 2}), vec({1, 2}), 0.0));
  CHECK(leq(vec({1 + 1e-12, 2}), vec({1, 2}), 1e-9));
  CHECK_FALSE(leq(vec({2, 0}), vec({1, 5}), 0.0));
  CHECK(sup_norm(vec({-3, 2})) == 3);
  CHECK(sup_norm(VectorXd::Zero(3)) == 0);
  CHECK_THROWS_AS(leq(vec({1}), vec({1}), -1.0), ParameterError);
}

TEST_CASE("dimension mismatch and NaN are rejected") {
  CHECK_THROWS_AS(join(vec({1, 2}), vec({1})), DimensionError);
  CHECK_THROWS_AS(meet(vec({1, 2}), vec({1})), DimensionError);
  CHECK_THROWS_AS(leq(vec({1, 2}), vec({1}), 0.0), DimensionError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(join(vec({nan}), vec({1})), InvariantViolation);
  CHECK_THROWS_AS(abs_val(vec({1, nan})), InvariantViolation);
  CHECK_THROWS_AS(sup_norm(vec({std::numeric_limits<double>::infinity()})), InvariantViolation);
}

TEST_CASE("lattice axioms hold on random vectors") {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = rng.integer(1, 12);
    const VectorXd x = rng.vector(n, -5, 5);
    const VectorXd y = rng.vector(n, -5, 5);
    const VectorXd z = rng.vector(n, -5, 5);

    CHECK(join(x, y) == join(y, x));
    CHECK(join(join(x, y), z) == join(x, join(y, z)));
    CHECK(leq(x, join(x, y)));
    CHECK(leq(y, join(x, y)));
    // Least upper bound: any common upper bound dominates the join.
    const VectorXd u = join(x, y) + rng.vector(n, 0, 1);
    CHECK(leq(join(x, y), u));
    CHECK(meet(x, y) == -join(VectorXd(-x), VectorXd(-y)));
    CHECK(leq(meet(x, y), x));

    // Compatibility with the vector structure.
    const double c = rng.uniform(0, 3);
    if (leq(x, y)) {
      CHECK(leq(VectorXd(x + z), VectorXd(y + z)));
      CHECK(leq(VectorXd(c * x), VectorXd(c * y)));
    }
    CHECK(leq(VectorXd(x + z), VectorXd(join(x, y) + z)));
  }
}

TEST_CASE("absolute value properties") {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = rng.integer(1, 10);
    const VectorXd x = rng.vector(n, -3, 3);
    const VectorXd y = rng.vector(n, -3, 3);
    CHECK(abs_val(x) == abs_val(VectorXd(-x)));
    CHECK(is_nonnegative(abs_val(x)));
    CHECK(leq(abs_val(VectorXd(x + y)), VectorXd(abs_val(x) + abs_val(y))));
    CHECK(sup_norm(abs_val(x)) == sup_norm(x));
    // Normality of the norm.
    if (leq(abs_val(x), abs_val(y))) CHECK(sup_norm(x) <= sup_norm(y));
    const VectorXd shrunk = x.cwiseProduct(rng.vector(n, 0, 1));
    CHECK(leq(abs_val(shrunk), abs_val(x)));
    CHECK(sup_norm(shrunk) <= sup_norm(x));
  }
  // |x| <= 0 forces x = 0.
  const VectorXd zero = VectorXd::Zero(5);
  CHECK(leq(abs_val(zero), zero));
  CHECK_FALSE(leq(abs_val(vec({0, 1e-300})), VectorXd::Zero(2)));
}

TEST_CASE("works for long double") {
  using V = Vector<long double>;
  V x(2), y(2);
  x << 1.0L, -2.0L;
  y << 0.0L, 3.0L;
  const V j = join(x, y);
  CHECK(j[0] == 1.0L);
  CHECK(j[1] == 3.0L);
  CHECK(sup_norm(abs_val(x)) == 2.0L);
}

TEST_CASE("grid construction") {
  const Grid<double> g(0.0, 2.0, 5);
  CHECK(g.step() == doctest::Approx(0.5));
  CHECK(g[0] == 0.0);
  CHECK(g[4] == 2.0);
  CHECK_THROWS_AS(Grid<double>(1.0, 1.0, 4), ParameterError);
  CHECK_THROWS_AS(Grid<double>(0.0, 1.0, 1), ParameterError);
}
