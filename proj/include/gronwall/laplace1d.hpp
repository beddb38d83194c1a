#pragma once

// The 1D Dirichlet Laplacian on [0, 1] and its discrete maximum principle.
//
// Interior nodes t_i = (i + 1) h, i = 0..n-1, h = 1/(n+1). Boundary values
// are carried separately as a pair (left, right). The continuous kernel of
// -d^2/dt^2 is spanned by affine functions, so the discrete projector onto
// it is the linear interpolant of the boundary pair.

#include "gronwall/discrete.hpp"
#include "gronwall/lattice.hpp"
#include "gronwall/spectral.hpp"

#include <numbers>
#include <utility>

namespace gronwall {

inline constexpr Eigen::Index kMaxDenseLaplacianNodes = 8000;

namespace detail {

/// Solves tridiag(-1, 2, -1) z = h^2 f (i.e. L_h z = f) by the Thomas algorithm.
template <std::floating_point Scalar>
Vector<Scalar> solve_dirichlet_tridiagonal(const Vector<Scalar>& f, Scalar h) {
  const auto n = f.size();
  Vector<Scalar> c(n), d(n);
  Scalar denom = 2;
  c[0] = Scalar(-1) / denom;
  d[0] = h * h * f[0] / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = 2 + c[i - 1];
    c[i] = Scalar(-1) / denom;
    d[i] = (h * h * f[i] + d[i - 1]) / denom;
  }
  Vector<Scalar> z(n);
  z[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) z[i] = d[i] - c[i] * z[i + 1];
  return z;
}

}  // namespace detail

template <std::floating_point Scalar>
class DirichletLaplacian1D {
 public:
  explicit DirichletLaplacian1D(Eigen::Index n) : n_(n) {
    if (n < 2) throw ParameterError("DirichletLaplacian1D: need n >= 2 interior nodes");
    if (n > kMaxDenseLaplacianNodes)
      throw ResourceError("DirichletLaplacian1D: n too large for dense Green matrix", n);
    h_ = Scalar(1) / Scalar(n + 1);
    nodes_ = Vector<Scalar>::LinSpaced(n, h_, Scalar(n) * h_);

    Matrix<Scalar> G(n, n);
    Vector<Scalar> e = Vector<Scalar>::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[j] = 1;
      G.col(j) = detail::solve_dirichlet_tridiagonal(e, h_);
      e[j] = 0;
    }
    min_green_entry_ = G.minCoeff();
    if (min_green_entry_ < Scalar(-1e-12)) throw NumericError("DirichletLaplacian1D: Green matrix not positive");
    G = G.cwiseMax(Scalar(0));

    compute_first_eigenpair();
    green_ = NonnegMatrix<Scalar>(std::move(G));
    if (std::abs(lambda1_ - lambda1_closed_form()) > Scalar(1e-8) * lambda1_)
      throw NumericError("DirichletLaplacian1D: inverse iteration disagrees with closed-form eigenvalue");
    green_ = green_with_bracket();
  }

  Eigen::Index size() const { return n_; }
  Scalar step() const { return h_; }
  const Vector<Scalar>& nodes() const { return nodes_; }
  const NonnegMatrix<Scalar>& green() const { return green_; }
  Scalar min_green_entry() const { return min_green_entry_; }

  /// First eigenvalue of L_h from inverse iteration.
  Scalar lambda1() const { return lambda1_; }
  /// 4/h^2 sin^2(pi h / 2).
  Scalar lambda1_closed_form() const {
    const Scalar s = std::sin(std::numbers::pi_v<Scalar> * h_ / 2);
    return 4 * s * s / (h_ * h_);
  }
  /// Collatz-Wielandt enclosure of mu_1 = rho(green) = 1/lambda1.
  const SpectralBracket<Scalar>& green_bracket() const { return bracket_; }
  /// Positive first eigenvector, unit 2-norm.
  const Vector<Scalar>& first_eigenvector() const { return v1_; }

  /// Dense L_h = (1/h^2) tridiag(-1, 2, -1).
  Matrix<Scalar> laplacian_matrix() const {
    Matrix<Scalar> L = Matrix<Scalar>::Zero(n_, n_);
    const Scalar w = 1 / (h_ * h_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      L(i, i) = 2 * w;
      if (i > 0) L(i, i - 1) = -w;
      if (i + 1 < n_) L(i, i + 1) = -w;
    }
    return L;
  }

  /// Discrete -x'' at interior nodes with the given boundary values.
  template <typename Derived>
  Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& x, std::pair<Scalar, Scalar> boundary = {0, 0}) const {
    detail::require_same_size(x.size(), n_, "DirichletLaplacian1D::apply");
    const Scalar w = 1 / (h_ * h_);
    Vector<Scalar> out(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const Scalar left = i > 0 ? x[i - 1] : boundary.first;
      const Scalar right = i + 1 < n_ ? x[i + 1] : boundary.second;
      out[i] = w * (2 * x[i] - left - right);
    }
    return out;
  }

  /// Kernel component of x: the affine interpolant of the boundary pair.
  Vector<Scalar> harmonic_part(std::pair<Scalar, Scalar> boundary) const {
    return (boundary.first * (1 - nodes_.array()) + boundary.second * nodes_.array()).matrix();
  }

 private:
  void compute_first_eigenpair() {
    Vector<Scalar> x = Vector<Scalar>::Ones(n_).normalized();
    Scalar mu = 0;
    Scalar lo = 0, hi = 0;
    int it = 0;
    for (; it < 200; ++it) {
      const Vector<Scalar> y = detail::solve_dirichlet_tridiagonal(x, h_);
      mu = x.dot(y);
      lo = (y.array() / x.array()).minCoeff();
      hi = (y.array() / x.array()).maxCoeff();
      x = y.normalized();
      if (hi - lo <= Scalar(1e-14) * mu && it > 2) break;
    }
    v1_ = x;
    lambda1_ = 1 / mu;
    bracket_.lower = std::min(lo, mu);
    bracket_.upper = std::max(hi, mu);
    bracket_.iterations = it + 1;
    bracket_.converged = (hi - lo) <= Scalar(1e-12) * mu;
  }

  NonnegMatrix<Scalar> green_with_bracket() const {
    // The eigen-bracket of green is already known; cache it instead of
    // re-running the generic power iteration on a dense matrix.
    return green_.with_bracket_value(bracket_);
  }

  Eigen::Index n_;
  Scalar h_;
  Vector<Scalar> nodes_;
  NonnegMatrix<Scalar> green_;
  Scalar min_green_entry_ = 0;
  Scalar lambda1_ = 0;
  Vector<Scalar> v1_;
  SpectralBracket<Scalar> bracket_;
};

/// z = green f, the solution of -z'' = f with zero boundary values.
template <std::floating_point Scalar, typename Derived>
Vector<Scalar> green_apply(const DirichletLaplacian1D<Scalar>& op, const Eigen::MatrixBase<Derived>& f) {
  detail::require_same_size(f.size(), op.size(), "green_apply");
  detail::require_finite(f, "green_apply");
  return op.green() * f;
}

/// G(t, s) = min(t, s) (1 - max(t, s)).
template <std::floating_point Scalar>
Scalar continuous_green_oracle(Scalar t, Scalar s) {
  if (!(t >= 0 && t <= 1 && s >= 0 && s <= 1))
    throw ParameterError("continuous_green_oracle: arguments must lie in [0, 1]");
  return std::min(t, s) * (1 - std::max(t, s));
}

template <std::floating_point Scalar>
struct PremiseEvaluation {
  bool premises_hold = false;
  bool conclusion_holds = false;
  /// L_h x - B x at the interior nodes.
  Vector<Scalar> defect;
};

/// Evaluates -x'' <= B x, boundary <= 0 and x <= 0 without any admissibility
/// requirement on B.
template <std::floating_point Scalar, typename Derived>
PremiseEvaluation<Scalar> evaluate_premises(const DirichletLaplacian1D<Scalar>& op,
                                            const Eigen::MatrixBase<Derived>& x,
                                            std::pair<Scalar, Scalar> boundary, Scalar B, Scalar tol) {
  detail::require_same_size(x.size(), op.size(), "max_principle_check");
  detail::require_finite(x, "max_principle_check");
  if (!std::isfinite(boundary.first) || !std::isfinite(boundary.second))
    throw InvariantViolation("max_principle_check: non-finite boundary value");
  PremiseEvaluation<Scalar> ev;
  ev.defect = op.apply(x, boundary) - B * x;
  const bool boundary_ok = boundary.first <= tol && boundary.second <= tol;
  ev.premises_hold = boundary_ok && (ev.defect.array() <= tol).all();
  ev.conclusion_holds = boundary_ok && (x.array() <= tol).all();
  return ev;
}

template <std::floating_point Scalar>
struct MaxPrincipleResult {
  bool premises_hold = false;
  bool conclusion_holds = false;
  /// (I - B green)^{-1} (Px + green (L_h x - B x)^+), an upper bound for x
  /// that is <= 0 whenever the premises hold.
  Vector<Scalar> certificate;
};

template <std::floating_point Scalar, typename Derived>
MaxPrincipleResult<Scalar> max_principle_check(const DirichletLaplacian1D<Scalar>& op,
                                               const Eigen::MatrixBase<Derived>& x,
                                               std::pair<Scalar, Scalar> boundary, Scalar B, Scalar tol) {
  if (!(B >= 0) || !std::isfinite(B)) throw ParameterError("max_principle_check: B must be finite and >= 0");
  if (!(tol >= 0)) throw ParameterError("max_principle_check: tol must be >= 0");
  const Scalar mu_upper = op.green_bracket().upper;
  if (!(B * mu_upper < 1)) {
    throw AdmissibilityError("B<lambda_1", "maximum principle for the Dirichlet Laplacian",
                             static_cast<double>(B),
                             "B = " + std::to_string(static_cast<double>(B)) +
                                 " is not below the first eigenvalue lambda_1 = " +
                                 std::to_string(static_cast<double>(op.lambda1())));
  }
  const auto ev = evaluate_premises(op, x, boundary, B, tol);
  MaxPrincipleResult<Scalar> out;
  out.premises_hold = ev.premises_hold;
  out.conclusion_holds = ev.conclusion_holds;
  const Vector<Scalar> A = op.harmonic_part(boundary) + op.green() * positive_part(ev.defect);
  out.certificate = matrix_gronwall(op.green(), A, B).bound;
  return out;
}

}  // namespace gronwall
