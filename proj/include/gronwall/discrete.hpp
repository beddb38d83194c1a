#pragma once

// Finite-dimensional Gronwall bounds: the matrix form x <= A + B K x, and the
// classical discrete inequality x_i <= A_i + C_i sum_{j<i} B_j x_j.
//
// Indexing is 0-based. A sequence indexed a..b maps to positions 0..b-a;
// the coefficient B_j (a <= j < b) sits at position j-a.

#include "gronwall/bound.hpp"
#include "gronwall/lattice.hpp"
#include "gronwall/spectral.hpp"

#include <optional>

namespace gronwall {

template <std::floating_point Scalar>
struct DiscreteInequality {
  DiscreteInequality(Vector<Scalar> a, Vector<Scalar> b, std::optional<Vector<Scalar>> c = std::nullopt)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
    if (A.size() == 0) throw DimensionError("DiscreteInequality: empty A");
    detail::require_same_size(B.size(), A.size() - 1, "DiscreteInequality: B must have length |A|-1");
    detail::require_finite(A, "DiscreteInequality A");
    detail::require_finite(B, "DiscreteInequality B");
    if ((B.array() < 0).any()) throw InvariantViolation("DiscreteInequality: B must be nonnegative");
    if (C) {
      detail::require_same_size(C->size(), A.size(), "DiscreteInequality: C must have length |A|");
      detail::require_finite(*C, "DiscreteInequality C");
      if ((C->array() < 0).any()) throw InvariantViolation("DiscreteInequality: C must be nonnegative");
    }
  }

  Eigen::Index size() const { return A.size(); }
  Scalar c(Eigen::Index i) const { return C ? (*C)[i] : Scalar(1); }

  Vector<Scalar> A;
  Vector<Scalar> B;
  std::optional<Vector<Scalar>> C;
};

namespace detail {

template <std::floating_point Scalar>
[[noreturn]] void throw_b_rho(Scalar B, Scalar upper) {
  const double prod = static_cast<double>(B * upper);
  throw AdmissibilityError("B*rho_K<1", "matrix Gronwall lemma / abstract maximum principle", prod,
                           "B*rho_K = " + std::to_string(prod) + " is not below 1 (B = " +
                               std::to_string(static_cast<double>(B)) + ", rho_K upper = " +
                               std::to_string(static_cast<double>(upper)) + ")");
}

}  // namespace detail

/// Sharp bound y = (I - B K)^{-1} A for x <= A + B K x.
template <std::floating_point Scalar, typename Derived>
BoundReport<Scalar> matrix_gronwall(const NonnegMatrix<Scalar>& K, const Eigen::MatrixBase<Derived>& A,
                                    Scalar B) {
  detail::require_same_size(K.dim(), A.size(), "matrix_gronwall");
  detail::require_finite(A, "matrix_gronwall");
  if (!(B >= 0) || !std::isfinite(B)) throw ParameterError("matrix_gronwall: B must be a finite nonnegative number");

  BoundReport<Scalar> rep;
  rep.method = BoundMethod::matrix_sharp;
  if (B == 0) {
    rep.bound = A;
    rep.admissibility = {0.0, true};
    rep.sharpness_residual = Scalar(0);
    return rep;
  }

  const NonnegMatrix<Scalar> Kb = K.cached_bracket() ? K : K.with_bracket();
  const Scalar upper = Kb.cached_bracket()->upper;
  rep.admissibility.B_times_rho_upper = static_cast<double>(B * upper);
  rep.admissibility.admissible = B * upper < 1;
  if (!rep.admissibility.admissible) detail::throw_b_rho(B, upper);

  const Scalar s = 1 / B;
  rep.bound = resolvent_direct(Kb, s, Vector<Scalar>(A * s));
  const Vector<Scalar> fixed = A + B * (K.matrix() * rep.bound);
  rep.sharpness_residual = sup_norm(Vector<Scalar>(rep.bound - fixed));
  return rep;
}

/// Strictly lower-triangular matrix with K(i, j) = C_i B_j for j < i
/// (C = 1 when absent). Nilpotent of index at most n.
template <std::floating_point Scalar>
NonnegMatrix<Scalar> build_proof_matrix(const Vector<Scalar>& B,
                                        const std::optional<Vector<Scalar>>& C = std::nullopt) {
  detail::require_finite(B, "build_proof_matrix");
  if ((B.array() < 0).any()) throw InvariantViolation("build_proof_matrix: B must be nonnegative");
  const Eigen::Index n = B.size() + 1;
  if (C) detail::require_same_size(C->size(), n, "build_proof_matrix: C");
  Matrix<Scalar> K = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar ci = C ? (*C)[i] : Scalar(1);
    for (Eigen::Index j = 0; j < i; ++j) K(i, j) = ci * B[j];
  }
  return NonnegMatrix<Scalar>(std::move(K));
}

/// Closed-form discrete bound
///   y_i = A_i + C_i sum_{j<i} A_j B_j prod_{s=j+1}^{i-1} (1 + B_s C_s),
/// with the empty product equal to 1.
template <std::floating_point Scalar>
BoundReport<Scalar> discrete_bound(const DiscreteInequality<Scalar>& ineq) {
  const auto n = ineq.size();
  BoundReport<Scalar> rep;
  rep.method = ineq.C ? BoundMethod::discrete_varcoef : BoundMethod::discrete_closed_form;
  rep.bound.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar sum = 0;
    Scalar prod = 1;
    for (Eigen::Index j = i - 1; j >= 0; --j) {
      sum += ineq.A[j] * ineq.B[j] * prod;
      prod *= 1 + ineq.B[j] * ineq.c(j);
    }
    rep.bound[i] = ineq.A[i] + ineq.c(i) * sum;
  }
  // Proof matrix is nilpotent: rho = 0.
  rep.admissibility = {0.0, true};

  Scalar residual = 0;
  Scalar running = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    residual = std::max(residual, std::abs(rep.bound[i] - (ineq.A[i] + ineq.c(i) * running)));
    if (i + 1 < n) running += ineq.B[i] * rep.bound[i];
  }
  rep.sharpness_residual = residual;
  return rep;
}

/// The extremal sequence: Y_0 = A_0, Y_k = A_k + C_k sum_{j<k} B_j Y_j,
/// each sum recomputed from scratch.
template <std::floating_point Scalar>
Vector<Scalar> brute_force_discrete(const DiscreteInequality<Scalar>& ineq) {
  const auto n = ineq.size();
  Vector<Scalar> Y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar sum = 0;
    for (Eigen::Index j = 0; j < k; ++j) sum += ineq.B[j] * Y[j];
    Y[k] = ineq.A[k] + ineq.c(k) * sum;
  }
  return Y;
}

struct VerifyResult {
  bool feasible = false;
  bool bounded = false;
};

/// feasible: x <= A + B K x;  bounded: x <= (I - BK)^{-1} A.  Both up to tol.
template <std::floating_point Scalar, typename DA, typename DX>
VerifyResult verify_bound(const NonnegMatrix<Scalar>& K, const Eigen::MatrixBase<DA>& A, Scalar B,
                          const Eigen::MatrixBase<DX>& x, Scalar tol) {
  detail::require_same_size(K.dim(), A.size(), "verify_bound A");
  detail::require_same_size(K.dim(), x.size(), "verify_bound x");
  const Vector<Scalar> rhs = A + B * (K.matrix() * x);
  const auto rep = matrix_gronwall(K, A, B);
  return {leq(x, rhs, tol), leq(x, rep.bound, tol)};
}

}  // namespace gronwall
