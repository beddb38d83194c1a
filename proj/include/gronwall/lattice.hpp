#pragma once

// Componentwise Banach-lattice operations on R^n with the sup norm.
//
// Every function rejects NaN/inf input: the partial order is meaningless
// for NaN, so it is never propagated.

#include "gronwall/core.hpp"

namespace gronwall {

/// Grid functions and plain vectors share one representation; the order is
/// always the componentwise one.
template <typename Scalar>
using OrderedVec = Vector<Scalar>;

template <typename DerivedX, typename DerivedY>
auto join(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  detail::require_same_size(x.size(), y.size(), "join");
  detail::require_finite(x, "join");
  detail::require_finite(y, "join");
  return Vector<Scalar>(x.cwiseMax(y));
}

/// De Morgan dual of join: meet(x, y) = -join(-x, -y).
template <typename DerivedX, typename DerivedY>
auto meet(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  return Vector<Scalar>(-join(-x, -y));
}

/// |x| := x v (-x).
template <typename Derived>
auto abs_val(const Eigen::MatrixBase<Derived>& x) {
  return join(x, -x);
}

/// Tolerance-relaxed order: x_i <= y_i + tol for all i.
template <typename DerivedX, typename DerivedY>
bool leq(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
         typename DerivedX::Scalar tol = 0) {
  detail::require_same_size(x.size(), y.size(), "leq");
  detail::require_finite(x, "leq");
  detail::require_finite(y, "leq");
  if (!(tol >= 0)) throw ParameterError("leq: tolerance must be nonnegative");
  return ((x.array() - y.array()) <= tol).all();
}

template <typename Derived>
typename Derived::Scalar sup_norm(const Eigen::MatrixBase<Derived>& x) {
  detail::require_finite(x, "sup_norm");
  if (x.size() == 0) return 0;
  return x.cwiseAbs().maxCoeff();
}

/// Positive part x v 0.
template <typename Derived>
auto positive_part(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return join(x, Vector<Scalar>::Zero(x.size()));
}

template <typename Derived>
bool is_nonnegative(const Eigen::MatrixBase<Derived>& x) {
  detail::require_finite(x, "is_nonnegative");
  return (x.array() >= 0).all();
}

}  // namespace gronwall
