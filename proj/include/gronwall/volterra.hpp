#pragma once

// Continuous Gronwall bounds for Volterra operators Kx(t) = int_a^t k(t,s) x(s) ds
// on a uniform grid.

#include "gronwall/bound.hpp"
#include "gronwall/lattice.hpp"
#include "gronwall/spectral.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace gronwall {

/// Nonnegative continuous kernel on {a <= s <= t <= b}, sampled on a grid.
/// The node table holds k(t_i, t_j) for j <= i and zero above the diagonal.
template <std::floating_point Scalar>
class VolterraKernel {
 public:
  struct Constant {
    Scalar value;
  };
  /// k(t, s) = C(t) B(s), both given at the nodes.
  struct Separable {
    Vector<Scalar> C;
    Vector<Scalar> B;
  };
  struct Tabulated {
    Matrix<Scalar> table;
  };
  struct Closure {
    std::function<Scalar(Scalar, Scalar)> fn;
  };
  using Form = std::variant<Constant, Separable, Tabulated, Closure>;

  static VolterraKernel constant(const Grid<Scalar>& g, Scalar value) {
    return VolterraKernel(g, Constant{value});
  }
  static VolterraKernel separable(const Grid<Scalar>& g, Vector<Scalar> C, Vector<Scalar> B) {
    return VolterraKernel(g, Separable{std::move(C), std::move(B)});
  }
  static VolterraKernel tabulated(const Grid<Scalar>& g, Matrix<Scalar> table) {
    return VolterraKernel(g, Tabulated{std::move(table)});
  }
  static VolterraKernel closure(const Grid<Scalar>& g, std::function<Scalar(Scalar, Scalar)> fn) {
    return VolterraKernel(g, Closure{std::move(fn)});
  }

  const Grid<Scalar>& grid() const { return grid_; }
  const Form& form() const { return form_; }
  const Matrix<Scalar>& table() const { return table_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return j <= i ? table_(i, j) : Scalar(0); }
  /// max |k| over the sampled triangle.
  Scalar sup_norm_bound() const { return sup_; }

 private:
  VolterraKernel(const Grid<Scalar>& g, Form f) : grid_(g), form_(std::move(f)) {
    const auto n = grid_.size();
    table_ = Matrix<Scalar>::Zero(n, n);
    std::visit(
        [&](const auto& form) {
          using T = std::decay_t<decltype(form)>;
          if constexpr (std::is_same_v<T, Constant>) {
            for (Eigen::Index i = 0; i < n; ++i) table_.row(i).head(i + 1).setConstant(form.value);
          } else if constexpr (std::is_same_v<T, Separable>) {
            detail::require_same_size(form.C.size(), n, "VolterraKernel separable C");
            detail::require_same_size(form.B.size(), n, "VolterraKernel separable B");
            for (Eigen::Index i = 0; i < n; ++i)
              for (Eigen::Index j = 0; j <= i; ++j) table_(i, j) = form.C[i] * form.B[j];
          } else if constexpr (std::is_same_v<T, Tabulated>) {
            if (form.table.rows() != n || form.table.cols() != n)
              throw DimensionError("VolterraKernel: table must be n x n for an n-node grid");
            table_ = form.table.template triangularView<Eigen::Lower>();
          } else {
            if (!form.fn) throw ParameterError("VolterraKernel: empty closure");
            for (Eigen::Index i = 0; i < n; ++i)
              for (Eigen::Index j = 0; j <= i; ++j) table_(i, j) = form.fn(grid_[i], grid_[j]);
          }
        },
        form_);
    detail::require_finite(table_, "VolterraKernel");
    if ((table_.array() < 0).any()) throw InvariantViolation("VolterraKernel: negative kernel sample");
    sup_ = table_.maxCoeff();
  }

  Grid<Scalar> grid_;
  Form form_;
  Matrix<Scalar> table_;
  Scalar sup_ = 0;
};

/// Node data A(t), B(t) >= 0, C(t) >= 0 of x <= A + C int_a^t B x.
template <std::floating_point Scalar>
struct CoefficientTriple {
  CoefficientTriple(const Grid<Scalar>& g, Vector<Scalar> a, Vector<Scalar> b, Vector<Scalar> c)
      : grid(g), A(std::move(a)), B(std::move(b)), C(std::move(c)) {
    detail::require_same_size(A.size(), grid.size(), "CoefficientTriple A");
    detail::require_same_size(B.size(), grid.size(), "CoefficientTriple B");
    detail::require_same_size(C.size(), grid.size(), "CoefficientTriple C");
    detail::require_finite(A, "CoefficientTriple A");
    detail::require_finite(B, "CoefficientTriple B");
    detail::require_finite(C, "CoefficientTriple C");
    if ((B.array() < 0).any() || (C.array() < 0).any())
      throw InvariantViolation("CoefficientTriple: B and C must be nonnegative");
  }
  Grid<Scalar> grid;
  Vector<Scalar> A, B, C;
};

enum class QuadratureRule {
  /// w_ij = h for j < i. First order.
  left_endpoint,
  /// Trapezoid on [t_0, t_{i-1}] plus left endpoint on the last cell:
  /// w = h (1/2, 1, ..., 1, 3/2). Second order, still strictly lower triangular.
  explicit_trapezoid,
};

namespace detail {

template <std::floating_point Scalar>
Vector<Scalar> cumulative_trapezoid(const Grid<Scalar>& g, const Vector<Scalar>& f) {
  Vector<Scalar> out(g.size());
  out[0] = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i) out[i] = out[i - 1] + g.step() * (f[i - 1] + f[i]) / 2;
  return out;
}

/// Trapezoid weight of node j in a rule on nodes 0..i.
template <std::floating_point Scalar>
Scalar trap_weight(Eigen::Index j, Eigen::Index i, Scalar h) {
  return (j == 0 || j == i) ? h / 2 : h;
}

/// int_0^1 e^{d v} dv and int_0^1 v e^{d v} dv.
template <std::floating_point Scalar>
std::pair<Scalar, Scalar> exp_moments(Scalar d) {
  if (std::abs(d) < Scalar(1e-3)) {
    const Scalar d2 = d * d;
    const Scalar e0 = 1 + d / 2 + d2 / 6 + d2 * d / 24 + d2 * d2 / 120;
    const Scalar e1 = Scalar(0.5) + d / 3 + d2 / 8 + d2 * d / 30 + d2 * d2 / 144;
    return {e0, e1};
  }
  const Scalar ed = std::exp(d);
  return {(ed - 1) / d, (ed * (d - 1) + 1) / (d * d)};
}

/// One trapezoid step of the iterated-kernel recursion
///   k_{n+1}(t_i, t_j) = sum_{r=j..i} w_r k(t_i, t_r) k_n(t_r, t_j).
template <std::floating_point Scalar>
Matrix<Scalar> next_iterated_kernel(const Matrix<Scalar>& k, const Matrix<Scalar>& kn, Scalar h) {
  Matrix<Scalar> full = k.template triangularView<Eigen::Lower>() * kn;
  const Vector<Scalar> kn_diag = kn.diagonal();
  const Vector<Scalar> k_diag = k.diagonal();
  Matrix<Scalar> out = h * (full - Scalar(0.5) * (k * kn_diag.asDiagonal()) -
                            Scalar(0.5) * (k_diag.asDiagonal() * kn));
  out = out.template triangularView<Eigen::StrictlyLower>();
  return out;
}

}  // namespace detail

/// A e^{B (t - a)} at the grid nodes.
template <std::floating_point Scalar>
Vector<Scalar> classic_bound(Scalar A, Scalar B, const Grid<Scalar>& grid) {
  if (!std::isfinite(A)) throw InvariantViolation("classic_bound: A must be finite");
  if (!(B >= 0) || !std::isfinite(B)) throw PreconditionError("classic_bound: B must be finite and >= 0");
  return grid.sample([&](Scalar t) { return A * std::exp(B * (t - grid.a())); });
}

/// Left-endpoint residual y_i - (A_i + C_i h sum_{j<i} B_j y_j).
template <std::floating_point Scalar>
Scalar varcoef_fixed_point_residual(const CoefficientTriple<Scalar>& c, const Vector<Scalar>& y) {
  const Scalar h = c.grid.step();
  Scalar running = 0;
  Scalar res = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    res = std::max(res, std::abs(y[i] - (c.A[i] + c.C[i] * h * running)));
    running += c.B[i] * y[i];
  }
  return res;
}

/// y(t) = A(t) + C(t) int_a^t A(s) B(s) e^{int_s^t B C dr} ds.
///
/// The inner integral Phi = int B C is cumulative trapezoid. The outer one
/// is integrated cell by cell with A B linear and Phi linear on each cell,
/// which is exact when the data are constant.
template <std::floating_point Scalar>
BoundReport<Scalar> varcoef_sharp_bound(const CoefficientTriple<Scalar>& c) {
  const auto& g = c.grid;
  const auto n = g.size();
  const Scalar h = g.step();
  const Vector<Scalar> phi = detail::cumulative_trapezoid(g, Vector<Scalar>(c.B.cwiseProduct(c.C)));
  const Vector<Scalar> AB = c.A.cwiseProduct(c.B);

  BoundReport<Scalar> rep;
  rep.method = BoundMethod::varcoef_sharp;
  rep.bound.resize(n);
  rep.bound[0] = c.A[0];
  Scalar I = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar d = phi[i] - phi[i - 1];
    const auto [e0, e1] = detail::exp_moments(d);
    I = std::exp(d) * I + h * (AB[i - 1] * e1 + AB[i] * (e0 - e1));
    rep.bound[i] = c.A[i] + c.C[i] * I;
  }
  if (!rep.bound.allFinite()) throw NumericError("varcoef_sharp_bound: overflow");
  rep.admissibility = {0.0, true};
  rep.sharpness_residual = varcoef_fixed_point_residual(c, rep.bound);
  return rep;
}

/// A(t) e^{C(t) int_a^t B}; valid for A >= 0 with A and C nondecreasing.
template <std::floating_point Scalar>
BoundReport<Scalar> varcoef_simple_bound(const CoefficientTriple<Scalar>& c) {
  const auto n = c.grid.size();
  if ((c.A.array() < 0).any()) throw PreconditionError("varcoef_simple_bound: A must be nonnegative");
  const Scalar eps = 64 * std::numeric_limits<Scalar>::epsilon();
  const Scalar a_slack = eps * std::max(Scalar(1), sup_norm(c.A));
  const Scalar c_slack = eps * std::max(Scalar(1), sup_norm(c.C));
  for (Eigen::Index i = 1; i < n; ++i) {
    if (c.A[i] < c.A[i - 1] - a_slack) throw PreconditionError("varcoef_simple_bound: A must be nondecreasing");
    if (c.C[i] < c.C[i - 1] - c_slack) throw PreconditionError("varcoef_simple_bound: C must be nondecreasing");
  }
  const Vector<Scalar> intB = detail::cumulative_trapezoid(c.grid, c.B);
  BoundReport<Scalar> rep;
  rep.method = BoundMethod::varcoef_simple;
  rep.bound = (c.A.array() * (c.C.array() * intB.array()).exp()).matrix();
  if (!rep.bound.allFinite()) throw NumericError("varcoef_simple_bound: overflow");
  rep.admissibility = {0.0, true};
  return rep;
}

/// Quadrature matrix of the Volterra operator, strictly lower triangular
/// (hence nilpotent) for both rules.
template <std::floating_point Scalar>
NonnegMatrix<Scalar> discretize_kernel(const VolterraKernel<Scalar>& k,
                                       QuadratureRule rule = QuadratureRule::left_endpoint) {
  const auto n = k.grid().size();
  const Scalar h = k.grid().step();
  Matrix<Scalar> M = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      Scalar w = h;
      if (rule == QuadratureRule::explicit_trapezoid && i >= 2) {
        if (j == 0) w = h / 2;
        else if (j == i - 1) w = 3 * h / 2;
      }
      M(i, j) = w * k(i, j);
    }
  }
  return NonnegMatrix<Scalar>(std::move(M));
}

template <std::floating_point Scalar>
struct IteratedKernels {
  /// tables[n-1] holds k_n on the nodes.
  std::vector<Matrix<Scalar>> tables;
  /// envelope[n-1] = ||k||^n (b-a)^{n-1} / (n-1)!, an upper bound on k_n.
  std::vector<Scalar> envelope;
};

/// k_1 = k, k_{n+1}(t, s) = int_s^t k(t, r) k_n(r, s) dr (trapezoid).
template <std::floating_point Scalar>
IteratedKernels<Scalar> iterated_kernels(const VolterraKernel<Scalar>& k, int N) {
  if (N < 1) throw ParameterError("iterated_kernels: N must be >= 1");
  IteratedKernels<Scalar> out;
  out.tables.reserve(N);
  out.tables.push_back(k.table());
  const Scalar L = k.grid().length();
  const Scalar K = k.sup_norm_bound();
  Scalar env = K;
  out.envelope.push_back(env);
  for (int n = 1; n < N; ++n) {
    out.tables.push_back(detail::next_iterated_kernel(k.table(), out.tables.back(), k.grid().step()));
    env *= K * L / Scalar(n);
    out.envelope.push_back(env);
  }
  return out;
}

/// Smallest N with ||k||^{N+1} (b-a)^{N+1} ||A|| / N! < tail_tol.
template <std::floating_point Scalar>
long long resolvent_truncation_index(Scalar k_sup, Scalar length, Scalar normA, Scalar tail_tol) {
  if (!(tail_tol > 0)) throw ParameterError("resolvent_kernel_bound: tail_tol must be positive");
  const Scalar x = k_sup * length;
  if (x == 0 || normA == 0) return 1;
  const Scalar log_target = std::log(tail_tol);
  const Scalar log_x = std::log(x);
  const Scalar log_A = std::log(normA);
  for (long long N = 1; N < 100000000LL; ++N) {
    const Scalar lhs = Scalar(N + 1) * log_x - std::lgamma(Scalar(N + 1)) + log_A;
    if (lhs < log_target) return N;
  }
  return 100000000LL;
}

/// A(t) + int_a^t R_N(t, s) A(s) ds with R_N = k_1 + ... + k_N, N chosen from
/// the factorial envelope. `tail_bound` is ||A|| sum_{n>N} x^n / n!,
/// x = ||k|| (b - a).
template <std::floating_point Scalar>
BoundReport<Scalar> resolvent_kernel_bound(const VolterraKernel<Scalar>& k, const Vector<Scalar>& A,
                                           Scalar tail_tol, int max_terms = 400) {
  const auto& g = k.grid();
  const auto n = g.size();
  const Scalar h = g.step();
  detail::require_same_size(A.size(), n, "resolvent_kernel_bound");
  detail::require_finite(A, "resolvent_kernel_bound");
  const Scalar normA = sup_norm(A);
  const long long N = resolvent_truncation_index(k.sup_norm_bound(), g.length(), normA, tail_tol);
  if (N > max_terms) {
    throw ResourceError("resolvent_kernel_bound: " + std::to_string(N) +
                            " iterated kernels needed, cap is " + std::to_string(max_terms),
                        N);
  }

  Matrix<Scalar> R = k.table();
  Matrix<Scalar> kn = k.table();
  for (long long m = 2; m <= N; ++m) {
    kn = detail::next_iterated_kernel(k.table(), kn, h);
    R += kn;
  }

  BoundReport<Scalar> rep;
  rep.method = BoundMethod::resolvent_kernel;
  rep.bound.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = 0;
    for (Eigen::Index j = 0; j <= i; ++j) acc += detail::trap_weight(j, i, h) * R(i, j) * A[j];
    rep.bound[i] = A[i] + (i == 0 ? Scalar(0) : acc);
  }
  if (!rep.bound.allFinite()) throw NumericError("resolvent_kernel_bound: overflow");

  // Remainder of the exponential series past N.
  const Scalar x = k.sup_norm_bound() * g.length();
  Scalar term = normA;
  for (long long m = 1; m <= N; ++m) term *= x / Scalar(m);
  Scalar tail = 0;
  for (long long m = N + 1; m < N + 10000; ++m) {
    term *= x / Scalar(m);
    tail += term;
    if (term <= std::numeric_limits<Scalar>::epsilon() * tail || term == 0) break;
  }
  rep.tail_bound = tail;
  rep.terms = static_cast<int>(N);
  rep.admissibility = {0.0, true};

  Scalar res = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    Scalar acc = 0;
    for (Eigen::Index j = 0; j <= i; ++j) acc += detail::trap_weight(j, i, h) * k(i, j) * rep.bound[j];
    res = std::max(res, std::abs(rep.bound[i] - A[i] - acc));
  }
  rep.sharpness_residual = res;
  return rep;
}

/// Ahat(t) e^{int_a^t khat(t, s) ds}, Ahat(t) = max_{r<=t} A(r),
/// khat(t, s) = max_{s<=r<=t} k(r, s). Not a fixed point of anything.
template <std::floating_point Scalar>
BoundReport<Scalar> hat_majorant_bound(const VolterraKernel<Scalar>& k, const Vector<Scalar>& A) {
  const auto& g = k.grid();
  const auto n = g.size();
  const Scalar h = g.step();
  detail::require_same_size(A.size(), n, "hat_majorant_bound");
  detail::require_finite(A, "hat_majorant_bound");

  Matrix<Scalar> khat = k.table();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) khat(i, j) = std::max(khat(i - 1, j), khat(i, j));

  BoundReport<Scalar> rep;
  rep.method = BoundMethod::hat_majorant;
  rep.bound.resize(n);
  Scalar Ahat = A[0];
  for (Eigen::Index i = 0; i < n; ++i) {
    Ahat = std::max(Ahat, A[i]);
    Scalar integral = 0;
    if (i > 0)
      for (Eigen::Index j = 0; j <= i; ++j) integral += detail::trap_weight(j, i, h) * khat(i, j);
    rep.bound[i] = Ahat * std::exp(integral);
  }
  if (!rep.bound.allFinite()) throw NumericError("hat_majorant_bound: overflow");
  rep.admissibility = {0.0, true};
  return rep;
}

template <std::floating_point Scalar>
struct QuasinilpotenceReport {
  /// ||M^m||_inf^{1/m}, m = 1..m_max.
  std::vector<Scalar> gelfand_values;
  /// ||k|| (b-a) / (m!)^{1/m}, which dominates the value at every m.
  std::vector<Scalar> envelope;
  bool decreasing_to_zero = false;
};

template <std::floating_point Scalar>
QuasinilpotenceReport<Scalar> quasinilpotence_check(const VolterraKernel<Scalar>& k, int m_max) {
  if (m_max < 2) throw ParameterError("quasinilpotence_check: m_max must be >= 2");
  const auto M = discretize_kernel(k);
  const Scalar scale = k.sup_norm_bound() * k.grid().length();

  QuasinilpotenceReport<Scalar> out;
  Vector<Scalar> v = Vector<Scalar>::Ones(M.dim());
  Scalar log_norm = 0;
  bool zero = false;
  bool below = true;
  for (int m = 1; m <= m_max; ++m) {
    Scalar value = 0;
    if (!zero) {
      v = M.matrix() * v;
      const Scalar nv = v.maxCoeff();
      if (nv == 0) {
        zero = true;
      } else {
        log_norm += std::log(nv);
        v /= nv;
        value = std::exp(log_norm / Scalar(m));
      }
    }
    const Scalar env = scale * std::exp(-std::lgamma(Scalar(m + 1)) / Scalar(m));
    out.gelfand_values.push_back(value);
    out.envelope.push_back(env);
    if (value > env * (1 + Scalar(1e-10))) below = false;
  }
  out.decreasing_to_zero =
      below && (out.gelfand_values.back() == 0 || out.gelfand_values.back() < out.gelfand_values.front());
  return out;
}

}  // namespace gronwall
