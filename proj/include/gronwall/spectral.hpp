#pragma once

// Perron-root bracketing for nonnegative matrices and three independent
// evaluators of the resolvent (sI - K)^{-1} A:
//   resolvent_direct   partial-pivot LU, the reference route
//   resolvent_laplace  Simpson quadrature of int_0^r e^{-t(sI-K)} A dt
//   neumann_resolvent  (1/s) sum_j (K/s)^j A with a geometric tail estimate

#include "gronwall/core.hpp"
#include "gronwall/lattice.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace gronwall {

/// Two-sided enclosure of the spectral bound (Perron root) of a nonnegative
/// matrix. `upper` is the end used for every admissibility decision.
template <std::floating_point Scalar>
struct SpectralBracket {
  Scalar lower = 0;
  Scalar upper = 0;
  int iterations = 0;
  bool converged = false;

  Scalar width() const { return upper - lower; }
  bool contains(Scalar v, Scalar slack = 0) const { return lower - slack <= v && v <= upper + slack; }
};

inline constexpr double kDefaultSpectralTol = 1e-10;
inline constexpr int kDefaultSpectralMaxIter = 20000;

template <std::floating_point Scalar>
class NonnegMatrix;

template <std::floating_point Scalar>
SpectralBracket<Scalar> spectral_bound(const NonnegMatrix<Scalar>& K, Scalar tol,
                                       int max_iter = kDefaultSpectralMaxIter);

/// Dense square matrix with nonnegative finite entries, i.e. a positive
/// (order-preserving) operator on R^n.
template <std::floating_point Scalar>
class NonnegMatrix {
 public:
  NonnegMatrix() = default;

  explicit NonnegMatrix(Matrix<Scalar> entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) throw DimensionError("NonnegMatrix: matrix must be square");
    if (m_.rows() == 0) throw DimensionError("NonnegMatrix: empty matrix");
    detail::require_finite(m_, "NonnegMatrix");
    if ((m_.array() < 0).any()) throw InvariantViolation("NonnegMatrix: negative entry");
  }

  static NonnegMatrix zero(Eigen::Index n) { return NonnegMatrix(Matrix<Scalar>::Zero(n, n)); }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix<Scalar>& matrix() const { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// Max row sum; for nonnegative matrices this is ||K 1||_inf.
  Scalar inf_norm() const { return m_.rowwise().sum().maxCoeff(); }

  /// Copy carrying a cached spectral bracket.
  NonnegMatrix with_bracket(Scalar tol = Scalar(kDefaultSpectralTol),
                            int max_iter = kDefaultSpectralMaxIter) const {
    NonnegMatrix out = *this;
    out.bracket_ = spectral_bound(*this, tol, max_iter);
    return out;
  }

  /// Copy carrying a bracket obtained elsewhere (e.g. from a known eigenpair).
  NonnegMatrix with_bracket_value(const SpectralBracket<Scalar>& br) const {
    if (!(br.lower <= br.upper)) throw InvariantViolation("NonnegMatrix: bracket with lower > upper");
    NonnegMatrix out = *this;
    out.bracket_ = br;
    return out;
  }

  const std::optional<SpectralBracket<Scalar>>& cached_bracket() const { return bracket_; }

  /// Cached bracket, or a freshly computed one at the default tolerance.
  SpectralBracket<Scalar> bracket() const {
    if (bracket_) return *bracket_;
    return spectral_bound(*this, Scalar(kDefaultSpectralTol));
  }

  template <typename Derived>
  Vector<Scalar> operator*(const Eigen::MatrixBase<Derived>& x) const {
    detail::require_same_size(dim(), x.size(), "NonnegMatrix * x");
    return m_ * x;
  }

 private:
  Matrix<Scalar> m_;
  std::optional<SpectralBracket<Scalar>> bracket_;
};

/// Brackets rho(K) by
///   * Collatz-Wielandt quotients min/max_i (Mx)_i / x_i on iterates of the
///     shifted matrix M = K + eps*I (eps = tol/10), shifted back by eps;
///   * Gelfand values ||K^m||_inf^{1/m} = ||K^m 1||_inf^{1/m}, which are
///     upper bounds and reach exactly zero for nilpotent K.
/// Every reported endpoint is a valid bound (up to rounding) even when
/// `converged` is false.
template <std::floating_point Scalar>
SpectralBracket<Scalar> spectral_bound(const NonnegMatrix<Scalar>& K, Scalar tol, int max_iter) {
  if (!(tol > 0)) throw ParameterError("spectral_bound: tol must be positive");
  if (max_iter < 1) throw ParameterError("spectral_bound: max_iter must be >= 1");

  const auto n = K.dim();
  const auto& A = K.matrix();
  const Scalar eps = tol / 10;

  SpectralBracket<Scalar> br;
  br.lower = 0;
  br.upper = K.inf_norm();  // m = 1 Gelfand value

  Vector<Scalar> x = Vector<Scalar>::Ones(n);
  Vector<Scalar> g = Vector<Scalar>::Ones(n);
  Scalar log_gelfand = 0;
  bool gelfand_done = false;

  for (int m = 1; m <= max_iter; ++m) {
    br.iterations = m;

    if (!gelfand_done) {
      g = A * g;
      const Scalar gn = g.maxCoeff();
      if (gn == 0) {
        // K^m = 0: nilpotent, sigma(K) = {0}.
        br.lower = 0;
        br.upper = 0;
        br.converged = true;
        return br;
      }
      log_gelfand += std::log(gn);
      g /= gn;
      br.upper = std::min(br.upper, std::exp(log_gelfand / Scalar(m)));
    }

    Vector<Scalar> y = A * x + eps * x;
    if (!y.allFinite()) throw NumericError("spectral_bound: non-finite iterate");

    Scalar qmin = std::numeric_limits<Scalar>::infinity();
    Scalar qmax = 0;
    bool strictly_positive = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x[i] > 0) {
        const Scalar q = y[i] / x[i];
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
      } else {
        strictly_positive = false;
      }
    }
    if (std::isfinite(qmin)) br.lower = std::max(br.lower, qmin - eps);
    if (strictly_positive) br.upper = std::min(br.upper, std::max(qmax - eps, Scalar(0)));
    if (br.lower > br.upper) br.lower = br.upper;

    if (br.width() <= tol) {
      br.converged = true;
      return br;
    }

    const Scalar yn = y.maxCoeff();
    if (!(yn > 0)) throw NumericError("spectral_bound: iterate vanished");
    x = y / yn;
    // Gelfand values converge slowly; once the CW bracket is doing the work
    // there is no need to keep paying for them.
    if (m > 2 * n + 10) gelfand_done = true;
  }
  br.converged = false;
  return br;
}

namespace detail {

template <std::floating_point Scalar>
void require_admissible_shift(const NonnegMatrix<Scalar>& K, Scalar s, const char* where) {
  const auto br = K.bracket();
  if (!(s > br.upper)) {
    throw AdmissibilityError("s>rho_K", "abstract Gronwall inequality (sI-K invertible, positive inverse)",
                             static_cast<double>(s),
                             std::string(where) + ": s = " + std::to_string(static_cast<double>(s)) +
                                 " is not above the spectral bracket upper end " +
                                 std::to_string(static_cast<double>(br.upper)));
  }
}

}  // namespace detail

/// y = (sI - K)^{-1} A by partial-pivot LU. Requires s > bracket upper end.
template <std::floating_point Scalar, typename Derived>
Vector<Scalar> resolvent_direct(const NonnegMatrix<Scalar>& K, Scalar s,
                                const Eigen::MatrixBase<Derived>& A) {
  detail::require_same_size(K.dim(), A.size(), "resolvent_direct");
  detail::require_finite(A, "resolvent_direct");
  detail::require_admissible_shift(K, s, "resolvent_direct");

  const auto n = K.dim();
  Matrix<Scalar> shifted = s * Matrix<Scalar>::Identity(n, n) - K.matrix();
  // Volterra-type (lower triangular) K: forward substitution, no pivoting growth.
  if (K.matrix().template triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0)) {
    Vector<Scalar> y = shifted.template triangularView<Eigen::Lower>().solve(Vector<Scalar>(A));
    if (!y.allFinite()) throw NumericError("resolvent_direct: non-finite solution");
    return y;
  }
  Eigen::PartialPivLU<Matrix<Scalar>> lu(shifted);
  if (!(lu.rcond() > std::numeric_limits<Scalar>::epsilon())) {
    throw NumericError("resolvent_direct: numerically singular system");
  }
  Vector<Scalar> y = lu.solve(Vector<Scalar>(A));
  if (!y.allFinite()) throw NumericError("resolvent_direct: non-finite solution");
  return y;
}

/// ||s y - K y - A||_inf / (1 + ||A||_inf).
template <std::floating_point Scalar, typename DA, typename DY>
Scalar resolvent_residual(const NonnegMatrix<Scalar>& K, Scalar s, const Eigen::MatrixBase<DA>& A,
                          const Eigen::MatrixBase<DY>& y) {
  const Vector<Scalar> r = s * y - K.matrix() * y - A;
  return sup_norm(r) / (1 + sup_norm(A));
}

/// e^{tM} by scaling and squaring with a truncated Taylor series.
template <typename Derived>
auto expm(const Eigen::MatrixBase<Derived>& M, typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != M.cols()) throw DimensionError("expm: matrix must be square");
  if (!(t >= 0)) throw ParameterError("expm: t must be nonnegative");
  detail::require_finite(M, "expm");

  const auto n = M.rows();
  Matrix<Scalar> X = t * M;
  const Scalar norm1 = n == 0 ? Scalar(0) : X.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > Scalar(0.5)) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / Scalar(0.5))));
  }
  if (squarings > 1100) throw NumericError("expm: t*||M|| too large");
  X /= std::ldexp(Scalar(1), squarings);

  Matrix<Scalar> E = Matrix<Scalar>::Identity(n, n);
  Matrix<Scalar> term = Matrix<Scalar>::Identity(n, n);
  const Scalar xnorm = X.cwiseAbs().colwise().sum().maxCoeff();
  Scalar term_bound = 1;
  for (int k = 1; k < 60; ++k) {
    term = term * X / Scalar(k);
    E += term;
    term_bound *= xnorm / Scalar(k);
    if (term_bound <= Scalar(1e-2) * std::numeric_limits<Scalar>::epsilon()) break;
  }
  for (int i = 0; i < squarings; ++i) {
    E = E * E;
    if (!E.allFinite()) throw NumericError("expm: overflow while squaring");
  }
  if (!E.allFinite()) throw NumericError("expm: non-finite result");
  return E;
}

/// e^{tM} x.
template <typename DerivedM, typename DerivedX>
auto expm_action(const Eigen::MatrixBase<DerivedM>& M, typename DerivedM::Scalar t,
                 const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedM::Scalar;
  detail::require_same_size(M.cols(), x.size(), "expm_action");
  detail::require_finite(x, "expm_action");
  Vector<Scalar> y = expm(M, t) * x;
  if (!y.allFinite()) throw NumericError("expm_action: overflow");
  return y;
}

/// Smallest horizon r with ||A|| e^{-r gap} / gap <= tol, gap = s - rho_upper.
template <std::floating_point Scalar>
Scalar laplace_horizon(Scalar gap, Scalar norm_A, Scalar tol) {
  if (!(gap > 0) || !(tol > 0)) throw ParameterError("laplace_horizon: need gap > 0 and tol > 0");
  if (norm_A == 0) return Scalar(1);
  return std::max(Scalar(1), std::log(norm_A / (gap * tol)) / gap);
}

/// Composite-Simpson evaluation of int_0^r e^{-t(sI-K)} A dt. `steps` is
/// rounded up to the next even number. The propagator e^{dt (K - sI)} is
/// formed once and applied step by step.
template <std::floating_point Scalar, typename Derived>
Vector<Scalar> resolvent_laplace(const NonnegMatrix<Scalar>& K, Scalar s,
                                 const Eigen::MatrixBase<Derived>& A, Scalar r, int steps) {
  detail::require_same_size(K.dim(), A.size(), "resolvent_laplace");
  detail::require_finite(A, "resolvent_laplace");
  if (steps < 2) throw ParameterError("resolvent_laplace: steps must be >= 2");
  if (!(r > 0)) throw ParameterError("resolvent_laplace: horizon r must be positive");
  detail::require_admissible_shift(K, s, "resolvent_laplace");
  if (steps % 2 != 0) ++steps;

  const auto n = K.dim();
  const Scalar dt = r / Scalar(steps);
  const Matrix<Scalar> generator = K.matrix() - s * Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar> step = expm(generator, dt);

  Vector<Scalar> v = A;
  Vector<Scalar> acc = v;
  for (int k = 1; k <= steps; ++k) {
    v = step * v;
    const Scalar w = (k == steps) ? Scalar(1) : (k % 2 == 1 ? Scalar(4) : Scalar(2));
    acc += w * v;
  }
  acc *= dt / Scalar(3);
  if (!acc.allFinite()) throw NumericError("resolvent_laplace: non-finite result");
  return acc;
}

template <std::floating_point Scalar>
struct NeumannResult {
  Vector<Scalar> value;
  int terms = 0;
  Scalar tail_estimate = 0;
};

/// Partial sums of (1/s) sum_j (K/s)^j A, stopped once the geometric tail
/// estimate ||t_j|| q/(1-q) (q = largest of the last three term ratios)
/// drops below tail_tol or a term vanishes exactly.
template <std::floating_point Scalar, typename Derived>
NeumannResult<Scalar> neumann_resolvent(const NonnegMatrix<Scalar>& K, Scalar s,
                                        const Eigen::MatrixBase<Derived>& A, int max_terms,
                                        Scalar tail_tol) {
  detail::require_same_size(K.dim(), A.size(), "neumann_resolvent");
  detail::require_finite(A, "neumann_resolvent");
  if (max_terms < 1) throw ParameterError("neumann_resolvent: max_terms must be >= 1");
  if (!(tail_tol > 0)) throw ParameterError("neumann_resolvent: tail_tol must be positive");
  detail::require_admissible_shift(K, s, "neumann_resolvent");

  NeumannResult<Scalar> out;
  Vector<Scalar> term = A / s;
  out.value = term;
  out.terms = 1;
  Scalar prev = sup_norm(term);
  if (prev == 0) return out;

  Scalar q_hist[3] = {0, 0, 0};
  for (int j = 1; j < max_terms; ++j) {
    term = K.matrix() * term / s;
    const Scalar cur = sup_norm(term);
    if (cur == 0) {
      out.tail_estimate = 0;
      return out;
    }
    out.value += term;
    out.terms = j + 1;
    q_hist[j % 3] = cur / prev;
    prev = cur;
    if (j >= 3) {
      const Scalar q = std::max({q_hist[0], q_hist[1], q_hist[2]});
      if (q < 1) {
        out.tail_estimate = cur * q / (1 - q);
        if (out.tail_estimate < tail_tol) return out;
      }
    }
  }
  throw ConvergenceError("neumann_resolvent: series did not reach tail_tol within " +
                         std::to_string(max_terms) + " terms");
}

}  // namespace gronwall
