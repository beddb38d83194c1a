#pragma once

// Lx = N(x), Px = x0 in integral form x = x0 + K N(x), solved by Picard
// iteration, with uniqueness and continuous-dependence certificates that
// rest on the lattice estimate |x - y| <= (I - C K)^{-1} |x0 - y0|.

#include "gronwall/discrete.hpp"
#include "gronwall/lattice.hpp"
#include "gronwall/spectral.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace gronwall {

/// Must be a pure function of its argument.
template <std::floating_point Scalar>
using Nonlinearity = std::function<Vector<Scalar>(const Vector<Scalar>&)>;

/// N(x)_i = f(x_i).
template <std::floating_point Scalar, typename F>
Nonlinearity<Scalar> pointwise(F f) {
  return [f](const Vector<Scalar>& x) { return Vector<Scalar>(x.unaryExpr(f)); };
}

template <std::floating_point Scalar>
Nonlinearity<Scalar> linear_map(Matrix<Scalar> M) {
  return [M = std::move(M)](const Vector<Scalar>& x) { return Vector<Scalar>(M * x); };
}

template <std::floating_point Scalar>
struct SemilinearProblem {
  SemilinearProblem(NonnegMatrix<Scalar> k, Vector<Scalar> x0_, Nonlinearity<Scalar> n, Scalar c)
      : K(std::move(k)), x0(std::move(x0_)), N(std::move(n)), C(c) {
    detail::require_same_size(K.dim(), x0.size(), "SemilinearProblem x0");
    detail::require_finite(x0, "SemilinearProblem x0");
    if (!N) throw ParameterError("SemilinearProblem: empty nonlinearity");
    if (!(C >= 0) || !std::isfinite(C)) throw ParameterError("SemilinearProblem: C must be finite and >= 0");
    if (!K.cached_bracket()) K = K.with_bracket();
  }

  /// T(x) = x0 + K N(x).
  Vector<Scalar> fixed_point_map(const Vector<Scalar>& x) const {
    Vector<Scalar> nx = N(x);
    detail::require_same_size(nx.size(), x.size(), "SemilinearProblem N(x)");
    return x0 + K.matrix() * nx;
  }

  Scalar residual(const Vector<Scalar>& x) const { return sup_norm(Vector<Scalar>(x - fixed_point_map(x))); }

  NonnegMatrix<Scalar> K;
  Vector<Scalar> x0;
  Nonlinearity<Scalar> N;
  Scalar C;
};

template <std::floating_point Scalar>
struct SolveTrace {
  /// ||x_{k+1} - x_k||_inf per iteration.
  std::vector<Scalar> iterate_norms;
  bool converged = false;
  int iterations = 0;
  Scalar final_residual = 0;
};

template <std::floating_point Scalar>
struct PicardResult {
  Vector<Scalar> x;
  SolveTrace<Scalar> trace;
};

inline constexpr double kDivergenceThreshold = 1e10;

/// Successive approximation x_{k+1} = x0 + K N(x_k) from `start` (default x0),
/// stopped when ||x_{k+1} - x_k||_inf < tol. Hitting max_iter returns an
/// unconverged trace; blow-up throws DivergenceError.
template <std::floating_point Scalar>
PicardResult<Scalar> picard_solve(const SemilinearProblem<Scalar>& p, Scalar tol, int max_iter,
                                  const std::optional<Vector<Scalar>>& start = std::nullopt) {
  if (!(tol > 0)) throw ParameterError("picard_solve: tol must be positive");
  if (max_iter < 1) throw ParameterError("picard_solve: max_iter must be >= 1");
  PicardResult<Scalar> out;
  out.x = start ? *start : p.x0;
  detail::require_same_size(out.x.size(), p.x0.size(), "picard_solve start");
  const Scalar blowup = Scalar(kDivergenceThreshold) * (1 + sup_norm(p.x0));

  for (int k = 0; k < max_iter; ++k) {
    Vector<Scalar> next = p.fixed_point_map(out.x);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > blowup) {
      throw DivergenceError("picard_solve: iterates exceed " + std::to_string(static_cast<double>(blowup)) +
                            " after " + std::to_string(k + 1) + " steps");
    }
    const Scalar diff = (next - out.x).cwiseAbs().maxCoeff();
    out.x = std::move(next);
    out.trace.iterate_norms.push_back(diff);
    out.trace.iterations = k + 1;
    if (diff < tol) {
      out.trace.converged = true;
      break;
    }
  }
  out.trace.final_residual = p.residual(out.x);
  return out;
}

/// max over pairs and components of |N(x)_i - N(y)_i| / max(|x_i - y_i|, 1e-30).
/// A lower bound for any valid lattice-Lipschitz constant, not a certificate.
template <std::floating_point Scalar>
Scalar lattice_lipschitz_estimate(const Nonlinearity<Scalar>& N,
                                  const std::vector<std::pair<Vector<Scalar>, Vector<Scalar>>>& samples) {
  if (samples.empty()) throw ParameterError("lattice_lipschitz_estimate: empty sample set");
  if (!N) throw ParameterError("lattice_lipschitz_estimate: empty nonlinearity");
  constexpr Scalar floor = Scalar(1e-30);
  Scalar est = 0;
  for (const auto& [x, y] : samples) {
    detail::require_same_size(x.size(), y.size(), "lattice_lipschitz_estimate");
    if ((x.array() == y.array()).all())
      throw ParameterError("lattice_lipschitz_estimate: sample pair with x == y");
    const Vector<Scalar> dn = N(x) - N(y);
    detail::require_finite(dn, "lattice_lipschitz_estimate");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      est = std::max(est, std::abs(dn[i]) / std::max(std::abs(x[i] - y[i]), floor));
    }
  }
  return est;
}

namespace detail {

template <std::floating_point Scalar>
void require_c_rho(const SemilinearProblem<Scalar>& p, const char* where) {
  const Scalar upper = p.K.bracket().upper;
  if (!(p.C * upper < 1)) {
    const double v = static_cast<double>(p.C * upper);
    throw AdmissibilityError("C*rho_K<1", "uniqueness and continuous dependence for Lx=N(x)", v,
                             std::string(where) + ": C*rho_K = " + std::to_string(v) + " is not below 1");
  }
}

}  // namespace detail

template <std::floating_point Scalar>
struct UniquenessResult {
  bool both_solutions = false;
  bool coincide = false;
  Scalar gap = 0;
  /// ||(I - C K)^{-1}||_inf, the factor by which residuals can separate solutions.
  Scalar amplification = 0;
};

/// If x1 and x2 both solve x = x0 + K N(x) to within tol, then
/// |x1 - x2| <= (I - CK)^{-1}(|r1| + |r2|), so they must agree to 2 tol times
/// the amplification factor.
template <std::floating_point Scalar>
UniquenessResult<Scalar> uniqueness_certificate(const SemilinearProblem<Scalar>& p, const Vector<Scalar>& x1,
                                                const Vector<Scalar>& x2, Scalar tol) {
  detail::require_c_rho(p, "uniqueness_certificate");
  detail::require_same_size(x1.size(), p.x0.size(), "uniqueness_certificate x1");
  detail::require_same_size(x2.size(), p.x0.size(), "uniqueness_certificate x2");
  UniquenessResult<Scalar> out;
  out.both_solutions = p.residual(x1) <= tol && p.residual(x2) <= tol;
  out.gap = sup_norm(Vector<Scalar>(x1 - x2));
  out.amplification = sup_norm(matrix_gronwall(p.K, Vector<Scalar>::Ones(p.x0.size()), p.C).bound);
  out.coincide = out.both_solutions && out.gap <= 2 * tol * out.amplification;
  return out;
}

/// (I - C K)^{-1} |x0 - x0_hat|, a componentwise bound on |x - x_hat|.
template <std::floating_point Scalar>
Vector<Scalar> continuous_dependence_bound(const SemilinearProblem<Scalar>& p, const Vector<Scalar>& x0_hat) {
  detail::require_c_rho(p, "continuous_dependence_bound");
  detail::require_same_size(x0_hat.size(), p.x0.size(), "continuous_dependence_bound");
  return matrix_gronwall(p.K, abs_val(p.x0 - x0_hat), p.C).bound;
}

}  // namespace gronwall
