#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

namespace gronwall {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  dimension,
  invariant,
  admissibility,
  numeric,
  parameter,
  convergence,
  resource,
  precondition,
  divergence,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::invariant: return "invariant";
    case ErrorKind::admissibility: return "admissibility";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::resource: return "resource";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::divergence: return "divergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::dimension, w) {}
};
struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& w) : Error(ErrorKind::invariant, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};
struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error(ErrorKind::parameter, w) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& w) : Error(ErrorKind::convergence, w) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(ErrorKind::precondition, w) {}
};
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& w) : Error(ErrorKind::divergence, w) {}
};

/// Raised when a requested computation needs more terms/storage than allowed.
/// `needed` carries the size that would have been required.
struct ResourceError : Error {
  ResourceError(const std::string& w, long long needed_size)
      : Error(ErrorKind::resource, w), needed(needed_size) {}
  long long needed;
};

/// A mathematical hypothesis of a bound (B*rho_K < 1, B < lambda_1, ...) fails.
/// `hypothesis` is a short machine-readable form of the violated condition and
/// `provenance` names the result that requires it.
struct AdmissibilityError : Error {
  AdmissibilityError(std::string hyp, std::string prov, double lhs_value, const std::string& w)
      : Error(ErrorKind::admissibility, w),
        hypothesis(std::move(hyp)),
        provenance(std::move(prov)),
        value(lhs_value) {}
  std::string hypothesis;
  std::string provenance;
  double value;
};

// ---------------------------------------------------------------------------
// Checks shared by every module
// ---------------------------------------------------------------------------

namespace detail {

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& x, const char* what) {
  if (!x.allFinite()) {
    throw InvariantViolation(std::string(what) + ": non-finite entry (NaN or inf)");
  }
}

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Uniform grid on [a, b] with n >= 2 nodes, nodes[0] = a, nodes[n-1] = b.
template <std::floating_point Scalar>
class Grid {
 public:
  Grid(Scalar a, Scalar b, Eigen::Index n) : a_(a), b_(b), n_(n) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
      throw ParameterError("Grid: require finite a < b");
    }
    if (n < 2) throw ParameterError("Grid: need at least two nodes");
    h_ = (b - a) / static_cast<Scalar>(n - 1);
    nodes_ = Vector<Scalar>::LinSpaced(n, a, b);
  }

  Scalar a() const { return a_; }
  Scalar b() const { return b_; }
  Eigen::Index size() const { return n_; }
  Scalar step() const { return h_; }
  Scalar length() const { return b_ - a_; }
  const Vector<Scalar>& nodes() const { return nodes_; }
  Scalar operator[](Eigen::Index i) const { return nodes_[i]; }

  /// Samples f at every node.
  template <typename F>
  Vector<Scalar> sample(F&& f) const {
    Vector<Scalar> out(n_);
    for (Eigen::Index i = 0; i < n_; ++i) out[i] = f(nodes_[i]);
    return out;
  }

 private:
  Scalar a_, b_;
  Eigen::Index n_;
  Scalar h_;
  Vector<Scalar> nodes_;
};

}  // namespace gronwall
