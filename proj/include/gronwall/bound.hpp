#pragma once

#include "gronwall/core.hpp"

#include <optional>
#include <string_view>

namespace gronwall {

enum class BoundMethod {
  matrix_sharp,
  discrete_closed_form,
  discrete_varcoef,
  classic_exp,
  varcoef_sharp,
  varcoef_simple,
  resolvent_kernel,
  hat_majorant,
};

inline std::string_view to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::matrix_sharp: return "matrix_sharp";
    case BoundMethod::discrete_closed_form: return "discrete_closed_form";
    case BoundMethod::discrete_varcoef: return "discrete_varcoef";
    case BoundMethod::classic_exp: return "classic_exp";
    case BoundMethod::varcoef_sharp: return "varcoef_sharp";
    case BoundMethod::varcoef_simple: return "varcoef_simple";
    case BoundMethod::resolvent_kernel: return "resolvent_kernel";
    case BoundMethod::hat_majorant: return "hat_majorant";
  }
  return "unknown";
}

/// Whether B * rho_K < 1 (equivalently s = 1/B above the spectral bound).
struct Admissibility {
  double B_times_rho_upper = 0;
  bool admissible = true;
};

template <std::floating_point Scalar>
struct BoundReport {
  Vector<Scalar> bound;
  BoundMethod method = BoundMethod::matrix_sharp;
  Admissibility admissibility;
  /// ||y - (A + K y)||_inf for the operator the bound is a fixed point of.
  /// Empty for majorants that are not fixed points of anything.
  std::optional<Scalar> sharpness_residual;
  /// Certified truncation remainder (series-based methods only).
  std::optional<Scalar> tail_bound;
  /// Number of series terms used (series-based methods only).
  std::optional<int> terms;
};

}  // namespace gronwall
