#pragma once

#include <optional>

#include "l0prox/grid.hpp"
#include "l0prox/objective.hpp"
#include "l0prox/poisson_tracking.hpp"

namespace l0prox {

/// Residuals of the first-order conditions for
///   min f(u) + (alpha/2)||u||^2  s.t.  ||u||_0 <= tau
/// at a candidate u. All residual fields are >= 0; a std::nullopt field is
/// not defined for the given inputs (alpha == 0).
struct OptimalityReport {
  double s_est = 0.0;
  std::optional<double> lambda_hint;
  /// |s| * max(0, tau - ||u||_0 - max cell weight)
  double comp_tau_residual = 0.0;
  /// max_{supp u} |u + grad f / alpha|  (alpha > 0),  ||grad f||_inf  (alpha == 0)
  double stationarity_residual = 0.0;
  /// max_{supp u} max(0, -|grad f|^2/(2 alpha) - s)
  std::optional<double> pointwise_comp_residual;
  /// max_x  H(u(x)) + lambda |u(x)|_0 - min_v [H(v) + lambda |v|_0],  lambda = -s
  std::optional<double> hamiltonian_gap;

  // Support-measure-normalized forms: weighted RMS over the support for the
  // stationarity defect, weighted means for the others.
  double stationarity_residual_normalized = 0.0;
  std::optional<double> pointwise_comp_residual_normalized;
  std::optional<double> hamiltonian_gap_normalized;

  bool feasible = true;
  double support_measure = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  double max_cell_weight = 0.0;
};

/// Checks the necessary conditions at u using grad f(u) from `objective`.
///
/// s_est is -lambda_hint when a hint is given. Otherwise s_est = 0 when the
/// support constraint is slack by at least one cell (tau - ||u||_0 >= max
/// weight, where complementarity forces s = 0) or alpha == 0, and
/// s_est = -min_{supp u} |grad f|^2/(2 alpha) else, the multiplier that makes
/// the pointwise complementarity tight. With an empty support and an active
/// constraint the minimum runs over all cells' maximum instead.
[[nodiscard]] OptimalityReport check_noc(const GridFunction& u, const SmoothObjective& objective, double alpha,
                                         double tau, std::optional<double> lambda_hint = std::nullopt,
                                         std::optional<double> zero_tol = std::nullopt);

/// Pointwise Hamiltonian minimization for the Poisson tracking problem,
///   H(x, y, v, phi) = (1/2)(y - y_d)^2 + (alpha/2) v^2 + phi v,
/// penalized by lambda |v|_0. Requires alpha > 0.
[[nodiscard]] OptimalityReport check_pmp_pointwise(const PoissonTracking& problem, const GridFunction& u,
                                                   double alpha, double lambda, double tau,
                                                   std::optional<double> zero_tol = std::nullopt);

}  // namespace l0prox
