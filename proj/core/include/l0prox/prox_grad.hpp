#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "l0prox/grid.hpp"
#include "l0prox/objective.hpp"

namespace l0prox {

struct Backtracking {
  double gamma = 2.0;  ///< increase factor, > 1
  double L0 = 1.0;     ///< first trial value
  std::size_t max_increases = 60;
};

struct ProxGradConfig {
  double L = 0.0;  ///< prox parameter; ignored when backtracking is set
  double alpha = 0.0;
  double tau = 0.0;
  std::size_t max_iter = 1000;
  double step_norm_tol = 1e-10;  ///< stop once ||u_{k+1} - u_k||_{L2} < step_norm_tol
  std::optional<Backtracking> backtracking;
  /// Support tolerance for the initial iterate; default_zero_tol(u0) when unset.
  /// Later iterates have exact zeros off their support.
  std::optional<double> zero_tol;
};

struct ProxStep {
  GridFunction u_next;
  double lambda = 0.0;
  double s = 0.0;
  Indicator support;
};

/// One proximal-gradient step: minimizes
///   <grad_k, u - u_k> + (L/2)||u - u_k||^2 + (alpha/2)||u||^2  over |supp u| <= tau
/// in closed form. On the selected support u_next = (L u_k - grad_k)/(L + alpha),
/// elsewhere exactly zero.
[[nodiscard]] ProxStep prox_step(const GridFunction& u_k, const GridFunction& grad_k, double L, double alpha,
                                 double tau);

struct BacktrackResult {
  double L = 0.0;
  std::size_t increases = 0;
  GridFunction candidate;
  double f_candidate = 0.0;
};

/// Smallest L = L0 * gamma^j (j <= max_increases) whose candidate passes
///   f(u_next) <= f(u_k) + <grad_k, u_next - u_k> + (L/2)||u_next - u_k||^2.
/// Throws SolverError when the budget is exhausted.
[[nodiscard]] BacktrackResult backtrack_L(const SmoothObjective& objective, const GridFunction& u_k, double f_k,
                                          const GridFunction& grad_k, const Backtracking& params,
                                          const std::function<GridFunction(double L)>& candidate);

/// Diagnostics of one iterate. Slack fields are >= 0 (up to rounding) whenever
/// the corresponding inequality holds; NaN marks "not applicable".
struct IterateRecord {
  std::size_t k = 0;
  double objective = 0.0;  ///< F_k = f(u_k) + (alpha/2)||u_k||^2
  double lambda = 0.0;     ///< multiplier of the step that produced u_k
  double s = 0.0;
  double step_norm_sq = 0.0;     ///< ||u_k - u_{k-1}||^2
  double support_measure = 0.0;  ///< ||u_k||_0
  double support_change = 0.0;   ///< ||chi_k - chi_{k-1}||_{L1}
  /// F_{k-1} - F_k - ((L - L_f)/2)||u_k - u_{k-1}||^2 (with backtracking L_f := L);
  /// the bound assumes u_{k-1} feasible, so it can fail at k = 1 from an infeasible u0
  double descent_slack = 0.0;
  /// min_{supp u_k} |u_k| - sqrt(2 lambda_k / (L + alpha)); +inf on empty support
  double away_from_zero_slack = 0.0;
  /// ||u_k - u_{k-1}||^2 - 2 min(lambda_{k-1}, lambda_k)/(L + alpha) ||chi_k - chi_{k-1}||_{L1}, k >= 2
  double support_change_slack = 0.0;
  /// max_x |u_k(x)|_0 ( lambda_k - (L u_{k-1} - grad f(u_{k-1}))^2 / (2(L + alpha)) )
  double pointwise_comp_residual = 0.0;
  /// || alpha u_k + chi_k (grad f(u_{k-1}) + L (u_k - u_{k-1})) ||_inf
  double fixed_point_residual = 0.0;
  double L = 0.0;  ///< prox parameter used for this step
};

enum class Termination { tolerance, max_iter, backtracking_failure };

[[nodiscard]] std::string to_string(Termination t);

struct Trajectory {
  ProxGradConfig config;
  double lipschitz_bound = 0.0;  ///< L_f used for the descent slack (0 with backtracking)
  bool descent_guaranteed = false;  ///< L > L_f, or backtracking
  std::vector<IterateRecord> records;  ///< records[0] describes u0
  GridFunction u;
  Termination termination = Termination::max_iter;
  std::string message;
  std::vector<std::string> warnings;

  [[nodiscard]] const IterateRecord& last() const { return records.back(); }
  /// min lambda_k over the last `window` steps (k >= 1); NaN without steps.
  [[nodiscard]] double min_tail_lambda(std::size_t window) const;
};

/// Proximal gradient iteration for  min f(u) + (alpha/2)||u||^2  s.t. ||u||_0 <= tau.
/// Deterministic: the trajectory depends only on (config, objective, u0).
[[nodiscard]] Trajectory run(const ProxGradConfig& config, const SmoothObjective& objective,
                             const GridFunction& u0);

/// Columns: k,objective,lambda,step_norm_sq,support_measure,support_change,
/// descent_slack,away_slack,change_slack.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace l0prox
