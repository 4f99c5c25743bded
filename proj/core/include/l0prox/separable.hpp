#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "l0prox/grid.hpp"

namespace l0prox {

/// Per-cell scalar function family g(x, .), integrated against the cell weights.
class SeparableIntegrand {
 public:
  struct PointwiseMin {
    double minimizer;
    double value;
  };

  virtual ~SeparableIntegrand() = default;

  [[nodiscard]] virtual std::size_t size() const = 0;
  /// g(cell, u); may be +infinity away from u = 0.
  [[nodiscard]] virtual double evaluate(std::size_t cell, double u) const = 0;
  /// Finite minimizer of g(cell, .) and its value.
  [[nodiscard]] virtual PointwiseMin pointwise_min(std::size_t cell) const = 0;
};

/// g(x, u) = a(x) u + (q/2) (u - c(x))^2 + d(x), q > 0.
class QuadraticIntegrand final : public SeparableIntegrand {
 public:
  QuadraticIntegrand(std::vector<double> linear, std::vector<double> shift, double curvature,
                     std::vector<double> offset = {});

  /// Integrand of the proximal-gradient subproblem, dropping constants:
  ///   <grad_k, u - u_k> + (L/2)(u - u_k)^2 + (alpha/2) u^2
  ///   = (grad_k - L u_k) u + ((L + alpha)/2) u^2 + const.
  static QuadraticIntegrand prox(std::span<const double> u_k, std::span<const double> grad_k, double L,
                                 double alpha);

  [[nodiscard]] std::size_t size() const override { return linear_.size(); }
  [[nodiscard]] double evaluate(std::size_t cell, double u) const override;
  [[nodiscard]] PointwiseMin pointwise_min(std::size_t cell) const override;

  [[nodiscard]] std::span<const double> linear() const { return linear_; }
  [[nodiscard]] std::span<const double> shift() const { return shift_; }
  [[nodiscard]] std::span<const double> offset() const { return offset_; }
  [[nodiscard]] double curvature() const { return curvature_; }

 private:
  std::vector<double> linear_;
  std::vector<double> shift_;
  std::vector<double> offset_;
  double curvature_;
};

/// Global minimizer of  sum_x w(x) g(x, u(x))  subject to  |supp u| <= tau.
struct L0Solution {
  GridFunction u;
  double s = 0.0;       ///< threshold on tilde_v, s <= 0
  double lambda = 0.0;  ///< multiplier, lambda = -s
  Indicator support;
  double support_measure = 0.0;
  double objective = 0.0;
};

/// tilde_v(x) = min_v g(x, v) - g(x, 0), clamped to <= 0 against rounding.
[[nodiscard]] GridFunction compute_tilde_v(const SeparableIntegrand& g, const GridPtr& grid);

struct SupportSelection {
  Indicator support;
  double s = 0.0;
};

/// Chooses the support of an optimal L0-constrained control from tilde_v.
///
/// Candidates are the cells with tilde_v < 0, ordered by (tilde_v, index).
/// With equal cell weights the optimum is the longest prefix of that order
/// that fits into tau. With mixed weights the selection is an exact 0/1
/// knapsack (depth-first branch and bound, fractional-relaxation bound), so
/// the result stays globally optimal. Such a support need not be a sublevel
/// set of tilde_v: a light cell can be taken in place of a heavier, more
/// negative one that does not fit.
///
/// s = 0 when every negative cell was selected; otherwise s is the largest
/// (least negative) selected tilde_v, or the smallest tilde_v overall when
/// nothing fits.
[[nodiscard]] SupportSelection select_support(const GridFunction& tilde_v, double tau);

[[nodiscard]] L0Solution solve_l0(const SeparableIntegrand& g, const GridPtr& grid, double tau);

/// Exhaustive search over all 2^n supports (n <= 20). Test oracle.
[[nodiscard]] L0Solution brute_force_l0(const SeparableIntegrand& g, const GridPtr& grid, double tau);

/// sum_x w(x) g(x, u(x)), pairwise-summed; +inf if any term is +inf.
[[nodiscard]] double integral_objective(const SeparableIntegrand& g, const GridFunction& u);

/// Threshold rule shared by solve_l0 and brute_force_l0.
[[nodiscard]] double threshold_for_support(const GridFunction& tilde_v, const Indicator& support);

struct PenalizedEquivalenceReport {
  std::size_t trials = 0;
  /// min over trials of [J(u) + lambda |u|_0] - [J(sol) + lambda |sol|_0]
  double worst_margin_penalty = 0.0;
  /// same for the exact-penalty form lambda (|u|_0 - tau)^+
  double worst_margin_excess = 0.0;
  std::size_t worst_trial_penalty = 0;
  std::size_t worst_trial_excess = 0;
  std::size_t violations = 0;  ///< trials with a margin below -tol in either form
  [[nodiscard]] bool ok() const { return violations == 0; }
};

[[nodiscard]] PenalizedEquivalenceReport check_penalized_equivalence(const L0Solution& sol,
                                                                     const SeparableIntegrand& g,
                                                                     double tau,
                                                                     std::span<const GridFunction> trials,
                                                                     double tol = 1e-10);

/// Exact (tolerance-free) checks of the threshold characterization.
struct CharacterizationReport {
  bool tilde_v_nonpositive = true;
  bool feasible = true;                   ///< support_measure <= tau
  bool threshold_consistent = true;       ///< s <= 0 and lambda == -s
  bool support_within_level = true;       ///< supp subset of {tilde_v <= s}
  bool strict_level_in_support = true;    ///< {tilde_v < s} subset of supp
  bool pointwise_complementarity = true;  ///< |u(x)|_0 (tilde_v(x) - s) <= 0
  bool relaxed_complementarity = true;    ///< lambda > 0 => tau - |supp| < max weight, and converse slack rule
  [[nodiscard]] bool sandwich() const { return support_within_level && strict_level_in_support; }
  [[nodiscard]] bool all() const {
    return tilde_v_nonpositive && feasible && threshold_consistent && sandwich() &&
           pointwise_complementarity && relaxed_complementarity;
  }
};

[[nodiscard]] CharacterizationReport check_characterization(const L0Solution& sol,
                                                            const GridFunction& tilde_v, double tau);

}  // namespace l0prox
