#pragma once

#include <cstddef>
#include <memory>

#include "l0prox/objective.hpp"
#include "l0prox/poisson.hpp"

namespace l0prox {

struct PoissonTrackingOptions {
  double cg_tol = 1e-10;
  /// 0 selects 10 * number of cells.
  std::size_t cg_max_iter = 0;
  std::size_t power_max_iter = 500;
  double power_rel_tol = 1e-13;
};

/// f(u) = (1/2) ||y_u - y_d||^2 with A y_u = u, A = -div(a grad .) with
/// homogeneous Dirichlet data. The control enters the state equation
/// linearly, so the adjoint A phi = y_u - y_d gives grad f(u) = phi.
class PoissonTracking final : public SmoothObjective {
 public:
  PoissonTracking(GridPtr grid, GridFunction coefficient, GridFunction target,
                  PoissonTrackingOptions options = {});
  /// a == 1.
  PoissonTracking(GridPtr grid, GridFunction target, PoissonTrackingOptions options = {});

  [[nodiscard]] const GridPtr& grid() const override { return op_.grid(); }
  [[nodiscard]] const PoissonOperator& op() const { return op_; }
  [[nodiscard]] const GridFunction& target() const { return target_; }
  [[nodiscard]] const PoissonTrackingOptions& options() const { return options_; }

  [[nodiscard]] GridFunction solve_state(const GridFunction& u) const;
  [[nodiscard]] GridFunction solve_adjoint(const GridFunction& y) const;

  [[nodiscard]] double value(const GridFunction& u) const override;
  [[nodiscard]] GridFunction gradient(const GridFunction& u) const override;
  [[nodiscard]] Evaluation evaluate(const GridFunction& u) const override;

  /// kLipschitzSafety * lipschitz_estimate(), or the Gershgorin fallback
  /// 1 / lambda_min(A)^2 when power iteration stagnates.
  [[nodiscard]] double lipschitz_bound() const override;
  /// Power-iteration estimate of ||S* S|| with S = A^{-1} in the weighted norm.
  [[nodiscard]] double lipschitz_estimate() const;
  /// True when lipschitz_bound() came from the Gershgorin fallback.
  [[nodiscard]] bool lipschitz_fallback_used() const;

 private:
  struct LipschitzCache;
  GridFunction solve(const GridFunction& rhs) const;
  const LipschitzCache& lipschitz_cache() const;

  PoissonOperator op_;
  GridFunction target_;
  PoissonTrackingOptions options_;
  std::shared_ptr<LipschitzCache> cache_;
};

}  // namespace l0prox
