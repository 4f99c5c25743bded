#include "l0prox/poisson_tracking.hpp"

#include <cmath>
#include <mutex>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/summation.hpp"

namespace l0prox {

struct PoissonTracking::LipschitzCache {
  std::once_flag once;
  double estimate = 0.0;
  double bound = 0.0;
  bool fallback = false;
};

PoissonTracking::PoissonTracking(GridPtr grid, GridFunction coefficient, GridFunction target,
                                 PoissonTrackingOptions options)
    : op_(std::move(grid), std::move(coefficient)),
      target_(std::move(target)),
      options_(options),
      cache_(std::make_shared<LipschitzCache>()) {
  require_same_grid(op_.grid(), target_.grid());
  if (!op_.grid()->uniform_weights()) throw InvalidArgument("Poisson tracking needs uniform cell weights");
  if (!(options_.cg_tol > 0.0)) throw InvalidArgument("cg_tol must be positive");
  if (options_.cg_max_iter == 0) options_.cg_max_iter = 10 * op_.size();
  for (double v : target_.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("target state has non-finite values");
  }
}

PoissonTracking::PoissonTracking(GridPtr grid, GridFunction target, PoissonTrackingOptions options)
    : PoissonTracking(grid, GridFunction(grid, 1.0), std::move(target), options) {}

GridFunction PoissonTracking::solve(const GridFunction& rhs) const {
  require_same_grid(op_.grid(), rhs.grid());
  GridFunction x(op_.grid());
  conjugate_gradient(op_, rhs.values(), x.values(), options_.cg_tol, options_.cg_max_iter);
  return x;
}

GridFunction PoissonTracking::solve_state(const GridFunction& u) const { return solve(u); }

GridFunction PoissonTracking::solve_adjoint(const GridFunction& y) const { return solve(y - target_); }

double PoissonTracking::value(const GridFunction& u) const {
  const GridFunction y = solve_state(u);
  return 0.5 * weighted_norm_sq(y - target_);
}

GridFunction PoissonTracking::gradient(const GridFunction& u) const { return solve_adjoint(solve_state(u)); }

SmoothObjective::Evaluation PoissonTracking::evaluate(const GridFunction& u) const {
  const GridFunction y = solve_state(u);
  const GridFunction r = y - target_;
  return {0.5 * weighted_norm_sq(r), solve(r)};
}

const PoissonTracking::LipschitzCache& PoissonTracking::lipschitz_cache() const {
  std::call_once(cache_->once, [this] {
    // Power iteration on T = W^{-1} A^{-1} W A^{-1}, self-adjoint and positive
    // in the W inner product; its top eigenvalue is ||grad f||_Lip.
    const GridPtr& g = op_.grid();
    const auto w = g->weights();
    const std::size_t n = g->size();
    const std::size_t cg_iter = options_.cg_max_iter;
    const double cg_tol = std::min(options_.cg_tol, 1e-12);
    GridFunction v(g, 1.0);
    const double v0 = std::sqrt(weighted_norm_sq(v));
    v = (1.0 / v0) * v;
    GridFunction tmp(g), tv(g);
    double mu = 0.0;
    bool converged = false;
    try {
      for (std::size_t it = 0; it < options_.power_max_iter; ++it) {
        conjugate_gradient(op_, v.values(), tmp.values(), cg_tol, cg_iter);
        for (std::size_t i = 0; i < n; ++i) tmp[i] *= w[i];
        conjugate_gradient(op_, tmp.values(), tv.values(), cg_tol, cg_iter);
        for (std::size_t i = 0; i < n; ++i) tv[i] /= w[i];
        const double next = weighted_inner(tv, v);  // ||v||_W == 1
        const double norm = std::sqrt(weighted_norm_sq(tv));
        if (!(norm > 0.0) || !std::isfinite(norm)) break;
        v = (1.0 / norm) * tv;
        if (it > 0 && std::abs(next - mu) <= options_.power_rel_tol * next) {
          mu = next;
          converged = true;
          break;
        }
        mu = next;
      }
    } catch (const SolverError&) {
      converged = false;
    }
    if (converged) {
      cache_->estimate = mu;
      cache_->bound = kLipschitzSafety * mu;
      return;
    }
    const double lo = op_.gershgorin_lower_bound();
    if (!(lo > 0.0)) {
      throw SolverError(
          "power iteration for the Lipschitz constant stagnated and the Gershgorin bound is not informative");
    }
    cache_->estimate = mu;
    cache_->bound = 1.0 / (lo * lo);
    cache_->fallback = true;
  });
  return *cache_;
}

double PoissonTracking::lipschitz_bound() const { return lipschitz_cache().bound; }
double PoissonTracking::lipschitz_estimate() const { return lipschitz_cache().estimate; }
bool PoissonTracking::lipschitz_fallback_used() const { return lipschitz_cache().fallback; }

}  // namespace l0prox
