#include "l0prox/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/summation.hpp"

namespace l0prox {

namespace {

// Residuals shared by both checkers. `g` is grad f(u) (equivalently the
// adjoint state); the state-dependent part of the Hamiltonian is the same on
// both sides of the gap and drops out.
OptimalityReport residuals(const GridFunction& u, const GridFunction& g, double alpha, double tau, double s,
                           const Indicator& supp) {
  const Grid& grid = *u.grid();
  const auto w = grid.weights();
  OptimalityReport r;
  r.s_est = s;
  r.alpha = alpha;
  r.tau = tau;
  r.support_measure = supp.measure();
  r.feasible = r.support_measure <= tau;
  r.max_cell_weight = grid.max_weight();
  r.comp_tau_residual = std::abs(s) * std::max(0.0, tau - r.support_measure - r.max_cell_weight);

  const std::size_t n = grid.size();
  if (alpha == 0.0) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(g[i]));
    r.stationarity_residual = m;
    r.stationarity_residual_normalized =
        std::sqrt(pairwise_sum(n, [&](std::size_t i) { return w[i] * g[i] * g[i]; }) / grid.total_measure());
    return r;
  }

  const double lambda = -s;
  std::vector<double> stat(n, 0.0), comp(n, 0.0), gap(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    const double q = gi * gi / (2.0 * alpha);
    if (supp[i]) {
      stat[i] = std::abs(u[i] + gi / alpha);
      comp[i] = std::max(0.0, -q - s);
    }
    const double current = 0.5 * alpha * u[i] * u[i] + gi * u[i] + (supp[i] ? lambda : 0.0);
    const double best = std::min(0.0, -q + lambda);
    gap[i] = std::max(0.0, current - best);
  }
  r.stationarity_residual = *std::max_element(stat.begin(), stat.end());
  r.pointwise_comp_residual = *std::max_element(comp.begin(), comp.end());
  r.hamiltonian_gap = *std::max_element(gap.begin(), gap.end());
  if (r.support_measure > 0.0) {
    r.stationarity_residual_normalized =
        std::sqrt(pairwise_sum(n, [&](std::size_t i) { return w[i] * stat[i] * stat[i]; }) / r.support_measure);
    r.pointwise_comp_residual_normalized =
        pairwise_sum(n, [&](std::size_t i) { return w[i] * comp[i]; }) / r.support_measure;
  } else {
    r.pointwise_comp_residual_normalized = 0.0;
  }
  r.hamiltonian_gap_normalized = pairwise_sum(n, [&](std::size_t i) { return w[i] * gap[i]; }) / grid.total_measure();
  return r;
}

}  // namespace

OptimalityReport check_noc(const GridFunction& u, const SmoothObjective& objective, double alpha, double tau,
                           std::optional<double> lambda_hint, std::optional<double> zero_tol) {
  require_same_grid(objective.grid(), u.grid());
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  if (lambda_hint && !(*lambda_hint >= 0.0)) throw InvalidArgument("lambda hint must be nonnegative");
  const Grid& grid = *u.grid();
  const GridFunction g = objective.gradient(u);
  const Indicator supp = support(u, zero_tol.value_or(default_zero_tol(u)));
  const double meas = supp.measure();

  double s = 0.0;
  if (lambda_hint) {
    s = -*lambda_hint;
  } else if (alpha > 0.0 && tau - meas < grid.max_weight()) {
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double q = g[i] * g[i] / (2.0 * alpha);
      if (supp[i]) qmin = std::min(qmin, q);
      qmax = std::max(qmax, q);
    }
    // Empty support under an active constraint: no cell fits, so every gain is priced out.
    s = std::isfinite(qmin) ? std::min(0.0, -qmin) : -qmax;
  }
  OptimalityReport r = residuals(u, g, alpha, tau, s, supp);
  r.lambda_hint = lambda_hint;
  return r;
}

OptimalityReport check_pmp_pointwise(const PoissonTracking& problem, const GridFunction& u, double alpha,
                                     double lambda, double tau, std::optional<double> zero_tol) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument("pointwise Hamiltonian check needs alpha > 0 (the pointwise minimum degenerates)");
  }
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
  require_same_grid(problem.grid(), u.grid());
  const GridFunction y = problem.solve_state(u);
  const GridFunction phi = problem.solve_adjoint(y);
  const Indicator supp = support(u, zero_tol.value_or(default_zero_tol(u)));
  OptimalityReport r = residuals(u, phi, alpha, tau, -lambda, supp);
  r.lambda_hint = lambda;
  return r;
}

}  // namespace l0prox
