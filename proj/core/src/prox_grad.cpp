#include "l0prox/prox_grad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/grid_io.hpp"
#include "l0prox/separable.hpp"

namespace l0prox {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double composite(double f, double alpha, const GridFunction& u) { return f + 0.5 * alpha * weighted_norm_sq(u); }

void validate(const ProxGradConfig& c, const Grid& grid) {
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) throw InvalidArgument("alpha must be a nonnegative number");
  if (!(c.tau > 0.0) || !(c.tau < grid.total_measure())) {
    throw InvalidArgument(fmt::format("tau = {} must lie in (0, total_measure = {})", c.tau, grid.total_measure()));
  }
  if (c.max_iter == 0) throw InvalidArgument("max_iter must be positive");
  if (!(c.step_norm_tol >= 0.0)) throw InvalidArgument("step_norm_tol must be nonnegative");
  if (c.zero_tol && !(*c.zero_tol >= 0.0)) throw InvalidArgument("zero_tol must be nonnegative");
  if (c.backtracking) {
    if (!(c.backtracking->gamma > 1.0)) throw InvalidArgument("backtracking gamma must exceed 1");
    if (!(c.backtracking->L0 > 0.0)) throw InvalidArgument("backtracking L0 must be positive");
  } else if (!(c.L > 0.0) || !std::isfinite(c.L)) {
    throw InvalidArgument("prox parameter L must be positive");
  }
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::tolerance:
      return "tolerance";
    case Termination::max_iter:
      return "max_iter";
    case Termination::backtracking_failure:
      return "backtracking_failure";
  }
  return "unknown";
}

ProxStep prox_step(const GridFunction& u_k, const GridFunction& grad_k, double L, double alpha, double tau) {
  require_same_grid(u_k.grid(), grad_k.grid());
  const auto g = QuadraticIntegrand::prox(u_k.values(), grad_k.values(), L, alpha);
  L0Solution sol = solve_l0(g, u_k.grid(), tau);
  return {std::move(sol.u), sol.lambda, sol.s, std::move(sol.support)};
}

BacktrackResult backtrack_L(const SmoothObjective& objective, const GridFunction& u_k, double f_k,
                            const GridFunction& grad_k, const Backtracking& params,
                            const std::function<GridFunction(double L)>& candidate) {
  if (!(params.gamma > 1.0) || !(params.L0 > 0.0)) throw InvalidArgument("invalid backtracking parameters");
  double L = params.L0;
  for (std::size_t j = 0; j <= params.max_increases; ++j) {
    GridFunction next = candidate(L);
    const GridFunction delta = next - u_k;
    const double f_next = objective.value(next);
    const double model = f_k + weighted_inner(grad_k, delta) + 0.5 * L * weighted_norm_sq(delta);
    if (f_next <= model + 1e-13 * (1.0 + std::abs(f_k))) return {L, j, std::move(next), f_next};
    L *= params.gamma;
  }
  throw SolverError(fmt::format("backtracking exhausted {} increases (L reached {:.6g})", params.max_increases, L));
}

double Trajectory::min_tail_lambda(std::size_t window) const {
  if (records.size() <= 1 || window == 0) return kNaN;
  const std::size_t steps = records.size() - 1;
  const std::size_t first = 1 + (steps > window ? steps - window : 0);
  double m = kInf;
  for (std::size_t k = first; k < records.size(); ++k) m = std::min(m, records[k].lambda);
  return m;
}

Trajectory run(const ProxGradConfig& config, const SmoothObjective& objective, const GridFunction& u0) {
  const GridPtr& grid = objective.grid();
  require_same_grid(grid, u0.grid());
  validate(config, *grid);

  Trajectory traj;
  traj.config = config;
  const bool bt = config.backtracking.has_value();
  if (!bt) {
    traj.lipschitz_bound = objective.lipschitz_bound();
    traj.descent_guaranteed = config.L > traj.lipschitz_bound;
    if (!traj.descent_guaranteed) {
      traj.warnings.push_back(fmt::format(
          "L = {:.6g} does not exceed the Lipschitz bound L_f = {:.6g}; monotone descent is not guaranteed", config.L,
          traj.lipschitz_bound));
    }
  } else {
    traj.descent_guaranteed = true;
  }

  GridFunction u = u0;
  auto eval = objective.evaluate(u);
  double F = composite(eval.value, config.alpha, u);
  Indicator chi = support(u, config.zero_tol.value_or(default_zero_tol(u)));
  {
    IterateRecord r0;
    r0.k = 0;
    r0.objective = F;
    r0.lambda = kNaN;
    r0.s = kNaN;
    r0.support_measure = chi.measure();
    r0.descent_slack = kNaN;
    r0.away_from_zero_slack = kNaN;
    r0.support_change_slack = kNaN;
    r0.pointwise_comp_residual = kNaN;
    r0.fixed_point_residual = kNaN;
    r0.L = bt ? config.backtracking->L0 : config.L;
    traj.records.push_back(r0);
  }

  double lambda_prev = kNaN;
  double L = bt ? config.backtracking->L0 : config.L;
  traj.termination = Termination::max_iter;

  for (std::size_t k = 1; k <= config.max_iter; ++k) {
    ProxStep step;
    double f_next = 0.0;
    if (bt) {
      Backtracking params = *config.backtracking;
      params.L0 = L;  // L never decreases along the run
      try {
        auto accepted = backtrack_L(objective, u, eval.value, eval.gradient, params, [&](double trial) {
          step = prox_step(u, eval.gradient, trial, config.alpha, config.tau);
          return step.u_next;
        });
        L = accepted.L;
      } catch (const SolverError& e) {
        traj.termination = Termination::backtracking_failure;
        traj.message = e.what();
        break;
      }
    } else {
      step = prox_step(u, eval.gradient, L, config.alpha, config.tau);
    }

    auto next_eval = objective.evaluate(step.u_next);
    f_next = next_eval.value;
    const GridFunction delta = step.u_next - u;
    const double step_sq = weighted_norm_sq(delta);
    const double F_next = composite(f_next, config.alpha, step.u_next);
    const double La = L + config.alpha;

    IterateRecord rec;
    rec.k = k;
    rec.objective = F_next;
    rec.lambda = step.lambda;
    rec.s = step.s;
    rec.step_norm_sq = step_sq;
    rec.support_measure = step.support.measure();
    rec.support_change = indicator_l1_distance(step.support, chi);
    rec.L = L;
    const double L_ref = bt ? L : traj.lipschitz_bound;
    rec.descent_slack = F - F_next - 0.5 * (L - L_ref) * step_sq;

    const double away_bound = std::sqrt(2.0 * step.lambda / La);
    double min_abs = kInf;
    double comp = 0.0;
    double fixed = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double un = step.u_next[i];
      const double lin = L * u[i] - eval.gradient[i];
      if (step.support[i]) {
        min_abs = std::min(min_abs, std::abs(un));
        comp = std::max(comp, step.lambda - lin * lin / (2.0 * La));
        fixed = std::max(fixed, std::abs(config.alpha * un + (eval.gradient[i] + L * (un - u[i]))));
      } else {
        fixed = std::max(fixed, std::abs(config.alpha * un));
      }
    }
    rec.away_from_zero_slack = min_abs == kInf ? kInf : min_abs - away_bound;
    rec.pointwise_comp_residual = comp;
    rec.fixed_point_residual = fixed;
    rec.support_change_slack =
        k >= 2 ? step_sq - 2.0 * std::min(lambda_prev, step.lambda) / La * rec.support_change : kNaN;
    traj.records.push_back(rec);

    u = std::move(step.u_next);
    chi = std::move(step.support);
    eval = std::move(next_eval);
    F = F_next;
    lambda_prev = step.lambda;

    if (std::sqrt(step_sq) < config.step_norm_tol) {
      traj.termination = Termination::tolerance;
      break;
    }
  }
  traj.u = std::move(u);
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "k,objective,lambda,step_norm_sq,support_measure,support_change,descent_slack,away_slack,change_slack\n";
  for (const auto& r : traj.records) {
    os << r.k << ',' << format_double(r.objective) << ',' << format_double(r.lambda) << ','
       << format_double(r.step_norm_sq) << ',' << format_double(r.support_measure) << ','
       << format_double(r.support_change) << ',' << format_double(r.descent_slack) << ','
       << format_double(r.away_from_zero_slack) << ',' << format_double(r.support_change_slack) << '\n';
  }
}

}  // namespace l0prox
