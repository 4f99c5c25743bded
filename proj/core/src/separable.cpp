#include "l0prox/separable.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/summation.hpp"

namespace l0prox {

// --- QuadraticIntegrand ------------------------------------------------------

QuadraticIntegrand::QuadraticIntegrand(std::vector<double> linear, std::vector<double> shift,
                                       double curvature, std::vector<double> offset)
    : linear_(std::move(linear)), shift_(std::move(shift)), offset_(std::move(offset)), curvature_(curvature) {
  if (!(curvature_ > 0.0) || !std::isfinite(curvature_)) {
    throw InvalidIntegrand("quadratic integrand needs a positive finite curvature");
  }
  if (shift_.empty()) shift_.assign(linear_.size(), 0.0);
  if (offset_.empty()) offset_.assign(linear_.size(), 0.0);
  if (shift_.size() != linear_.size() || offset_.size() != linear_.size()) {
    throw InvalidArgument("quadratic integrand coefficient lengths differ");
  }
}

QuadraticIntegrand QuadraticIntegrand::prox(std::span<const double> u_k, std::span<const double> grad_k,
                                            double L, double alpha) {
  if (!(L > 0.0)) throw InvalidArgument("prox parameter L must be positive");
  if (alpha < 0.0) throw InvalidArgument("alpha must be nonnegative");
  if (u_k.size() != grad_k.size()) throw GridMismatch("iterate and gradient sizes differ");
  std::vector<double> a(u_k.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = grad_k[i] - L * u_k[i];
  return QuadraticIntegrand(std::move(a), {}, L + alpha);
}

double QuadraticIntegrand::evaluate(std::size_t cell, double u) const {
  const double d = u - shift_[cell];
  return linear_[cell] * u + 0.5 * curvature_ * d * d + offset_[cell];
}

SeparableIntegrand::PointwiseMin QuadraticIntegrand::pointwise_min(std::size_t cell) const {
  const double u = shift_[cell] - linear_[cell] / curvature_;
  return {u, evaluate(cell, u)};
}

// --- helpers -----------------------------------------------------------------

namespace {

struct CellTable {
  std::vector<double> g0;
  std::vector<double> minimizer;
  std::vector<double> min_value;
};

CellTable tabulate(const SeparableIntegrand& g, const Grid& grid) {
  if (g.size() != grid.size()) {
    throw GridMismatch(fmt::format("integrand has {} cells, grid has {}", g.size(), grid.size()));
  }
  CellTable t;
  t.g0.resize(grid.size());
  t.minimizer.resize(grid.size());
  t.min_value.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.g0[i] = g.evaluate(i, 0.0);
    if (!std::isfinite(t.g0[i])) throw InvalidIntegrand(fmt::format("g(x, 0) is not finite at cell {}", i));
    const auto pm = g.pointwise_min(i);
    if (!std::isfinite(pm.minimizer) || !std::isfinite(pm.value)) {
      throw InvalidIntegrand(fmt::format("pointwise minimum is not finite at cell {}", i));
    }
    t.minimizer[i] = pm.minimizer;
    t.min_value[i] = pm.value;
  }
  return t;
}

double tilde_v_of(const CellTable& t, std::size_t i) { return std::min(0.0, t.min_value[i] - t.g0[i]); }

// Objective of the control that equals the pointwise minimizer on `flags` and
// zero elsewhere. Shared by the solver and the oracle so that equal supports
// give bitwise equal objectives.
double objective_on_support(const CellTable& t, const Grid& grid, const Indicator& flags) {
  const auto w = grid.weights();
  return pairwise_sum(grid.size(), [&](std::size_t i) { return w[i] * (flags[i] ? t.min_value[i] : t.g0[i]); });
}

L0Solution assemble(const CellTable& t, const GridPtr& grid, const GridFunction& tilde_v, Indicator support) {
  L0Solution sol;
  sol.u = GridFunction(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (support[i]) sol.u[i] = t.minimizer[i];
  }
  sol.s = threshold_for_support(tilde_v, support);
  sol.lambda = -sol.s;
  sol.support_measure = support.measure();
  sol.objective = objective_on_support(t, *grid, support);
  sol.support = std::move(support);
  return sol;
}

void check_tau(const Grid& grid, double tau) {
  if (!(tau > 0.0) || !(tau < grid.total_measure())) {
    throw InvalidArgument(
        fmt::format("tau = {} must lie in (0, total_measure = {})", tau, grid.total_measure()));
  }
}

struct Candidate {
  std::size_t index;
  double weight;
  double gain;  // -tilde_v > 0
};

class KnapsackSearch {
 public:
  KnapsackSearch(std::vector<Candidate> items, long double capacity)
      : items_(std::move(items)), capacity_(capacity), chosen_(items_.size(), 0), best_(items_.size(), 0) {}

  std::vector<unsigned char> run() {
    dfs(0, 0.0L, 0.0L);
    return best_;
  }

 private:
  static constexpr std::size_t kNodeLimit = 50'000'000;

  long double bound(std::size_t pos, long double used, long double value) const {
    long double room = capacity_ - used;
    for (std::size_t j = pos; j < items_.size() && room > 0.0L; ++j) {
      const long double w = items_[j].weight;
      if (w <= room) {
        value += w * items_[j].gain;
        room -= w;
      } else {
        value += room * items_[j].gain;
        room = 0.0L;
      }
    }
    return value;
  }

  void dfs(std::size_t pos, long double used, long double value) {
    if (++nodes_ > kNodeLimit) throw SolverError("support selection exceeded its branch-and-bound node budget");
    if (value > best_value_) {
      best_value_ = value;
      best_ = chosen_;
    }
    if (pos == items_.size()) return;
    if (bound(pos, used, value) <= best_value_) return;
    const long double w = items_[pos].weight;
    if (used + w <= capacity_) {
      chosen_[pos] = 1;
      dfs(pos + 1, used + w, value + w * items_[pos].gain);
      chosen_[pos] = 0;
    }
    dfs(pos + 1, used, value);
  }

  std::vector<Candidate> items_;
  long double capacity_;
  std::vector<unsigned char> chosen_;
  std::vector<unsigned char> best_;
  long double best_value_ = 0.0L;
  std::size_t nodes_ = 0;
};

}  // namespace

// --- public operations -------------------------------------------------------

GridFunction compute_tilde_v(const SeparableIntegrand& g, const GridPtr& grid) {
  const CellTable t = tabulate(g, *grid);
  GridFunction v(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) v[i] = tilde_v_of(t, i);
  return v;
}

double threshold_for_support(const GridFunction& tilde_v, const Indicator& support) {
  require_same_grid(tilde_v.grid(), support.grid());
  bool excluded_negative = false;
  bool any_selected = false;
  double least_negative_selected = -std::numeric_limits<double>::infinity();
  double most_negative = 0.0;
  for (std::size_t i = 0; i < tilde_v.size(); ++i) {
    most_negative = std::min(most_negative, tilde_v[i]);
    if (support[i]) {
      any_selected = true;
      least_negative_selected = std::max(least_negative_selected, tilde_v[i]);
    } else if (tilde_v[i] < 0.0) {
      excluded_negative = true;
    }
  }
  if (!excluded_negative) return 0.0;
  if (!any_selected) return most_negative;
  return std::min(0.0, least_negative_selected);
}

SupportSelection select_support(const GridFunction& tilde_v, double tau) {
  const GridPtr& grid = tilde_v.grid();
  check_tau(*grid, tau);
  std::vector<Candidate> items;
  for (std::size_t i = 0; i < tilde_v.size(); ++i) {
    if (!(tilde_v[i] <= 0.0)) {
      throw InvalidArgument(fmt::format("tilde_v must be nonpositive (cell {} has {})", i, tilde_v[i]));
    }
    if (tilde_v[i] < 0.0) items.push_back({i, grid->weight(i), -tilde_v[i]});
  }
  std::stable_sort(items.begin(), items.end(), [](const Candidate& a, const Candidate& b) {
    return a.gain > b.gain;  // ascending tilde_v, index order kept among ties
  });

  // Selected positions in `items` order (ascending tilde_v).
  std::vector<std::size_t> picked;
  if (grid->uniform_weights()) {
    long double used = 0.0L;
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (used + items[j].weight > tau) break;
      used += items[j].weight;
      picked.push_back(j);
    }
  } else {
    std::vector<Candidate> fitting;
    std::vector<std::size_t> position;
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (items[j].weight <= tau) {
        fitting.push_back(items[j]);
        position.push_back(j);
      }
    }
    const auto chosen = KnapsackSearch(fitting, tau).run();
    for (std::size_t j = 0; j < fitting.size(); ++j) {
      if (chosen[j]) picked.push_back(position[j]);
    }
  }

  SupportSelection out{Indicator(grid), 0.0};
  for (std::size_t j : picked) out.support.set(items[j].index, true);
  // Guard against the long double running sum disagreeing with the pairwise
  // measure at the tau boundary: drop the least negative pick.
  while (!picked.empty() && out.support.measure() > tau) {
    out.support.set(items[picked.back()].index, false);
    picked.pop_back();
  }
  out.s = threshold_for_support(tilde_v, out.support);
  return out;
}

L0Solution solve_l0(const SeparableIntegrand& g, const GridPtr& grid, double tau) {
  const CellTable t = tabulate(g, *grid);
  GridFunction tilde_v(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) tilde_v[i] = tilde_v_of(t, i);
  auto selection = select_support(tilde_v, tau);
  return assemble(t, grid, tilde_v, std::move(selection.support));
}

L0Solution brute_force_l0(const SeparableIntegrand& g, const GridPtr& grid, double tau) {
  constexpr std::size_t kMaxCells = 20;
  const std::size_t n = grid->size();
  if (n > kMaxCells) {
    throw InvalidArgument(fmt::format("brute force limited to {} cells, got {}", kMaxCells, n));
  }
  check_tau(*grid, tau);
  const CellTable t = tabulate(g, *grid);
  GridFunction tilde_v(grid);
  for (std::size_t i = 0; i < n; ++i) tilde_v[i] = tilde_v_of(t, i);

  Indicator flags(grid);
  Indicator best(grid);
  double best_objective = std::numeric_limits<double>::infinity();
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t i = 0; i < n; ++i) flags.set(i, ((mask >> i) & 1U) != 0);
    if (flags.measure() > tau) continue;
    const double obj = objective_on_support(t, *grid, flags);
    if (obj < best_objective) {
      best_objective = obj;
      best = flags;
    }
  }
  return assemble(t, grid, tilde_v, std::move(best));
}

double integral_objective(const SeparableIntegrand& g, const GridFunction& u) {
  if (g.size() != u.size()) throw GridMismatch("integrand and control sizes differ");
  const auto w = u.grid()->weights();
  bool infinite = false;
  const double sum = pairwise_sum(u.size(), [&](std::size_t i) {
    const double gi = g.evaluate(i, u[i]);
    if (std::isinf(gi) && gi > 0) {
      infinite = true;
      return 0.0;
    }
    return w[i] * gi;
  });
  return infinite ? std::numeric_limits<double>::infinity() : sum;
}

PenalizedEquivalenceReport check_penalized_equivalence(const L0Solution& sol, const SeparableIntegrand& g,
                                                       double tau, std::span<const GridFunction> trials,
                                                       double tol) {
  PenalizedEquivalenceReport rep;
  rep.trials = trials.size();
  rep.worst_margin_penalty = std::numeric_limits<double>::infinity();
  rep.worst_margin_excess = std::numeric_limits<double>::infinity();
  const double j_sol = integral_objective(g, sol.u);
  const double l0_sol = l0_measure(sol.u, 0.0);
  const double pen_sol = j_sol + sol.lambda * l0_sol;
  const double exc_sol = j_sol + sol.lambda * std::max(0.0, l0_sol - tau);
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const GridFunction& u = trials[k];
    require_same_grid(u.grid(), sol.u.grid());
    const double j = integral_objective(g, u);
    const double l0 = l0_measure(u, 0.0);
    const double m_pen = (j + sol.lambda * l0) - pen_sol;
    const double m_exc = (j + sol.lambda * std::max(0.0, l0 - tau)) - exc_sol;
    if (m_pen < rep.worst_margin_penalty) {
      rep.worst_margin_penalty = m_pen;
      rep.worst_trial_penalty = k;
    }
    if (m_exc < rep.worst_margin_excess) {
      rep.worst_margin_excess = m_exc;
      rep.worst_trial_excess = k;
    }
    if (m_pen < -tol || m_exc < -tol) ++rep.violations;
  }
  return rep;
}

CharacterizationReport check_characterization(const L0Solution& sol, const GridFunction& tilde_v, double tau) {
  require_same_grid(sol.u.grid(), tilde_v.grid());
  const Grid& grid = *tilde_v.grid();
  CharacterizationReport r;
  r.feasible = sol.support_measure <= tau;
  r.threshold_consistent = sol.s <= 0.0 && sol.lambda == -sol.s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (tilde_v[i] > 0.0) r.tilde_v_nonpositive = false;
    const bool in = sol.support[i];
    if (in && !(tilde_v[i] <= sol.s)) r.support_within_level = false;
    if (!in && tilde_v[i] < sol.s) r.strict_level_in_support = false;
    const double nz = sol.u[i] != 0.0 ? 1.0 : 0.0;
    if (nz * (tilde_v[i] - sol.s) > 0.0) r.pointwise_complementarity = false;
  }
  const double slack = tau - sol.support_measure;
  if (sol.lambda > 0.0 && !(slack < grid.max_weight())) r.relaxed_complementarity = false;
  if (sol.support_measure < tau - grid.max_weight() && sol.s != 0.0) r.relaxed_complementarity = false;
  return r;
}

}  // namespace l0prox
