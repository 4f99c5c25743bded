#include "report_json.hpp"

#include <cmath>
#include <optional>

namespace l0prox::cli {

using json = nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

}  // namespace

json to_json(const OptimalityReport& r) {
  return {
      {"s_est", num(r.s_est)},
      {"lambda_hint", num(r.lambda_hint)},
      {"comp_tau_residual", num(r.comp_tau_residual)},
      {"stationarity_residual", num(r.stationarity_residual)},
      {"pointwise_comp_residual", num(r.pointwise_comp_residual)},
      {"hamiltonian_gap", num(r.hamiltonian_gap)},
      {"stationarity_residual_normalized", num(r.stationarity_residual_normalized)},
      {"pointwise_comp_residual_normalized", num(r.pointwise_comp_residual_normalized)},
      {"hamiltonian_gap_normalized", num(r.hamiltonian_gap_normalized)},
      {"feasible", r.feasible},
      {"support_measure", num(r.support_measure)},
      {"tau", num(r.tau)},
      {"alpha", num(r.alpha)},
      {"max_cell_weight", num(r.max_cell_weight)},
  };
}

json summary_json(const Trajectory& t, std::size_t tail_window) {
  const auto& last = t.last();
  return {
      {"termination", to_string(t.termination)},
      {"message", t.message},
      {"iterations", t.records.size() - 1},
      {"L", num(last.L)},
      {"lipschitz_bound", num(t.lipschitz_bound)},
      {"descent_guaranteed", t.descent_guaranteed},
      {"final_objective", num(last.objective)},
      {"lambda_final", num(last.lambda)},
      {"support_measure", num(last.support_measure)},
      {"min_tail_lambda", num(t.min_tail_lambda(tail_window))},
      {"tail_window", tail_window},
      {"warnings", t.warnings},
  };
}

}  // namespace l0prox::cli
