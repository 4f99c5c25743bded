#pragma once

#include "json.hpp"

#include "l0prox/optimality.hpp"
#include "l0prox/prox_grad.hpp"

namespace l0prox::cli {

/// Field names match OptimalityReport. Undefined residuals and NaN/inf become null.
[[nodiscard]] nlohmann::json to_json(const OptimalityReport& r);

/// Solver summary: termination, iteration count, prox parameter, tail multipliers.
[[nodiscard]] nlohmann::json summary_json(const Trajectory& t, std::size_t tail_window);

}  // namespace l0prox::cli
