#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "l0prox/grid.hpp"
#include "l0prox/objective.hpp"
#include "l0prox/poisson_tracking.hpp"
#include "l0prox/prox_grad.hpp"
#include "l0prox/separable.hpp"

namespace l0prox::cli {

/// Invalid or unreadable configuration. `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ProblemKind { quadratic, poisson_tracking, separable_direct };

[[nodiscard]] std::string to_string(ProblemKind k);

struct Tolerances {
  double stationarity = 1e-6;
  double pointwise_comp = 1e-8;
  double comp_tau = 1e-10;
};

struct ExperimentConfig {
  ProblemKind kind = ProblemKind::quadratic;
  std::uint64_t seed = 0;
  GridPtr grid;
  double alpha = 0.0;
  PoissonTrackingOptions poisson;
  ProxGradConfig solver;          ///< solver.L is 0 until resolve_prox_parameter()
  std::optional<double> L_factor;  ///< L = L_factor * lipschitz_bound when set
  Tolerances verify;
  std::size_t tail_window = 20;
  std::filesystem::path output_dir = "out";

  // Field generators, kept as normalized JSON and evaluated by build_problem().
  nlohmann::json target;
  nlohmann::json coefficient;
  nlohmann::json matrix;
  nlohmann::json linear;
  nlohmann::json u0;

  std::filesystem::path base_dir;  ///< relative file paths resolve against the config's directory
  nlohmann::json normalized;       ///< complete config with defaults filled in
};

/// Parses a config file. A top-level "builtin" names a preset that the rest of
/// the file patches (JSON merge patch).
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] ExperimentConfig parse_config(nlohmann::json j, const std::filesystem::path& base_dir = {});

/// Names accepted by "builtin".
[[nodiscard]] std::vector<std::string> builtin_names();

struct Problem {
  std::unique_ptr<SmoothObjective> objective;
  const PoissonTracking* poisson = nullptr;      ///< set for poisson-tracking
  std::optional<QuadraticIntegrand> integrand;  ///< set for separable-direct
  GridFunction u0;
};

[[nodiscard]] Problem build_problem(const ExperimentConfig& config);

/// Fills config.solver.L from L_factor and the objective's Lipschitz bound.
void resolve_prox_parameter(ExperimentConfig& config, const SmoothObjective& objective);

}  // namespace l0prox::cli
