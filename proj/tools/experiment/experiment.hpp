#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace l0prox::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kSolverFailure = 3, kVerifyFailure = 4 };

struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> max_iter;
  bool quiet = false;
};

/// Writes trajectory.csv, solution.csv, report.json and config_echo.json.
int run_experiment(const std::filesystem::path& config_path, const Overrides& o, std::ostream& out,
                   std::ostream& err);

/// Checks a solution file against the config's problem; prints the report JSON.
int verify(const std::filesystem::path& solution_path, const std::filesystem::path& config_path, const Overrides& o,
           std::ostream& out, std::ostream& err);

/// Compares the closed-form separable solve with exhaustive search (at most 20 cells).
int oracle(const std::filesystem::path& config_path, const Overrides& o, std::ostream& out, std::ostream& err);

}  // namespace l0prox::cli
