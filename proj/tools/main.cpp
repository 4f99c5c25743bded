#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "experiment/experiment.hpp"

int main(int argc, char** argv) {
  using namespace l0prox::cli;

  CLI::App app{"L0-constrained minimization on grids: solve, verify, oracle"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  std::string output_dir;
  std::size_t max_iter = 0;
  app.add_option("--output-dir", output_dir, "Override the config's output directory");
  app.add_option("--max-iter", max_iter, "Override solver.max_iter");
  app.add_flag("--quiet", o.quiet, "Suppress the progress summary");

  std::string config, solution;
  auto* solve = app.add_subcommand("solve", "Run an experiment and write its outputs");
  solve->add_option("config", config, "Experiment config (JSON)")->required();
  auto* check = app.add_subcommand("verify", "Check a solution against the optimality conditions");
  check->add_option("solution", solution, "Solution CSV")->required();
  check->add_option("config", config, "Experiment config (JSON)")->required();
  auto* orc = app.add_subcommand("oracle", "Compare the separable solver with exhaustive search");
  orc->add_option("config", config, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(kValidation);
  }
  if (!output_dir.empty()) o.output_dir = output_dir;
  if (app.count("--max-iter")) o.max_iter = max_iter;

  if (*solve) return run_experiment(config, o, std::cout, std::cerr);
  if (*check) return verify(solution, config, o, std::cout, std::cerr);
  return oracle(config, o, std::cout, std::cerr);
}
