#include "experiment.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/grid_io.hpp"
#include "l0prox/optimality.hpp"
#include "l0prox/prox_grad.hpp"
#include "report_json.hpp"

namespace l0prox::cli {

using json = nlohmann::json;

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

ExperimentConfig load(const std::filesystem::path& path, const Overrides& o) {
  if (!std::filesystem::exists(path)) throw ConfigError("", "config file not found: " + path.string());
  ExperimentConfig c = load_config(path);
  if (o.output_dir) {
    c.output_dir = *o.output_dir;
    c.normalized["output_dir"] = c.output_dir.string();
  }
  if (o.max_iter) {
    if (*o.max_iter == 0) throw ConfigError("--max-iter", "must be positive");
    c.solver.max_iter = *o.max_iter;
    if (c.kind != ProblemKind::separable_direct) c.normalized["solver"]["max_iter"] = *o.max_iter;
  }
  return c;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("output_dir", "cannot write " + path.string());
  os << j.dump(2) << '\n';
}

// The closed-form solution as a one-step trajectory from u = 0.
Trajectory direct_trajectory(const ExperimentConfig& c, const L0Solution& sol, const SmoothObjective& f) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Trajectory t;
  t.config = c.solver;
  t.termination = Termination::tolerance;
  t.message = "closed-form separable solution";
  IterateRecord r0;
  r0.objective = 0.0;
  r0.lambda = r0.s = r0.descent_slack = r0.away_from_zero_slack = r0.support_change_slack = nan;
  r0.pointwise_comp_residual = r0.fixed_point_residual = r0.L = nan;
  IterateRecord r1 = r0;
  r1.k = 1;
  r1.objective = f.value(sol.u) + 0.5 * c.alpha * weighted_norm_sq(sol.u);
  r1.lambda = sol.lambda;
  r1.s = sol.s;
  r1.step_norm_sq = weighted_norm_sq(sol.u);
  r1.support_measure = sol.support_measure;
  r1.support_change = sol.support_measure;
  t.records = {r0, r1};
  t.u = sol.u;
  return t;
}

}  // namespace

int run_experiment(const std::filesystem::path& config_path, const Overrides& o, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig c = load(config_path, o);
    Problem p = build_problem(c);
    const SmoothObjective& f = *p.objective;

    Trajectory traj;
    json report;
    report["problem"] = to_string(c.kind);
    report["cells"] = c.grid->size();
    report["total_measure"] = c.grid->total_measure();
    if (c.kind == ProblemKind::separable_direct) {
      const L0Solution sol = solve_l0(*p.integrand, c.grid, c.solver.tau);
      traj = direct_trajectory(c, sol, f);
      const auto ch = check_characterization(sol, compute_tilde_v(*p.integrand, c.grid), c.solver.tau);
      report["separable"] = {{"s", sol.s},
                             {"lambda", sol.lambda},
                             {"objective", sol.objective},
                             {"support_measure", sol.support_measure},
                             {"sandwich", ch.sandwich()},
                             {"pointwise_complementarity", ch.pointwise_complementarity},
                             {"relaxed_complementarity", ch.relaxed_complementarity}};
    } else {
      resolve_prox_parameter(c, f);
      if (!c.solver.backtracking) c.normalized["solver"]["L"] = c.solver.L;
      traj = run(c.solver, f, p.u0);
    }
    report["solver"] = summary_json(traj, c.tail_window);

    const double lambda_final = traj.last().lambda;
    OptimalityReport noc = check_noc(traj.u, f, c.alpha, c.solver.tau, std::nullopt, c.solver.zero_tol);
    if (std::isfinite(lambda_final)) noc.lambda_hint = lambda_final;
    report["optimality"] = to_json(noc);
    if (std::isfinite(lambda_final)) {
      report["optimality_at_lambda_final"] =
          to_json(check_noc(traj.u, f, c.alpha, c.solver.tau, lambda_final, c.solver.zero_tol));
      if (p.poisson && c.alpha > 0) {
        report["pmp"] = to_json(check_pmp_pointwise(*p.poisson, traj.u, c.alpha, lambda_final, c.solver.tau,
                                                    c.solver.zero_tol));
      }
    }

    std::filesystem::create_directories(c.output_dir);
    {
      std::ofstream os(c.output_dir / "trajectory.csv");
      if (!os) throw ConfigError("output_dir", "cannot write to " + c.output_dir.string());
      write_trajectory_csv(os, traj);
    }
    write_csv(c.output_dir / "solution.csv", traj.u);
    write_json(c.output_dir / "report.json", report);
    write_json(c.output_dir / "config_echo.json", c.normalized);

    for (const auto& w : traj.warnings) err << "warning: " << w << '\n';
    if (!o.quiet) {
      out << fmt::format("{}: {} after {} iterations, F = {:.10g}, lambda = {:.6g}, support = {:.6g} (tau = {:.6g})\n",
                         to_string(c.kind), to_string(traj.termination), traj.records.size() - 1,
                         traj.last().objective, lambda_final, traj.last().support_measure, c.solver.tau);
      out << "wrote " << c.output_dir.string() << '\n';
    }
    if (traj.termination == Termination::backtracking_failure) {
      err << "solver failure: " << traj.message << '\n';
      return static_cast<int>(kSolverFailure);
    }
    return static_cast<int>(kOk);
  });
}

int verify(const std::filesystem::path& solution_path, const std::filesystem::path& config_path, const Overrides& o,
           std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load(config_path, o);
    if (!std::filesystem::exists(solution_path)) {
      throw ParseError("solution file not found: " + solution_path.string());
    }
    const Problem p = build_problem(c);
    const GridFunction u = read_csv(solution_path, c.grid);
    const OptimalityReport r = check_noc(u, *p.objective, c.alpha, c.solver.tau, std::nullopt, c.solver.zero_tol);

    std::vector<std::string> failures;
    if (!r.feasible) failures.emplace_back("feasible");
    if (!(r.stationarity_residual <= c.verify.stationarity)) failures.emplace_back("stationarity_residual");
    if (r.pointwise_comp_residual && !(*r.pointwise_comp_residual <= c.verify.pointwise_comp)) {
      failures.emplace_back("pointwise_comp_residual");
    }
    if (!(r.comp_tau_residual <= c.verify.comp_tau)) failures.emplace_back("comp_tau_residual");

    json j;
    j["report"] = to_json(r);
    if (p.poisson && c.alpha > 0) {
      j["pmp"] = to_json(check_pmp_pointwise(*p.poisson, u, c.alpha, -r.s_est, c.solver.tau, c.solver.zero_tol));
    }
    j["tolerances"] = c.normalized["verify"];
    j["failures"] = failures;
    j["passed"] = failures.empty();
    out << j.dump(2) << '\n';
    if (!failures.empty()) {
      if (!o.quiet) err << "verification failed: " << fmt::format("{}", fmt::join(failures, ", ")) << '\n';
      return static_cast<int>(kVerifyFailure);
    }
    return static_cast<int>(kOk);
  });
}

int oracle(const std::filesystem::path& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig c = load(config_path, o);
    if (c.grid->size() > 20) {
      throw ConfigError("grid", fmt::format("oracle enumerates supports and needs at most 20 cells, got {}",
                                            c.grid->size()));
    }
    Problem p = build_problem(c);
    json j;
    std::optional<QuadraticIntegrand> integrand;
    if (p.integrand) {
      integrand = *p.integrand;
      j["subproblem"] = "separable-direct";
    } else {
      resolve_prox_parameter(c, *p.objective);
      const double L = c.solver.backtracking ? c.solver.backtracking->L0 : c.solver.L;
      const GridFunction grad = p.objective->gradient(p.u0);
      integrand = QuadraticIntegrand::prox(p.u0.values(), grad.values(), L, c.alpha);
      j["subproblem"] = "first prox step from u0";
      j["L"] = L;
    }
    const L0Solution a = solve_l0(*integrand, c.grid, c.solver.tau);
    const L0Solution b = brute_force_l0(*integrand, c.grid, c.solver.tau);
    const double diff = std::abs(a.objective - b.objective);
    j["cells"] = c.grid->size();
    j["solver_objective"] = a.objective;
    j["brute_force_objective"] = b.objective;
    j["difference"] = diff;
    j["supports_agree"] = a.support == b.support;
    j["passed"] = diff <= 1e-12;
    out << j.dump(2) << '\n';
    return static_cast<int>(diff <= 1e-12 ? kOk : kVerifyFailure);
  });
}

}  // namespace l0prox::cli
