// Acceptance checks. Prints one PASS/FAIL line per criterion and exits 1 if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "l0prox/grid_io.hpp"
#include "l0prox/optimality.hpp"
#include "l0prox/poisson_tracking.hpp"
#include "l0prox/prox_grad.hpp"
#include "l0prox/quadratic_objective.hpp"
#include "l0prox/separable.hpp"
#include "../unit/oracles.hpp"

#ifdef L0PROX_HAVE_EXPERIMENT
#include "experiment.hpp"
#endif

using namespace l0prox;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
  std::printf("[%s] #%d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

// ---- separable instances shared by 1-3 ----

struct SeparableInstance {
  GridPtr grid;
  QuadraticIntegrand g;
  double tau;
};

std::vector<SeparableInstance> separable_instances(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(4, 12);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> nd;
  std::vector<SeparableInstance> out;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t n = size(rng);
    std::vector<double> w(n), a(n), c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = weight(rng);
      a[i] = nd(rng);
      c[i] = nd(rng);
      d[i] = 0.1 * nd(rng);
    }
    auto grid = make_grid(Grid::weighted(w));
    double tau = 0.0;
    while (tau <= 0.0) tau = unit(rng) * grid->total_measure();
    const double q = 0.5 + 2.0 * unit(rng);
    out.push_back({grid, QuadraticIntegrand(a, c, q, d), tau});
  }
  return out;
}

Outcome criterion1(const std::vector<SeparableInstance>& inst) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t objective_bad = 0, support_bad = 0;
  for (const auto& in : inst) {
    const L0Solution a = solve_l0(in.g, in.grid, in.tau);
    const L0Solution b = brute_force_l0(in.g, in.grid, in.tau);
    const double diff = std::abs(a.objective - b.objective);
    worst = std::max(worst, diff);
    if (diff > 1e-12) ++objective_bad;

    // Independent subset enumeration over tilde_v, computed here from the integrand.
    const std::size_t n = in.grid->size();
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = in.g.shift()[i], q = in.g.curvature(), l = in.g.linear()[i];
      const double m = c - l / q;
      const auto gi = [&](double u) { return l * u + 0.5 * q * (u - c) * (u - c); };
      v[i] = std::min(0.0, gi(m) - gi(0.0));
      w[i] = in.grid->weight(i);
    }
    const auto best = oracle::best_subsets(v, w, in.tau, 1e-12);
    std::vector<bool> supp(n);
    for (std::size_t i = 0; i < n; ++i) supp[i] = a.support[i];
    // Cells with tilde_v == 0 contribute nothing; compare on strictly negative cells.
    bool found = false;
    for (const auto& s : best.minimizers) {
      bool same = true;
      for (std::size_t i = 0; i < n && same; ++i) {
        if (v[i] < 0 && s[i] != supp[i]) same = false;
      }
      found = found || same;
    }
    if (!found) ++support_bad;
  }
  const double dt = seconds_since(t0);
  return {objective_bad == 0 && support_bad == 0 && dt < 10.0,
          fmt::format("{} instances, max |diff| = {:.3g}, objective mismatches {}, support mismatches {}, {:.2f} s",
                      inst.size(), worst, objective_bad, support_bad, dt)};
}

Outcome criterion2(const std::vector<SeparableInstance>& inst) {
  std::size_t sandwich = 0, pointwise = 0, relaxed = 0, other = 0, uniform_bad = 0, uniform = 0;
  for (const auto& in : inst) {
    const L0Solution sol = solve_l0(in.g, in.grid, in.tau);
    const auto r = check_characterization(sol, compute_tilde_v(in.g, in.grid), in.tau);
    sandwich += !r.sandwich();
    pointwise += !r.pointwise_complementarity;
    relaxed += !r.relaxed_complementarity;
    other += !(r.tilde_v_nonpositive && r.feasible && r.threshold_consistent);
  }
  // Same integrands on unit weights, where the greedy prefix is optimal.
  for (const auto& in : inst) {
    auto g = make_grid(Grid::weighted(std::vector<double>(in.grid->size(), 1.0)));
    const double tau = in.tau / in.grid->total_measure() * g->total_measure();
    const auto r = check_characterization(solve_l0(in.g, g, tau), compute_tilde_v(in.g, g), tau);
    ++uniform;
    uniform_bad += !r.all();
  }
  return {sandwich + pointwise + relaxed + other == 0,
          fmt::format("violations over {} mixed-weight instances: sandwich {}, pointwise {}, relaxed {}, other {}; "
                      "equal-weight variants failing: {} of {}",
                      inst.size(), sandwich, pointwise, relaxed, other, uniform_bad, uniform)};
}

Outcome criterion3(const std::vector<SeparableInstance>& inst) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> nd;
  std::size_t bad_instances = 0, bad_sublevel = 0, bad_penalty = 0, bad_excess = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& in : inst) {
    const L0Solution sol = solve_l0(in.g, in.grid, in.tau);
    const std::size_t n = in.grid->size();
    std::vector<GridFunction> trials;
    trials.reserve(100);
    for (int t = 0; t < 100; ++t) {
      GridFunction u(in.grid);
      const double p = unit(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (unit(rng) >= p) continue;
        // Half the trials sit at the pointwise minimizers, which are the hardest to beat.
        u[i] = (t % 2 == 0) ? in.g.pointwise_min(i).minimizer : 2.0 * nd(rng);
      }
      trials.push_back(std::move(u));
    }
    const auto r = check_penalized_equivalence(sol, in.g, in.tau, trials, 1e-10);
    worst = std::min({worst, r.worst_margin_penalty, r.worst_margin_excess});
    bad_penalty += r.worst_margin_penalty < -1e-10;
    bad_excess += r.worst_margin_excess < -1e-10;
    if (!r.ok()) {
      ++bad_instances;
      if (check_characterization(sol, compute_tilde_v(in.g, in.grid), in.tau).sandwich()) ++bad_sublevel;
    }
  }
  return {bad_instances == 0,
          fmt::format("{} instances x 100 trials, worst margin {:.3g}, failing instances {} "
                      "(with a sublevel-set support: {}; lambda|u|_0 form: {}, lambda(|u|_0-tau)^+ form: {})",
                      inst.size(), worst, bad_instances, bad_sublevel, bad_penalty, bad_excess)};
}

// ---- solver runs shared by 4-6 and 9 ----

struct RunCase {
  std::string name;
  std::shared_ptr<SmoothObjective> f;
  ProxGradConfig config;
  GridFunction u0;
};

std::vector<RunCase> run_cases() {
  std::vector<RunCase> out;
  {
    const std::size_t n = 64;
    auto g = make_grid(Grid::interval(1.0, n));
    GridFunction dagger(g);
    dagger[15] = 40.0;
    dagger[31] = -60.0;
    dagger[47] = 50.0;
    const GridFunction yd = PoissonTracking(g, GridFunction(g)).solve_state(dagger);
    auto p = std::make_shared<PoissonTracking>(g, yd);
    ProxGradConfig c;
    c.L = 1.1 * p->lipschitz_bound();
    c.alpha = 1e-4;
    c.tau = 6 * g->spacing()[0];
    out.push_back({"poisson-1d-n64", p, c, GridFunction(g)});
  }
  {
    const std::size_t n = 40;
    auto g = make_grid(Grid::interval(1.0, n));
    std::mt19937_64 rng(44);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) K(i, j) = nd(rng) / std::sqrt(double(n));
    GridFunction b(g), u0(g);
    for (std::size_t i = 0; i < n; ++i) b[i] = nd(rng);
    auto q = std::make_shared<QuadraticObjective>(g, K, b);
    ProxGradConfig c;
    c.L = 1.1 * q->lipschitz_bound();
    c.alpha = 0.05;
    c.tau = 0.3;
    for (std::size_t i = 0; i < n && (i + 1) * g->weight(0) <= c.tau; ++i) u0[i] = nd(rng);
    out.push_back({"quadratic-dense-n40", q, c, u0});
  }
  {
    const std::size_t n = 32;
    auto g = make_grid(Grid::interval(1.0, n));
    auto q = std::make_shared<QuadraticObjective>(g, Eigen::MatrixXd::Identity(n, n), GridFunction(g));
    ProxGradConfig c;
    c.L = 1.1 * q->lipschitz_bound();
    c.alpha = 0.1;
    c.tau = 0.25;
    GridFunction u0(g);
    for (std::size_t i = 0; i < 7; ++i) u0[i] = 1.0 + i;
    out.push_back({"quadratic-identity-n32", q, c, u0});
  }
  return out;
}

bool finite(double x) { return std::isfinite(x); }

Outcome criterion4(const std::vector<RunCase>& cases, std::vector<Trajectory>& runs) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& rc : cases) {
    ProxGradConfig c = rc.config;
    c.max_iter = 500;
    c.step_norm_tol = 0.0;
    runs.push_back(run(c, *rc.f, rc.u0));
    const Trajectory& t = runs.back();
    std::size_t increases = 0;
    long double sum = 0;
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      const double Fk = t.records[k].objective, Fp = t.records[k - 1].objective;
      if (Fk > Fp + 1e-12 * (1 + std::abs(Fk))) ++increases;
      sum += t.records[k].step_norm_sq;
    }
    const double Lf = t.lipschitz_bound;
    const double bound = 2 * (t.records.front().objective - t.last().objective) / (c.L - Lf) + 1e-10;
    const bool run_ok = increases == 0 && static_cast<double>(sum) <= bound && t.records.size() == 501;
    ok = ok && run_ok;
    detail += fmt::format("{}: increases {}, sum {:.4g} <= {:.4g}; ", rc.name, increases, double(sum), bound);
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 30.0;
  return {ok, detail + fmt::format("{:.2f} s", dt)};
}

Outcome criterion5(const std::vector<RunCase>& cases, const std::vector<Trajectory>& runs) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t bad = 0;
  std::string where;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& rec : runs[r].records) {
      if (rec.k == 0) continue;
      for (double s : {rec.descent_slack, rec.away_from_zero_slack, rec.support_change_slack}) {
        if (!finite(s)) continue;  // not applicable, or +inf on an empty support
        if (s < worst) {
          worst = s;
          where = fmt::format("{} k={}", cases[r].name, rec.k);
        }
        if (s < -1e-10) ++bad;
      }
    }
  }
  return {bad == 0, fmt::format("min slack {:.3g} at {}, violations {}", worst, where, bad)};
}

Outcome criterion6(const std::vector<RunCase>& cases, const std::vector<Trajectory>& runs) {
  double worst = 0.0;
  std::size_t bad = 0;
  std::string where = "-";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& rec : runs[r].records) {
      if (rec.k == 0) continue;
      if (!(rec.fixed_point_residual <= 1e-10)) ++bad;
      if (!(rec.fixed_point_residual <= worst)) {
        worst = rec.fixed_point_residual;
        where = fmt::format("{} k={}", cases[r].name, rec.k);
      }
    }
  }
  // Independent replay of a few steps of the dense quadratic: recompute the
  // residual from the iterates themselves.
  const RunCase& q = cases[1];
  GridFunction u = q.u0;
  double replay = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GridFunction grad = q.f->gradient(u);
    const auto step = prox_step(u, grad, q.config.L, q.config.alpha, q.config.tau);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double chi = step.u_next[i] != 0.0 ? 1.0 : 0.0;
      replay = std::max(replay, std::abs(q.config.alpha * step.u_next[i] +
                                         chi * (grad[i] + q.config.L * (step.u_next[i] - u[i]))));
    }
    u = step.u_next;
  }
  return {bad == 0 && replay <= 1e-10,
          fmt::format("max residual {:.3g} at {}, violations {}, replayed max {:.3g}", worst, where, bad, replay)};
}

Outcome criterion7() {
  const std::size_t n = 16;
  auto g = make_grid(Grid::interval(1.0, n));
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  GridFunction yd(g), u(g);
  for (std::size_t i = 0; i < n; ++i) {
    yd[i] = nd(rng);
    u[i] = nd(rng);
  }
  PoissonTrackingOptions opt;
  opt.cg_tol = 1e-14;
  const PoissonTracking p(g, yd, opt);
  const GridFunction grad = p.gradient(u);
  const double h = 1e-5;
  double worst = 0.0;
  for (int d = 0; d < 10; ++d) {
    GridFunction dir(g), up(u), um(u);
    for (std::size_t i = 0; i < n; ++i) dir[i] = nd(rng);
    for (std::size_t i = 0; i < n; ++i) {
      up[i] += h * dir[i];
      um[i] -= h * dir[i];
    }
    const double fd = (p.value(up) - p.value(um)) / (2 * h);
    double ad = 0.0;
    for (std::size_t i = 0; i < n; ++i) ad += g->weight(i) * grad[i] * dir[i];
    worst = std::max(worst, std::abs(fd - ad) / std::max(std::abs(ad), 1e-300));
  }
  return {worst <= 1e-6, fmt::format("10 directions, max relative error {:.3g}", worst)};
}

Outcome criterion8() {
  const double ref = 1.0 / std::pow(M_PI, 4);
  std::vector<double> est;
  for (std::size_t n : {64, 128, 256}) {
    auto g = make_grid(Grid::interval(1.0, n));
    est.push_back(PoissonTracking(g, GridFunction(g)).lipschitz_estimate());
  }
  const bool monotone = est[0] > est[1] && est[1] > est[2] && est[2] > ref;
  const double rel = std::abs(est[2] - ref) / ref;
  return {monotone && rel <= 0.02,
          fmt::format("L_f(64,128,256) = {:.6g}, {:.6g}, {:.6g}; 1/pi^4 = {:.6g}; rel err at 256 = {:.3g}", est[0],
                      est[1], est[2], ref, rel)};
}

Outcome criterion9(const std::vector<RunCase>& cases) {
  bool ok = true;
  std::string detail;
  for (const auto& rc : cases) {
    ProxGradConfig c = rc.config;
    c.max_iter = 50000;
    c.step_norm_tol = 1e-10;
    const Trajectory t = run(c, *rc.f, rc.u0);
    const double lambda = t.last().lambda;
    const auto r = check_noc(t.u, *rc.f, c.alpha, c.tau, lambda);
    const double comp = r.pointwise_comp_residual.value_or(0.0);
    const double comp_tau_bound = r.max_cell_weight * std::abs(r.s_est);
    const auto free = check_noc(t.u, *rc.f, c.alpha, c.tau);
    const bool run_ok = t.termination == Termination::tolerance && r.stationarity_residual <= 1e-6 &&
                        comp <= 1e-8 && r.comp_tau_residual <= comp_tau_bound + 1e-15;
    ok = ok && run_ok;
    detail += fmt::format("{} ({} it, {}): stat {:.3g}, pwcomp {:.3g}, comp_tau {:.3g} <= {:.3g} "
                          "[lambda_final {:.4g}, fitted lambda {:.4g} gives pwcomp {:.3g}]; ",
                          rc.name, t.records.size() - 1, to_string(t.termination), r.stationarity_residual, comp,
                          r.comp_tau_residual, comp_tau_bound, lambda, -free.s_est,
                          free.pointwise_comp_residual.value_or(0.0));
  }
  return {ok, detail};
}

std::string trajectory_bytes(const Trajectory& t) {
  std::ostringstream a, b;
  write_trajectory_csv(a, t);
  write_csv(b, t.u);
  return a.str() + "\n--\n" + b.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome criterion10(const std::vector<RunCase>& cases) {
  std::size_t checked = 0, differing = 0;
  for (const auto& rc : cases) {
    ProxGradConfig c = rc.config;
    c.max_iter = 200;
    ++checked;
    if (trajectory_bytes(run(c, *rc.f, rc.u0)) != trajectory_bytes(run(c, *rc.f, rc.u0))) ++differing;
  }
#ifdef L0PROX_HAVE_EXPERIMENT
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "l0prox_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* b : {"quadratic-zero", "spike-recovery", "separable-random"}) {
    const fs::path cfg = dir / (std::string(b) + ".json");
    std::ofstream(cfg) << "{\"builtin\": \"" << b << "\"}\n";
    std::string bytes[2];
    for (int r = 0; r < 2; ++r) {
      cli::Overrides o;
      o.output_dir = dir / fmt::format("{}_{}", b, r);
      o.quiet = true;
      std::ostringstream out, err;
      if (cli::run_experiment(cfg, o, out, err) != cli::kOk) bytes[r] = "run failed: " + err.str() + std::to_string(r);
      else bytes[r] = slurp(*o.output_dir / "trajectory.csv") + slurp(*o.output_dir / "solution.csv");
    }
    ++checked;
    if (bytes[0] != bytes[1] || bytes[0].empty()) ++differing;
  }
  fs::remove_all(dir);
#endif
  return {differing == 0, fmt::format("{} configs replayed, {} differ", checked, differing)};
}

}  // namespace

int main() {
  const auto instances = separable_instances(250, 2024);
  report(1, "oracle equivalence", criterion1(instances));
  report(2, "characterization invariants", criterion2(instances));
  report(3, "penalized equivalence", criterion3(instances));

  const auto cases = run_cases();
  std::vector<Trajectory> runs;
  report(4, "descent and summability", criterion4(cases, runs));
  report(5, "per-iterate inequalities", criterion5(cases, runs));
  report(6, "fixed-point identity", criterion6(cases, runs));
  report(7, "adjoint gradient vs finite differences", criterion7());
  report(8, "Lipschitz estimate", criterion8());
  report(9, "optimality conditions at convergence", criterion9(cases));
  report(10, "determinism", criterion10(cases));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
