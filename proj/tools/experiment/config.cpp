#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/grid_io.hpp"
#include "l0prox/linear_objective.hpp"
#include "l0prox/quadratic_objective.hpp"

namespace l0prox::cli {

using json = nlohmann::json;

namespace {

json builtin(const std::string& name) {
  if (name == "quadratic-zero") {
    return json::parse(R"({
      "problem": "quadratic",
      "seed": 1,
      "grid": {"dim": 1, "extents": [1.0], "resolution": [32]},
      "objective": {"alpha": 0.1, "matrix": {"kind": "identity"}, "target": {"kind": "zero"}},
      "solver": {"L_factor": 1.5, "tau": 0.25, "max_iter": 1000, "step_norm_tol": 1e-12,
                 "u0": {"kind": "random", "scale": 1.0}}
    })");
  }
  if (name == "spike-recovery") {
    return json::parse(R"({
      "problem": "poisson-tracking",
      "seed": 7,
      "grid": {"dim": 1, "extents": [1.0], "resolution": [64]},
      "objective": {"alpha": 1e-4, "coefficient": {"kind": "constant", "value": 1.0},
                    "target": {"kind": "spikes", "count": 3, "amplitude": 50.0}},
      "solver": {"L_factor": 1.1, "tau": 0.1, "max_iter": 500, "step_norm_tol": 1e-10}
    })");
  }
  if (name == "separable-random") {
    return json::parse(R"({
      "problem": "separable-direct",
      "seed": 3,
      "grid": {"dim": 1, "extents": [1.0], "resolution": [12]},
      "objective": {"alpha": 1.0, "linear": {"kind": "random", "scale": 2.0}},
      "solver": {"tau": 0.4}
    })");
  }
  throw ConfigError("builtin", fmt::format("unknown builtin '{}'", name));
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) throw ConfigError(join(path, k), "unknown key");
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& path, const std::string& key, std::optional<double> def = {}) {
  const json* v = find(obj, key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(join(path, key), "required");
  }
  if (!v->is_number()) throw ConfigError(join(path, key), "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key), "must be finite");
  return x;
}

std::uint64_t count(const json& obj, const std::string& path, const std::string& key,
                    std::optional<std::uint64_t> def = {}) {
  const json* v = find(obj, key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(join(path, key), "required");
  }
  if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
    throw ConfigError(join(path, key), "expected a nonnegative integer");
  }
  return v->get<std::uint64_t>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError(path, "expected finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

GridPtr parse_grid(const json& j, json& norm) {
  const std::string path = "grid";
  check_keys(j, path, {"dim", "extents", "resolution", "weights"});
  if (const json* w = find(j, "weights")) {
    if (find(j, "resolution") || find(j, "extents")) {
      throw ConfigError(path, "give either weights or extents/resolution, not both");
    }
    auto ws = numbers(*w, "grid.weights");
    if (ws.empty()) throw ConfigError("grid.weights", "must not be empty");
    for (double x : ws) {
      if (!(x > 0)) throw ConfigError("grid.weights", "weights must be positive");
    }
    norm = {{"weights", ws}};
    return make_grid(Grid::weighted(std::move(ws)));
  }
  const json* res = find(j, "resolution");
  if (!res) throw ConfigError("grid.resolution", "required");
  std::vector<std::size_t> n;
  if (!res->is_array() || res->empty() || res->size() > 2) {
    throw ConfigError("grid.resolution", "expected one or two integers");
  }
  for (const auto& x : *res) {
    if (!x.is_number_integer() || x.get<std::int64_t>() < 2) {
      throw ConfigError("grid.resolution", "resolution must be an integer >= 2 per dimension");
    }
    n.push_back(x.get<std::size_t>());
  }
  const std::size_t dim = count(j, path, "dim", n.size());
  if (dim != n.size()) throw ConfigError("grid.dim", "must match the length of grid.resolution");
  std::vector<double> ext(dim, 1.0);
  if (const json* e = find(j, "extents")) {
    ext = numbers(*e, "grid.extents");
    if (ext.size() != dim) throw ConfigError("grid.extents", "must have one entry per dimension");
  }
  for (double x : ext) {
    if (!(x > 0)) throw ConfigError("grid.extents", "extents must be positive");
  }
  norm = {{"dim", dim}, {"extents", ext}, {"resolution", n}};
  return make_grid(dim == 1 ? Grid::interval(ext[0], n[0]) : Grid::rectangle(ext[0], ext[1], n[0], n[1]));
}

// Normalizes a grid-function generator, filling defaults; seeds derive from the top-level seed.
json parse_field(const json* spec, const std::string& path, const json& fallback, std::uint64_t seed,
                 std::size_t cells, const std::filesystem::path& base_dir, bool allow_spikes) {
  const json j = spec ? *spec : fallback;
  if (!j.is_object()) throw ConfigError(path, "expected an object with a 'kind'");
  const json* kind = find(j, "kind");
  if (!kind || !kind->is_string()) throw ConfigError(join(path, "kind"), "required string");
  const std::string k = kind->get<std::string>();
  if (k == "zero") {
    check_keys(j, path, {"kind"});
    return {{"kind", k}};
  }
  if (k == "constant") {
    check_keys(j, path, {"kind", "value"});
    return {{"kind", k}, {"value", number(j, path, "value")}};
  }
  if (k == "values") {
    check_keys(j, path, {"kind", "values"});
    const json* v = find(j, "values");
    if (!v) throw ConfigError(join(path, "values"), "required");
    const auto xs = numbers(*v, join(path, "values"));
    if (xs.size() != cells) {
      throw ConfigError(join(path, "values"), fmt::format("expected {} values, got {}", cells, xs.size()));
    }
    return {{"kind", k}, {"values", xs}};
  }
  if (k == "random") {
    check_keys(j, path, {"kind", "scale", "seed"});
    return {{"kind", k}, {"scale", number(j, path, "scale", 1.0)}, {"seed", count(j, path, "seed", seed)}};
  }
  if (k == "file") {
    check_keys(j, path, {"kind", "path"});
    const json* p = find(j, "path");
    if (!p || !p->is_string()) throw ConfigError(join(path, "path"), "required string");
    std::filesystem::path file = p->get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    if (!std::filesystem::exists(file)) throw ConfigError(join(path, "path"), "file not found: " + file.string());
    return {{"kind", k}, {"path", file.string()}};
  }
  if (k == "spikes" && allow_spikes) {
    check_keys(j, path, {"kind", "count", "amplitude", "seed"});
    const auto c = count(j, path, "count", 3);
    if (c == 0 || c > cells) throw ConfigError(join(path, "count"), "must lie in [1, number of cells]");
    const double a = number(j, path, "amplitude", 1.0);
    if (!(a > 0)) throw ConfigError(join(path, "amplitude"), "must be positive");
    return {{"kind", k}, {"count", c}, {"amplitude", a}, {"seed", count(j, path, "seed", seed)}};
  }
  throw ConfigError(join(path, "kind"), fmt::format("unsupported kind '{}'", k));
}

double uniform_pm1(std::mt19937_64& rng) {
  // Explicit conversion: std distributions differ across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

GridFunction spikes(const json& spec, const GridPtr& grid) {
  std::mt19937_64 rng(spec.at("seed").get<std::uint64_t>());
  const std::size_t n = grid->size();
  const auto c = spec.at("count").get<std::size_t>();
  const double amp = spec.at("amplitude").get<double>();
  GridFunction u(grid);
  std::size_t placed = 0;
  while (placed < c) {
    const std::size_t i = static_cast<std::size_t>(rng() % n);
    if (u[i] != 0.0) continue;
    const double mag = amp * (0.75 + 0.25 * uniform_pm1(rng));
    u[i] = (rng() & 1U) ? mag : -mag;
    ++placed;
  }
  return u;
}

GridFunction evaluate_field(const json& spec, const GridPtr& grid) {
  const std::string k = spec.at("kind");
  GridFunction u(grid);
  if (k == "zero") return u;
  if (k == "constant") return GridFunction(grid, spec.at("value").get<double>());
  if (k == "values") return GridFunction(grid, spec.at("values").get<std::vector<double>>());
  if (k == "random") {
    std::mt19937_64 rng(spec.at("seed").get<std::uint64_t>());
    const double scale = spec.at("scale").get<double>();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = scale * uniform_pm1(rng);
    return u;
  }
  if (k == "file") return read_csv(std::filesystem::path(spec.at("path").get<std::string>()), grid);
  if (k == "spikes") return spikes(spec, grid);
  throw ConfigError("", "unsupported field kind " + k);
}

}  // namespace

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::quadratic:
      return "quadratic";
    case ProblemKind::poisson_tracking:
      return "poisson-tracking";
    case ProblemKind::separable_direct:
      return "separable-direct";
  }
  return "unknown";
}

std::vector<std::string> builtin_names() { return {"quadratic-zero", "spike-recovery", "separable-random"}; }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("{}: invalid JSON ({})", path.string(), e.what()));
  }
  return parse_config(std::move(j), path.parent_path());
}

ExperimentConfig parse_config(json j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  if (const json* b = find(j, "builtin")) {
    if (!b->is_string()) throw ConfigError("builtin", "expected a string");
    json base = builtin(b->get<std::string>());
    j.erase("builtin");
    base.merge_patch(j);
    j = std::move(base);
  }
  check_keys(j, "", {"problem", "seed", "grid", "objective", "solver", "verify", "output_dir"});

  ExperimentConfig c;
  c.base_dir = base_dir;
  json& norm = c.normalized;

  const json* problem = find(j, "problem");
  if (!problem || !problem->is_string()) throw ConfigError("problem", "required string");
  const std::string p = problem->get<std::string>();
  if (p == "quadratic") {
    c.kind = ProblemKind::quadratic;
  } else if (p == "poisson-tracking") {
    c.kind = ProblemKind::poisson_tracking;
  } else if (p == "separable-direct") {
    c.kind = ProblemKind::separable_direct;
  } else {
    throw ConfigError("problem", fmt::format("unknown problem kind '{}'", p));
  }
  norm["problem"] = p;
  c.seed = count(j, "", "seed", 0);
  norm["seed"] = c.seed;

  const json* grid = find(j, "grid");
  if (!grid) throw ConfigError("grid", "required");
  c.grid = parse_grid(*grid, norm["grid"]);
  if (c.kind == ProblemKind::poisson_tracking && !c.grid->structured()) {
    throw ConfigError("grid", "poisson-tracking needs extents/resolution, not explicit weights");
  }
  const std::size_t n = c.grid->size();

  // objective
  const json empty = json::object();
  const json* obj = find(j, "objective");
  const json& o = obj ? *obj : empty;
  check_keys(o, "objective", {"alpha", "target", "coefficient", "matrix", "linear", "cg_tol", "cg_max_iter",
                              "power_max_iter"});
  c.alpha = number(o, "objective", "alpha", 0.0);
  if (!(c.alpha >= 0)) throw ConfigError("objective.alpha", "must be nonnegative");
  json& on = norm["objective"];
  on["alpha"] = c.alpha;
  const json zero = {{"kind", "zero"}};
  switch (c.kind) {
    case ProblemKind::quadratic: {
      if (find(o, "coefficient") || find(o, "linear")) {
        throw ConfigError("objective", "quadratic takes 'matrix' and 'target' only");
      }
      const json* m = find(o, "matrix");
      const json mj = m ? *m : json{{"kind", "identity"}};
      const json* mk = find(mj, "kind");
      if (!mk || !mk->is_string()) throw ConfigError("objective.matrix.kind", "required string");
      const std::string kind = mk->get<std::string>();
      if (kind == "identity") {
        check_keys(mj, "objective.matrix", {"kind"});
        c.matrix = {{"kind", kind}};
      } else if (kind == "random") {
        check_keys(mj, "objective.matrix", {"kind", "scale", "seed"});
        c.matrix = {{"kind", kind},
                    {"scale", number(mj, "objective.matrix", "scale", 1.0)},
                    {"seed", count(mj, "objective.matrix", "seed", c.seed + 101)}};
      } else if (kind == "diagonal") {
        check_keys(mj, "objective.matrix", {"kind", "diagonal"});
        c.matrix = {{"kind", kind},
                    {"diagonal", parse_field(find(mj, "diagonal"), "objective.matrix.diagonal", json{{"kind", "constant"}, {"value", 1.0}},
                                             c.seed + 102, n, base_dir, false)}};
      } else {
        throw ConfigError("objective.matrix.kind", fmt::format("unsupported kind '{}'", kind));
      }
      on["matrix"] = c.matrix;
      c.target = parse_field(find(o, "target"), "objective.target", zero, c.seed + 103, n, base_dir, true);
      on["target"] = c.target;
      break;
    }
    case ProblemKind::poisson_tracking: {
      if (find(o, "matrix") || find(o, "linear")) {
        throw ConfigError("objective", "poisson-tracking takes 'coefficient' and 'target' only");
      }
      c.coefficient = parse_field(find(o, "coefficient"), "objective.coefficient",
                                  json{{"kind", "constant"}, {"value", 1.0}}, c.seed + 201, n, base_dir, false);
      c.target = parse_field(find(o, "target"), "objective.target", zero, c.seed + 202, n, base_dir, true);
      c.poisson.cg_tol = number(o, "objective", "cg_tol", c.poisson.cg_tol);
      if (!(c.poisson.cg_tol > 0 && c.poisson.cg_tol < 1)) throw ConfigError("objective.cg_tol", "must lie in (0, 1)");
      c.poisson.cg_max_iter = count(o, "objective", "cg_max_iter", 10 * n);
      if (c.poisson.cg_max_iter == 0) throw ConfigError("objective.cg_max_iter", "must be positive");
      c.poisson.power_max_iter = count(o, "objective", "power_max_iter", c.poisson.power_max_iter);
      on["coefficient"] = c.coefficient;
      on["target"] = c.target;
      on["cg_tol"] = c.poisson.cg_tol;
      on["cg_max_iter"] = c.poisson.cg_max_iter;
      on["power_max_iter"] = c.poisson.power_max_iter;
      break;
    }
    case ProblemKind::separable_direct: {
      if (find(o, "matrix") || find(o, "coefficient") || find(o, "target")) {
        throw ConfigError("objective", "separable-direct takes 'linear' only");
      }
      if (!(c.alpha > 0)) throw ConfigError("objective.alpha", "separable-direct needs alpha > 0 (the curvature)");
      c.linear = parse_field(find(o, "linear"), "objective.linear", zero, c.seed + 301, n, base_dir, false);
      on["linear"] = c.linear;
      break;
    }
  }

  // solver
  const json* sol = find(j, "solver");
  if (!sol) throw ConfigError("solver", "required");
  check_keys(*sol, "solver", {"L", "L_factor", "tau", "max_iter", "step_norm_tol", "backtracking", "zero_tol", "u0",
                              "tail_window"});
  json& sn = norm["solver"];
  c.solver.alpha = c.alpha;
  c.solver.tau = number(*sol, "solver", "tau");
  if (!(c.solver.tau > 0) || !(c.solver.tau < c.grid->total_measure())) {
    throw ConfigError("solver.tau",
                      fmt::format("tau = {} must lie in (0, total_measure = {})", c.solver.tau, c.grid->total_measure()));
  }
  sn["tau"] = c.solver.tau;
  if (c.kind != ProblemKind::separable_direct) {
    const bool has_L = find(*sol, "L") != nullptr;
    const bool has_factor = find(*sol, "L_factor") != nullptr;
    const json* bt = find(*sol, "backtracking");
    if (has_L + has_factor + (bt != nullptr) > 1) {
      throw ConfigError("solver", "give at most one of L, L_factor, backtracking");
    }
    if (bt) {
      check_keys(*bt, "solver.backtracking", {"gamma", "L0", "max_increases"});
      Backtracking b;
      b.gamma = number(*bt, "solver.backtracking", "gamma", b.gamma);
      b.L0 = number(*bt, "solver.backtracking", "L0", b.L0);
      b.max_increases = count(*bt, "solver.backtracking", "max_increases", b.max_increases);
      if (!(b.gamma > 1)) throw ConfigError("solver.backtracking.gamma", "must exceed 1");
      if (!(b.L0 > 0)) throw ConfigError("solver.backtracking.L0", "must be positive");
      c.solver.backtracking = b;
      sn["backtracking"] = {{"gamma", b.gamma}, {"L0", b.L0}, {"max_increases", b.max_increases}};
    } else if (has_L) {
      c.solver.L = number(*sol, "solver", "L");
      if (!(c.solver.L > 0)) throw ConfigError("solver.L", "must be positive");
      sn["L"] = c.solver.L;
    } else {
      c.L_factor = number(*sol, "solver", "L_factor", 1.1);
      if (!(*c.L_factor > 0)) throw ConfigError("solver.L_factor", "must be positive");
      sn["L_factor"] = *c.L_factor;
    }
    c.solver.max_iter = count(*sol, "solver", "max_iter", 1000);
    if (c.solver.max_iter == 0) throw ConfigError("solver.max_iter", "must be positive");
    c.solver.step_norm_tol = number(*sol, "solver", "step_norm_tol", 1e-10);
    if (!(c.solver.step_norm_tol >= 0)) throw ConfigError("solver.step_norm_tol", "must be nonnegative");
    c.u0 = parse_field(find(*sol, "u0"), "solver.u0", zero, c.seed + 401, n, base_dir, false);
    c.tail_window = count(*sol, "solver", "tail_window", c.tail_window);
    sn["max_iter"] = c.solver.max_iter;
    sn["step_norm_tol"] = c.solver.step_norm_tol;
    sn["u0"] = c.u0;
    sn["tail_window"] = c.tail_window;
  } else {
    for (const char* k : {"L", "L_factor", "backtracking", "max_iter", "step_norm_tol", "u0", "tail_window"}) {
      if (find(*sol, k)) throw ConfigError(join("solver", k), "not used by separable-direct");
    }
  }
  if (const json* zt = find(*sol, "zero_tol")) {
    (void)zt;
    c.solver.zero_tol = number(*sol, "solver", "zero_tol");
    if (!(*c.solver.zero_tol >= 0)) throw ConfigError("solver.zero_tol", "must be nonnegative");
    sn["zero_tol"] = *c.solver.zero_tol;
  }

  // verify
  const json* ver = find(j, "verify");
  const json& v = ver ? *ver : empty;
  check_keys(v, "verify", {"stationarity_tol", "pointwise_comp_tol", "comp_tau_tol"});
  c.verify.stationarity = number(v, "verify", "stationarity_tol", c.verify.stationarity);
  c.verify.pointwise_comp = number(v, "verify", "pointwise_comp_tol", c.verify.pointwise_comp);
  c.verify.comp_tau = number(v, "verify", "comp_tau_tol", c.verify.comp_tau);
  for (const char* k : {"stationarity_tol", "pointwise_comp_tol", "comp_tau_tol"}) {
    if (number(v, "verify", k, 0.0) < 0) throw ConfigError(join("verify", k), "must be nonnegative");
  }
  norm["verify"] = {{"stationarity_tol", c.verify.stationarity},
                    {"pointwise_comp_tol", c.verify.pointwise_comp},
                    {"comp_tau_tol", c.verify.comp_tau}};

  if (const json* od = find(j, "output_dir")) {
    if (!od->is_string()) throw ConfigError("output_dir", "expected a string");
    c.output_dir = od->get<std::string>();
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  }
  norm["output_dir"] = c.output_dir.string();
  return c;
}

Problem build_problem(const ExperimentConfig& c) {
  Problem p;
  const GridPtr& g = c.grid;
  const std::size_t n = g->size();
  switch (c.kind) {
    case ProblemKind::quadratic: {
      const auto N = static_cast<Eigen::Index>(n);
      Eigen::MatrixXd K = Eigen::MatrixXd::Identity(N, N);
      const std::string mk = c.matrix.at("kind");
      if (mk == "random") {
        std::mt19937_64 rng(c.matrix.at("seed").get<std::uint64_t>());
        const double scale = c.matrix.at("scale").get<double>() / std::sqrt(static_cast<double>(n));
        for (Eigen::Index i = 0; i < N; ++i)
          for (Eigen::Index j = 0; j < N; ++j) K(i, j) = scale * uniform_pm1(rng);
      } else if (mk == "diagonal") {
        const GridFunction d = evaluate_field(c.matrix.at("diagonal"), g);
        for (Eigen::Index i = 0; i < N; ++i) K(i, i) = d[static_cast<std::size_t>(i)];
      }
      GridFunction b(g);
      if (c.target.at("kind") == "spikes") {
        const GridFunction dagger = spikes(c.target, g);
        const Eigen::VectorXd y = K * Eigen::Map<const Eigen::VectorXd>(dagger.values().data(), N);
        for (std::size_t i = 0; i < n; ++i) b[i] = y[static_cast<Eigen::Index>(i)];
      } else {
        b = evaluate_field(c.target, g);
      }
      p.objective = std::make_unique<QuadraticObjective>(g, std::move(K), std::move(b));
      break;
    }
    case ProblemKind::poisson_tracking: {
      const GridFunction a = evaluate_field(c.coefficient, g);
      GridFunction yd(g);
      if (c.target.at("kind") == "spikes") {
        yd = PoissonTracking(g, a, GridFunction(g), c.poisson).solve_state(spikes(c.target, g));
      } else {
        yd = evaluate_field(c.target, g);
      }
      auto obj = std::make_unique<PoissonTracking>(g, a, std::move(yd), c.poisson);
      p.poisson = obj.get();
      p.objective = std::move(obj);
      break;
    }
    case ProblemKind::separable_direct: {
      GridFunction lin = evaluate_field(c.linear, g);
      p.integrand.emplace(std::vector<double>(lin.values().begin(), lin.values().end()), std::vector<double>{},
                          c.alpha);
      p.objective = std::make_unique<LinearObjective>(std::move(lin));
      break;
    }
  }
  p.u0 = c.u0.is_null() ? GridFunction(g) : evaluate_field(c.u0, g);
  return p;
}

void resolve_prox_parameter(ExperimentConfig& c, const SmoothObjective& objective) {
  if (c.L_factor) c.solver.L = *c.L_factor * objective.lipschitz_bound();
  if (!c.solver.backtracking && !(c.solver.L > 0)) {
    throw ConfigError("solver.L_factor", "resolved prox parameter L is not positive (zero Lipschitz bound?)");
  }
}

}  // namespace l0prox::cli
