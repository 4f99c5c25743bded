#include "l0prox/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/summation.hpp"

namespace l0prox {

Grid Grid::interval(double length, std::size_t n) {
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("interval length must be positive");
  if (n < 2) throw InvalidArgument("interval resolution must be >= 2");
  Grid g;
  g.dim_ = 1;
  g.structured_ = true;
  g.shape_ = {n, 1};
  const double h = length / static_cast<double>(n + 1);
  g.spacing_ = {h, 0.0};
  g.extents_ = {length, 0.0};
  g.weights_.assign(n, h);
  g.coords_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.coords_[i] = {static_cast<double>(i + 1) * h, 0.0};
  g.finalize();
  return g;
}

Grid Grid::rectangle(double lx, double ly, std::size_t nx, std::size_t ny) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw InvalidArgument("rectangle extents must be positive");
  }
  if (nx < 2 || ny < 2) throw InvalidArgument("rectangle resolution must be >= 2 per dimension");
  Grid g;
  g.dim_ = 2;
  g.structured_ = true;
  g.shape_ = {nx, ny};
  const double hx = lx / static_cast<double>(nx + 1);
  const double hy = ly / static_cast<double>(ny + 1);
  g.spacing_ = {hx, hy};
  g.extents_ = {lx, ly};
  g.weights_.assign(nx * ny, hx * hy);
  g.coords_.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      g.coords_[j * nx + i] = {static_cast<double>(i + 1) * hx, static_cast<double>(j + 1) * hy};
    }
  }
  g.finalize();
  return g;
}

Grid Grid::weighted(std::vector<double> weights, std::vector<double> coordinates) {
  if (weights.empty()) throw InvalidArgument("grid needs at least one cell");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw InvalidArgument(fmt::format("cell weight {} is not positive (cell {})", weights[i], i));
    }
  }
  if (!coordinates.empty() && coordinates.size() != weights.size()) {
    throw InvalidArgument("coordinate count does not match weight count");
  }
  Grid g;
  g.dim_ = 1;
  g.structured_ = false;
  g.shape_ = {weights.size(), 1};
  g.coords_.resize(weights.size());
  double left = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double x = coordinates.empty() ? left + 0.5 * weights[i] : coordinates[i];
    g.coords_[i] = {x, 0.0};
    left += weights[i];
  }
  g.weights_ = std::move(weights);
  g.finalize();
  return g;
}

void Grid::finalize() {
  total_measure_ = pairwise_sum(weights_);
  max_weight_ = *std::max_element(weights_.begin(), weights_.end());
  uniform_weights_ = std::all_of(weights_.begin(), weights_.end(),
                                 [&](double w) { return w == weights_.front(); });
  if (!structured_) extents_ = {total_measure_, 0.0};
}

bool operator==(const Grid& a, const Grid& b) {
  return a.dim_ == b.dim_ && a.structured_ == b.structured_ && a.shape_ == b.shape_ &&
         a.weights_ == b.weights_ && a.coords_ == b.coords_;
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!same_grid(a, b)) throw GridMismatch();
}

// --- GridFunction / Indicator ---------------------------------------------

GridFunction::GridFunction(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("grid function needs a grid");
  values_.assign(grid_->size(), fill);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("grid function needs a grid");
  if (values_.size() != grid_->size()) {
    throw InvalidArgument(
        fmt::format("grid function has {} values for {} cells", values_.size(), grid_->size()));
  }
}

Indicator::Indicator(GridPtr grid, bool fill) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("indicator needs a grid");
  flags_.assign(grid_->size(), fill ? 1 : 0);
}

Indicator::Indicator(GridPtr grid, std::vector<bool> flags) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("indicator needs a grid");
  if (flags.size() != grid_->size()) throw InvalidArgument("indicator size does not match grid");
  flags_.assign(flags.begin(), flags.end());
}

std::size_t Indicator::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1));
}

double Indicator::measure() const {
  const auto w = grid_->weights();
  return pairwise_sum(flags_.size(), [&](std::size_t i) { return flags_[i] ? w[i] : 0.0; });
}

// --- norms -----------------------------------------------------------------

double max_abs(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double default_zero_tol(const GridFunction& u) { return 1e-12 * (1.0 + max_abs(u)); }

double l0_measure(const GridFunction& u, double zero_tol) {
  if (zero_tol < 0.0) throw InvalidArgument("zero_tol must be nonnegative");
  const auto w = u.grid()->weights();
  const auto v = u.values();
  return pairwise_sum(v.size(), [&](std::size_t i) { return std::abs(v[i]) > zero_tol ? w[i] : 0.0; });
}

Indicator support(const GridFunction& u, double zero_tol) {
  if (zero_tol < 0.0) throw InvalidArgument("zero_tol must be nonnegative");
  Indicator chi(u.grid());
  const auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) chi.set(i, std::abs(v[i]) > zero_tol);
  return chi;
}

double weighted_norm_sq(const GridFunction& u) {
  const auto w = u.grid()->weights();
  const auto v = u.values();
  return pairwise_sum(v.size(), [&](std::size_t i) { return w[i] * v[i] * v[i]; });
}

double weighted_inner(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid());
  const auto w = a.grid()->weights();
  return pairwise_sum(a.size(), [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

double indicator_l1_distance(const Indicator& a, const Indicator& b) {
  require_same_grid(a.grid(), b.grid());
  const auto w = a.grid()->weights();
  return pairwise_sum(a.size(), [&](std::size_t i) { return a[i] != b[i] ? w[i] : 0.0; });
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid());
  GridFunction r(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid());
  GridFunction r(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

GridFunction operator*(double s, const GridFunction& a) {
  GridFunction r(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

}  // namespace l0prox
