#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace l0prox {

using Point = std::array<double, 2>;

/// Discretized measure space: an ordered list of cells, each with a positive
/// weight (its measure) and a center coordinate.
///
/// Structured grids place cells at the interior nodes of a uniform lattice on
/// (0, lx) or (0, lx) x (0, ly); boundary nodes carry the homogeneous Dirichlet
/// data and are not cells. Cell order is lexicographic with x fastest.
/// Unstructured ("weighted") grids only exist to exercise the separable solver
/// with mixed weights; they have no stencil.
class Grid {
 public:
  static Grid interval(double length, std::size_t n);
  static Grid rectangle(double lx, double ly, std::size_t nx, std::size_t ny);
  /// 1D grid with explicit weights; coordinates default to running midpoints.
  static Grid weighted(std::vector<double> weights, std::vector<double> coordinates = {});

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] Point coordinate(std::size_t i) const { return coords_[i]; }
  [[nodiscard]] double total_measure() const noexcept { return total_measure_; }
  [[nodiscard]] double max_weight() const noexcept { return max_weight_; }
  /// All cell weights bitwise equal.
  [[nodiscard]] bool uniform_weights() const noexcept { return uniform_weights_; }

  [[nodiscard]] bool structured() const noexcept { return structured_; }
  /// Interior node counts {nx, ny}; ny == 1 in 1D.
  [[nodiscard]] std::array<std::size_t, 2> shape() const noexcept { return shape_; }
  [[nodiscard]] std::array<double, 2> spacing() const noexcept { return spacing_; }
  [[nodiscard]] std::array<double, 2> extents() const noexcept { return extents_; }

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  Grid() = default;
  void finalize();

  int dim_ = 1;
  bool structured_ = false;
  bool uniform_weights_ = false;
  std::array<std::size_t, 2> shape_{0, 1};
  std::array<double, 2> spacing_{0.0, 0.0};
  std::array<double, 2> extents_{0.0, 0.0};
  std::vector<double> weights_;
  std::vector<Point> coords_;
  double total_measure_ = 0.0;
  double max_weight_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

/// True when both pointers refer to the same grid or to structurally equal grids.
[[nodiscard]] bool same_grid(const GridPtr& a, const GridPtr& b);
void require_same_grid(const GridPtr& a, const GridPtr& b);

/// One real value per cell.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid, double fill = 0.0);
  GridFunction(GridPtr grid, std::vector<double> values);

  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const& noexcept { return values_; }
  [[nodiscard]] std::span<double> values() & noexcept { return values_; }
  // A span into a temporary would dangle.
  std::span<const double> values() const&& = delete;
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const GridFunction& a, const GridFunction& b) {
    return same_grid(a.grid_, b.grid_) && a.values_ == b.values_;
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Characteristic function of a set of cells.
class Indicator {
 public:
  Indicator() = default;
  explicit Indicator(GridPtr grid, bool fill = false);
  Indicator(GridPtr grid, std::vector<bool> flags);

  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return flags_.size(); }
  [[nodiscard]] bool operator[](std::size_t i) const { return flags_[i] != 0; }
  void set(std::size_t i, bool v) { flags_[i] = v ? 1 : 0; }
  [[nodiscard]] std::size_t count() const;
  /// Sum of the weights of the flagged cells.
  [[nodiscard]] double measure() const;

  friend bool operator==(const Indicator& a, const Indicator& b) {
    return same_grid(a.grid_, b.grid_) && a.flags_ == b.flags_;
  }

 private:
  GridPtr grid_;
  std::vector<unsigned char> flags_;
};

// --- weighted norms and support queries ------------------------------------

/// 1e-12 * (1 + max|u|).
[[nodiscard]] double default_zero_tol(const GridFunction& u);

/// Measure of { x : |u(x)| > zero_tol }.
[[nodiscard]] double l0_measure(const GridFunction& u, double zero_tol);
[[nodiscard]] Indicator support(const GridFunction& u, double zero_tol);

/// sum_i w_i u_i^2
[[nodiscard]] double weighted_norm_sq(const GridFunction& u);
/// sum_i w_i a_i b_i
[[nodiscard]] double weighted_inner(const GridFunction& a, const GridFunction& b);
[[nodiscard]] double max_abs(const GridFunction& u);

/// Measure of the symmetric difference of two cell sets.
[[nodiscard]] double indicator_l1_distance(const Indicator& a, const Indicator& b);

// small algebra helpers used throughout the solvers
[[nodiscard]] GridFunction operator-(const GridFunction& a, const GridFunction& b);
[[nodiscard]] GridFunction operator+(const GridFunction& a, const GridFunction& b);
[[nodiscard]] GridFunction operator*(double s, const GridFunction& a);

}  // namespace l0prox
