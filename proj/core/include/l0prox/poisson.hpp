#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "l0prox/grid.hpp"

namespace l0prox {

/// Finite-difference discretization of  -div(a grad y)  on the interior nodes
/// of a structured grid with homogeneous Dirichlet data (3-point stencil in
/// 1D, 5-point in 2D). Face coefficients are harmonic means of the adjacent
/// nodal values of a; faces touching the boundary use the interior node's a.
/// The matrix is symmetric positive definite.
class PoissonOperator {
 public:
  PoissonOperator(GridPtr grid, GridFunction coefficient);

  [[nodiscard]] const GridPtr& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return diag_.size(); }
  [[nodiscard]] const GridFunction& coefficient() const { return coefficient_; }

  void apply(std::span<const double> y, std::span<double> out) const;
  [[nodiscard]] GridFunction apply(const GridFunction& y) const;
  [[nodiscard]] std::span<const double> diagonal() const { return diag_; }

  /// min_i (A_ii - sum_{j != i} |A_ij|); may be <= 0 (uninformative).
  [[nodiscard]] double gershgorin_lower_bound() const;

 private:
  GridPtr grid_;
  GridFunction coefficient_;
  std::size_t nx_ = 0;
  std::size_t ny_ = 1;
  // Face conductances already divided by h^2: east/north faces per node
  // (the west/south face of node i is the east/north face of its neighbour).
  std::vector<double> east_;
  std::vector<double> north_;
  std::vector<double> west_boundary_;
  std::vector<double> south_boundary_;
  std::vector<double> diag_;
};

struct CgResult {
  std::size_t iterations = 0;
  double residual_norm = 0.0;  ///< ||b - A x||_2 at exit
  double rhs_norm = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for A x = b, zero initial guess.
/// Stops when ||r||_2 <= rel_tol * ||b||_2; throws SolverError after
/// max_iter iterations without meeting that.
CgResult conjugate_gradient(const PoissonOperator& A, std::span<const double> b, std::span<double> x,
                            double rel_tol, std::size_t max_iter);

}  // namespace l0prox
