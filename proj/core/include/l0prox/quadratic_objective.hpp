#pragma once

#include <Eigen/Dense>

#include "l0prox/objective.hpp"

namespace l0prox {

/// f(u) = (1/2) ||K u - b||^2 in the weighted L2 norm, K square on the grid.
class QuadraticObjective final : public SmoothObjective {
 public:
  QuadraticObjective(GridPtr grid, Eigen::MatrixXd K, GridFunction b);
  static QuadraticObjective identity(GridPtr grid, GridFunction b);

  [[nodiscard]] const GridPtr& grid() const override { return grid_; }
  [[nodiscard]] double value(const GridFunction& u) const override;
  /// W^{-1} K^T W (K u - b)
  [[nodiscard]] GridFunction gradient(const GridFunction& u) const override;
  [[nodiscard]] Evaluation evaluate(const GridFunction& u) const override;
  /// kLipschitzSafety * lipschitz_estimate()
  [[nodiscard]] double lipschitz_bound() const override { return kLipschitzSafety * lipschitz_; }
  /// Largest eigenvalue of W^{-1} K^T W K, computed by a dense symmetric eigensolve.
  [[nodiscard]] double lipschitz_estimate() const { return lipschitz_; }

  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return K_; }
  [[nodiscard]] const GridFunction& target() const { return b_; }

 private:
  Eigen::VectorXd residual(const GridFunction& u) const;

  GridPtr grid_;
  Eigen::MatrixXd K_;
  GridFunction b_;
  Eigen::VectorXd w_;
  double lipschitz_ = 0.0;
};

}  // namespace l0prox
