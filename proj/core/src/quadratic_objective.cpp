#include "l0prox/quadratic_objective.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "l0prox/error.hpp"
#include "l0prox/summation.hpp"

namespace l0prox {

QuadraticObjective::QuadraticObjective(GridPtr grid, Eigen::MatrixXd K, GridFunction b)
    : grid_(std::move(grid)), K_(std::move(K)), b_(std::move(b)) {
  const auto n = static_cast<Eigen::Index>(grid_->size());
  if (K_.rows() != n || K_.cols() != n) {
    throw InvalidArgument(fmt::format("K must be {0}x{0}, got {1}x{2}", n, K_.rows(), K_.cols()));
  }
  if (!K_.allFinite()) throw InvalidArgument("K has non-finite entries");
  require_same_grid(grid_, b_.grid());
  const auto w = grid_->weights();
  w_ = Eigen::Map<const Eigen::VectorXd>(w.data(), n);

  // The gradient map is u -> W^{-1} K^T W K u, self-adjoint in the W inner
  // product; its norm there is sigma_max(W^{1/2} K W^{-1/2})^2.
  const Eigen::VectorXd sw = w_.cwiseSqrt();
  const Eigen::MatrixXd M = sw.asDiagonal() * K_ * sw.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd MtM = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(MtM, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SolverError("eigen-decomposition for the Lipschitz constant failed");
  lipschitz_ = std::max(0.0, eig.eigenvalues().maxCoeff());
}

QuadraticObjective QuadraticObjective::identity(GridPtr grid, GridFunction b) {
  const auto n = static_cast<Eigen::Index>(grid->size());
  return QuadraticObjective(std::move(grid), Eigen::MatrixXd::Identity(n, n), std::move(b));
}

Eigen::VectorXd QuadraticObjective::residual(const GridFunction& u) const {
  require_same_grid(grid_, u.grid());
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::Map<const Eigen::VectorXd> uu(u.values().data(), n);
  Eigen::Map<const Eigen::VectorXd> bb(b_.values().data(), n);
  return K_ * uu - bb;
}

double QuadraticObjective::value(const GridFunction& u) const {
  const Eigen::VectorXd r = residual(u);
  return 0.5 * pairwise_sum(u.size(), [&](std::size_t i) {
           const auto k = static_cast<Eigen::Index>(i);
           return w_(k) * r(k) * r(k);
         });
}

GridFunction QuadraticObjective::gradient(const GridFunction& u) const { return evaluate(u).gradient; }

SmoothObjective::Evaluation QuadraticObjective::evaluate(const GridFunction& u) const {
  const Eigen::VectorXd r = residual(u);
  const double v = 0.5 * pairwise_sum(u.size(), [&](std::size_t i) {
                     const auto k = static_cast<Eigen::Index>(i);
                     return w_(k) * r(k) * r(k);
                   });
  const Eigen::VectorXd g = (K_.transpose() * w_.cwiseProduct(r)).cwiseQuotient(w_);
  return {v, GridFunction(grid_, std::vector<double>(g.data(), g.data() + g.size()))};
}

}  // namespace l0prox
