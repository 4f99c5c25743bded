#pragma once

#include "l0prox/objective.hpp"

namespace l0prox {

/// f(u) = <c, u>. Together with (alpha/2)||u||^2 the composite objective is
/// separable, so its L0-constrained minimizer is available in closed form.
class LinearObjective final : public SmoothObjective {
 public:
  explicit LinearObjective(GridFunction c) : c_(std::move(c)) {}

  [[nodiscard]] const GridPtr& grid() const override { return c_.grid(); }
  [[nodiscard]] double value(const GridFunction& u) const override { return weighted_inner(c_, u); }
  [[nodiscard]] GridFunction gradient(const GridFunction& u) const override {
    require_same_grid(c_.grid(), u.grid());
    return c_;
  }
  [[nodiscard]] double lipschitz_bound() const override { return 0.0; }
  [[nodiscard]] const GridFunction& coefficient() const { return c_; }

 private:
  GridFunction c_;
};

}  // namespace l0prox
