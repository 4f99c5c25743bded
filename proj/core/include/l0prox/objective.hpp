#pragma once

#include "l0prox/grid.hpp"

namespace l0prox {

/// Factor applied to estimated Lipschitz constants to turn them into bounds.
inline constexpr double kLipschitzSafety = 1.05;

/// Smooth part f of the composite objective f(u) + (alpha/2)||u||^2.
///
/// All inner products are the cell-weighted ones, so gradient() returns the
/// Riesz representative in the weighted L2 space and lipschitz_bound() is the
/// Lipschitz constant of that gradient in the weighted norm.
class SmoothObjective {
 public:
  struct Evaluation {
    double value;
    GridFunction gradient;
  };

  virtual ~SmoothObjective() = default;

  [[nodiscard]] virtual const GridPtr& grid() const = 0;
  [[nodiscard]] virtual double value(const GridFunction& u) const = 0;
  [[nodiscard]] virtual GridFunction gradient(const GridFunction& u) const = 0;
  /// Value and gradient together; objectives sharing work between the two override this.
  [[nodiscard]] virtual Evaluation evaluate(const GridFunction& u) const { return {value(u), gradient(u)}; }
  [[nodiscard]] virtual double lipschitz_bound() const = 0;
};

}  // namespace l0prox
