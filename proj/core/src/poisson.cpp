#include "l0prox/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "l0prox/error.hpp"

namespace l0prox {

namespace {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

double dot(std::span<const double> a, std::span<const double> b) {
  // Plain left-to-right accumulation: CG's own recurrences are order-sensitive
  // anyway, and keeping them sequential keeps results bitwise reproducible.
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

PoissonOperator::PoissonOperator(GridPtr grid, GridFunction coefficient)
    : grid_(std::move(grid)), coefficient_(std::move(coefficient)) {
  if (!grid_->structured()) throw InvalidArgument("Poisson operator needs a structured grid");
  require_same_grid(grid_, coefficient_.grid());
  for (std::size_t i = 0; i < coefficient_.size(); ++i) {
    const double a = coefficient_[i];
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InvalidArgument(fmt::format("diffusion coefficient must be positive (cell {} has {})", i, a));
    }
  }
  const auto shape = grid_->shape();
  const auto h = grid_->spacing();
  nx_ = shape[0];
  ny_ = grid_->dim() == 2 ? shape[1] : 1;
  const std::size_t n = nx_ * ny_;
  east_.assign(n, 0.0);
  north_.assign(n, 0.0);
  west_boundary_.assign(n, 0.0);
  south_boundary_.assign(n, 0.0);
  diag_.assign(n, 0.0);
  const double ihx2 = 1.0 / (h[0] * h[0]);
  const double ihy2 = grid_->dim() == 2 ? 1.0 / (h[1] * h[1]) : 0.0;
  const auto& a = coefficient_;
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t k = j * nx_ + i;
      east_[k] = (i + 1 < nx_ ? harmonic_mean(a[k], a[k + 1]) : a[k]) * ihx2;
      if (i == 0) west_boundary_[k] = a[k] * ihx2;
      if (grid_->dim() == 2) {
        north_[k] = (j + 1 < ny_ ? harmonic_mean(a[k], a[k + nx_]) : a[k]) * ihy2;
        if (j == 0) south_boundary_[k] = a[k] * ihy2;
      }
    }
  }
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t k = j * nx_ + i;
      double d = east_[k] + (i > 0 ? east_[k - 1] : west_boundary_[k]);
      if (grid_->dim() == 2) d += north_[k] + (j > 0 ? north_[k - nx_] : south_boundary_[k]);
      diag_[k] = d;
    }
  }
}

void PoissonOperator::apply(std::span<const double> y, std::span<double> out) const {
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t k = j * nx_ + i;
      double v = diag_[k] * y[k];
      if (i + 1 < nx_) v -= east_[k] * y[k + 1];
      if (i > 0) v -= east_[k - 1] * y[k - 1];
      if (ny_ > 1) {
        if (j + 1 < ny_) v -= north_[k] * y[k + nx_];
        if (j > 0) v -= north_[k - nx_] * y[k - nx_];
      }
      out[k] = v;
    }
  }
}

GridFunction PoissonOperator::apply(const GridFunction& y) const {
  require_same_grid(grid_, y.grid());
  GridFunction out(grid_);
  apply(y.values(), out.values());
  return out;
}

double PoissonOperator::gershgorin_lower_bound() const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t k = j * nx_ + i;
      double off = 0.0;
      if (i + 1 < nx_) off += east_[k];
      if (i > 0) off += east_[k - 1];
      if (ny_ > 1) {
        if (j + 1 < ny_) off += north_[k];
        if (j > 0) off += north_[k - nx_];
      }
      lo = std::min(lo, diag_[k] - off);
    }
  }
  return lo;
}

CgResult conjugate_gradient(const PoissonOperator& A, std::span<const double> b, std::span<double> x,
                            double rel_tol, std::size_t max_iter) {
  const std::size_t n = A.size();
  if (b.size() != n || x.size() != n) throw GridMismatch("CG operand sizes differ");
  std::fill(x.begin(), x.end(), 0.0);
  CgResult res;
  res.rhs_norm = std::sqrt(dot(b, b));
  if (res.rhs_norm == 0.0) return res;
  if (!std::isfinite(res.rhs_norm)) throw SolverError("CG right-hand side is not finite");

  const auto diag = A.diagonal();
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = res.rhs_norm;
  const double target = rel_tol * res.rhs_norm;
  std::size_t it = 0;
  while (rnorm > target) {
    if (it == max_iter) {
      throw SolverError(fmt::format("CG did not converge in {} iterations (relative residual {:.3e})", max_iter,
                                    rnorm / res.rhs_norm));
    }
    A.apply(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(dot(r, r));
    ++it;
  }
  res.iterations = it;
  // Report the true residual rather than the recursively updated one.
  A.apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  res.residual_norm = std::sqrt(dot(r, r));
  return res;
}

}  // namespace l0prox
