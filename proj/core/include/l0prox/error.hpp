#pragma once

#include <stdexcept>
#include <string>

namespace l0prox {

/// Precondition violated by a caller-supplied argument (bad tau, bad size, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two grid-valued operands live on different grids.
class GridMismatch : public InvalidArgument {
 public:
  GridMismatch() : InvalidArgument("grid mismatch between operands") {}
  explicit GridMismatch(const std::string& what) : InvalidArgument(what) {}
};

/// An integrand is not finite where it has to be (g(x, 0) must be finite).
class InvalidIntegrand : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Iterative solver (CG, power iteration, backtracking) failed to deliver.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (CSV/JSON).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace l0prox
