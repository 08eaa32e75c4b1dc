#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dynspec {

/// Mismatched vector/matrix dimensions.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the operation's domain (negative weight, bad probability, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// The dominant eigenvalue is not simple; the subgradient of the spectral
/// potential is a set and no single equilibrium measure can be returned.
class NonUniqueEquilibrium : public std::runtime_error {
 public:
  explicit NonUniqueEquilibrium(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the inner t-entropy solver when some state carries measure but
/// its matrix column is identically zero.  Callers map this to tau = -inf.
class NullColumn : public std::runtime_error {
 public:
  explicit NullColumn(const std::string& what) : std::runtime_error(what) {}
};

/// The entropy oracle returned -inf at every feasible start.
class NoFeasibleMeasure : public std::runtime_error {
 public:
  explicit NoFeasibleMeasure(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative scheme did not converge within its budget; carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate(std::move(last_iterate)) {}

  std::vector<double> last_iterate;
};

}  // namespace dynspec
