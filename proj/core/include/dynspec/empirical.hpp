#pragma once

#include <vector>

#include "dynspec/systems.hpp"

namespace dynspec {

/// Orbit-occupation measure delta_{x,n}; counts are kept as integers so the
/// weights sum to 1 exactly.
struct EmpiricalMeasure {
  int base_point{};
  int length{};
  std::vector<long long> counts;

  Measure weights() const;
};

EmpiricalMeasure empirical_measure(const FiniteMapSystem& system, int x, int n);

/// X_n(O(mu)): all states x with TV(delta_{x,n}, mu) < radius.  O(mu) is
/// realized as a total-variation ball, a valid neighborhood base on finite X.
std::vector<int> hitting_set(const FiniteMapSystem& system, const Measure& mu, double radius,
                             int n);

struct GrowthReport {
  Measure target_mu;
  double radius{};
  std::vector<std::pair<int, double>> rates;  // (n, (1/n) ln ||A^n chi_n||), -inf allowed
  double fitted_rate{};                       // least squares over the tail third
  double bound_t{};                           // max tau over hull within the inflated ball
};

/// Numerical check of the entropy-statistic growth bound: the indicator
/// growth rate of the hitting sets against tau maximized over invariant
/// measures in the (slack-inflated) TV ball around mu.
GrowthReport entropy_statistic_check(const TransferMatrix& a, const InvariantMeasure& mu,
                                     double radius, const std::vector<int>& n_range);

/// Smallest N such that every delta_{x,n} with n > N lies within TV radius of
/// the invariant polytope; exact by enumeration up to the a-priori bound
/// transient + period * ceil(2/radius).
int invariant_absorption_check(const FiniteMapSystem& system, double radius);

}  // namespace dynspec
