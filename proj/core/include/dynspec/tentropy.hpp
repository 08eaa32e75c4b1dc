#pragma once

#include <vector>

#include "dynspec/ext_real.hpp"
#include "dynspec/spectral.hpp"
#include "dynspec/systems.hpp"

namespace dynspec {

/// Finite family of nonnegative functions summing to one componentwise.
struct PartitionOfUnity {
  std::vector<Vec> functions;

  explicit PartitionOfUnity(std::vector<Vec> fns);

  /// The point partition {e_0, ..., e_{n-1}}.
  static PartitionOfUnity point_partition(int n_states);
};

struct TauResult {
  ExtReal value;
  std::vector<ExtReal> per_n;  // tau_n(mu)/n for n = 1..n_max
  bool converged{};
  double inner_kkt_residual{};
};

struct InnerOptOptions {
  int max_iter = 100000;
  double value_tol = 1e-12;
  double kkt_tol = 1e-6;
};

struct InnerOptResult {
  Measure m_opt;
  double value{};
  double kkt_residual{};
  bool converged{};
  int iterations{};
};

/// Maximizes F(m) = sum_y mu_y ln((A^n)^T m)_y / mu_y) over the probability
/// simplex by the multiplicative fixed-point update
///   m_x <- m_x sum_y mu_y A^n[x][y] / ((A^n)^T m)_y,
/// which preserves the simplex exactly.  Throws NullColumn when some y with
/// mu_y > 0 has an identically zero column.
InnerOptResult inner_measure_opt(const Mat& a_pow_n, const Measure& mu,
                                 const InnerOptOptions& opts = {});

/// tau_n(mu, D) = sup_m sum_{g in D} mu(g) ln(m(A^n g)/mu(g)); summands with
/// mu(g) = 0 contribute zero; -inf when some g has A^n g == 0 and mu(g) > 0.
ExtReal tau_n_partition(const TransferMatrix& a, const Measure& mu, const PartitionOfUnity& d,
                        int n, const InnerOptOptions& opts = {});

/// tau_n at the point partition (which attains the infimum over partitions of
/// unity on a finite space).
ExtReal tau_n(const TransferMatrix& a, const Measure& mu, int n,
              const InnerOptOptions& opts = {}, double* kkt_residual = nullptr);

/// t-entropy tau(mu) = inf_n tau_n(mu)/n, approximated by the minimum over
/// n <= n_max with a doubling convergence diagnostic.
TauResult t_entropy(const TransferMatrix& a, const Measure& mu, int n_max = 32,
                    double doubling_tol = 1e-6, const InnerOptOptions& opts = {});

}  // namespace dynspec
