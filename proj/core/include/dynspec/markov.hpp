#pragma once

#include <cstdint>

#include "dynspec/ext_real.hpp"
#include "dynspec/systems.hpp"

namespace dynspec {

/// Stationary Markov measure on a subshift graph.  Orientation: P(i, j) is
/// the conditional probability of symbol j following symbol i.
class MarkovMeasure {
 public:
  MarkovMeasure(Vec pi, Mat p, const MarkovShiftSystem& shift);

  const Vec& pi() const { return pi_; }
  const Mat& transition() const { return p_; }
  int n_symbols() const { return static_cast<int>(pi_.size()); }

  /// Integral of an edge function: sum_ij pi_i P_ij f_ij.
  double integrate_edges(const Mat& f) const;

 private:
  Vec pi_;
  Mat p_;
};

/// Kolmogorov-Sinai entropy h = -sum_i pi_i sum_j P_ij ln P_ij (0 ln 0 = 0).
double ks_entropy(const MarkovMeasure& mm);

/// Topological pressure P(alpha, ln psi) = ln r(adjacency .* psi).
/// log_psi entries may be IEEE -inf on edges with zero weight.
ExtReal pressure(const MarkovShiftSystem& shift, const Mat& log_psi);

struct MarkovOptOptions {
  std::uint64_t seed = 1;
  int n_starts = 6;
  int max_iter = 400;
  double fd_step = 1e-6;
};

struct VariationalCheckResult {
  double pressure_value{};
  double vp_value{};
  double gap{};  // pressure_value - vp_value
  MarkovMeasure maximizer;
};

/// Ruelle-Walters check: pressure against sup over Markov measures of
/// integral + KS entropy, optimized over softmax-parametrized row-stochastic
/// matrices with seeded multi-start.
VariationalCheckResult ruelle_walters_check(const MarkovShiftSystem& shift, const Mat& log_psi,
                                            const MarkovOptOptions& opts = {});

struct LatushkinStepinResult {
  double lhs{};  // (1/p) pressure(ln(|a|^p rho))
  double rhs{};  // sup of int ln|a| + (1/p)(int ln rho + h)
  double gap{};
};

LatushkinStepinResult latushkin_stepin_radius(const MarkovShiftSystem& shift, const Mat& log_abs_a,
                                              const Mat& rho, double p,
                                              const MarkovOptOptions& opts = {});

struct TmcDualResult {
  double legendre_value{};
  double closed_form{};
  double gap{};
  int iterations{};
};

/// inf over depth-k potentials of lambda(phi) - mu(phi), against the closed
/// form int ln psi d mu + h(mu).  depth_k in {1, 2}.
TmcDualResult tmc_dual_entropy_check(const MarkovShiftSystem& shift, const Mat& log_psi,
                                     const MarkovMeasure& mm, int depth_k,
                                     int max_iter = 2000);

/// Stationary distribution of an irreducible row-stochastic matrix.
Vec stationary_distribution(const Mat& p);

}  // namespace dynspec
