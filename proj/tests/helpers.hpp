#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dynspec/ext_real.hpp"
#include "dynspec/systems.hpp"

namespace dynspec::testing {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Rng = std::mt19937_64;

inline FiniteMapSystem random_system(Rng& rng, int max_states = 8) {
  std::uniform_int_distribution<int> nd(2, max_states);
  const int n = nd(rng);
  std::uniform_int_distribution<int> sd(0, n - 1);
  std::vector<int> map(n);
  for (int& m : map) m = sd(rng);
  return FiniteMapSystem(n, std::move(map));
}

inline Vec random_psi(Rng& rng, int n, double lo = 0.2, double hi = 5.0) {
  std::uniform_real_distribution<double> wd(lo, hi);
  Vec psi(n);
  for (double& w : psi) w = wd(rng);
  return psi;
}

inline Vec random_phi(Rng& rng, int n, double bound = 2.0) {
  std::uniform_real_distribution<double> pd(-bound, bound);
  Vec phi(n);
  for (double& p : phi) p = pd(rng);
  return phi;
}

/// Random point of the invariant polytope (convex mix of cycle measures).
inline Measure random_hull_point(Rng& rng, const FiniteMapSystem& system) {
  const auto verts = ergodic_measures(system);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Vec w(verts.size());
  double s = 0.0;
  for (double& x : w) {
    x = ud(rng) + 1e-6;
    s += x;
  }
  for (double& x : w) x /= s;
  return hull_measure(verts, w);
}

/// Closed-form oracle for deterministic maps:
/// lambda(phi) = max over cycles of cycle-average (ln psi + phi).
inline ExtReal lambda_cycle_oracle(const FiniteMapSystem& system, const Vec& psi, const Vec& phi) {
  ExtReal best = ExtReal::neg_inf();
  for (const auto& cycle : cycle_decomposition(system).cycles) {
    double s = 0.0;
    bool dead = false;
    for (int y : cycle) {
      if (psi[y] <= 0.0) {
        dead = true;
        break;
      }
      s += std::log(psi[y]) + phi[y];
    }
    if (!dead) best = max(best, ExtReal(s / static_cast<double>(cycle.size())));
  }
  return best;
}

/// Closed-form oracle for tau on the invariant hull of a deterministic map:
/// tau(mu) = sum_y mu_y ln psi(y) (affine; -inf if psi vanishes on supp mu).
inline ExtReal tau_affine_oracle(const Vec& psi, const Measure& mu) {
  double s = 0.0;
  for (int y = 0; y < mu.size(); ++y) {
    if (mu[y] <= 0.0) continue;
    if (psi[y] <= 0.0) return ExtReal::neg_inf();
    s += mu[y] * std::log(psi[y]);
  }
  return ExtReal(s);
}

/// Brute-force simplex grid maximizer of F(m) = sum_y mu_y ln((B^T m)_y/mu_y)
/// for 2- or 3-state systems.
inline double inner_opt_grid_oracle(const Mat& b, const Measure& mu, int divisions) {
  const int n = b.rows();
  double best = kNegInf;
  auto eval = [&](const Vec& m) {
    double val = 0.0;
    for (int y = 0; y < n; ++y) {
      if (mu[y] <= 0.0) continue;
      double col = 0.0;
      for (int x = 0; x < n; ++x) col += b(x, y) * m[x];
      if (col <= 0.0) return kNegInf;
      val += mu[y] * std::log(col / mu[y]);
    }
    return val;
  };
  if (n == 2) {
    for (int i = 0; i <= divisions; ++i) {
      const double t = static_cast<double>(i) / divisions;
      best = std::max(best, eval(Vec{t, 1.0 - t}));
    }
  } else if (n == 3) {
    for (int i = 0; i <= divisions; ++i)
      for (int j = 0; j + i <= divisions; ++j) {
        const double a = static_cast<double>(i) / divisions;
        const double c = static_cast<double>(j) / divisions;
        best = std::max(best, eval(Vec{a, c, 1.0 - a - c}));
      }
  }
  return best;
}

}  // namespace dynspec::testing
