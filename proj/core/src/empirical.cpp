#include "dynspec/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynspec/errors.hpp"
#include "dynspec/tentropy.hpp"

namespace dynspec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vec empirical_vec(const FiniteMapSystem& system, int x, int n) {
  return empirical_measure(system, x, n).weights().weights();
}

// Linear objective sum_c w_c tau_c over the simplex slice
// {w : TV(hull(w), mu) <= r}; grid over the simplex plus pairwise-transfer
// refinement.  tau values of -inf enter as a large negative clamp.
double max_affine_on_ball(const std::vector<InvariantMeasure>& verts, const Vec& tau_v,
                          const Measure& mu, double r) {
  const int k = static_cast<int>(verts.size());
  auto tv_of = [&](const Vec& w) {
    return tv_distance(hull_measure(verts, w).weights(), mu.weights());
  };
  auto value_of = [&](const Vec& w) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += w[c] * tau_v[c];
    return s;
  };

  // Feasible anchor: mu's own cycle masses (mu is invariant, so TV = 0).
  Vec w0(k, 0.0);
  {
    double tot = 0.0;
    for (int c = 0; c < k; ++c) {
      for (size_t i = 0; i < verts[c].weights().size(); ++i)
        if (verts[c].weights()[i] > 0.0) w0[c] += mu[static_cast<int>(i)];
      tot += w0[c];
    }
    if (tot > 0.0)
      for (double& w : w0) w /= tot;
    else
      w0[0] = 1.0;
  }

  double best = value_of(w0);
  Vec best_w = w0;

  // Simplex grid with D divisions, sized to keep the point count modest.
  int divisions = 40;
  if (k > 2) divisions = std::max(2, static_cast<int>(std::pow(2.0e5, 1.0 / (k - 1))));
  std::vector<int> parts(k, 0);
  auto visit = [&](auto&& self, int idx, int remaining) -> void {
    if (idx == k - 1) {
      parts[idx] = remaining;
      Vec w(k);
      for (int c = 0; c < k; ++c) w[c] = static_cast<double>(parts[c]) / divisions;
      if (tv_of(w) <= r) {
        const double v = value_of(w);
        if (v > best) {
          best = v;
          best_w = w;
        }
      }
      return;
    }
    for (int t = 0; t <= remaining; ++t) {
      parts[idx] = t;
      self(self, idx + 1, remaining - t);
    }
  };
  if (k > 1) visit(visit, 0, divisions);

  // Local refinement: move mass between coordinate pairs with shrinking step.
  for (Vec w : {best_w, w0}) {
    double val = value_of(w);
    double step = 1.0 / divisions;
    while (step > 1e-7) {
      bool improved = false;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          if (i == j || w[i] < step) continue;
          Vec cand = w;
          cand[i] -= step;
          cand[j] += step;
          if (tv_of(cand) > r) continue;
          const double v = value_of(cand);
          if (v > val + 1e-15) {
            w = std::move(cand);
            val = v;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace

Measure EmpiricalMeasure::weights() const {
  Vec w(counts.size());
  for (size_t i = 0; i < counts.size(); ++i)
    w[i] = static_cast<double>(counts[i]) / static_cast<double>(length);
  return Measure(std::move(w));
}

EmpiricalMeasure empirical_measure(const FiniteMapSystem& system, int x, int n) {
  if (n < 1) throw DomainError("empirical_measure: n must be >= 1");
  if (x < 0 || x >= system.n_states()) throw DomainError("empirical_measure: state out of range");
  EmpiricalMeasure em;
  em.base_point = x;
  em.length = n;
  em.counts.assign(system.n_states(), 0);
  int z = x;
  for (int i = 0; i < n; ++i) {
    ++em.counts[z];
    z = system.alpha(z);
  }
  return em;
}

std::vector<int> hitting_set(const FiniteMapSystem& system, const Measure& mu, double radius,
                             int n) {
  if (radius <= 0.0) throw DomainError("hitting_set: radius must be positive");
  if (mu.size() != system.n_states()) throw DimensionError("hitting_set: size mismatch");
  std::vector<int> out;
  for (int x = 0; x < system.n_states(); ++x)
    if (tv_distance(empirical_vec(system, x, n), mu.weights()) < radius) out.push_back(x);
  return out;
}

GrowthReport entropy_statistic_check(const TransferMatrix& a, const InvariantMeasure& mu,
                                     double radius, const std::vector<int>& n_range) {
  if (radius <= 0.0) throw DomainError("entropy_statistic_check: radius must be positive");
  if (n_range.empty()) throw DomainError("entropy_statistic_check: empty n_range");
  const FiniteMapSystem& sys = a.system();
  const int ns = sys.n_states();

  GrowthReport rep{mu, radius, {}, kNegInf, kNegInf};
  for (int n : n_range) {
    Vec chi(ns, 0.0);
    for (int x : hitting_set(sys, mu, radius, n)) chi[x] = 1.0;
    Vec v = chi;
    for (int i = 0; i < n; ++i) v = mat_apply(a.entries(), v);
    const double nrm = sup_norm(v);
    rep.rates.emplace_back(n, nrm > 0.0 ? std::log(nrm) / static_cast<double>(n) : kNegInf);
  }

  // Fit ln||A^n chi_n|| = c + rate * n on the tail third (suppresses the
  // theorem's multiplicative constant).
  const size_t tail = (n_range.size() + 2) / 3;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int pts = 0;
  int n_tail_min = n_range.back();
  double last_finite = kNegInf;
  for (size_t i = rep.rates.size() - tail; i < rep.rates.size(); ++i) {
    const auto [n, rate] = rep.rates[i];
    n_tail_min = std::min(n_tail_min, n);
    if (!std::isfinite(rate)) continue;
    const double y = rate * n;
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += static_cast<double>(n) * y;
    last_finite = rate;
    ++pts;
  }
  if (pts >= 2)
    rep.fitted_rate = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
  else
    rep.fitted_rate = last_finite;

  // bound_t = max tau over the invariant polytope intersected with the
  // inflated TV ball; the slack covers the distance from empirical measures
  // at tail times to the polytope.
  const double slack = 2.0 * static_cast<double>(ns) / static_cast<double>(n_tail_min);
  const std::vector<InvariantMeasure> verts = ergodic_measures(sys);
  Vec tau_v(verts.size());
  for (size_t c = 0; c < verts.size(); ++c) {
    const TauResult t = t_entropy(a, verts[c], 16);
    tau_v[c] = t.value.is_neg_inf() ? -1e30 : t.value.value();
  }
  rep.bound_t = max_affine_on_ball(verts, tau_v, mu, radius + slack);
  if (rep.bound_t <= -1e29) rep.bound_t = kNegInf;
  return rep;
}

int invariant_absorption_check(const FiniteMapSystem& system, double radius) {
  if (radius <= 0.0) throw DomainError("invariant_absorption_check: radius must be positive");
  const CycleDecomposition cd = cycle_decomposition(system);
  std::vector<bool> on_cycle(system.n_states(), false);
  size_t max_period = 1;
  for (const auto& c : cd.cycles) {
    max_period = std::max(max_period, c.size());
    for (int x : c) on_cycle[x] = true;
  }
  int max_transient = 0;
  for (int x = 0; x < system.n_states(); ++x) {
    int z = x, t = 0;
    while (!on_cycle[z]) {
      z = system.alpha(z);
      ++t;
    }
    max_transient = std::max(max_transient, t);
  }

  const int bound = max_transient +
                    static_cast<int>(max_period) * static_cast<int>(std::ceil(2.0 / radius));
  int n_star = 0;
  for (int n = 1; n <= bound + static_cast<int>(max_period); ++n) {
    for (int x = 0; x < system.n_states(); ++x) {
      const double tv = 0.5 * l1_distance_to_invariant_hull(system, empirical_vec(system, x, n));
      if (tv >= radius) {
        n_star = std::max(n_star, n);
        break;
      }
    }
  }
  return n_star;
}

}  // namespace dynspec
