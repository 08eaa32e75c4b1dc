#include "dynspec/lpshift.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dynspec/errors.hpp"
#include "dynspec/spectral.hpp"
#include "dynspec/tentropy.hpp"

namespace dynspec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log of the n-step weight product w_n(y) = prod_{i<n} psi(beta^i(y)); -inf
// when the product hits a zero.
double log_weight_product(const FiniteMeasureSystem& sys, const Vec& psi, int y, int n) {
  double s = 0.0;
  int z = y;
  for (int i = 0; i < n; ++i) {
    if (psi[z] == 0.0) return kNegInf;
    s += std::log(std::abs(psi[z]));
    z = sys.beta(z);
  }
  return s;
}

}  // namespace

FiniteMeasureSystem::FiniteMeasureSystem(Vec m, std::vector<int> beta)
    : m_(std::move(m)), map_(static_cast<int>(m_.size()), std::move(beta)) {
  for (double x : m_)
    if (!(x > 0.0)) throw DomainError("FiniteMeasureSystem: masses must be strictly positive");
}

WeightedShift::WeightedShift(FiniteMeasureSystem sys, Vec psi_, double p_)
    : system(std::move(sys)), psi(std::move(psi_)), p(p_) {
  if (static_cast<int>(psi.size()) != system.n_points())
    throw DimensionError("WeightedShift: psi size mismatch");
  if (!(p >= 1.0)) throw DomainError("WeightedShift: p must be >= 1");
}

TransferMatrix transfer_from_measure(const FiniteMeasureSystem& system) {
  const int n = system.n_points();
  Mat a(n, n);
  for (int y = 0; y < n; ++y) a(system.beta(y), y) = system.m()[y] / system.m()[system.beta(y)];

  // Factorization A = diag(d beta(m)/dm) E: the density is the fiber mass
  // ratio m(beta^{-1}(x))/m_x and E averages over fibers with weights m_y.
  Vec fiber_mass(n, 0.0);
  for (int y = 0; y < n; ++y) fiber_mass[system.beta(y)] += system.m()[y];
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double e = (system.beta(y) == x && fiber_mass[x] > 0.0)
                           ? system.m()[y] / fiber_mass[x]
                           : 0.0;
      const double factored = (fiber_mass[x] / system.m()[x]) * e;
      if (std::abs(a(x, y) - factored) > 1e-12)
        throw std::logic_error("transfer_from_measure: factorization check failed");
    }

  return TransferMatrix(system.map_system(), std::move(a));
}

namespace {

double max_log_abs_psi(const Vec& psi) {
  double c = kNegInf;
  for (double w : psi)
    if (w != 0.0) c = std::max(c, std::log(std::abs(w)));
  return c;
}

// ln ||(psi T)^n||_p by the fiber sum, evaluated with log-sum-exp so that
// large p stays representable.
double log_norm_fiber(const WeightedShift& ws, int n) {
  const FiniteMeasureSystem& sys = ws.system;
  const int k = sys.n_points();
  std::vector<std::vector<double>> terms(k);  // per z: p ln|w_n(y)| + ln m_y
  for (int y = 0; y < k; ++y) {
    const double lw = log_weight_product(sys, ws.psi, y, n);
    if (!std::isfinite(lw)) continue;
    terms[sys.map_system().iterate(y, n)].push_back(ws.p * lw + std::log(sys.m()[y]));
  }
  double best = kNegInf;
  for (int z = 0; z < k; ++z) {
    if (terms[z].empty()) continue;
    double m = kNegInf;
    for (double t : terms[z]) m = std::max(m, t);
    double s = 0.0;
    for (double t : terms[z]) s += std::exp(t - m);
    best = std::max(best, m + std::log(s) - std::log(sys.m()[z]));
  }
  return best / ws.p;
}

// ln ||(psi T)^n||_p via ||(A |psi|^p)^n 1||^{1/p}, with psi rescaled by its
// maximum and per-step renormalization to keep the iteration in range.
double log_norm_transfer(const WeightedShift& ws, int n) {
  const FiniteMeasureSystem& sys = ws.system;
  const int k = sys.n_points();
  const double lc = max_log_abs_psi(ws.psi);
  if (!std::isfinite(lc)) return kNegInf;
  const TransferMatrix a = transfer_from_measure(sys);
  Mat b = a.entries();
  for (int x = 0; x < k; ++x)
    for (int y = 0; y < k; ++y) {
      const double w = ws.psi[y];
      b(x, y) *= w == 0.0 ? 0.0 : std::exp(ws.p * (std::log(std::abs(w)) - lc));
    }
  Vec v(k, 1.0);
  double log_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    v = mat_apply(b, v);
    const double s = sup_norm(v);
    if (s == 0.0) return kNegInf;
    log_acc += std::log(s);
    scale(v, 1.0 / s);
  }
  return static_cast<double>(n) * lc + log_acc / ws.p;
}

}  // namespace

double lp_power_norm(const WeightedShift& ws, int n) {
  if (n < 1) throw DomainError("lp_power_norm: n must be >= 1");
  const double lf = log_norm_fiber(ws, n);
  const double lt = log_norm_transfer(ws, n);
  // Identity check in log space; skipped beneath the double underflow floor
  // where the scaled transfer iteration legitimately flushes to zero.
  const double lc = max_log_abs_psi(ws.psi);
  const double floor = std::isfinite(lc) ? static_cast<double>(n) * lc - 600.0 / ws.p : 0.0;
  if (std::isfinite(lc) && (lf > floor || lt > floor)) {
    if (!(std::abs(lf - lt) <= 1e-10 * std::max({std::abs(lf), std::abs(lt), 1.0})))
      throw std::logic_error("lp_power_norm: fiber and transfer routes disagree");
  }
  return std::exp(lf);
}

double lp_power_norm_via_transfer(const WeightedShift& ws, int n) {
  if (n < 1) throw DomainError("lp_power_norm_via_transfer: n must be >= 1");
  return std::exp(log_norm_transfer(ws, n));
}

LpRadiusResult lp_spectral_radius(const WeightedShift& ws, int n_max) {
  if (n_max < 4) throw DomainError("lp_spectral_radius: n_max must be >= 4");
  const FiniteMeasureSystem& sys = ws.system;
  const int k = sys.n_points();
  const TransferMatrix a = transfer_from_measure(sys);

  LpRadiusResult res;

  // ln r(psi T) = (1/p) ln r(A |psi|^p).  Every strongly connected component
  // of a deterministic map is a bare cycle, so the radius is the best cycle
  // geometric mean; evaluating it in log space keeps large p exact.
  ExtReal lam = ExtReal::neg_inf();
  for (const auto& cycle : cycle_decomposition(sys.map_system()).cycles) {
    double s = 0.0;
    bool dead = false;
    for (int y : cycle) {
      if (ws.psi[y] == 0.0) {
        dead = true;
        break;
      }
      s += std::log(a.entries()(sys.beta(y), y)) + ws.p * std::log(std::abs(ws.psi[y]));
    }
    if (!dead) lam = max(lam, ExtReal(s / static_cast<double>(cycle.size())));
  }
  res.log_radius = lam.is_neg_inf() ? ExtReal::neg_inf() : ExtReal(lam.value() / ws.p);

  res.norm_rates.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double nrm = lp_power_norm(ws, n);
    res.norm_rates.push_back(nrm > 0.0 ? std::log(nrm) / static_cast<double>(n) : kNegInf);
  }

  // The VP objective mu -> int ln|psi| dmu + tau(mu)/p is affine on the
  // invariant polytope, so the maximum sits at a cycle measure; tau there
  // comes from the tentropy module on the transfer operator of (Y, m, beta).
  Vec log_abs_psi(k);
  for (int y = 0; y < k; ++y)
    log_abs_psi[y] = ws.psi[y] == 0.0 ? kNegInf : std::log(std::abs(ws.psi[y]));

  ExtReal vp = ExtReal::neg_inf();
  for (const InvariantMeasure& nu : ergodic_measures(sys.map_system())) {
    double integral = 0.0;
    bool charged_zero = false;
    for (int y = 0; y < k; ++y) {
      if (nu[y] <= 0.0) continue;  // 0 * (-inf) = 0 off the support
      if (!std::isfinite(log_abs_psi[y])) {
        charged_zero = true;
        break;
      }
      integral += nu[y] * log_abs_psi[y];
    }
    if (charged_zero) continue;
    const TauResult tau = t_entropy(a, nu, n_max);
    if (tau.value.is_neg_inf()) continue;
    vp = max(vp, ExtReal(integral + tau.value.value() / ws.p));
  }
  res.vp_value = vp;

  if (res.log_radius.is_neg_inf() && res.vp_value.is_neg_inf())
    res.gap = 0.0;
  else if (res.log_radius.is_neg_inf() || res.vp_value.is_neg_inf())
    res.gap = std::numeric_limits<double>::quiet_NaN();
  else
    res.gap = res.log_radius.value() - res.vp_value.value();
  return res;
}

}  // namespace dynspec
