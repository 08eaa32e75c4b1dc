#include "dynspec/legendre.hpp"

#include <algorithm>
#include <cmath>

#include "dynspec/errors.hpp"

namespace dynspec {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;

double lambda_value(const TransferMatrix& a, const Vec& phi) {
  // -inf propagates as an ordinary divergence of the descent objective.
  return spectral_potential_value(a, Potential(phi)).to_double();
}

// Central-difference subgradient estimate for lambda, used where the dominant
// eigenvalue stops being simple.
Vec fd_lambda_gradient(const TransferMatrix& a, const Vec& phi, double h = 1e-6) {
  Vec g(phi.size());
  Vec p = phi;
  for (size_t i = 0; i < phi.size(); ++i) {
    p[i] = phi[i] + h;
    const double up = lambda_value(a, p);
    p[i] = phi[i] - h;
    const double dn = lambda_value(a, p);
    p[i] = phi[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

}  // namespace

DualEntropyResult dual_entropy(const TransferMatrix& a, const Measure& mu,
                               const DualEntropyOptions& opts) {
  const int n = a.n_states();
  if (mu.size() != n) throw DimensionError("dual_entropy: size mismatch");

  Vec phi(n, 0.0);
  auto objective = [&](const Vec& p) { return lambda_value(a, p) - mu.integrate(p); };
  auto subgradient = [&](const Vec& p, bool* fd) {
    Vec grad;
    try {
      grad = equilibrium_measure(a, Potential(p)).weights();
      *fd = false;
    } catch (const NonUniqueEquilibrium&) {
      grad = fd_lambda_gradient(a, p);
      *fd = true;
    }
    for (int i = 0; i < n; ++i) grad[i] -= mu[i];
    return grad;
  };

  double g = objective(phi);
  double best = g;
  Vec best_phi = phi;
  double step = 1.0;
  bool fd_mode = false;
  bool converged = false;
  bool hit_grad_tol = false;
  int it = 0;

  for (; it < opts.max_iter; ++it) {
    if (g < opts.divergence_floor || sup_norm(phi) > opts.phi_cap) {
      // Divergence certificate: mu is not an invariant probability measure.
      return DualEntropyResult{ExtReal::neg_inf(), Potential(phi), true, it};
    }
    Vec grad;
    try {
      grad = subgradient(phi, &fd_mode);
    } catch (const DomainError&) {  // nilpotent weighted operator
      return DualEntropyResult{ExtReal::neg_inf(), Potential(phi), true, it};
    }

    const double gn2 = dot(grad, grad);
    if (std::sqrt(gn2) < opts.grad_tol) {
      converged = true;
      hit_grad_tol = true;
      break;
    }

    double eta = std::min(step * 2.0, 1e3);
    bool accepted = false;
    while (eta > 1e-14) {
      Vec cand = phi;
      for (int i = 0; i < n; ++i) cand[i] -= eta * grad[i];
      const double gc = objective(cand);
      if (gc <= g - kArmijo * eta * gn2) {
        phi = std::move(cand);
        g = gc;
        step = eta;
        accepted = true;
        break;
      }
      eta *= kShrink;
    }
    if (g < best) {
      best = g;
      best_phi = phi;
    }
    if (!accepted) break;  // stalled at a kink; the polish phase takes over
  }

  // Ellipsoid polish: the objective is convex (piecewise smooth with kinks
  // where the dominant eigenvalue degenerates) and invariant under adding
  // constants to phi, so we run the ellipsoid method in the sum-zero
  // hyperplane.  Unlike the line search it cannot stall at a kink.
  const int d = n - 1;
  if (!hit_grad_tol && d >= 1 && std::isfinite(best)) {
    std::vector<Vec> basis;  // orthonormal basis of {sum phi = 0}
    for (int i = 0; i < d; ++i) {
      Vec v(n, 0.0);
      v[i] = 1.0;
      v[i + 1] = -1.0;
      for (const Vec& b : basis) {
        const double pr = dot(v, b);
        for (int j = 0; j < n; ++j) v[j] -= pr * b[j];
      }
      scale(v, 1.0 / std::sqrt(dot(v, v)));
      basis.push_back(std::move(v));
    }
    const Vec anchor = best_phi;
    auto phi_of = [&](const Vec& z) {
      Vec p = anchor;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < n; ++j) p[j] += z[i] * basis[i][j];
      return p;
    };

    const double radius = 10.0;
    Vec z(d, 0.0);
    Mat shape(d, d);
    for (int i = 0; i < d; ++i) shape(i, i) = radius * radius;

    const int polish_iters = 40 * d * (d + 2);
    for (int pit = 0; pit < polish_iters; ++pit) {
      const Vec phi_c = phi_of(z);
      const double val = objective(phi_c);
      if (std::isfinite(val) && val < best) {
        best = val;
        best_phi = phi_c;
      }
      // Central differences of lambda give a valid subgradient here: on a
      // smooth piece they match the equilibrium measure, and at a kink they
      // average the slopes of the active pieces (a convex combination).
      Vec gfull = fd_lambda_gradient(a, phi_c);
      for (int i = 0; i < n; ++i) gfull[i] -= mu[i];
      Vec grad(d);
      for (int i = 0; i < d; ++i) grad[i] = dot(gfull, basis[i]);
      const Vec pg = mat_apply(shape, grad);
      const double gpg = dot(grad, pg);
      if (!(gpg > 1e-28)) break;
      const double s = std::sqrt(gpg);
      if (d == 1) {
        z[0] -= (grad[0] > 0.0 ? 1.0 : -1.0) * std::sqrt(shape(0, 0)) / 2.0;
        shape(0, 0) *= 0.25;
        continue;
      }
      for (int i = 0; i < d; ++i) z[i] -= pg[i] / (s * (d + 1.0));
      const double grow = static_cast<double>(d * d) / (d * d - 1.0);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          shape(i, j) = grow * (shape(i, j) - (2.0 / (d + 1.0)) * pg[i] * pg[j] / gpg);
    }
    converged = true;  // value-accurate by the ellipsoid volume guarantee
  }

  return DualEntropyResult{ExtReal(best), Potential(best_phi), converged, it};
}

double verify_young(const TransferMatrix& a, const Potential& phi, const Measure& mu,
                    const DualEntropyOptions& opts) {
  const DualEntropyResult s = dual_entropy(a, mu, opts);
  if (s.value.is_neg_inf()) throw DomainError("verify_young: S(mu) is -inf");
  const SpectralResult sp = spectral_potential(a, phi);
  if (sp.lambda.is_neg_inf()) throw DomainError("verify_young: lambda(phi) is -inf");
  return sp.lambda.value() - mu.integrate(phi.values) - s.value.value();
}

double reconstruct_lambda(const TransferMatrix& a, const Potential& phi,
                          const EntropyOracle& entropy_oracle, const ReconstructOptions& opts) {
  const std::vector<InvariantMeasure> verts = ergodic_measures(a.system());
  const int k = static_cast<int>(verts.size());

  auto measure_of = [&](const Vec& w) {
    Vec ww = w;
    double s = 0.0;
    for (double x : ww) s += x;
    for (double& x : ww) x /= s;
    return hull_measure(verts, ww);
  };
  auto objective = [&](const Vec& w) -> double {
    const Measure mu = measure_of(w);
    const ExtReal s = entropy_oracle(mu);
    if (s.is_neg_inf()) return -1e30;  // clamp for optimization arithmetic only
    return mu.integrate(phi.values) + s.value();
  };

  double best = -1e30;
  for (int start = 0; start < k; ++start) {
    Vec w(k, 0.0);
    w[start] = 1.0;
    double val = objective(w);
    best = std::max(best, val);
    if (k == 1) continue;
    double eta = opts.step0;
    for (int it = 0; it < opts.max_iter; ++it) {
      Vec grad(k);
      for (int j = 0; j < k; ++j) {
        Vec up = w, dn = w;
        up[j] += opts.fd_step;
        dn[j] = std::max(0.0, dn[j] - opts.fd_step);
        grad[j] = (objective(up) - objective(dn)) / (opts.fd_step + (w[j] - dn[j]));
      }
      bool accepted = false;
      while (eta > 1e-10) {
        Vec cand = w;
        for (int j = 0; j < k; ++j) cand[j] += eta * grad[j];
        cand = project_to_simplex(std::move(cand));
        const double cv = objective(cand);
        if (cv > val + 1e-14) {
          w = std::move(cand);
          val = cv;
          accepted = true;
          eta = std::min(eta * 2.0, 10.0);
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
      best = std::max(best, val);
    }
  }
  if (best <= -1e29) throw NoFeasibleMeasure("reconstruct_lambda: oracle is -inf at every start");
  return best;
}

}  // namespace dynspec
