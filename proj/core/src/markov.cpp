#include "dynspec/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dynspec/spectral.hpp"

namespace dynspec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Edge {
  int i, j;
};

std::vector<Edge> allowed_edges(const Mat& adjacency, const Mat& edge_potential) {
  std::vector<Edge> edges;
  for (int i = 0; i < adjacency.rows(); ++i)
    for (int j = 0; j < adjacency.cols(); ++j)
      if (adjacency(i, j) > 0.0 && std::isfinite(edge_potential(i, j))) edges.push_back({i, j});
  return edges;
}

bool edges_irreducible(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const Edge& e : edges) reach[e.i][e.j] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[i][k])
        for (int j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

Mat transitions_from_logits(int n, const std::vector<Edge>& edges, const Vec& theta) {
  Mat p(n, n);
  Vec row_sum(n, 0.0);
  for (size_t e = 0; e < edges.size(); ++e) {
    const double w = std::exp(theta[e]);
    p(edges[e].i, edges[e].j) = w;
    row_sum[edges[e].i] += w;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p(i, j) > 0.0) p(i, j) /= row_sum[i];
  return p;
}

// Objective: int c dmu + kappa h(mu) over Markov measures of the edge graph,
// mu determined by the row-stochastic matrix and its stationary distribution.
double markov_objective(int n, const std::vector<Edge>& edges, const Mat& c, double kappa,
                        const Vec& theta) {
  const Mat p = transitions_from_logits(n, edges, theta);
  const Vec pi = stationary_distribution(p);
  double val = 0.0;
  for (const Edge& e : edges) {
    const double w = pi[e.i] * p(e.i, e.j);
    if (w <= 0.0) continue;
    val += w * c(e.i, e.j) - kappa * w * std::log(p(e.i, e.j));
  }
  return val;
}

struct MarkovOptOutcome {
  double value;
  Mat p;
  Vec pi;
};

MarkovOptOutcome maximize_over_markov(int n, const std::vector<Edge>& edges, const Mat& c,
                                      double kappa, const MarkovOptOptions& opts) {
  if (!edges_irreducible(n, edges))
    throw DomainError("maximize_over_markov: edge graph is reducible");

  const int dim = static_cast<int>(edges.size());
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);

  double best = kNegInf;
  Vec best_theta(dim, 0.0);
  for (int s = 0; s < opts.n_starts; ++s) {
    Vec theta(dim, 0.0);
    if (s > 0)
      for (double& t : theta) t = unif(rng);
    double val = markov_objective(n, edges, c, kappa, theta);
    double eta = 0.5;
    for (int it = 0; it < opts.max_iter; ++it) {
      Vec grad(dim);
      for (int e = 0; e < dim; ++e) {
        Vec up = theta, dn = theta;
        up[e] += opts.fd_step;
        dn[e] -= opts.fd_step;
        grad[e] = (markov_objective(n, edges, c, kappa, up) -
                   markov_objective(n, edges, c, kappa, dn)) /
                  (2.0 * opts.fd_step);
      }
      if (sup_norm(grad) < 1e-10) break;
      bool accepted = false;
      double step = std::min(eta * 2.0, 50.0);
      while (step > 1e-12) {
        Vec cand = theta;
        for (int e = 0; e < dim; ++e) cand[e] += step * grad[e];
        const double cv = markov_objective(n, edges, c, kappa, cand);
        if (cv > val + 1e-15) {
          theta = std::move(cand);
          val = cv;
          eta = step;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (val > best) {
      best = val;
      best_theta = theta;
    }
  }
  const Mat p = transitions_from_logits(n, edges, best_theta);
  return MarkovOptOutcome{best, p, stationary_distribution(p)};
}

}  // namespace

MarkovMeasure::MarkovMeasure(Vec pi, Mat p, const MarkovShiftSystem& shift)
    : pi_(std::move(pi)), p_(std::move(p)) {
  const int n = shift.n_symbols();
  if (static_cast<int>(pi_.size()) != n || p_.rows() != n || p_.cols() != n)
    throw DimensionError("MarkovMeasure: shape mismatch");
  double s = 0.0;
  for (double x : pi_) {
    if (x < 0.0) throw DomainError("MarkovMeasure: negative pi entry");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-10) throw DomainError("MarkovMeasure: pi not normalized");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (p_(i, j) < 0.0) throw DomainError("MarkovMeasure: negative transition");
      if (p_(i, j) > 0.0 && shift.adjacency()(i, j) == 0.0)
        throw DomainError("MarkovMeasure: transition off the shift graph");
      row += p_(i, j);
    }
    if (pi_[i] > 0.0 && std::abs(row - 1.0) > 1e-10)
      throw DomainError("MarkovMeasure: row not stochastic");
  }
  const Vec push = mat_apply_transpose(p_, pi_);
  for (int j = 0; j < n; ++j)
    if (std::abs(push[j] - pi_[j]) > 1e-10)
      throw DomainError("MarkovMeasure: pi not stationary");
}

double MarkovMeasure::integrate_edges(const Mat& f) const {
  double s = 0.0;
  for (int i = 0; i < p_.rows(); ++i)
    for (int j = 0; j < p_.cols(); ++j) {
      const double w = pi_[i] * p_(i, j);
      if (w > 0.0) s += w * f(i, j);
    }
  return s;
}

double ks_entropy(const MarkovMeasure& mm) {
  double h = 0.0;
  const Mat& p = mm.transition();
  for (int i = 0; i < p.rows(); ++i) {
    if (mm.pi()[i] <= 0.0) continue;
    for (int j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) h -= mm.pi()[i] * p(i, j) * std::log(p(i, j));
  }
  return h;
}

ExtReal pressure(const MarkovShiftSystem& shift, const Mat& log_psi) {
  const int n = shift.n_symbols();
  if (log_psi.rows() != n || log_psi.cols() != n) throw DimensionError("pressure: shape mismatch");
  double c = kNegInf;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (shift.adjacency()(i, j) > 0.0 && std::isfinite(log_psi(i, j)))
        c = std::max(c, log_psi(i, j));
  if (!std::isfinite(c)) return ExtReal::neg_inf();
  Mat w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (shift.adjacency()(i, j) > 0.0 && std::isfinite(log_psi(i, j)))
        w(i, j) = std::exp(log_psi(i, j) - c);
  const ExtReal lam = spectral_analysis(w).lambda;
  return lam.is_neg_inf() ? lam : ExtReal(lam.value() + c);
}

Vec stationary_distribution(const Mat& p) {
  const int n = p.rows();
  // (P^T - I) pi = 0 with the last equation replaced by normalization.
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  Vec b(n, 0.0);
  b[n - 1] = 1.0;
  Vec pi = solve_linear(std::move(a), std::move(b));
  for (double& x : pi) x = std::max(x, 0.0);
  double s = 0.0;
  for (double x : pi) s += x;
  for (double& x : pi) x /= s;
  return pi;
}

VariationalCheckResult ruelle_walters_check(const MarkovShiftSystem& shift, const Mat& log_psi,
                                            const MarkovOptOptions& opts) {
  const int n = shift.n_symbols();
  if (!shift.irreducible()) throw DomainError("ruelle_walters_check: reducible adjacency");
  const ExtReal pv = pressure(shift, log_psi);
  if (pv.is_neg_inf()) throw DomainError("ruelle_walters_check: pressure is -inf");
  const auto edges = allowed_edges(shift.adjacency(), log_psi);
  const MarkovOptOutcome out = maximize_over_markov(n, edges, log_psi, 1.0, opts);
  MarkovMeasure mm(out.pi, out.p, shift);
  return VariationalCheckResult{pv.value(), out.value, pv.value() - out.value, std::move(mm)};
}

LatushkinStepinResult latushkin_stepin_radius(const MarkovShiftSystem& shift, const Mat& log_abs_a,
                                              const Mat& rho, double p,
                                              const MarkovOptOptions& opts) {
  const int n = shift.n_symbols();
  if (p < 1.0) throw DomainError("latushkin_stepin_radius: p must be >= 1");
  if (!shift.irreducible()) throw DomainError("latushkin_stepin_radius: reducible adjacency");
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rho(i, j) * shift.adjacency()(i, j);
    if (std::abs(s - 1.0) > 1e-10)
      throw DomainError("latushkin_stepin_radius: rho not stochastic on fibers");
  }
  Mat log_weight(n, n, kNegInf);  // ln(|a|^p rho) on allowed edges
  Mat c(n, n, kNegInf);           // ln|a| + (1/p) ln rho
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (shift.adjacency()(i, j) == 0.0 || rho(i, j) <= 0.0) continue;
      log_weight(i, j) = p * log_abs_a(i, j) + std::log(rho(i, j));
      c(i, j) = log_abs_a(i, j) + std::log(rho(i, j)) / p;
    }
  const ExtReal pr = pressure(shift, log_weight);
  if (pr.is_neg_inf()) throw DomainError("latushkin_stepin_radius: degenerate weights");
  const double lhs = pr.value() / p;
  const auto edges = allowed_edges(shift.adjacency(), c);
  const MarkovOptOutcome out = maximize_over_markov(n, edges, c, 1.0 / p, opts);
  return LatushkinStepinResult{lhs, out.value, lhs - out.value};
}

TmcDualResult tmc_dual_entropy_check(const MarkovShiftSystem& shift, const Mat& log_psi,
                                     const MarkovMeasure& mm, int depth_k, int max_iter) {
  const int n = shift.n_symbols();
  if (depth_k != 1 && depth_k != 2)
    throw DomainError("tmc_dual_entropy_check: depth_k must be 1 or 2");
  if (!shift.irreducible()) throw DomainError("tmc_dual_entropy_check: reducible adjacency");

  const auto edges = allowed_edges(shift.adjacency(), log_psi);
  const int dim = depth_k == 2 ? static_cast<int>(edges.size()) : n;

  // The matrix is built with the largest exponent factored out so that the
  // descent can push phi arbitrarily far without overflowing; the shift is
  // added back to lambda (additive homogeneity).
  auto weighted = [&](const Vec& phi, double* shift_out) {
    double c = kNegInf;
    for (size_t e = 0; e < edges.size(); ++e) {
      const double ph = depth_k == 2 ? phi[e] : phi[edges[e].i];
      c = std::max(c, log_psi(edges[e].i, edges[e].j) + ph);
    }
    Mat b(n, n);
    for (size_t e = 0; e < edges.size(); ++e) {
      const double ph = depth_k == 2 ? phi[e] : phi[edges[e].i];
      b(edges[e].i, edges[e].j) = std::exp(log_psi(edges[e].i, edges[e].j) + ph - c);
    }
    *shift_out = c;
    return b;
  };
  auto mu_of_phi = [&](const Vec& phi) {
    double s = 0.0;
    for (size_t e = 0; e < edges.size(); ++e) {
      const double w = mm.pi()[edges[e].i] * mm.transition()(edges[e].i, edges[e].j);
      s += w * (depth_k == 2 ? phi[e] : phi[edges[e].i]);
    }
    return s;
  };
  auto objective = [&](const Vec& phi) {
    double c = 0.0;
    const SpectralResult sr = spectral_analysis(weighted(phi, &c));
    return sr.lambda.value() + c - mu_of_phi(phi);
  };

  Vec phi(dim, 0.0);
  double g = objective(phi);
  double best = g;
  double step = 1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    double c = 0.0;
    const Mat b = weighted(phi, &c);  // gradient only needs ratios b_ij / r,
    const SpectralResult sr = spectral_analysis(b);  // which the shift preserves
    if (!sr.simple) break;  // numerically degenerate point; keep the best value
    const double r = sr.dominant_eigenvalue;
    const double uv = dot(sr.left_vector, sr.right_vector);
    Vec grad(dim, 0.0);
    for (size_t e = 0; e < edges.size(); ++e) {
      const double eq = sr.left_vector[edges[e].i] * b(edges[e].i, edges[e].j) *
                        sr.right_vector[edges[e].j] / (r * uv);
      const double w = mm.pi()[edges[e].i] * mm.transition()(edges[e].i, edges[e].j);
      const int idx = depth_k == 2 ? static_cast<int>(e) : edges[e].i;
      grad[idx] += eq - w;
    }
    const double gn2 = dot(grad, grad);
    if (std::sqrt(gn2) < 1e-10) break;
    double eta = std::min(step * 2.0, 100.0);
    bool accepted = false;
    while (eta > 1e-14) {
      Vec cand = phi;
      for (int i = 0; i < dim; ++i) cand[i] -= eta * grad[i];
      const double gc = objective(cand);
      if (gc <= g - 1e-4 * eta * gn2) {
        phi = std::move(cand);
        g = gc;
        step = eta;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    best = std::min(best, g);
    if (!accepted) break;
  }

  const double closed = mm.integrate_edges(log_psi) + ks_entropy(mm);
  return TmcDualResult{best, closed, best - closed, it};
}

}  // namespace dynspec
