#include "dynspec/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dynspec {

FiniteMapSystem::FiniteMapSystem(int n_states, std::vector<int> map)
    : n_states_(n_states), map_(std::move(map)) {
  if (n_states <= 0) throw DomainError("FiniteMapSystem: n_states must be positive");
  if (static_cast<int>(map_.size()) != n_states)
    throw DimensionError("FiniteMapSystem: map length != n_states");
  for (int v : map_)
    if (v < 0 || v >= n_states) throw DomainError("FiniteMapSystem: map value out of range");
}

int FiniteMapSystem::iterate(int y, int k) const {
  for (int i = 0; i < k; ++i) y = map_[y];
  return y;
}

MarkovShiftSystem::MarkovShiftSystem(int n_symbols, Mat adjacency,
                                     std::optional<Mat> branch_weights,
                                     bool stochastic_on_fibers)
    : n_symbols_(n_symbols), adjacency_(std::move(adjacency)),
      branch_weights_(std::move(branch_weights)) {
  if (n_symbols <= 0) throw DomainError("MarkovShiftSystem: n_symbols must be positive");
  if (adjacency_.rows() != n_symbols || adjacency_.cols() != n_symbols)
    throw DimensionError("MarkovShiftSystem: adjacency shape");
  for (int i = 0; i < n_symbols; ++i)
    for (int j = 0; j < n_symbols; ++j)
      if (adjacency_(i, j) != 0.0 && adjacency_(i, j) != 1.0)
        throw DomainError("MarkovShiftSystem: adjacency entries must be 0/1");
  if (branch_weights_) {
    const Mat& rho = *branch_weights_;
    if (rho.rows() != n_symbols || rho.cols() != n_symbols)
      throw DimensionError("MarkovShiftSystem: rho shape");
    for (int i = 0; i < n_symbols; ++i)
      for (int j = 0; j < n_symbols; ++j) {
        if (rho(i, j) < 0.0) throw DomainError("MarkovShiftSystem: rho negative");
        if (rho(i, j) > 0.0 && adjacency_(i, j) == 0.0)
          throw DomainError("MarkovShiftSystem: rho supported off the graph");
      }
    if (stochastic_on_fibers) {
      for (int j = 0; j < n_symbols; ++j) {
        double s = 0.0;
        for (int i = 0; i < n_symbols; ++i) s += rho(i, j) * adjacency_(i, j);
        if (std::abs(s - 1.0) > 1e-10)
          throw DomainError("MarkovShiftSystem: rho not stochastic on fibers");
      }
    }
  }
}

bool MarkovShiftSystem::irreducible() const {
  // Reachability closure of the adjacency graph.
  const int n = n_symbols_;
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = adjacency_(i, j) > 0.0;
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

TransferMatrix::TransferMatrix(FiniteMapSystem system, Mat entries)
    : system_(std::move(system)), entries_(std::move(entries)) {
  const int n = system_.n_states();
  if (entries_.rows() != n || entries_.cols() != n)
    throw DimensionError("TransferMatrix: entries shape");
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (entries_(x, y) < 0.0) throw DomainError("TransferMatrix: negative entry");
      if (entries_(x, y) > 0.0 && system_.alpha(y) != x)
        throw DomainError("TransferMatrix: support violates the homological identity");
    }
}

Vec TransferMatrix::weight() const {
  Vec psi(n_states());
  for (int y = 0; y < n_states(); ++y) psi[y] = entries_(system_.alpha(y), y);
  return psi;
}

Measure::Measure(Vec weights) : weights_(std::move(weights)) {
  double s = 0.0;
  for (double w : weights_) {
    if (w < 0.0) throw DomainError("Measure: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > kMeasureNormTol) throw DomainError("Measure: weights do not sum to 1");
}

double Measure::integrate(const Vec& f) const {
  if (f.size() != weights_.size()) throw DimensionError("Measure::integrate: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += weights_[i] * f[i];
  return s;
}

InvariantMeasure::InvariantMeasure(Vec weights, const FiniteMapSystem& system)
    : Measure(std::move(weights)), certified_(false) {
  const Vec push = pushforward(this->weights(), system);
  for (int x = 0; x < system.n_states(); ++x)
    if (std::abs(push[x] - (*this)[x]) > kInvarianceTol)
      throw DomainError("InvariantMeasure: not invariant under alpha");
  certified_ = true;
}

TransferMatrix build_pf_operator(const FiniteMapSystem& system, const Vec& psi) {
  const int n = system.n_states();
  if (static_cast<int>(psi.size()) != n)
    throw DimensionError("build_pf_operator: psi length != n_states");
  for (double w : psi)
    if (w < 0.0) throw DomainError("build_pf_operator: negative psi entry");
  Mat a(n, n);
  for (int y = 0; y < n; ++y) a(system.alpha(y), y) = psi[y];
  return TransferMatrix(system, std::move(a));
}

bool check_homological_identity(const TransferMatrix& tm) {
  const int n = tm.n_states();
  const Mat& a = tm.entries();
  const FiniteMapSystem& sys = tm.system();
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y) {
      // f = e_z, g = e_y:  lhs = A((e_z . alpha) e_y),  rhs = e_z . (A e_y).
      Vec fg(n, 0.0);
      fg[y] = (sys.alpha(y) == z) ? 1.0 : 0.0;
      const Vec lhs = mat_apply(a, fg);
      Vec ey(n, 0.0);
      ey[y] = 1.0;
      Vec rhs = mat_apply(a, ey);
      for (int x = 0; x < n; ++x)
        if (x != z) rhs[x] = 0.0;
      for (int x = 0; x < n; ++x)
        if (lhs[x] != rhs[x]) return false;
    }
  return true;
}

CycleDecomposition cycle_decomposition(const FiniteMapSystem& system) {
  const int n = system.n_states();
  // A state is periodic iff it recurs within n iterations.
  std::vector<bool> periodic(n, false);
  for (int x = 0; x < n; ++x) {
    int y = x;
    for (int k = 0; k < n; ++k) {
      y = system.alpha(y);
      if (y == x) {
        periodic[x] = true;
        break;
      }
    }
  }
  CycleDecomposition out;
  std::vector<bool> seen(n, false);
  for (int x = 0; x < n; ++x) {
    if (!periodic[x] || seen[x]) continue;
    std::vector<int> cyc;
    int y = x;
    do {
      cyc.push_back(y);
      seen[y] = true;
      y = system.alpha(y);
    } while (y != x);
    out.cycles.push_back(std::move(cyc));
  }
  for (int x = 0; x < n; ++x)
    if (!periodic[x]) out.transient.push_back(x);
  return out;
}

std::vector<InvariantMeasure> ergodic_measures(const FiniteMapSystem& system) {
  const CycleDecomposition cd = cycle_decomposition(system);
  std::vector<InvariantMeasure> out;
  out.reserve(cd.cycles.size());
  for (const auto& cyc : cd.cycles) {
    Vec w(system.n_states(), 0.0);
    for (int x : cyc) w[x] = 1.0 / static_cast<double>(cyc.size());
    out.emplace_back(std::move(w), system);
  }
  return out;
}

Vec pushforward(const Vec& mu, const FiniteMapSystem& system) {
  if (static_cast<int>(mu.size()) != system.n_states())
    throw DimensionError("pushforward: size mismatch");
  Vec out(system.n_states(), 0.0);
  for (int y = 0; y < system.n_states(); ++y) out[system.alpha(y)] += mu[y];
  return out;
}

bool is_invariant(const Measure& mu, const FiniteMapSystem& system) {
  const Vec push = pushforward(mu.weights(), system);
  for (int x = 0; x < system.n_states(); ++x)
    if (std::abs(push[x] - mu[x]) > kInvarianceTol) return false;
  return true;
}

Measure hull_measure(const std::vector<InvariantMeasure>& vertices, const Vec& hull_weights) {
  if (vertices.empty()) throw DomainError("hull_measure: no vertices");
  if (vertices.size() != hull_weights.size())
    throw DimensionError("hull_measure: weight count != vertex count");
  Vec w(vertices[0].size(), 0.0);
  for (size_t c = 0; c < vertices.size(); ++c)
    for (int i = 0; i < vertices[c].size(); ++i) w[i] += hull_weights[c] * vertices[c][i];
  // Renormalize away accumulation error before the Measure invariant check.
  double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-9) throw DomainError("hull_measure: hull weights not a distribution");
  for (double& x : w) x /= s;
  return Measure(std::move(w));
}

double l1_distance_to_invariant_hull(const FiniteMapSystem& system, const Vec& nu) {
  const CycleDecomposition cd = cycle_decomposition(system);
  if (static_cast<int>(nu.size()) != system.n_states())
    throw DimensionError("l1_distance_to_invariant_hull: size mismatch");

  // Cycle supports are disjoint, so the objective is separable:
  //   f(w) = sum_C (1/d_C) sum_{x in C} |nu_x d_C - w_C| + (transient mass),
  // minimized over the simplex by greedy water-filling along the marginal
  // slopes, which are nondecreasing per cycle.
  const int nc = static_cast<int>(cd.cycles.size());
  std::vector<std::vector<double>> brk(nc);  // sorted breakpoints nu_x * d_C
  for (int c = 0; c < nc; ++c) {
    for (int x : cd.cycles[c]) brk[c].push_back(nu[x] * static_cast<double>(cd.cycles[c].size()));
    std::sort(brk[c].begin(), brk[c].end());
  }
  Vec w(nc, 0.0);
  std::vector<int> seg(nc, 0);  // number of breakpoints at or below w_c
  double remaining = 1.0;
  while (remaining > 0.0) {
    int best = -1;
    double best_slope = 0.0;
    for (int c = 0; c < nc; ++c) {
      const double d = static_cast<double>(cd.cycles[c].size());
      const double slope = (2.0 * seg[c] - d) / d;
      if (best < 0 || slope < best_slope) {
        best = c;
        best_slope = slope;
      }
    }
    const int c = best;
    double room;
    if (seg[c] < static_cast<int>(brk[c].size()))
      room = std::max(0.0, brk[c][seg[c]] - w[c]);
    else
      room = remaining;
    if (room >= remaining) {
      w[c] += remaining;
      remaining = 0.0;
    } else if (room == 0.0) {
      ++seg[c];
    } else {
      w[c] += room;
      remaining -= room;
      ++seg[c];
    }
  }

  double dist = 0.0;
  for (int c = 0; c < nc; ++c) {
    const double d = static_cast<double>(cd.cycles[c].size());
    for (int x : cd.cycles[c]) dist += std::abs(nu[x] - w[c] / d);
  }
  for (int x : cd.transient) dist += std::abs(nu[x]);
  return dist;
}

}  // namespace dynspec
