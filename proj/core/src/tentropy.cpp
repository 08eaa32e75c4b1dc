#include "dynspec/tentropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynspec {

namespace {

constexpr double kSuppTol = 1e-13;

struct GenericInnerResult {
  Vec m;
  double value{};
  double kkt_residual{};
  bool converged{};
  int iterations{};
};

// Maximizes sum_i w_i ln((m.c_i)/w_i) over the simplex in m, for nonnegative
// "columns" c_i.  EM-type multiplicative update; monotone ascent and exactly
// simplex-preserving since sum_i w_i = 1.
GenericInnerResult inner_opt_columns(const std::vector<Vec>& cols, const Vec& w, int dim,
                                     const InnerOptOptions& opts) {
  const int k = static_cast<int>(cols.size());
  std::vector<int> active;  // summands with w_i > 0
  for (int i = 0; i < k; ++i) {
    if (w[i] <= 0.0) continue;
    double colsum = 0.0;
    for (double x : cols[i]) colsum += x;
    if (colsum == 0.0) throw NullColumn("inner_opt_columns: positive-measure summand with zero column");
    active.push_back(i);
  }

  // Uniform start on coordinates reachable from the active columns.
  Vec m(dim, 0.0);
  int live = 0;
  for (int x = 0; x < dim; ++x) {
    double s = 0.0;
    for (int i : active) s += cols[i][x];
    if (s > 0.0) {
      m[x] = 1.0;
      ++live;
    }
  }
  for (double& x : m) x /= static_cast<double>(live);

  auto objective = [&](const Vec& mm) {
    double v = 0.0;
    for (int i : active) {
      double mc = 0.0;
      for (int x = 0; x < dim; ++x) mc += mm[x] * cols[i][x];
      v += w[i] * std::log(mc / w[i]);
    }
    return v;
  };

  GenericInnerResult res;
  double value = objective(m);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    Vec mc(active.size());
    for (size_t a = 0; a < active.size(); ++a) {
      double s = 0.0;
      for (int x = 0; x < dim; ++x) s += m[x] * cols[active[a]][x];
      mc[a] = s;
    }
    Vec next(dim, 0.0);
    for (int x = 0; x < dim; ++x) {
      if (m[x] == 0.0) continue;
      double f = 0.0;
      for (size_t a = 0; a < active.size(); ++a) f += w[active[a]] * cols[active[a]][x] / mc[a];
      next[x] = m[x] * f;
    }
    m = std::move(next);
    const double next_value = objective(m);
    const bool done = std::abs(next_value - value) < opts.value_tol;
    value = next_value;
    if (done) {
      ++it;
      break;
    }
  }

  // Lemma-style stationarity: sum_i w_i c_i(x)/(m.c_i) <= 1 with equality on
  // the support of m.
  double kkt = 0.0;
  {
    Vec mc(active.size());
    for (size_t a = 0; a < active.size(); ++a) {
      double s = 0.0;
      for (int x = 0; x < dim; ++x) s += m[x] * cols[active[a]][x];
      mc[a] = s;
    }
    for (int x = 0; x < dim; ++x) {
      double s = 0.0;
      for (size_t a = 0; a < active.size(); ++a) s += w[active[a]] * cols[active[a]][x] / mc[a];
      kkt = std::max(kkt, s - 1.0);
      if (m[x] > kSuppTol) kkt = std::max(kkt, std::abs(s - 1.0));
    }
  }

  res.m = std::move(m);
  res.value = value;
  res.kkt_residual = kkt;
  res.converged = kkt <= opts.kkt_tol;
  res.iterations = it;
  return res;
}

}  // namespace

PartitionOfUnity::PartitionOfUnity(std::vector<Vec> fns) : functions(std::move(fns)) {
  if (functions.empty()) throw DomainError("PartitionOfUnity: empty family");
  const size_t n = functions[0].size();
  Vec sum(n, 0.0);
  for (const Vec& g : functions) {
    if (g.size() != n) throw DimensionError("PartitionOfUnity: inconsistent lengths");
    for (size_t x = 0; x < n; ++x) {
      if (g[x] < 0.0) throw DomainError("PartitionOfUnity: negative entry");
      sum[x] += g[x];
    }
  }
  for (double s : sum)
    if (std::abs(s - 1.0) > kMeasureNormTol)
      throw DomainError("PartitionOfUnity: does not sum to one");
}

PartitionOfUnity PartitionOfUnity::point_partition(int n_states) {
  std::vector<Vec> fns(n_states, Vec(n_states, 0.0));
  for (int i = 0; i < n_states; ++i) fns[i][i] = 1.0;
  return PartitionOfUnity(std::move(fns));
}

InnerOptResult inner_measure_opt(const Mat& a_pow_n, const Measure& mu,
                                 const InnerOptOptions& opts) {
  const int n = a_pow_n.rows();
  if (a_pow_n.cols() != n || mu.size() != n)
    throw DimensionError("inner_measure_opt: size mismatch");
  std::vector<Vec> cols(n, Vec(n));
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) cols[y][x] = a_pow_n(x, y);
  const GenericInnerResult g = inner_opt_columns(cols, mu.weights(), n, opts);
  return InnerOptResult{Measure(g.m), g.value, g.kkt_residual, g.converged, g.iterations};
}

ExtReal tau_n_partition(const TransferMatrix& a, const Measure& mu, const PartitionOfUnity& d,
                        int n, const InnerOptOptions& opts) {
  const int dim = a.n_states();
  if (mu.size() != dim || static_cast<int>(d.functions[0].size()) != dim)
    throw DimensionError("tau_n_partition: size mismatch");
  const Mat an = matpow(a.entries(), n);
  std::vector<Vec> cols;
  Vec w;
  cols.reserve(d.functions.size());
  w.reserve(d.functions.size());
  for (const Vec& g : d.functions) {
    cols.push_back(mat_apply(an, g));
    w.push_back(mu.integrate(g));
  }
  try {
    return inner_opt_columns(cols, w, dim, opts).value;
  } catch (const NullColumn&) {
    return ExtReal::neg_inf();
  }
}

ExtReal tau_n(const TransferMatrix& a, const Measure& mu, int n, const InnerOptOptions& opts,
              double* kkt_residual) {
  const Mat an = matpow(a.entries(), n);
  try {
    const InnerOptResult r = inner_measure_opt(an, mu, opts);
    if (kkt_residual) *kkt_residual = r.kkt_residual;
    return r.value;
  } catch (const NullColumn&) {
    if (kkt_residual) *kkt_residual = 0.0;
    return ExtReal::neg_inf();
  }
}

TauResult t_entropy(const TransferMatrix& a, const Measure& mu, int n_max, double doubling_tol,
                    const InnerOptOptions& opts) {
  if (n_max < 4) throw DomainError("t_entropy: n_max must be >= 4");
  TauResult out;
  out.value = ExtReal();
  Mat an = Mat::identity(a.n_states());
  ExtReal best = ExtReal(std::numeric_limits<double>::infinity());
  double worst_kkt = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    an = matmul(an, a.entries());
    ExtReal tn;
    try {
      const InnerOptResult r = inner_measure_opt(an, mu, opts);
      worst_kkt = std::max(worst_kkt, r.kkt_residual);
      tn = ExtReal(r.value / static_cast<double>(n));
    } catch (const NullColumn&) {
      tn = ExtReal::neg_inf();
    }
    out.per_n.push_back(tn);
    best = min(best, tn);
    if (tn.is_neg_inf()) break;  // inf over n is already -inf
  }
  out.value = best;
  out.inner_kkt_residual = worst_kkt;
  if (out.value.is_neg_inf()) {
    out.converged = true;
    return out;
  }
  out.converged = false;
  for (int n = n_max / 2; n >= 1; --n) {
    if (2 * n > static_cast<int>(out.per_n.size())) continue;
    const ExtReal& half = out.per_n[n - 1];
    const ExtReal& full = out.per_n[2 * n - 1];
    if (half.is_finite() && full.is_finite()) {
      out.converged = std::abs(full.value() - half.value()) < doubling_tol;
      break;
    }
  }
  return out;
}

}  // namespace dynspec
