#include "dynspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynspec {

namespace {

constexpr double kPowerRelTol = 1e-13;
constexpr int kPowerMaxIter = 100000;
// Eigenvector iterations are capped much lower: with a healthy spectral gap
// they converge in hundreds of steps, and a tiny gap is handled by the
// non-simple fallback instead of a long futile iteration.
constexpr int kPerronMaxIter = 5000;
constexpr double kBasicClassRelTol = 1e-9;

// Tarjan's algorithm, iterative to keep stack usage flat.
struct TarjanState {
  const Mat* b;
  int n;
  std::vector<int> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int counter = 0;
  std::vector<std::vector<int>> comps;
};

void tarjan_visit(TarjanState& st, int root) {
  struct Frame {
    int v;
    int next_w;
  };
  std::vector<Frame> frames;
  frames.push_back({root, 0});
  st.index[root] = st.lowlink[root] = st.counter++;
  st.stack.push_back(root);
  st.on_stack[root] = true;
  while (!frames.empty()) {
    Frame& f = frames.back();
    bool descended = false;
    while (f.next_w < st.n) {
      const int w = f.next_w++;
      if ((*st.b)(f.v, w) == 0.0) continue;
      if (st.index[w] < 0) {
        st.index[w] = st.lowlink[w] = st.counter++;
        st.stack.push_back(w);
        st.on_stack[w] = true;
        frames.push_back({w, 0});
        descended = true;
        break;
      }
      if (st.on_stack[w]) st.lowlink[f.v] = std::min(st.lowlink[f.v], st.index[w]);
    }
    if (descended) continue;
    if (st.lowlink[f.v] == st.index[f.v]) {
      std::vector<int> comp;
      int w;
      do {
        w = st.stack.back();
        st.stack.pop_back();
        st.on_stack[w] = false;
        comp.push_back(w);
      } while (w != f.v);
      std::sort(comp.begin(), comp.end());
      st.comps.push_back(std::move(comp));
    }
    const int child = f.v;
    frames.pop_back();
    if (!frames.empty())
      st.lowlink[frames.back().v] = std::min(st.lowlink[frames.back().v], st.lowlink[child]);
  }
}

// Spectral radius of the principal submatrix on an SCC.  For a bare cycle the
// root is the geometric mean of the edge weights; otherwise power iteration
// on B_sub + I (primitive for irreducible B_sub) with Collatz-Wielandt stop.
double scc_spectral_radius(const Mat& b, const std::vector<int>& comp) {
  const int k = static_cast<int>(comp.size());
  if (k == 1) return b(comp[0], comp[0]);

  std::vector<int> pos(b.rows(), -1);
  for (int i = 0; i < k; ++i) pos[comp[i]] = i;
  Mat sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = b(comp[i], comp[j]);

  bool bare_cycle = true;
  double log_prod = 0.0;
  for (int i = 0; i < k && bare_cycle; ++i) {
    int out = 0;
    for (int j = 0; j < k; ++j)
      if (sub(i, j) > 0.0) {
        ++out;
        log_prod += std::log(sub(i, j));
      }
    if (out != 1) bare_cycle = false;
  }
  if (bare_cycle) return std::exp(log_prod / static_cast<double>(k));

  Vec v(k, 1.0);
  for (int it = 0; it < kPowerMaxIter; ++it) {
    Vec w = mat_apply(sub, v);
    for (int i = 0; i < k; ++i) w[i] += v[i];  // (B + I) v
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < k; ++i) {
      const double q = w[i] / v[i];
      if (i == 0) lo = hi = q;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    const double nrm = sup_norm(w);
    scale(w, 1.0 / nrm);
    v = std::move(w);
    if (hi - lo <= kPowerRelTol * hi) return 0.5 * (lo + hi) - 1.0;
  }
  throw ConvergenceError("scc_spectral_radius: power iteration budget exhausted", v);
}

// Global power iteration on B + I; valid when the Perron root is simple.
Vec perron_vector(const Mat& b, double r, bool transpose) {
  const int n = b.rows();
  Vec v(n, 1.0 / static_cast<double>(n));
  double resid = 0.0;
  for (int it = 0; it < kPerronMaxIter; ++it) {
    Vec w = transpose ? mat_apply_transpose(b, v) : mat_apply(b, v);
    for (int i = 0; i < n; ++i) w[i] += v[i];
    double s = 0.0;
    for (double x : w) s += x;
    scale(w, 1.0 / s);
    resid = 0.0;
    for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(w[i] - v[i]));
    v = std::move(w);
    if (resid <= 1e-15 * (1.0 + r)) return v;
  }
  // Accept a slightly looser fixed point rather than fail outright; the
  // caller's tolerances sit well above this.
  if (resid <= 1e-9) return v;
  throw ConvergenceError("perron_vector: power iteration budget exhausted", v);
}

}  // namespace

Potential::Potential(Vec v) : values(std::move(v)) {
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("Potential: entries must be finite");
}

std::vector<std::vector<int>> strongly_connected_components(const Mat& b) {
  if (b.rows() != b.cols()) throw DimensionError("strongly_connected_components: not square");
  TarjanState st;
  st.b = &b;
  st.n = b.rows();
  st.index.assign(st.n, -1);
  st.lowlink.assign(st.n, -1);
  st.on_stack.assign(st.n, false);
  for (int v = 0; v < st.n; ++v)
    if (st.index[v] < 0) tarjan_visit(st, v);
  std::sort(st.comps.begin(), st.comps.end());
  return st.comps;
}

SpectralResult spectral_analysis(const Mat& b) {
  if (b.rows() != b.cols()) throw DimensionError("spectral_analysis: not square");
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      if (b(i, j) < 0.0) throw DomainError("spectral_analysis: negative entry");

  const auto comps = strongly_connected_components(b);
  double r = 0.0;
  std::vector<double> radii(comps.size());
  for (size_t c = 0; c < comps.size(); ++c) {
    radii[c] = scc_spectral_radius(b, comps[c]);
    r = std::max(r, radii[c]);
  }

  SpectralResult res;
  res.dominant_eigenvalue = r;
  if (r <= 0.0) {
    res.lambda = ExtReal::neg_inf();
    res.simple = false;
    return res;
  }
  res.lambda = std::log(r);

  int basic_classes = 0;
  for (double rc : radii)
    if (rc >= r * (1.0 - kBasicClassRelTol)) ++basic_classes;
  res.simple = (basic_classes == 1);

  if (res.simple) {
    try {
      res.right_vector = perron_vector(b, r, /*transpose=*/false);
      res.left_vector = perron_vector(b, r, /*transpose=*/true);
    } catch (const ConvergenceError&) {
      // A vanishing spectral gap is numerically indistinguishable from a
      // non-simple dominant eigenvalue; report it as such.
      res.simple = false;
      res.right_vector.clear();
      res.left_vector.clear();
    }
  }
  return res;
}

Potential birkhoff_sum(const FiniteMapSystem& system, const Potential& phi, int n) {
  if (n < 1) throw DomainError("birkhoff_sum: n must be >= 1");
  if (phi.size() != system.n_states()) throw DimensionError("birkhoff_sum: size mismatch");
  Vec out(system.n_states(), 0.0);
  for (int y = 0; y < system.n_states(); ++y) {
    int z = y;
    for (int i = 0; i < n; ++i) {
      out[y] += phi.values[z];
      z = system.alpha(z);
    }
  }
  return Potential(std::move(out));
}

Mat weighted_matrix(const TransferMatrix& a, const Potential& phi) {
  const int n = a.n_states();
  if (phi.size() != n) throw DimensionError("weighted_matrix: size mismatch");
  Mat b = a.entries();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) b(x, y) *= std::exp(phi.values[y]);
  return b;
}

SpectralResult spectral_potential(const TransferMatrix& a, const Potential& phi) {
  // Additive homogeneity: factoring out max(phi) keeps e^phi representable
  // for arbitrarily large potentials (the Legendre descent relies on this).
  const double c = *std::max_element(phi.values.begin(), phi.values.end());
  Vec shifted = phi.values;
  for (double& x : shifted) x -= c;
  SpectralResult res = spectral_analysis(weighted_matrix(a, Potential(std::move(shifted))));
  if (!res.lambda.is_neg_inf()) {
    res.lambda = ExtReal(res.lambda.value() + c);
    res.dominant_eigenvalue = std::exp(res.lambda.value());
  }
  return res;
}

ExtReal spectral_potential_value(const TransferMatrix& a, const Potential& phi) {
  const double c = *std::max_element(phi.values.begin(), phi.values.end());
  Vec shifted = phi.values;
  for (double& x : shifted) x -= c;
  const Mat b = weighted_matrix(a, Potential(std::move(shifted)));
  double r = 0.0;
  for (const auto& comp : strongly_connected_components(b))
    r = std::max(r, scc_spectral_radius(b, comp));
  if (r <= 0.0) return ExtReal::neg_inf();
  return ExtReal(std::log(r) + c);
}

std::vector<double> gelfand_sequence(const TransferMatrix& a, const Potential& phi, int n_max) {
  if (n_max < 1) throw DomainError("gelfand_sequence: n_max must be >= 1");
  const Mat b = weighted_matrix(a, phi);
  std::vector<double> out;
  out.reserve(n_max);
  Vec v(a.n_states(), 1.0);
  double log_acc = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    v = mat_apply(b, v);
    const double nrm = sup_norm(v);
    if (nrm == 0.0) {
      for (int k = n; k <= n_max; ++k)
        out.push_back(-std::numeric_limits<double>::infinity());
      break;
    }
    log_acc += std::log(nrm);
    scale(v, 1.0 / nrm);
    out.push_back(log_acc / static_cast<double>(n));
  }
  return out;
}

Measure equilibrium_measure(const TransferMatrix& a, const Potential& phi) {
  const SpectralResult res = spectral_potential(a, phi);
  if (res.lambda.is_neg_inf())
    throw DomainError("equilibrium_measure: spectral potential is -inf (nilpotent operator)");
  if (!res.simple)
    throw NonUniqueEquilibrium("equilibrium_measure: dominant eigenvalue is not simple");
  Vec mu(a.n_states());
  double s = 0.0;
  for (int y = 0; y < a.n_states(); ++y) {
    mu[y] = res.left_vector[y] * res.right_vector[y];
    s += mu[y];
  }
  for (double& x : mu) x /= s;
  return Measure(std::move(mu));
}

}  // namespace dynspec
