#pragma once

#include <optional>
#include <vector>

#include "dynspec/linalg.hpp"

namespace dynspec {

inline constexpr double kMeasureNormTol = 1e-12;
inline constexpr double kInvarianceTol = 1e-10;

/// Finite dynamical system: states {0,...,n-1} with a deterministic map alpha.
class FiniteMapSystem {
 public:
  FiniteMapSystem(int n_states, std::vector<int> map);

  int n_states() const { return n_states_; }
  int alpha(int y) const { return map_[y]; }
  const std::vector<int>& map() const { return map_; }

  /// alpha^k(y).
  int iterate(int y, int k) const;

 private:
  int n_states_;
  std::vector<int> map_;
};

/// One-step topological Markov chain over a finite symbol graph.
/// adjacency(i, j) = 1 means symbol j may follow symbol i.
class MarkovShiftSystem {
 public:
  MarkovShiftSystem(int n_symbols, Mat adjacency,
                    std::optional<Mat> branch_weights = std::nullopt,
                    bool stochastic_on_fibers = false);

  int n_symbols() const { return n_symbols_; }
  const Mat& adjacency() const { return adjacency_; }
  const std::optional<Mat>& branch_weights() const { return branch_weights_; }
  bool irreducible() const;

 private:
  int n_symbols_;
  Mat adjacency_;
  std::optional<Mat> branch_weights_;
};

/// Nonnegative matrix realizing a transfer operator for a finite map:
/// (Af)(x) = sum_y A[x][y] f(y), with A[x][y] > 0 only when alpha(y) = x.
class TransferMatrix {
 public:
  TransferMatrix(FiniteMapSystem system, Mat entries);

  const FiniteMapSystem& system() const { return system_; }
  const Mat& entries() const { return entries_; }
  int n_states() const { return system_.n_states(); }

  /// Weight psi(y) = A[alpha(y)][y]; every transfer matrix over a finite map
  /// is the Perron-Frobenius operator of its diagonal-in-fibers weight.
  Vec weight() const;

 private:
  FiniteMapSystem system_;
  Mat entries_;
};

/// Probability vector on the phase space.
class Measure {
 public:
  explicit Measure(Vec weights);

  const Vec& weights() const { return weights_; }
  double operator[](int i) const { return weights_[i]; }
  int size() const { return static_cast<int>(weights_.size()); }

  /// Integral of a function (vector) against the measure.
  double integrate(const Vec& f) const;

 private:
  Vec weights_;
};

class InvariantMeasure : public Measure {
 public:
  InvariantMeasure(Vec weights, const FiniteMapSystem& system);

  bool certified() const { return certified_; }

 private:
  bool certified_;
};

/// Periodic orbits of alpha plus the transient states.
struct CycleDecomposition {
  std::vector<std::vector<int>> cycles;  // sorted by smallest member; each rotated by alpha
  std::vector<int> transient;
};

// --- operations -----------------------------------------------------------

/// Perron-Frobenius operator: A[x][y] = psi(y) when alpha(y) = x, else 0.
TransferMatrix build_pf_operator(const FiniteMapSystem& system, const Vec& psi);

/// Brute-force check of A((f.alpha) g) = f (Ag) over all indicator pairs.
bool check_homological_identity(const TransferMatrix& a);

CycleDecomposition cycle_decomposition(const FiniteMapSystem& system);

/// One uniform measure per cycle; their convex hull is the invariant polytope.
std::vector<InvariantMeasure> ergodic_measures(const FiniteMapSystem& system);

bool is_invariant(const Measure& mu, const FiniteMapSystem& system);

/// Pushforward of mu under alpha: (alpha_* mu)_x = sum_{alpha(y)=x} mu_y.
Vec pushforward(const Vec& mu, const FiniteMapSystem& system);

/// Convex combination of the cycle measures with the given hull weights.
Measure hull_measure(const std::vector<InvariantMeasure>& vertices, const Vec& hull_weights);

/// Exact minimum L1 distance from nu to the convex hull of the cycle measures
/// (the cycle supports are disjoint, so this reduces to 1-d water-filling).
double l1_distance_to_invariant_hull(const FiniteMapSystem& system, const Vec& nu);

}  // namespace dynspec
