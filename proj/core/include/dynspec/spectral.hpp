#pragma once

#include <vector>

#include "dynspec/ext_real.hpp"
#include "dynspec/systems.hpp"

namespace dynspec {

/// Real-valued function on the phase space (the functional parameter phi).
struct Potential {
  Vec values;

  explicit Potential(Vec v);
  int size() const { return static_cast<int>(values.size()); }
};

struct SpectralResult {
  ExtReal lambda;                // ln(dominant eigenvalue), -inf iff nilpotent
  double dominant_eigenvalue{};  // spectral radius, >= 0
  Vec right_vector;              // normalized to sum 1 when simple
  Vec left_vector;
  bool simple{};                 // dominant eigenvalue has algebraic multiplicity 1
};

/// Spectral analysis of an arbitrary nonnegative square matrix: spectral
/// radius via per-SCC power iteration (the dominant eigenvalue of a reducible
/// matrix is the max over its strongly connected components), simplicity from
/// the count of basic classes, Perron vectors by global power iteration on
/// B + I when the root is simple.
SpectralResult spectral_analysis(const Mat& b);

/// Strongly connected components of the support graph (Tarjan), in a
/// deterministic order.
std::vector<std::vector<int>> strongly_connected_components(const Mat& b);

/// Birkhoff sum S_n(phi) = phi + phi.alpha + ... + phi.alpha^{n-1}.
Potential birkhoff_sum(const FiniteMapSystem& system, const Potential& phi, int n);

/// Spectral potential lambda(phi) = ln r(A diag(e^phi)).
SpectralResult spectral_potential(const TransferMatrix& a, const Potential& phi);

/// lambda(phi) alone, skipping the eigenvector iterations; much cheaper when
/// only the value is needed (finite-difference probes, line searches).
ExtReal spectral_potential_value(const TransferMatrix& a, const Potential& phi);

/// The sequence (1/n) ln || A_phi^n 1 ||_inf for n = 1..n_max, with per-step
/// renormalization against overflow.
std::vector<double> gelfand_sequence(const TransferMatrix& a, const Potential& phi, int n_max);

/// Equilibrium measure mu*_y = u_y v_y / (u.v) from the Perron pair of
/// A diag(e^phi); throws NonUniqueEquilibrium when the root is not simple.
Measure equilibrium_measure(const TransferMatrix& a, const Potential& phi);

/// A diag(e^phi) as a dense matrix.
Mat weighted_matrix(const TransferMatrix& a, const Potential& phi);

}  // namespace dynspec
