#pragma once

#include <functional>

#include "dynspec/ext_real.hpp"
#include "dynspec/spectral.hpp"
#include "dynspec/systems.hpp"

namespace dynspec {

struct DualEntropyOptions {
  int max_iter = 5000;
  double grad_tol = 1e-9;
  double divergence_floor = -1e6;
  double phi_cap = 1e4;  // ||phi||_inf beyond this certifies divergence
};

struct DualEntropyResult {
  ExtReal value;
  Potential argmin_phi{Vec{}};
  bool converged{};
  int iterations{};
};

/// Dual entropy S(mu) = inf_phi (lambda(phi) - mu(phi)) by first-order descent
/// on the convex objective, gradient = equilibrium_measure(phi) - mu, Armijo
/// backtracking, start phi = 0.  Declares -inf when the objective falls below
/// the divergence floor or the iterates leave the phi cap (which happens
/// exactly when mu is not an invariant probability measure).
DualEntropyResult dual_entropy(const TransferMatrix& a, const Measure& mu,
                               const DualEntropyOptions& opts = {});

/// Young inequality residual lambda(phi) - mu(phi) - S(mu); nonnegative, and
/// approximately zero iff mu is the equilibrium measure of phi.
double verify_young(const TransferMatrix& a, const Potential& phi, const Measure& mu,
                    const DualEntropyOptions& opts = {});

using EntropyOracle = std::function<ExtReal(const Measure&)>;

struct ReconstructOptions {
  int max_iter = 200;
  double fd_step = 1e-4;
  double step0 = 0.5;
};

/// Reconstructs lambda(phi) = max over the invariant polytope of
/// mu(phi) + S(mu), by projected gradient on hull weights with multi-start
/// from every vertex; oracle gradients by central differences.
double reconstruct_lambda(const TransferMatrix& a, const Potential& phi,
                          const EntropyOracle& entropy_oracle,
                          const ReconstructOptions& opts = {});

}  // namespace dynspec
