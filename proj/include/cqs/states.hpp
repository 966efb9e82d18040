// Conserving composite states built from a Riccati solution: the dephasing
// branch, its orthogonal complement branch, parity-sector superpositions for
// the rabi model family, seed constructors, and Schmidt analysis.
#pragma once

#include <array>

#include "cqs/riccati.hpp"

namespace cqs {

enum class StateKind {
  psi_branch,   // |lambda+> x psi + |lambda-> x X psi
  phi_branch,   // |lambda-> x phi - |lambda+> x X_adj phi
  rabi_parity,  // parity-sector superposition in the physical qubit basis
};

struct DephasingState {
  Vector vec;       // normalized composite state in the physical basis
  StateKind kind = StateKind::psi_branch;
  int parity_eps = +1;  // rabi_parity only
  Vector seed_raw;  // seed as supplied, normalized
  Vector seed;      // seed with the composite normalization absorbed
};

// Normalized psi-branch state C (|lambda+> x psi + |lambda-> x X psi) with
// C = 1/sqrt(psi_adj eta psi); seed = C psi so alpha(0) = ||seed||^2.
DephasingState dephasing_state(const RiccatiSolution& sol,
                               const ObservableDiag& diag, const Vector& psi);

// Normalized phi-branch state D (|lambda-> x phi - |lambda+> x X_adj phi)
// with D = 1/sqrt(phi_adj xi phi); orthogonal to every psi-branch state of
// the same X.
DephasingState orthogonal_state(const RiccatiSolution& sol,
                                const ObservableDiag& diag, const Vector& phi);

// Parity superposition (|+> x P_eps psi + |-> x P_-eps psi)/norm in the
// physical sigma_x eigenbasis, P_pm = (I pm X_k)/2.  Coincides with the
// psi-branch state of X = eps X_k mapped back through the sigma_x frame;
// seed is the frame-side seed psi_hat/sqrt(2).
DephasingState rabi_parity_state(const Matrix& x_k, const Vector& psi, int eps);

struct SchmidtResult {
  int rank = 0;
  std::array<double, 2> coefficients{};  // descending singular values
};

// Schmidt decomposition across the qubit|mode cut; rank counts singular
// values above tol.
SchmidtResult schmidt_analysis(const Vector& state, double tol = 1e-10);

// Number state |m>, zero-padded to space.dim.
Vector fock_seed(int m, const FockSpace& space);

// Coherent state truncated at photon number `cutoff` and renormalized.
Vector coherent_seed(Complex alpha, int cutoff, const FockSpace& space);

}  // namespace cqs
