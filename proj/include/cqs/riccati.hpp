// Operator Riccati equation: analytic solutions for the two models, the
// graph-subspace numerical solver, branch generators, pseudo-Hermitian
// metrics, and the biorthonormal eigensystem of a branch generator.
#pragma once

#include <string>
#include <vector>

#include "cqs/blockform.hpp"

namespace cqs {

// A solution X of  X V X + X H_plus - H_minus X - V_adj = 0  together with
// the branch generators and metrics it induces.
struct RiccatiSolution {
  Matrix x;
  Matrix k_plus;   // H_plus + V X
  Matrix k_minus;  // H_minus - V_adj X_adj
  Matrix eta;      // I + X_adj X
  Matrix xi;       // I + X X_adj
  double residual_norm = 0.0;
  double interior_residual_norm = 0.0;
  FockSpace space;
  std::string note;
};

// Residual X V X + X H_plus - H_minus X - V_adj.
Matrix riccati_residual(const Matrix& x, const BlockHamiltonian& blocks);

// Exchange-coupling specialization conj(g) X a X + 2 d X - g a_dag with
// d = split_detuning.  Equals riccati_residual against jc_blocks.
Matrix jc_riccati_residual(const Matrix& x, const JcParams& p,
                           const FockSpace& space);

// Closed-form JC solution X = sum_n xi_n |n+1><n| with
// xi_n = (-d + sqrt(d^2 + |g|^2 (n+1))) / (conj(g) sqrt(n+1)).
// g = 0 returns X = 0 with an explanatory note.
RiccatiSolution solve_jc_analytic(const JcParams& p, const FockSpace& space);

// k-photon transverse-coupling solution: X_k is the generalized parity,
// which is Hermitian, unitary, and independent of (omega, nu, g).
RiccatiSolution solve_rabi_analytic(const RabiParams& p, const FockSpace& space);

// Diagnostics of graph-subspace branch selection; pass back to
// solve_graph_subspace as an explicit index override when selection fails.
struct GraphSelection {
  std::vector<int> indices;     // selected eigenvector indices
  std::vector<double> weights;  // top-block weight of every eigenvector
  RealVector eigenvalues;       // spectrum of the assembled block matrix
  bool fallback = false;        // strict top-dominance was ambiguous
};

// Numerical solver: eigendecompose the assembled 2dim x 2dim block matrix,
// select dim eigenvectors spanning a graph subspace (top-block weight > 1/2,
// with a deterministic rank-guarded fallback on ties), stack tops into T and
// bottoms into B, and return X = B T^{-1}.  Fails if cond(T) > 1e8 or the
// residual norm of the result exceeds 1e-8.
RiccatiSolution solve_graph_subspace(const BlockHamiltonian& blocks,
                                     const std::vector<int>* override_indices = nullptr,
                                     GraphSelection* selection_out = nullptr);

// Branch generators for an externally supplied X; requires the interior
// residual norm of X to be below 1e-6.
RiccatiSolution kamiltonians(const BlockHamiltonian& blocks, const Matrix& x,
                             std::string note = {});

// max(|| eta K+ - K+_adj eta ||, || xi K- - K-_adj xi ||), Frobenius.
double pseudo_hermiticity_check(const RiccatiSolution& sol);

// Biorthonormal eigensystem of a diagonalizable K_plus:
//   K+ psi_n = E_n psi_n,  K+_adj phi_n = conj(E_n) phi_n,
//   <psi_n|phi_m> = delta_nm,  sum_n |psi_n><phi_n| = I.
// Pairs are sorted by (Re E, Im E) for reproducibility.
struct BiorthoSystem {
  Vector energies;
  Matrix psi_vecs;  // columns psi_n
  Matrix phi_vecs;  // columns phi_n
  bool real_spectrum = false;
  double max_imag = 0.0;
};

BiorthoSystem biorthonormal_system(const Matrix& k_plus);

}  // namespace cqs
