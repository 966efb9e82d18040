// Observable diagonalization, the rotated-frame composite Hamiltonian and its
// (H_plus, H_minus, V) block form, and the two model builders.
#pragma once

#include "cqs/operators.hpp"

namespace cqs {

// Eigendata of a 2x2 Hermitian qubit observable.  Columns of `u` are the
// eigenvectors, ordered so that u_adj * Lambda * u = diag(lambda_plus,
// lambda_minus) with lambda_plus >= lambda_minus.  The largest-magnitude
// entry of each column is made real and non-negative; ties resolve to the
// first such entry.
struct ObservableDiag {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  Matrix u;
  bool degenerate = false;
};

ObservableDiag diagonalize_observable(const Matrix& lambda_mat);

// Block form of a composite operator in the observable eigenframe:
// K = |+><+| (x) H_plus + |-><-| (x) H_minus + |+><-| (x) V + |-><+| (x) V_adj.
struct BlockHamiltonian {
  Matrix h_plus;
  Matrix h_minus;
  Matrix v;
  FockSpace space;
};

// Rotate a composite Hamiltonian into the observable eigenframe:
// K = (u_adj (x) I) H (u (x) I).  Spectrum-preserving.
Matrix to_kamiltonian(const Matrix& h_total, const ObservableDiag& diag,
                      const FockSpace& space);

BlockHamiltonian block_decompose(const Matrix& k_mat, const FockSpace& space);

Matrix block_assemble(const BlockHamiltonian& blocks);

struct JcParams {
  double omega = 0.0;   // qubit energy
  double nu = 0.0;      // field energy
  Complex g{0.0, 0.0};  // coupling

  // Detuning of the model parameters.
  double delta() const { return omega - nu; }
  // sigma_z coefficient of the commuting interaction part v_int.
  double split_detuning() const { return omega - 0.5 * nu; }
};

struct JcModel {
  Matrix h_total;  // omega sz(x)I + nu I(x)n + (conj(g) s+(x)a + g s-(x)a_dag)
  Matrix h0;       // nu (I(x)n + sz(x)I / 2)
  Matrix v_int;    // split_detuning sz(x)I + interaction; commutes with h0
};

JcModel jc_model(const JcParams& p, const FockSpace& space);

// Block form of v_int in the sigma_z frame:
// H_plus = d I, H_minus = -d I, V = conj(g) a, with d = split_detuning.
BlockHamiltonian jc_blocks(const JcParams& p, const FockSpace& space);

struct RabiParams {
  double omega = 0.0;
  double nu = 0.0;
  Complex g{0.0, 0.0};
  int k = 1;  // photon order, 1 <= k < dim
};

// H = omega sz(x)I + nu I(x)n + sx (x) (conj(g) a^k + g a_dag^k).
Matrix rabi_model(const RabiParams& p, const FockSpace& space);

}  // namespace cqs
