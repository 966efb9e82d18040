// Truncated ladder operators, the qubit algebra, Kronecker products, the
// environment partial trace, and the generalized photon parity.
#pragma once

#include "cqs/types.hpp"

namespace cqs {

struct LadderOperators {
  Matrix a;      // annihilation, a|n> = sqrt(n) |n-1>
  Matrix a_dag;  // creation
  Matrix n_op;   // number operator a_dag a = diag(0 .. dim-1)
};

// Dense ladder operators on the truncated space.  [a, a_dag] equals the
// identity on every level except (dim-1, dim-1), where the entry is 1 - dim.
LadderOperators fock_ladder(const FockSpace& space);

struct QubitOperators {
  Matrix sx, sy, sz;  // Pauli matrices in the {|+>, |->} basis, |+> first
  Matrix sp, sm;      // sigma_+ = |+><-|, sigma_- = |-><+|
  Matrix id;
};

const QubitOperators& qubit_ops();

// Kronecker product with the qubit factor first:
// (A (x) B)(i*q + k, j*q + l) = A(i, j) B(k, l).
Matrix tensor(const Matrix& a, const Matrix& b);

// Trace out the environment of a (2 dim) x (2 dim) composite operator,
// returning the 2x2 qubit matrix sum_m <s, m| M |s', m>.
Matrix partial_trace_env(const Matrix& m, const FockSpace& space);

// Generalized k-photon parity: diagonal entries (-1)^floor(m/k).  Hermitian,
// unitary, an involution, and X_k a^k X_k = -a^k on the truncated space.
Matrix generalized_parity(int k, const FockSpace& space);

}  // namespace cqs
