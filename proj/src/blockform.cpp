#include "cqs/blockform.hpp"

#include <cmath>

namespace cqs {

namespace {

// Rotate each column so its largest-magnitude entry is real non-negative,
// ties resolving to the lowest row index.
void fix_column_phases(Matrix& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double mag = std::abs(u(i, j));
      if (mag > best + 1e-14) {
        best = mag;
        pivot = i;
      }
    }
    const Complex z = u(pivot, j);
    if (std::abs(z) > 0.0) {
      u.col(j) *= std::conj(z) / std::abs(z);
    }
  }
}

}  // namespace

ObservableDiag diagonalize_observable(const Matrix& lambda_mat) {
  if (lambda_mat.rows() != 2 || lambda_mat.cols() != 2) {
    throw ConfigError("observable must be a 2x2 matrix");
  }
  if ((lambda_mat - lambda_mat.adjoint()).norm() > 1e-12 * (1.0 + lambda_mat.norm())) {
    throw ConfigError("observable must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(lambda_mat);
  if (es.info() != Eigen::Success) {
    throw NumericalError("observable eigendecomposition failed");
  }
  ObservableDiag diag;
  // Eigen orders eigenvalues ascending; column 0 becomes lambda_plus.
  diag.lambda_plus = es.eigenvalues()(1);
  diag.lambda_minus = es.eigenvalues()(0);
  diag.u = Matrix(2, 2);
  diag.u.col(0) = es.eigenvectors().col(1);
  diag.u.col(1) = es.eigenvectors().col(0);
  fix_column_phases(diag.u);
  const double scale = std::max({std::abs(diag.lambda_plus),
                                 std::abs(diag.lambda_minus), 1.0});
  diag.degenerate = std::abs(diag.lambda_plus - diag.lambda_minus) < 1e-12 * scale;
  return diag;
}

Matrix to_kamiltonian(const Matrix& h_total, const ObservableDiag& diag,
                      const FockSpace& space) {
  const int d = space.dim;
  if (h_total.rows() != 2 * d || h_total.cols() != 2 * d) {
    throw ConfigError("to_kamiltonian: composite Hamiltonian is " +
                      std::to_string(h_total.rows()) + "x" +
                      std::to_string(h_total.cols()) + ", expected " +
                      std::to_string(2 * d) + "x" + std::to_string(2 * d));
  }
  const Matrix rot = tensor(diag.u, Matrix::Identity(d, d));
  return rot.adjoint() * h_total * rot;
}

BlockHamiltonian block_decompose(const Matrix& k_mat, const FockSpace& space) {
  const int d = space.dim;
  if (k_mat.rows() != 2 * d || k_mat.cols() != 2 * d) {
    throw ConfigError("block_decompose: matrix is " + std::to_string(k_mat.rows()) +
                      "x" + std::to_string(k_mat.cols()) + ", expected " +
                      std::to_string(2 * d) + "x" + std::to_string(2 * d));
  }
  BlockHamiltonian blocks;
  blocks.h_plus = k_mat.topLeftCorner(d, d);
  blocks.h_minus = k_mat.bottomRightCorner(d, d);
  blocks.v = k_mat.topRightCorner(d, d);
  blocks.space = space;
  const double mismatch = (k_mat.bottomLeftCorner(d, d) - blocks.v.adjoint()).norm();
  if (mismatch > 1e-10 * (1.0 + k_mat.norm())) {
    throw ConfigError("block_decompose: matrix is not Hermitian in block form");
  }
  return blocks;
}

Matrix block_assemble(const BlockHamiltonian& blocks) {
  const int d = blocks.space.dim;
  Matrix k_mat(2 * d, 2 * d);
  k_mat.topLeftCorner(d, d) = blocks.h_plus;
  k_mat.topRightCorner(d, d) = blocks.v;
  k_mat.bottomLeftCorner(d, d) = blocks.v.adjoint();
  k_mat.bottomRightCorner(d, d) = blocks.h_minus;
  return k_mat;
}

JcModel jc_model(const JcParams& p, const FockSpace& space) {
  const auto lad = fock_ladder(space);
  const auto& q = qubit_ops();
  const Matrix id_env = Matrix::Identity(space.dim, space.dim);

  JcModel model;
  model.h_total = p.omega * tensor(q.sz, id_env) + p.nu * tensor(q.id, lad.n_op) +
                  std::conj(p.g) * tensor(q.sp, lad.a) +
                  p.g * tensor(q.sm, lad.a_dag);
  model.h0 = p.nu * (tensor(q.id, lad.n_op) + 0.5 * tensor(q.sz, id_env));
  model.v_int = p.split_detuning() * tensor(q.sz, id_env) +
                std::conj(p.g) * tensor(q.sp, lad.a) +
                p.g * tensor(q.sm, lad.a_dag);
  return model;
}

BlockHamiltonian jc_blocks(const JcParams& p, const FockSpace& space) {
  const auto lad = fock_ladder(space);
  const double d = p.split_detuning();
  BlockHamiltonian blocks;
  blocks.h_plus = d * Matrix::Identity(space.dim, space.dim);
  blocks.h_minus = -d * Matrix::Identity(space.dim, space.dim);
  blocks.v = std::conj(p.g) * lad.a;
  blocks.space = space;
  return blocks;
}

Matrix rabi_model(const RabiParams& p, const FockSpace& space) {
  if (p.k < 1 || p.k >= space.dim) {
    throw ConfigError("rabi_model: photon order must satisfy 1 <= k < dim, got k=" +
                      std::to_string(p.k));
  }
  const auto lad = fock_ladder(space);
  const auto& q = qubit_ops();
  Matrix a_k = Matrix::Identity(space.dim, space.dim);
  for (int i = 0; i < p.k; ++i) {
    a_k = a_k * lad.a;
  }
  const Matrix field = std::conj(p.g) * a_k + p.g * a_k.adjoint();
  return p.omega * tensor(q.sz, Matrix::Identity(space.dim, space.dim)) +
         p.nu * tensor(q.id, lad.n_op) + tensor(q.sx, field);
}

}  // namespace cqs
