#include "cqs/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

namespace cqs {

namespace {

std::string format_magnitude(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return svd.singularValues()(0) / smin;
}

}  // namespace

Matrix riccati_residual(const Matrix& x, const BlockHamiltonian& blocks) {
  const int d = blocks.space.dim;
  if (x.rows() != d || x.cols() != d) {
    throw ConfigError("riccati_residual: X is " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()) + ", expected " +
                      std::to_string(d) + "x" + std::to_string(d));
  }
  return x * blocks.v * x + x * blocks.h_plus - blocks.h_minus * x -
         blocks.v.adjoint();
}

Matrix jc_riccati_residual(const Matrix& x, const JcParams& p,
                           const FockSpace& space) {
  const auto lad = fock_ladder(space);
  const double d = p.split_detuning();
  return std::conj(p.g) * x * lad.a * x + 2.0 * d * x - p.g * lad.a_dag;
}

RiccatiSolution solve_jc_analytic(const JcParams& p, const FockSpace& space) {
  const double d = p.split_detuning();
  Matrix x = Matrix::Zero(space.dim, space.dim);
  std::string note;
  if (std::abs(p.g) == 0.0) {
    note = "coupling is zero; X = 0";
  } else {
    for (int n = 0; n + 1 < space.dim; ++n) {
      const double root = std::sqrt(d * d + std::norm(p.g) * (n + 1));
      x(n + 1, n) = (-d + root) / (std::conj(p.g) * std::sqrt(n + 1.0));
    }
  }
  return kamiltonians(jc_blocks(p, space), x, std::move(note));
}

RiccatiSolution solve_rabi_analytic(const RabiParams& p, const FockSpace& space) {
  const auto lad = fock_ladder(space);
  Matrix a_k = Matrix::Identity(space.dim, space.dim);
  for (int i = 0; i < p.k; ++i) {
    a_k = a_k * lad.a;
  }
  BlockHamiltonian blocks;
  blocks.h_plus = p.nu * lad.n_op + std::conj(p.g) * a_k + p.g * a_k.adjoint();
  blocks.h_minus = p.nu * lad.n_op - std::conj(p.g) * a_k - p.g * a_k.adjoint();
  blocks.v = p.omega * Matrix::Identity(space.dim, space.dim);
  blocks.space = space;
  return kamiltonians(blocks, generalized_parity(p.k, space),
                      "generalized parity solution");
}

RiccatiSolution solve_graph_subspace(const BlockHamiltonian& blocks,
                                     const std::vector<int>* override_indices,
                                     GraphSelection* selection_out) {
  const int d = blocks.space.dim;
  const Matrix k_mat = block_assemble(blocks);
  if (!k_mat.allFinite()) {
    throw NumericalError("graph solver: block matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(k_mat);
  if (es.info() != Eigen::Success) {
    throw NumericalError("graph solver: block matrix eigendecomposition failed");
  }

  GraphSelection sel;
  sel.eigenvalues = es.eigenvalues();
  sel.weights.resize(2 * d);
  for (int j = 0; j < 2 * d; ++j) {
    sel.weights[j] = es.eigenvectors().col(j).head(d).squaredNorm();
  }

  if (override_indices != nullptr) {
    if (static_cast<int>(override_indices->size()) != d) {
      throw ConfigError("graph solver: override must select exactly " +
                        std::to_string(d) + " eigenvectors");
    }
    for (int j : *override_indices) {
      if (j < 0 || j >= 2 * d) {
        throw ConfigError("graph solver: override index " + std::to_string(j) +
                          " out of range");
      }
    }
    sel.indices = *override_indices;
    std::sort(sel.indices.begin(), sel.indices.end());
    if (std::adjacent_find(sel.indices.begin(), sel.indices.end()) !=
        sel.indices.end()) {
      throw ConfigError("graph solver: override indices must be distinct");
    }
  } else {
    for (int j = 0; j < 2 * d; ++j) {
      if (sel.weights[j] > 0.5) {
        sel.indices.push_back(j);
      }
    }
    if (static_cast<int>(sel.indices.size()) != d) {
      // Top-dominance is ambiguous (exact weight ties are generic for the
      // parity-symmetric models); pick greedily by weight, keeping only
      // candidates whose top component extends the span already collected.
      sel.fallback = true;
      sel.indices.clear();
      std::vector<int> order(2 * d);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&sel](int l, int r) {
        if (sel.weights[l] != sel.weights[r]) {
          return sel.weights[l] > sel.weights[r];
        }
        return l < r;
      });
      std::vector<Vector> basis;
      for (int j : order) {
        Vector r = es.eigenvectors().col(j).head(d);
        for (const Vector& q : basis) {
          r -= q * q.dot(r);
        }
        if (r.norm() > 1e-6) {
          sel.indices.push_back(j);
          basis.push_back(r.normalized());
          if (static_cast<int>(sel.indices.size()) == d) {
            break;
          }
        }
      }
      if (static_cast<int>(sel.indices.size()) != d) {
        throw NumericalError(
            "graph solver: could not assemble a rank-" + std::to_string(d) +
            " graph subspace; pass explicit eigenvector indices");
      }
      std::sort(sel.indices.begin(), sel.indices.end());
    }
  }

  if (selection_out != nullptr) {
    *selection_out = sel;
  }

  Matrix t_mat(d, d);
  Matrix b_mat(d, d);
  for (int c = 0; c < d; ++c) {
    t_mat.col(c) = es.eigenvectors().col(sel.indices[c]).head(d);
    b_mat.col(c) = es.eigenvectors().col(sel.indices[c]).tail(d);
  }
  const double cond = condition_number(t_mat);
  if (!(cond <= 1e8)) {
    throw NumericalError(
        "graph solver: top-component matrix is ill-conditioned (cond ~ " +
        format_magnitude(cond) + "); selected subspace is not a graph");
  }
  // X T = B, solved through the adjoint system T_adj X_adj = B_adj.
  const Matrix x =
      t_mat.adjoint().colPivHouseholderQr().solve(b_mat.adjoint()).adjoint();

  RiccatiSolution sol = kamiltonians(blocks, x,
                                     sel.fallback ? "greedy branch selection"
                                                  : std::string{});
  if (!(sol.residual_norm <= 1e-8)) {
    throw NumericalError("graph solver: residual norm " +
                         format_magnitude(sol.residual_norm) +
                         " exceeds 1e-8; solution rejected");
  }
  return sol;
}

RiccatiSolution kamiltonians(const BlockHamiltonian& blocks, const Matrix& x,
                             std::string note) {
  const int d = blocks.space.dim;
  if (x.rows() != d || x.cols() != d) {
    throw ConfigError("kamiltonians: X is " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()) + ", expected " +
                      std::to_string(d) + "x" + std::to_string(d));
  }
  if (!x.allFinite()) {
    throw NumericalError("kamiltonians: X has non-finite entries");
  }
  RiccatiSolution sol;
  sol.x = x;
  sol.space = blocks.space;
  sol.note = std::move(note);

  const Matrix residual = riccati_residual(x, blocks);
  if (!residual.allFinite()) {
    throw NumericalError("kamiltonians: residual has non-finite entries");
  }
  sol.residual_norm = residual.norm();
  sol.interior_residual_norm = interior_norm(residual, blocks.space);
  if (!(sol.interior_residual_norm <= 1e-6)) {
    throw NumericalError("kamiltonians: interior residual norm " +
                         format_magnitude(sol.interior_residual_norm) +
                         " exceeds 1e-6; X does not solve the Riccati equation");
  }

  sol.k_plus = blocks.h_plus + blocks.v * x;
  sol.k_minus = blocks.h_minus - blocks.v.adjoint() * x.adjoint();
  const Matrix id = Matrix::Identity(d, d);
  sol.eta = id + x.adjoint() * x;
  sol.xi = id + x * x.adjoint();
  return sol;
}

double pseudo_hermiticity_check(const RiccatiSolution& sol) {
  const double plus_defect =
      (sol.eta * sol.k_plus - sol.k_plus.adjoint() * sol.eta).norm();
  const double minus_defect =
      (sol.xi * sol.k_minus - sol.k_minus.adjoint() * sol.xi).norm();
  return std::max(plus_defect, minus_defect);
}

BiorthoSystem biorthonormal_system(const Matrix& k_plus) {
  const Eigen::Index d = k_plus.rows();
  if (k_plus.cols() != d || d < 1) {
    throw ConfigError("biorthonormal_system: generator must be square");
  }
  Eigen::ComplexEigenSolver<Matrix> ces(k_plus);
  if (ces.info() != Eigen::Success) {
    throw NumericalError("biorthonormal_system: eigendecomposition failed");
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&ces](int l, int r) {
    const Complex el = ces.eigenvalues()(l);
    const Complex er = ces.eigenvalues()(r);
    if (el.real() != er.real()) {
      return el.real() < er.real();
    }
    return el.imag() < er.imag();
  });

  BiorthoSystem bio;
  bio.energies = Vector(d);
  bio.psi_vecs = Matrix(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    bio.energies(n) = ces.eigenvalues()(order[n]);
    bio.psi_vecs.col(n) = ces.eigenvectors().col(order[n]).normalized();
  }

  const double cond = condition_number(bio.psi_vecs);
  if (!(cond < 1e10)) {
    throw NumericalError(
        "biorthonormal_system: eigenvector basis is ill-conditioned (cond ~ " +
        format_magnitude(cond) + "); generator is near-defective");
  }
  bio.phi_vecs = bio.psi_vecs.inverse().adjoint();
  bio.max_imag = bio.energies.imag().cwiseAbs().maxCoeff();
  bio.real_spectrum = bio.max_imag < 1e-8;
  return bio;
}

}  // namespace cqs
