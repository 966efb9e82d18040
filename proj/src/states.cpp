#include "cqs/states.hpp"

#include <cmath>

namespace cqs {

namespace {

// Physical composite from frame components: vec = (u (x) I) [plus; minus].
Vector from_frame(const ObservableDiag& diag, const Vector& plus,
                  const Vector& minus) {
  const Eigen::Index d = plus.size();
  Vector vec(2 * d);
  vec.head(d) = diag.u(0, 0) * plus + diag.u(0, 1) * minus;
  vec.tail(d) = diag.u(1, 0) * plus + diag.u(1, 1) * minus;
  return vec;
}

double metric_normalizer(const Matrix& metric, const Vector& v,
                         const char* which) {
  const Complex q = v.dot(metric * v);
  if (!std::isfinite(q.real()) || q.real() <= 0.0) {
    throw NumericalError(std::string("state normalization failed: ") + which +
                         " quadratic form is not positive");
  }
  return 1.0 / std::sqrt(q.real());
}

}  // namespace

DephasingState dephasing_state(const RiccatiSolution& sol,
                               const ObservableDiag& diag, const Vector& psi) {
  if (psi.size() != sol.space.dim) {
    throw ConfigError("dephasing_state: seed has " + std::to_string(psi.size()) +
                      " entries, expected " + std::to_string(sol.space.dim));
  }
  if (psi.norm() == 0.0) {
    throw ConfigError("dephasing_state: seed is the zero vector");
  }
  const double c_norm = metric_normalizer(sol.eta, psi, "eta");
  DephasingState state;
  state.kind = StateKind::psi_branch;
  state.seed_raw = psi.normalized();
  state.seed = c_norm * psi;
  state.vec = from_frame(diag, state.seed, sol.x * state.seed);
  return state;
}

DephasingState orthogonal_state(const RiccatiSolution& sol,
                                const ObservableDiag& diag, const Vector& phi) {
  if (phi.size() != sol.space.dim) {
    throw ConfigError("orthogonal_state: seed has " + std::to_string(phi.size()) +
                      " entries, expected " + std::to_string(sol.space.dim));
  }
  if (phi.norm() == 0.0) {
    throw ConfigError("orthogonal_state: seed is the zero vector");
  }
  const double d_norm = metric_normalizer(sol.xi, phi, "xi");
  DephasingState state;
  state.kind = StateKind::phi_branch;
  state.seed_raw = phi.normalized();
  state.seed = d_norm * phi;
  state.vec = from_frame(diag, -(sol.x.adjoint() * state.seed), state.seed);
  return state;
}

DephasingState rabi_parity_state(const Matrix& x_k, const Vector& psi, int eps) {
  if (eps != 1 && eps != -1) {
    throw ConfigError("rabi_parity_state: parity sign must be +1 or -1");
  }
  if (x_k.rows() != psi.size() || x_k.cols() != psi.size()) {
    throw ConfigError("rabi_parity_state: parity operator and seed sizes differ");
  }
  if (psi.norm() == 0.0) {
    throw ConfigError("rabi_parity_state: seed is the zero vector");
  }
  const Vector psi_hat = psi.normalized();
  const Vector flipped = static_cast<double>(eps) * (x_k * psi_hat);
  const Eigen::Index d = psi_hat.size();
  DephasingState state;
  state.kind = StateKind::rabi_parity;
  state.parity_eps = eps;
  state.seed_raw = psi_hat;
  state.seed = psi_hat / std::sqrt(2.0);
  state.vec = Vector(2 * d);
  state.vec.head(d) = 0.5 * (psi_hat + flipped);
  state.vec.tail(d) = 0.5 * (psi_hat - flipped);
  state.vec.normalize();
  return state;
}

SchmidtResult schmidt_analysis(const Vector& state, double tol) {
  if (state.size() < 2 || state.size() % 2 != 0) {
    throw ConfigError("schmidt_analysis: composite vector must have even size");
  }
  const Eigen::Index d = state.size() / 2;
  Matrix m(2, d);
  m.row(0) = state.head(d).transpose();
  m.row(1) = state.tail(d).transpose();
  Eigen::JacobiSVD<Matrix> svd(m);
  SchmidtResult result;
  result.coefficients = {svd.singularValues()(0), svd.singularValues()(1)};
  for (double s : result.coefficients) {
    if (s > tol) {
      ++result.rank;
    }
  }
  return result;
}

Vector fock_seed(int m, const FockSpace& space) {
  if (m < 0 || m >= space.dim) {
    throw ConfigError("fock_seed: level " + std::to_string(m) +
                      " outside space of dimension " + std::to_string(space.dim));
  }
  Vector v = Vector::Zero(space.dim);
  v(m) = 1.0;
  return v;
}

Vector coherent_seed(Complex alpha, int cutoff, const FockSpace& space) {
  if (cutoff < 0 || cutoff >= space.dim) {
    throw ConfigError("coherent_seed: cutoff " + std::to_string(cutoff) +
                      " outside space of dimension " + std::to_string(space.dim));
  }
  Vector v = Vector::Zero(space.dim);
  v(0) = 1.0;
  for (int n = 1; n <= cutoff; ++n) {
    v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  v.normalize();
  return v;
}

}  // namespace cqs
