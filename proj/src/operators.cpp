#include "cqs/operators.hpp"

#include <cmath>

namespace cqs {

LadderOperators fock_ladder(const FockSpace& space) {
  const int d = space.dim;
  LadderOperators ops;
  ops.a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    ops.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  ops.a_dag = ops.a.adjoint();
  ops.n_op = ops.a_dag * ops.a;
  return ops;
}

const QubitOperators& qubit_ops() {
  static const QubitOperators ops = [] {
    QubitOperators q;
    q.sx = Matrix{{Complex(0, 0), Complex(1, 0)}, {Complex(1, 0), Complex(0, 0)}};
    q.sy = Matrix{{Complex(0, 0), Complex(0, -1)}, {Complex(0, 1), Complex(0, 0)}};
    q.sz = Matrix{{Complex(1, 0), Complex(0, 0)}, {Complex(0, 0), Complex(-1, 0)}};
    q.sp = Matrix{{Complex(0, 0), Complex(1, 0)}, {Complex(0, 0), Complex(0, 0)}};
    q.sm = q.sp.adjoint();
    q.id = Matrix::Identity(2, 2);
    return q;
  }();
  return ops;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_trace_env(const Matrix& m, const FockSpace& space) {
  const int d = space.dim;
  if (m.rows() != 2 * d || m.cols() != 2 * d) {
    throw ConfigError("partial_trace_env: composite matrix is " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(2 * d) + "x" +
                      std::to_string(2 * d));
  }
  Matrix rho = Matrix::Zero(2, 2);
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      Complex sum{};
      for (int k = 0; k < d; ++k) {
        sum += m(s * d + k, sp * d + k);
      }
      rho(s, sp) = sum;
    }
  }
  return rho;
}

Matrix generalized_parity(int k, const FockSpace& space) {
  if (k < 1 || k >= space.dim) {
    throw ConfigError("generalized_parity: photon order must satisfy 1 <= k < dim, got k=" +
                      std::to_string(k));
  }
  Matrix x = Matrix::Zero(space.dim, space.dim);
  for (int m = 0; m < space.dim; ++m) {
    x(m, m) = ((m / k) % 2 == 0) ? 1.0 : -1.0;
  }
  return x;
}

}  // namespace cqs
