#include <doctest.h>

#include <algorithm>

#include "cqs/blockform.hpp"

using namespace cqs;

namespace {

RealVector sorted_spectrum(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("observable diagonalization fixes order and phase") {
  const auto& q = qubit_ops();

  SUBCASE("sigma_z maps to the identity frame") {
    const auto d = diagonalize_observable(q.sz);
    CHECK(d.lambda_plus == doctest::Approx(1.0));
    CHECK(d.lambda_minus == doctest::Approx(-1.0));
    CHECK((d.u - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK_FALSE(d.degenerate);
  }

  SUBCASE("sigma_x maps to the Hadamard frame") {
    const auto d = diagonalize_observable(q.sx);
    Matrix had(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    had << r, r, r, -r;
    CHECK((d.u - had).norm() < 1e-15);
  }

  SUBCASE("sigma_y columns carry a real non-negative pivot") {
    const auto d = diagonalize_observable(q.sy);
    CHECK(d.lambda_plus == doctest::Approx(1.0));
    const Matrix rotated = d.u.adjoint() * q.sy * d.u;
    CHECK(std::abs(rotated(0, 0) - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(rotated(1, 1) - Complex(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(rotated(0, 1)) < 1e-14);
    for (int col = 0; col < 2; ++col) {
      int pivot = std::abs(d.u(0, col)) >= std::abs(d.u(1, col)) ? 0 : 1;
      CHECK(d.u(pivot, col).imag() == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(d.u(pivot, col).real() > 0.0);
    }
  }

  SUBCASE("generic Hermitian observable") {
    Matrix m(2, 2);
    m << Complex(2.0, 0.0), Complex(1.0, 0.0), Complex(1.0, 0.0),
        Complex(2.0, 0.0);
    const auto d = diagonalize_observable(m);
    CHECK(d.lambda_plus == doctest::Approx(3.0));
    CHECK(d.lambda_minus == doctest::Approx(1.0));
    const Matrix recon = d.u *
                         Eigen::Vector2cd(d.lambda_plus, d.lambda_minus)
                             .asDiagonal()
                             .toDenseMatrix() *
                         d.u.adjoint();
    CHECK((recon - m).norm() < 1e-14);
  }

  SUBCASE("degenerate observable is flagged") {
    CHECK(diagonalize_observable(Matrix::Identity(2, 2)).degenerate);
  }

  SUBCASE("invalid observables are rejected") {
    Matrix bad(2, 2);
    bad << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
        Complex(0.0, 0.0);
    CHECK_THROWS_AS(diagonalize_observable(bad), ConfigError);
    CHECK_THROWS_AS(diagonalize_observable(Matrix::Identity(3, 3)),
                    ConfigError);
  }
}

TEST_CASE("frame rotation preserves the spectrum") {
  const FockSpace space(10);
  const JcParams p{0.7, 0.4, Complex(0.2, 0.1)};
  const Matrix h = jc_model(p, space).h_total;
  const auto diag = diagonalize_observable(qubit_ops().sx);
  const Matrix k = to_kamiltonian(h, diag, space);
  CHECK((sorted_spectrum(h) - sorted_spectrum(k)).norm() < 1e-12);
  CHECK((k - k.adjoint()).norm() < 1e-12);
}

TEST_CASE("block decomposition round-trips") {
  const FockSpace space(8);
  const RabiParams p{1.0, 0.8, Complex(0.2, 0.0), 2};
  const Matrix h = rabi_model(p, space);
  const auto diag = diagonalize_observable(qubit_ops().sx);
  const Matrix k = to_kamiltonian(h, diag, space);
  const BlockHamiltonian blocks = block_decompose(k, space);
  CHECK((block_assemble(blocks) - k).norm() < 1e-14);
  CHECK((blocks.h_plus - blocks.h_plus.adjoint()).norm() < 1e-14);
  CHECK((blocks.h_minus - blocks.h_minus.adjoint()).norm() < 1e-14);

  Matrix crooked = k;
  crooked(space.dim, 0) += Complex(0.0, 1e-3);
  CHECK_THROWS_AS(block_decompose(crooked, space), ConfigError);
  CHECK_THROWS_AS(block_decompose(Matrix::Zero(7, 7), space), ConfigError);
}

TEST_CASE("jc splitting commutes and reassembles") {
  const FockSpace space(16);
  const JcParams p{0.7, 0.4, Complex(0.2, 0.1)};
  const JcModel model = jc_model(p, space);
  CHECK((model.h_total - model.h0 - model.v_int).norm() < 1e-13);
  const Matrix comm = model.h0 * model.v_int - model.v_int * model.h0;
  CHECK(comm.norm() < 1e-12);
  CHECK((model.h_total - model.h_total.adjoint()).norm() < 1e-14);

  const auto diag = diagonalize_observable(qubit_ops().sz);
  const Matrix k_vint = to_kamiltonian(model.v_int, diag, space);
  const BlockHamiltonian split = jc_blocks(p, space);
  CHECK((block_assemble(split) - k_vint).norm() < 1e-13);
  const double d = p.split_detuning();
  CHECK((split.h_plus - d * Matrix::Identity(16, 16)).norm() < 1e-14);
  CHECK((split.h_minus + d * Matrix::Identity(16, 16)).norm() < 1e-14);
  CHECK((split.v - std::conj(p.g) * fock_ladder(space).a).norm() < 1e-14);
}

TEST_CASE("jc parameter helpers") {
  const JcParams p{0.9, 0.4, Complex(0.1, 0.0)};
  CHECK(p.delta() == doctest::Approx(0.5));
  CHECK(p.split_detuning() == doctest::Approx(0.7));
}

TEST_CASE("rabi model matches its Hadamard block form") {
  const FockSpace space(12);
  const RabiParams p{1.0, 0.8, Complex(0.2, 0.05), 2};
  const Matrix h = rabi_model(p, space);
  CHECK((h - h.adjoint()).norm() < 1e-13);

  const auto lad = fock_ladder(space);
  Matrix a_k = Matrix::Identity(space.dim, space.dim);
  for (int i = 0; i < p.k; ++i) {
    a_k = a_k * lad.a;
  }
  const Matrix field = std::conj(p.g) * a_k + p.g * a_k.adjoint();

  const auto diag = diagonalize_observable(qubit_ops().sx);
  const BlockHamiltonian blocks =
      block_decompose(to_kamiltonian(h, diag, space), space);
  CHECK((blocks.h_plus - (p.nu * lad.n_op + field)).norm() < 1e-12);
  CHECK((blocks.h_minus - (p.nu * lad.n_op - field)).norm() < 1e-12);
  CHECK((blocks.v - p.omega * Matrix::Identity(space.dim, space.dim)).norm() <
        1e-12);
}
