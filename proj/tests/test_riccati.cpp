#include <doctest.h>

#include <algorithm>
#include <vector>

#include "cqs/riccati.hpp"

using namespace cqs;

namespace {

BlockHamiltonian full_jc_blocks(const JcParams& p, const FockSpace& space) {
  const auto diag = diagonalize_observable(qubit_ops().sz);
  const Matrix h = jc_model(p, space).h_total;
  return block_decompose(to_kamiltonian(h, diag, space), space);
}

BlockHamiltonian full_rabi_blocks(const RabiParams& p, const FockSpace& space) {
  const auto diag = diagonalize_observable(qubit_ops().sx);
  return block_decompose(to_kamiltonian(rabi_model(p, space), diag, space),
                         space);
}

RealVector hermitian_spectrum(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues();
}

void check_spectrum_union(const BlockHamiltonian& blocks,
                          const RiccatiSolution& sol, double tol) {
  const RealVector whole = hermitian_spectrum(block_assemble(blocks));
  std::vector<double> parts;
  const auto bio_p = biorthonormal_system(sol.k_plus);
  const auto bio_m = biorthonormal_system(sol.k_minus);
  REQUIRE(bio_p.real_spectrum);
  REQUIRE(bio_m.real_spectrum);
  for (int i = 0; i < bio_p.energies.size(); ++i) {
    parts.push_back(bio_p.energies(i).real());
  }
  for (int i = 0; i < bio_m.energies.size(); ++i) {
    parts.push_back(bio_m.energies(i).real());
  }
  std::sort(parts.begin(), parts.end());
  REQUIRE(int(parts.size()) == whole.size());
  double worst = 0.0;
  for (int i = 0; i < whole.size(); ++i) {
    worst = std::max(worst, std::abs(parts[size_t(i)] - whole(i)));
  }
  CHECK(worst < tol);
}

}  // namespace

TEST_CASE("jc analytic solution zeroes both block forms") {
  const FockSpace space(32, 4);
  for (const JcParams p : {JcParams{0.5, 0.0, Complex(0.3, 0.0)},
                           JcParams{0.9, 0.4, Complex(0.2, 0.1)}}) {
    CAPTURE(p.nu);
    const auto sol = solve_jc_analytic(p, space);
    CHECK(sol.residual_norm < 1e-13);
    CHECK(sol.interior_residual_norm < 1e-13);
    CHECK(jc_riccati_residual(sol.x, p, space).norm() < 1e-13);
    CHECK((jc_riccati_residual(sol.x, p, space) -
           riccati_residual(sol.x, jc_blocks(p, space)))
              .norm() < 1e-13);
    CHECK(riccati_residual(sol.x, full_jc_blocks(p, space)).norm() < 1e-13);
  }
}

TEST_CASE("jc amplitudes satisfy the scalar quadratic") {
  const FockSpace space(64, 8);
  const JcParams p{0.9, 0.4, Complex(0.2, 0.1)};
  const auto sol = solve_jc_analytic(p, space);
  const double d = p.split_detuning();
  const double g2 = std::norm(p.g);
  for (int n = 0; n + 1 < space.dim; ++n) {
    const Complex xi = sol.x(n + 1, n);
    const double root = std::sqrt(n + 1.0);
    const Complex quad =
        std::conj(p.g) * root * xi * xi + 2.0 * d * xi - p.g * root;
    CHECK(std::abs(quad) < 1e-12);
    CHECK(std::abs(xi - (-d + std::sqrt(d * d + g2 * (n + 1.0))) /
                            (std::conj(p.g) * root)) < 1e-12);
  }
  for (int i = 0; i < space.dim; ++i) {
    for (int j = 0; j < space.dim; ++j) {
      if (i != j + 1) {
        CHECK(std::abs(sol.x(i, j)) == 0.0);
      }
    }
  }
}

TEST_CASE("jc branch generators are real diagonal with pinned entries") {
  const FockSpace space(64, 8);

  SUBCASE("split form at zero field energy") {
    const JcParams p{0.5, 0.0, Complex(0.3, 0.0)};
    const auto sol = solve_jc_analytic(p, space);
    const double d = p.delta();
    const double g2 = std::norm(p.g);
    CHECK((sol.k_plus - Matrix(sol.k_plus.diagonal().asDiagonal())).norm() <
          1e-13);
    for (int n = 0; n + 1 < space.dim; ++n) {
      CHECK(std::abs(sol.k_plus(n, n) - std::sqrt(d * d + g2 * (n + 1.0))) <
            1e-10);
      CHECK(std::abs(sol.k_minus(n + 1, n + 1) +
                     std::sqrt(d * d + g2 * (n + 1.0))) < 1e-10);
    }
    CHECK(std::abs(sol.k_plus(space.dim - 1, space.dim - 1) - d) < 1e-12);
    CHECK(std::abs(sol.k_minus(0, 0) + d) < 1e-12);
  }

  SUBCASE("full frame with field energy") {
    const JcParams p{0.9, 0.4, Complex(0.2, 0.1)};
    const auto blocks = full_jc_blocks(p, space);
    const auto split = solve_jc_analytic(p, space);
    const auto sol = kamiltonians(blocks, split.x);
    const double d = p.split_detuning();
    const double g2 = std::norm(p.g);
    for (int n = 0; n + 1 < space.dim; ++n) {
      const double expected =
          p.nu * (n + 0.5) + std::sqrt(d * d + g2 * (n + 1.0));
      CHECK(std::abs(sol.k_plus(n, n) - expected) < 1e-10);
    }
    CHECK(std::abs(sol.k_plus(space.dim - 1, space.dim - 1) -
                   (p.omega + p.nu * (space.dim - 1))) < 1e-10);
    CHECK(std::abs(sol.k_minus(0, 0) + p.omega) < 1e-12);
    for (int m = 1; m < space.dim; ++m) {
      const double expected =
          p.nu * (m - 0.5) - std::sqrt(d * d + g2 * m);
      CHECK(std::abs(sol.k_minus(m, m) - expected) < 1e-10);
    }
    check_spectrum_union(blocks, sol, 1e-10);
  }
}

TEST_CASE("resonant unit coupling reduces to the lowering shift") {
  const FockSpace space(64, 8);
  const JcParams p{0.0, 0.0, Complex(1.0, 0.0)};
  const auto sol = solve_jc_analytic(p, space);
  Matrix shift = Matrix::Zero(space.dim, space.dim);
  for (int n = 0; n + 1 < space.dim; ++n) {
    shift(n + 1, n) = 1.0;
  }
  CHECK((sol.x - shift).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero coupling yields the trivial solution") {
  const auto sol = solve_jc_analytic({0.5, 0.0, Complex(0.0, 0.0)},
                                     FockSpace(16, 2));
  CHECK(sol.x.norm() == 0.0);
  CHECK(sol.residual_norm == 0.0);
  CHECK_FALSE(sol.note.empty());
}

TEST_CASE("rabi parity solves every photon order exactly") {
  const FockSpace space(32, 4);
  for (int k : {1, 2, 3}) {
    const RabiParams p{1.0, 0.8, Complex(0.2, 0.0), k};
    const auto sol = solve_rabi_analytic(p, space);
    CHECK(sol.residual_norm < 1e-12);
    CHECK((sol.k_plus - sol.k_plus.adjoint()).norm() < 1e-12);
    CHECK((sol.k_minus - sol.k_minus.adjoint()).norm() < 1e-12);
    CHECK((sol.x * sol.x - Matrix::Identity(space.dim, space.dim)).norm() <
          1e-14);
    CHECK((sol.x - sol.x.adjoint()).norm() < 1e-14);
    CHECK((sol.eta - 2.0 * Matrix::Identity(space.dim, space.dim)).norm() <
          1e-14);
    CHECK(pseudo_hermiticity_check(sol) < 1e-12);
    CHECK(riccati_residual(sol.x, full_rabi_blocks(p, space)).norm() < 1e-12);
    const auto negated = kamiltonians(full_rabi_blocks(p, space),
                                      Matrix(-sol.x));
    CHECK(negated.residual_norm < 1e-12);
    check_spectrum_union(full_rabi_blocks(p, space), sol, 1e-8);
  }
}

TEST_CASE("graph solver reproduces the jc closed form") {
  const FockSpace space(24, 3);
  const JcParams p{0.5, 0.0, Complex(0.3, 0.0)};
  const auto blocks = full_jc_blocks(p, space);
  const auto analytic = solve_jc_analytic(p, space);

  GraphSelection selection;
  const auto graph = solve_graph_subspace(blocks, nullptr, &selection);
  CHECK_FALSE(selection.fallback);
  CHECK(int(selection.indices.size()) == space.dim);
  CHECK((graph.x - analytic.x).norm() < 1e-9);
  CHECK(graph.residual_norm < 1e-10);
  CHECK(pseudo_hermiticity_check(graph) < 1e-10);
  check_spectrum_union(blocks, graph, 1e-8);

  SUBCASE("explicit override reproduces the same branch") {
    const auto again = solve_graph_subspace(blocks, &selection.indices);
    CHECK((again.x - graph.x).norm() < 1e-12);
  }

  SUBCASE("override spanning a non-graph subspace is rejected") {
    std::vector<int> spoiled = selection.indices;
    int worst = 0;
    for (int i = 1; i < int(selection.weights.size()); ++i) {
      if (selection.weights[size_t(i)] < selection.weights[size_t(worst)]) {
        worst = i;
      }
    }
    REQUIRE(std::find(spoiled.begin(), spoiled.end(), worst) == spoiled.end());
    spoiled[0] = worst;
    CHECK_THROWS_AS(solve_graph_subspace(blocks, &spoiled), NumericalError);
  }

  SUBCASE("malformed overrides are rejected") {
    std::vector<int> short_list{0, 1};
    CHECK_THROWS_AS(solve_graph_subspace(blocks, &short_list), ConfigError);
    std::vector<int> repeated(size_t(space.dim), 3);
    CHECK_THROWS_AS(solve_graph_subspace(blocks, &repeated), ConfigError);
    std::vector<int> out_of_range = selection.indices;
    out_of_range[0] = 2 * space.dim;
    CHECK_THROWS_AS(solve_graph_subspace(blocks, &out_of_range), ConfigError);
  }
}

TEST_CASE("graph solver handles the rabi tie through the fallback") {
  const FockSpace space(24, 3);
  const RabiParams p{1.0, 0.8, Complex(0.2, 0.0), 2};
  const auto blocks = full_rabi_blocks(p, space);
  GraphSelection selection;
  const auto sol = solve_graph_subspace(blocks, nullptr, &selection);
  CHECK(selection.fallback);
  CHECK(sol.residual_norm < 1e-8);
  CHECK(pseudo_hermiticity_check(sol) < 1e-8);
  check_spectrum_union(blocks, sol, 1e-8);

  const auto bio = biorthonormal_system(sol.k_plus);
  const int d = space.dim;
  CHECK((bio.phi_vecs.adjoint() * bio.psi_vecs - Matrix::Identity(d, d))
            .norm() < 1e-8);
  CHECK((bio.psi_vecs * bio.phi_vecs.adjoint() - Matrix::Identity(d, d))
            .norm() < 1e-8);
  CHECK(bio.max_imag < 1e-8);
}

TEST_CASE("branch generators reject inconsistent or drifting solutions") {
  const FockSpace space(16, 2);
  const JcParams p{0.5, 0.0, Complex(0.3, 0.0)};
  const auto blocks = full_jc_blocks(p, space);
  const auto sol = solve_jc_analytic(p, space);

  Matrix perturbed = sol.x;
  perturbed(1, 0) += 1e-3;
  CHECK_THROWS_AS(kamiltonians(blocks, perturbed), NumericalError);
  CHECK_THROWS_AS(kamiltonians(blocks, Matrix::Zero(8, 8)), ConfigError);

  Matrix guard_only = sol.x;
  guard_only(space.dim - 1, space.dim - 2) += 0.05;
  const auto tolerated = kamiltonians(blocks, guard_only);
  CHECK(tolerated.interior_residual_norm < 1e-13);
  CHECK(tolerated.residual_norm > 1e-3);
}

TEST_CASE("biorthonormal systems invert cleanly") {
  SUBCASE("hermitian generator") {
    const FockSpace space(20, 2);
    const auto sol = solve_jc_analytic({0.9, 0.4, Complex(0.2, 0.1)}, space);
    const auto bio = biorthonormal_system(sol.k_plus);
    CHECK(bio.real_spectrum);
    const int d = space.dim;
    CHECK((bio.phi_vecs.adjoint() * bio.psi_vecs - Matrix::Identity(d, d))
              .norm() < 1e-10);
    CHECK((bio.psi_vecs * bio.phi_vecs.adjoint() - Matrix::Identity(d, d))
              .norm() < 1e-10);
    CHECK((sol.k_plus * bio.psi_vecs -
           bio.psi_vecs * bio.energies.asDiagonal().toDenseMatrix())
              .norm() < 1e-10);
    CHECK((sol.k_plus.adjoint() * bio.phi_vecs -
           bio.phi_vecs * bio.energies.conjugate().asDiagonal().toDenseMatrix())
              .norm() < 1e-9);
    for (int i = 1; i < d; ++i) {
      CHECK(bio.energies(i).real() >= bio.energies(i - 1).real() - 1e-12);
    }
  }

  SUBCASE("non-normal generator") {
    Matrix m(3, 3);
    m << Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
        Complex(0.0, 0.0), Complex(2.0, 0.0), Complex(1.0, 0.0),
        Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(4.0, 0.0);
    const auto bio = biorthonormal_system(m);
    CHECK(std::abs(bio.energies(0) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(bio.energies(1) - Complex(2.0, 0.0)) < 1e-12);
    CHECK(std::abs(bio.energies(2) - Complex(4.0, 0.0)) < 1e-12);
    CHECK((bio.phi_vecs.adjoint() * bio.psi_vecs - Matrix::Identity(3, 3))
              .norm() < 1e-12);
  }

  SUBCASE("defective generator is rejected") {
    Matrix jordan(2, 2);
    jordan << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
        Complex(0.0, 0.0);
    CHECK_THROWS_AS(biorthonormal_system(jordan), NumericalError);
    CHECK_THROWS_AS(biorthonormal_system(Matrix::Zero(2, 3)), ConfigError);
  }
}
