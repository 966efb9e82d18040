#include "cqs/dynamics.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace cqs {

namespace {

bool nearly_hermitian(const Matrix& m) {
  return (m - m.adjoint()).norm() <= 1e-12 * (1.0 + m.norm());
}

Vector frame_to_physical(const ObservableDiag& diag, const Vector& plus,
                         const Vector& minus) {
  const Eigen::Index d = plus.size();
  Vector vec(2 * d);
  vec.head(d) = diag.u(0, 0) * plus + diag.u(0, 1) * minus;
  vec.tail(d) = diag.u(1, 0) * plus + diag.u(1, 1) * minus;
  return vec;
}

// Samples e^{-i G t} v for many t from a single decomposition of G:
// unitary eigenbasis when G is Hermitian, a conditioned spectral basis when
// it is merely diagonalizable, dense exponentials as a last resort.
class Evolver {
 public:
  explicit Evolver(const Matrix& gen) : gen_(gen) {
    if (gen.rows() != gen.cols()) {
      throw ConfigError("propagation generator must be square");
    }
    if (!gen.allFinite()) {
      throw NumericalError("propagation generator has non-finite entries");
    }
    if (nearly_hermitian(gen)) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
      if (es.info() == Eigen::Success) {
        mode_ = Mode::hermitian;
        real_evals_ = es.eigenvalues();
        vecs_ = es.eigenvectors();
        return;
      }
    }
    Eigen::ComplexEigenSolver<Matrix> ces(gen);
    if (ces.info() == Eigen::Success) {
      Eigen::JacobiSVD<Matrix> svd(ces.eigenvectors());
      const double smin = svd.singularValues()(svd.singularValues().size() - 1);
      if (smin > 0.0 && svd.singularValues()(0) / smin < 1e10) {
        mode_ = Mode::spectral;
        evals_ = ces.eigenvalues();
        vecs_ = ces.eigenvectors();
        vecs_inv_ = vecs_.inverse();
        return;
      }
    }
    mode_ = Mode::dense;
  }

  Vector apply(double t, const Vector& v) const {
    const Complex mit(0.0, -t);
    switch (mode_) {
      case Mode::hermitian: {
        Vector coeff = vecs_.adjoint() * v;
        for (Eigen::Index i = 0; i < coeff.size(); ++i) {
          coeff(i) *= std::exp(mit * real_evals_(i));
        }
        return vecs_ * coeff;
      }
      case Mode::spectral: {
        Vector coeff = vecs_inv_ * v;
        for (Eigen::Index i = 0; i < coeff.size(); ++i) {
          coeff(i) *= std::exp(mit * evals_(i));
        }
        return vecs_ * coeff;
      }
      case Mode::dense:
      default:
        return matrix_exponential(mit * gen_) * v;
    }
  }

 private:
  enum class Mode { hermitian, spectral, dense };
  Mode mode_ = Mode::dense;
  Matrix gen_;
  RealVector real_evals_;
  Vector evals_;
  Matrix vecs_;
  Matrix vecs_inv_;
};

void check_branch_preconditions(const RiccatiSolution& sol, const Vector& seed,
                                const char* where) {
  if (seed.size() != sol.space.dim) {
    throw ConfigError(std::string(where) + ": seed has " +
                      std::to_string(seed.size()) + " entries, expected " +
                      std::to_string(sol.space.dim));
  }
  if (!(sol.interior_residual_norm <= 1e-6)) {
    throw NumericalError(std::string(where) +
                         ": Riccati solution residual too large for factorized "
                         "propagation");
  }
  const int guard = sol.space.guard;
  if (guard > 0 && seed.tail(guard).norm() > 1e-12 * (1.0 + seed.norm())) {
    throw ConfigError(std::string(where) + ": seed occupies the guard band");
  }
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  if (steps < 1) {
    throw ConfigError("time grid must contain at least one sample");
  }
  std::vector<double> out(steps);
  if (steps == 1) {
    out[0] = t_start;
    return out;
  }
  const double dt = (t_end - t_start) / (steps - 1);
  for (int i = 0; i < steps; ++i) {
    out[i] = t_start + dt * i;
  }
  return out;
}

Matrix matrix_exponential(const Matrix& a, bool hermitian_hint) {
  if (a.rows() != a.cols()) {
    throw ConfigError("matrix_exponential: input must be square");
  }
  if (!a.allFinite()) {
    throw NumericalError("matrix_exponential: input has non-finite entries");
  }
  if (hermitian_hint) {
    // Interpret a = -i H with H Hermitian and exponentiate unitarily.
    const Matrix h = Complex(0.0, 1.0) * a;
    if (nearly_hermitian(h)) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      if (es.info() == Eigen::Success) {
        Vector phases(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) {
          phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i)));
        }
        return es.eigenvectors() * phases.asDiagonal() *
               es.eigenvectors().adjoint();
      }
    }
  }
  Matrix result = a.exp();
  if (!result.allFinite()) {
    throw NumericalError("matrix_exponential: result has non-finite entries");
  }
  return result;
}

std::vector<Vector> propagate_exact(const Matrix& h_total, const Vector& state,
                                    const TimeGrid& grid) {
  if (h_total.rows() != h_total.cols() || h_total.rows() != state.size()) {
    throw ConfigError("propagate_exact: Hamiltonian and state sizes differ");
  }
  if (!nearly_hermitian(h_total)) {
    throw ConfigError("propagate_exact: Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h_total);
  if (es.info() != Eigen::Success) {
    throw NumericalError("propagate_exact: eigendecomposition failed");
  }
  const Vector coeff0 = es.eigenvectors().adjoint() * state;
  const double norm0 = state.norm();
  std::vector<Vector> out;
  out.reserve(grid.times().size());
  for (double t : grid.times()) {
    Vector coeff = coeff0;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
      coeff(i) *= std::exp(Complex(0.0, -t * es.eigenvalues()(i)));
    }
    Vector v = es.eigenvectors() * coeff;
    if (std::abs(v.norm() - norm0) > 1e-10 * (1.0 + norm0)) {
      throw NumericalError("propagate_exact: norm not preserved");
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vector> propagate_factorized(const RiccatiSolution& sol,
                                         const ObservableDiag& diag,
                                         const Vector& seed,
                                         const TimeGrid& grid,
                                         const Matrix* h0) {
  check_branch_preconditions(sol, seed, "propagate_factorized");
  const Evolver branch(sol.k_plus);
  std::optional<Evolver> frame;
  if (h0 != nullptr) {
    frame.emplace(*h0);
  }
  std::vector<Vector> out;
  for (double t : grid.times()) {
    const Vector psi_t = branch.apply(t, seed);
    Vector v = frame_to_physical(diag, psi_t, sol.x * psi_t);
    if (frame) {
      v = frame->apply(t, v);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vector> propagate_factorized_orthogonal(const RiccatiSolution& sol,
                                                    const ObservableDiag& diag,
                                                    const Vector& seed,
                                                    const TimeGrid& grid,
                                                    const Matrix* h0) {
  check_branch_preconditions(sol, seed, "propagate_factorized_orthogonal");
  const Evolver branch(sol.k_minus);
  std::optional<Evolver> frame;
  if (h0 != nullptr) {
    frame.emplace(*h0);
  }
  std::vector<Vector> out;
  for (double t : grid.times()) {
    const Vector phi_t = branch.apply(t, seed);
    Vector v = frame_to_physical(diag, -(sol.x.adjoint() * phi_t), phi_t);
    if (frame) {
      v = frame->apply(t, v);
    }
    out.push_back(std::move(v));
  }
  return out;
}

Matrix reduced_density(const Vector& composite) {
  if (composite.size() < 2 || composite.size() % 2 != 0) {
    throw ConfigError("reduced_density: composite vector must have even size");
  }
  const Eigen::Index d = composite.size() / 2;
  Matrix rho(2, 2);
  rho(0, 0) = composite.head(d).squaredNorm();
  rho(1, 1) = composite.tail(d).squaredNorm();
  rho(0, 1) = composite.tail(d).dot(composite.head(d));
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

DephasingCoefficients dephasing_coefficients(const Vector& psi_t,
                                             const Matrix& x) {
  DephasingCoefficients out;
  out.alpha = psi_t.squaredNorm();
  out.c = (x * psi_t).dot(psi_t);
  return out;
}

DephasingCoefficients dephasing_coefficients_jc(const Vector& psi_t,
                                                const Matrix& x, double nu,
                                                double t) {
  DephasingCoefficients out = dephasing_coefficients(psi_t, x);
  out.c *= std::exp(Complex(0.0, -nu * t));
  return out;
}

double lambda_expectation(double alpha, const ObservableDiag& diag) {
  if (alpha < -1e-9 || alpha > 1.0 + 1e-9) {
    throw NumericalError("lambda_expectation: population " +
                         std::to_string(alpha) + " outside [0, 1]");
  }
  const double a = std::min(1.0, std::max(0.0, alpha));
  return diag.lambda_plus * a + diag.lambda_minus * (1.0 - a);
}

std::vector<Complex> jc_coherence_series(const Vector& seed, const JcParams& p,
                                         const TimeGrid& grid) {
  const auto times = grid.times();
  std::vector<Complex> out(times.size(), Complex(0.0, 0.0));
  if (std::abs(p.g) == 0.0) {
    return out;
  }
  const double d = p.split_detuning();
  const double g2 = std::norm(p.g);
  const Eigen::Index dim = seed.size();
  std::vector<Complex> coeff;
  std::vector<double> freq;
  for (Eigen::Index n = 0; n + 1 < dim; ++n) {
    const double root = std::sqrt(d * d + g2 * (n + 1));
    const Complex xi_n = (-d + root) / (std::conj(p.g) * std::sqrt(n + 1.0));
    const Complex weight = std::conj(xi_n) * std::conj(seed(n)) * seed(n + 1);
    if (weight != Complex(0.0, 0.0)) {
      coeff.push_back(weight);
      freq.push_back(std::sqrt(d * d + g2 * (n + 2)) - root);
    }
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    Complex c(0.0, 0.0);
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      c += coeff[j] * std::exp(Complex(0.0, -freq[j] * times[i]));
    }
    out[i] = c * std::exp(Complex(0.0, -p.nu * times[i]));
  }
  return out;
}

BiorthoSeries biortho_series(const Vector& seed, const BiorthoSystem& bio,
                             const Matrix& x, const TimeGrid& grid) {
  if (seed.size() != bio.psi_vecs.rows()) {
    throw ConfigError("biortho_series: seed and eigensystem sizes differ");
  }
  // p_n = <phi_n|seed>; the time evolution acts on the expansion
  // coefficients, the metric enters through the Gram sandwiches.
  const Vector p = bio.phi_vecs.adjoint() * seed;
  const Matrix gram = bio.psi_vecs.adjoint() * bio.psi_vecs;
  const Matrix gram_x = (x * bio.psi_vecs).adjoint() * bio.psi_vecs;
  BiorthoSeries series;
  for (double t : grid.times()) {
    Vector w = p;
    for (Eigen::Index n = 0; n < w.size(); ++n) {
      w(n) *= std::exp(Complex(0.0, -t) * bio.energies(n));
    }
    series.alpha.push_back(w.dot(gram * w).real());
    series.c.push_back(w.dot(gram_x * w));
  }
  return series;
}

ConservationReport conservation_report(const TimeSeries& series,
                                       double drift_tol, double leak_tol) {
  if (series.lambda_expect.empty()) {
    throw ConfigError("conservation_report: empty series");
  }
  ConservationReport report;
  const double lambda0 = series.lambda_expect.front();
  for (double v : series.lambda_expect) {
    report.max_drift = std::max(report.max_drift, std::abs(v - lambda0));
  }
  for (double v : series.leakage) {
    report.leak_max = std::max(report.leak_max, v);
  }
  report.drift_ok = report.max_drift <= drift_tol;
  report.leak_ok = report.leak_max <= leak_tol;
  return report;
}

}  // namespace cqs
