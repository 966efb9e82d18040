// Time evolution: exact propagation of composite states, factorized
// branch propagation through the generators, reduced-density observables,
// the JC closed-form coherence series, and the biorthonormal series.
#pragma once

#include <optional>
#include <vector>

#include "cqs/riccati.hpp"
#include "cqs/states.hpp"

namespace cqs {

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int steps = 201;  // number of samples, endpoints included
  std::vector<double> times() const;
};

// e^A.  With hermitian_hint the input is treated as -i H, H Hermitian, and
// evaluated through a unitary eigendecomposition; otherwise defers to a
// general dense algorithm.  Non-finite entries raise NumericalError.
Matrix matrix_exponential(const Matrix& a, bool hermitian_hint = false);

// Exact evolution e^{-i H t} |state> sampled on the grid, via one Hermitian
// eigendecomposition of H.
std::vector<Vector> propagate_exact(const Matrix& h_total, const Vector& state,
                                    const TimeGrid& grid);

// Factorized evolution of a psi-branch state: psi_t = e^{-i K+ t} seed,
// composite = (u x I) [psi_t; X psi_t], optionally rotated by e^{-i h0 t}.
// Requires interior residual below 1e-6 and seed support clear of the guard.
std::vector<Vector> propagate_factorized(const RiccatiSolution& sol,
                                         const ObservableDiag& diag,
                                         const Vector& seed,
                                         const TimeGrid& grid,
                                         const Matrix* h0 = nullptr);

// Factorized evolution of a phi-branch state:
// composite = (u x I) [-X_adj phi_t; phi_t], phi_t = e^{-i K- t} phi.
std::vector<Vector> propagate_factorized_orthogonal(const RiccatiSolution& sol,
                                                    const ObservableDiag& diag,
                                                    const Vector& seed,
                                                    const TimeGrid& grid,
                                                    const Matrix* h0 = nullptr);

// Qubit reduced density matrix of a composite vector.
Matrix reduced_density(const Vector& composite);

// alpha = ||psi_t||^2, c = <X psi_t | psi_t>; in the observable eigenframe
// the reduced density is [[alpha, c], [conj(c), 1 - alpha]].
struct DephasingCoefficients {
  double alpha = 0.0;
  Complex c{};
};

DephasingCoefficients dephasing_coefficients(const Vector& psi_t,
                                             const Matrix& x);

// JC variant including the free-mode frame phase e^{-i nu t} on c.
DephasingCoefficients dephasing_coefficients_jc(const Vector& psi_t,
                                                const Matrix& x, double nu,
                                                double t);

// <Lambda>(t) = lambda+ alpha + lambda- (1 - alpha); alpha outside [0,1]
// beyond 1e-9 raises NumericalError.
double lambda_expectation(double alpha, const ObservableDiag& diag);

// Closed-form JC coherence c(t) = e^{-i nu t} sum_n conj(xi_n) e^{-i W_n t}
// <seed|n><n+1|seed>, W_n = sqrt(d^2+|g|^2(n+2)) - sqrt(d^2+|g|^2(n+1)).
std::vector<Complex> jc_coherence_series(const Vector& seed, const JcParams& p,
                                         const TimeGrid& grid);

// Series over the biorthonormal eigensystem of K+: expansion coefficients
// p_n = <phi_n|seed>, sandwich matrices for ||psi_t||^2 and <X psi_t|psi_t>
// with phases e^{i(conj(E_n) - E_m) t}.
struct BiorthoSeries {
  std::vector<double> alpha;
  std::vector<Complex> c;
};

BiorthoSeries biortho_series(const Vector& seed, const BiorthoSystem& bio,
                             const Matrix& x, const TimeGrid& grid);

// Per-sample scalar outputs of a propagated scenario.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> lambda_expect;
  std::vector<double> alpha;
  std::vector<Complex> coherence;
  std::vector<double> fidelity;  // |<exact|factorized>|^2
  std::vector<double> leakage;   // guard-band population of the exact state
};

struct ConservationReport {
  double max_drift = 0.0;  // max |<Lambda>(t) - <Lambda>(0)|
  double leak_max = 0.0;
  bool drift_ok = false;
  bool leak_ok = false;
};

ConservationReport conservation_report(const TimeSeries& series,
                                       double drift_tol = 1e-8,
                                       double leak_tol = 1e-8);

}  // namespace cqs
