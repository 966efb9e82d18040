// Core aliases, the truncated Fock-space descriptor, and the error taxonomy
// shared by every module.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cqs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user-facing input: malformed scenarios, dimension mismatches,
// out-of-range parameters.  Mapped to CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Numerical breakdown: ill-conditioned similarity, failed branch selection,
// defective eigensystems, non-finite intermediates.  Mapped to CLI exit code 3.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

// Truncated bosonic Fock space with levels 0 .. dim-1.  The top `guard`
// levels form a guard band where truncation artifacts accumulate; operator
// identities are asserted on levels 0 .. dim-guard-1 only.
struct FockSpace {
  int dim = 2;
  int guard = 0;

  FockSpace() = default;
  explicit FockSpace(int dim_, int guard_ = 0);

  // Number of trusted levels.
  int interior() const { return dim - guard; }
};

// Frobenius norm of the interior block of an environment-space matrix.
double interior_norm(const Matrix& m, const FockSpace& space);

}  // namespace cqs
