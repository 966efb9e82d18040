#include "cqs/types.hpp"

namespace cqs {

FockSpace::FockSpace(int dim_, int guard_) : dim(dim_), guard(guard_) {
  if (dim < 2) {
    throw ConfigError("fock space dimension must be at least 2, got " +
                      std::to_string(dim));
  }
  if (guard < 0 || guard >= dim) {
    throw ConfigError("guard band must satisfy 0 <= guard < dim, got guard=" +
                      std::to_string(guard) + " dim=" + std::to_string(dim));
  }
}

double interior_norm(const Matrix& m, const FockSpace& space) {
  if (m.rows() != space.dim || m.cols() != space.dim) {
    throw ConfigError("interior_norm: matrix is " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()) + ", expected " +
                      std::to_string(space.dim) + "x" +
                      std::to_string(space.dim));
  }
  const int n = space.interior();
  return m.topLeftCorner(n, n).norm();
}

}  // namespace cqs
