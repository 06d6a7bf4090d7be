#pragma once

#include <Eigen/Dense>

#include "functal/matrix.hpp"

namespace functal {

// Column-span representation of a linear subspace. The basis may have zero
// columns (trivial subspace). Float64 bases are orthonormal; exact bases are
// reduced-echelon derived.
struct Subspace {
  int ambient_dim = 0;
  Matrix basis;

  int dim() const { return basis.cols(); }
};

// Complex counterpart used by eigenspace computations; bases are orthonormal.
struct ComplexSubspace {
  int ambient_dim = 0;
  Eigen::MatrixXcd basis;

  int dim() const { return static_cast<int>(basis.cols()); }
};

ComplexSubspace complexify(const Subspace& real_space);

}  // namespace functal
