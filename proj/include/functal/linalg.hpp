#pragma once

#include <Eigen/Dense>

#include "functal/matrix.hpp"
#include "functal/subspace.hpp"

namespace functal {

// Default Float64 rank tolerance: max(m, n) * eps * sigma_max. A positive
// rank_tolerance on the matrix field overrides it. Exact matrices use
// fraction-free elimination and need no tolerance. Empty matrices have rank 0.
int numerical_rank(const Matrix& M);
int numerical_rank(const Matrix& M, double tolerance_override);
int numerical_rank_complex(const Eigen::MatrixXcd& M, double tolerance = 0.0);

// Rank of a matrix built from eigenvalue shifts (lambda*I - A stacks and
// products). Such matrices inherit the eigenvalue-representative error, so
// with no override the cut is 1e-6 * (1 + sigma_max) instead of the plain
// SVD epsilon cut; a positive override is an absolute singular-value cut.
int pencil_rank(const Eigen::MatrixXcd& M, double override_tolerance = 0.0);

// Ranks of a stacked pencil and of its leading base_rows block under one
// shared cut. Appending rows can only grow singular values, so a shared cut
// guarantees rank_extended >= rank_base; per-matrix cuts do not (a heavy
// appended block inflates the extended cut past genuine base content). With
// no override the rows are normalized first so the cut is scale-free; a
// positive override is an absolute cut on the raw singular values.
struct StackedRankPair {
  int rank_base = 0;
  int rank_extended = 0;
};
StackedRankPair stacked_pencil_ranks(const Eigen::MatrixXcd& extended, int base_rows,
                                     double override_tolerance = 0.0);

// Right null space {x : Mx = 0}.
Subspace null_space(const Matrix& M);
ComplexSubspace null_space_complex(const Eigen::MatrixXcd& M, double tolerance = 0.0);

// rank([M; F]) == rank(M), i.e. row(F) is contained in row(M).
bool row_space_inclusion(const Matrix& F, const Matrix& M);

// Maximal independent subset of rows, scanned top to bottom.
struct RowBasis {
  Matrix matrix;
  std::vector<int> kept;
};
RowBasis independent_rows(const Matrix& M);

// Intersection via the stacked null-space construction on [B1 | -B2]. The
// tolerance overload loosens the null-space cut; needed when the operand
// bases are themselves eigenvalue-accuracy limited.
Subspace subspace_intersect(const Subspace& s1, const Subspace& s2);
Subspace subspace_intersect(const Subspace& s1, const Subspace& s2, double tolerance);
ComplexSubspace subspace_intersect(const ComplexSubspace& s1, const ComplexSubspace& s2);
ComplexSubspace subspace_intersect(const ComplexSubspace& s1, const ComplexSubspace& s2,
                                   double tolerance);

// Column span of M as a subspace.
Subspace column_space(const Matrix& M);

// Orthonormal projector-based distance helpers (Float64).
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& M, double tolerance = 0.0);
Eigen::MatrixXcd orthonormal_columns_complex(const Eigen::MatrixXcd& M, double tolerance = 0.0);

// Matrix exponential e^(A t); Float64 only, callers lift exact input.
Matrix matrix_exponential(const Matrix& A, double t);
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A, double t);

}  // namespace functal
