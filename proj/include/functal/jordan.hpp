#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "functal/matrix.hpp"
#include "functal/rational.hpp"

namespace functal {

struct ClusteredEigenvalue {
  std::complex<double> lambda;
  Rational lambda_exact;  // meaningful on the exact backend only
  int multiplicity = 0;
};

// Clustered spectrum of a square matrix. Float64: eigenvalues join a cluster
// when within eig_cluster_tolerance * (1 + ||A||_2) of its running mean, and
// the mean is the representative. ExactRational: rational roots of the
// characteristic polynomial, verified by exact division; throws
// SpectrumNotRationalError when the polynomial does not split over Q.
std::vector<ClusteredEigenvalue> eigen_cluster(const Matrix& A);

struct EigenGroup {
  std::complex<double> lambda;
  Rational lambda_exact;
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
  std::vector<int> block_sizes;          // nonincreasing
  int column_begin = 0;                  // first column of this group in J
  std::vector<int> lead_column_indices;  // global 0-based; empty iff algebraic multiplicity is 1
};

// J = P A P^{-1} with J in Jordan form. Float64 decompositions run over
// complex scalars (real input may have complex spectrum); exact
// decompositions require a rational spectrum and reproduce J exactly.
struct JordanForm {
  ScalarField field;
  Eigen::MatrixXcd J, P, P_inv;
  Matrix J_exact, P_exact, P_inv_exact;
  std::vector<EigenGroup> groups;
  double condition_P = 1.0;
  std::vector<std::string> warnings;

  bool is_exact() const { return field.is_exact(); }
  int size() const;
  bool diagonalizable() const;
};

JordanForm jordan_decompose(const Matrix& A);

// Rows of M expressed in the Jordan basis: M P^{-1}.
Eigen::MatrixXcd jordan_row_coords(const JordanForm& jf, const Matrix& M);
Matrix jordan_row_coords_exact(const JordanForm& jf, const Matrix& M);

// Submatrix of the lead columns (first column of each block) of one group.
// Zero-width when the group has algebraic multiplicity 1.
Eigen::MatrixXcd lead_columns(const Eigen::MatrixXcd& Mbar, const EigenGroup& group);
Matrix lead_columns(const Matrix& Mbar_exact, const EigenGroup& group);

struct LeadColumnCheck {
  bool all_ok = true;
  std::vector<bool> per_group;  // true when skipped or lead columns independent
  std::vector<bool> skipped;    // multiplicity-1 group or vanishing group rows
};

// Checks, per eigenvalue group, that the lead columns of M in Jordan row
// coordinates are linearly independent; groups with algebraic multiplicity 1
// or with a vanishing M-part are skipped.
LeadColumnCheck lead_columns_independent(const JordanForm& jf, const Matrix& M);

}  // namespace functal
