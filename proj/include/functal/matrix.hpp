#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "functal/rational.hpp"
#include "functal/scalar_field.hpp"

namespace functal {

// Dense real matrix over one of two scalar backends. Float64 entries live in
// an Eigen matrix, exact-rational entries in a row-major vector. Exact
// matrices can be lifted to Float64; there is deliberately no conversion in
// the other direction. Zero-dimension matrices are allowed (trivial subspace
// bases, empty functional rows).
class Matrix {
 public:
  Matrix() : Matrix(0, 0, ScalarField::float64()) {}
  Matrix(int rows, int cols, ScalarField field);

  static Matrix zeros(int rows, int cols, ScalarField field = ScalarField::float64());
  static Matrix identity(int n, ScalarField field = ScalarField::float64());
  static Matrix from_dense(const Eigen::MatrixXd& values,
                           ScalarField field = ScalarField::float64());
  // Row-literal constructors for tests and fixtures.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix exact_from_rows(std::initializer_list<std::initializer_list<long long>> rows);
  static Matrix exact_zeros(int rows, int cols) { return zeros(rows, cols, ScalarField::exact()); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long size() const { return static_cast<long>(rows_) * cols_; }
  const ScalarField& field() const { return field_; }
  bool is_exact() const { return field_.is_exact(); }
  void set_tolerances(double rank_tol, double eig_tol);

  double f(int i, int j) const;
  double& f(int i, int j);
  const Rational& r(int i, int j) const;
  Rational& r(int i, int j);
  double entry_as_double(int i, int j) const;

  // Float64 payload view; throws on exact matrices.
  const Eigen::MatrixXd& dense() const;
  // Entries as doubles regardless of backend.
  Eigen::MatrixXd to_dense() const;
  // Same matrix over Float64 (identity on Float64 input).
  Matrix lift() const;

  Matrix transpose() const;
  Matrix block(int row0, int col0, int nrows, int ncols) const;
  Matrix row(int i) const { return block(i, 0, 1, cols_); }
  Matrix col(int j) const { return block(0, j, rows_, 1); }

  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(const Rational& s) const;
  Matrix scaled(double s) const;

  double max_abs() const;
  double frobenius_norm() const;
  bool is_zero() const;  // exact zero test (entrywise == 0)

 private:
  void check_same_backend(const Matrix& other) const;

  int rows_ = 0;
  int cols_ = 0;
  ScalarField field_;
  Eigen::MatrixXd num_;
  std::vector<Rational> exa_;
};

Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);

bool exactly_equal(const Matrix& a, const Matrix& b);
bool approx_equal(const Matrix& a, const Matrix& b, double tol);

// Stacked iterated products: rows [M; MA; ...; MA^(n-1)] and
// columns [M, AM, ..., A^(n-1)M].
Matrix obsv_matrix(const Matrix& C, const Matrix& A);
Matrix ctrb_matrix(const Matrix& A, const Matrix& B);

}  // namespace functal
