#include "functal/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace functal {

Matrix::Matrix(int rows, int cols, ScalarField field)
    : rows_(rows), cols_(cols), field_(field) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  if (field_.is_exact()) {
    exa_.assign(static_cast<size_t>(rows) * cols, Rational(0));
  } else {
    num_ = Eigen::MatrixXd::Zero(rows, cols);
  }
}

Matrix Matrix::zeros(int rows, int cols, ScalarField field) { return Matrix(rows, cols, field); }

Matrix Matrix::identity(int n, ScalarField field) {
  Matrix m(n, n, field);
  for (int i = 0; i < n; ++i) {
    if (field.is_exact())
      m.r(i, i) = 1;
    else
      m.f(i, i) = 1.0;
  }
  return m;
}

Matrix Matrix::from_dense(const Eigen::MatrixXd& values, ScalarField field) {
  if (field.is_exact())
    throw std::invalid_argument("from_dense requires a Float64 field; floats are never converted to rationals");
  Matrix m(static_cast<int>(values.rows()), static_cast<int>(values.cols()), field);
  m.num_ = values;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int nr = static_cast<int>(rows.size());
  const int nc = nr == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Matrix m(nr, nc, ScalarField::float64());
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != nc) throw std::invalid_argument("ragged row literal");
    int j = 0;
    for (double v : row) m.f(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::exact_from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
  const int nr = static_cast<int>(rows.size());
  const int nc = nr == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Matrix m(nr, nc, ScalarField::exact());
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != nc) throw std::invalid_argument("ragged row literal");
    int j = 0;
    for (long long v : row) m.r(i, j++) = v;
    ++i;
  }
  return m;
}

void Matrix::set_tolerances(double rank_tol, double eig_tol) {
  field_.rank_tolerance = rank_tol;
  field_.eig_cluster_tolerance = eig_tol;
}

double Matrix::f(int i, int j) const {
  if (field_.is_exact()) throw std::logic_error("float access on exact matrix");
  return num_(i, j);
}

double& Matrix::f(int i, int j) {
  if (field_.is_exact()) throw std::logic_error("float access on exact matrix");
  return num_(i, j);
}

const Rational& Matrix::r(int i, int j) const {
  if (!field_.is_exact()) throw std::logic_error("rational access on Float64 matrix");
  return exa_[static_cast<size_t>(i) * cols_ + j];
}

Rational& Matrix::r(int i, int j) {
  if (!field_.is_exact()) throw std::logic_error("rational access on Float64 matrix");
  return exa_[static_cast<size_t>(i) * cols_ + j];
}

double Matrix::entry_as_double(int i, int j) const {
  return field_.is_exact() ? to_double(r(i, j)) : num_(i, j);
}

const Eigen::MatrixXd& Matrix::dense() const {
  if (field_.is_exact()) throw std::logic_error("dense() on exact matrix; lift() first");
  return num_;
}

Eigen::MatrixXd Matrix::to_dense() const {
  if (!field_.is_exact()) return num_;
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = to_double(r(i, j));
  return out;
}

Matrix Matrix::lift() const {
  if (!field_.is_exact()) return *this;
  ScalarField f = ScalarField::float64(field_.rank_tolerance, field_.eig_cluster_tolerance);
  return Matrix::from_dense(to_dense(), f);
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_, field_);
  if (field_.is_exact()) {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.r(j, i) = r(i, j);
  } else {
    out.num_ = num_.transpose();
  }
  return out;
}

Matrix Matrix::block(int row0, int col0, int nrows, int ncols) const {
  if (row0 < 0 || col0 < 0 || row0 + nrows > rows_ || col0 + ncols > cols_)
    throw std::invalid_argument("block out of range");
  Matrix out(nrows, ncols, field_);
  if (field_.is_exact()) {
    for (int i = 0; i < nrows; ++i)
      for (int j = 0; j < ncols; ++j) out.r(i, j) = r(row0 + i, col0 + j);
  } else {
    out.num_ = num_.block(row0, col0, nrows, ncols);
  }
  return out;
}

void Matrix::check_same_backend(const Matrix& other) const {
  if (field_.kind != other.field_.kind)
    throw std::invalid_argument("mixed scalar backends; lift() the exact operand explicitly");
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  check_same_backend(rhs);
  if (cols_ != rhs.rows_) throw std::invalid_argument("dimension mismatch in matrix product");
  Matrix out(rows_, rhs.cols_, field_);
  if (field_.is_exact()) {
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Rational& a = r(i, k);
        if (a == 0) continue;
        for (int j = 0; j < rhs.cols_; ++j) out.r(i, j) += a * rhs.r(k, j);
      }
  } else {
    out.num_ = num_ * rhs.num_;
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  check_same_backend(rhs);
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("dimension mismatch in matrix sum");
  Matrix out(rows_, cols_, field_);
  if (field_.is_exact()) {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.r(i, j) = r(i, j) + rhs.r(i, j);
  } else {
    out.num_ = num_ + rhs.num_;
  }
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  check_same_backend(rhs);
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("dimension mismatch in matrix difference");
  Matrix out(rows_, cols_, field_);
  if (field_.is_exact()) {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.r(i, j) = r(i, j) - rhs.r(i, j);
  } else {
    out.num_ = num_ - rhs.num_;
  }
  return out;
}

Matrix Matrix::scaled(const Rational& s) const {
  if (!field_.is_exact()) throw std::logic_error("rational scale on Float64 matrix");
  Matrix out(rows_, cols_, field_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.r(i, j) = r(i, j) * s;
  return out;
}

Matrix Matrix::scaled(double s) const {
  if (field_.is_exact()) throw std::logic_error("float scale on exact matrix");
  return Matrix::from_dense(num_ * s, field_);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m = std::max(m, std::fabs(entry_as_double(i, j)));
  return m;
}

double Matrix::frobenius_norm() const {
  if (!field_.is_exact()) return num_.norm();
  return to_dense().norm();
}

bool Matrix::is_zero() const {
  if (field_.is_exact()) {
    for (const auto& v : exa_)
      if (v != 0) return false;
    return true;
  }
  return num_.size() == 0 || (num_.array() == 0.0).all();
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack column mismatch");
  if (top.field().kind != bottom.field().kind)
    throw std::invalid_argument("vstack across scalar backends");
  Matrix out(top.rows() + bottom.rows(), top.cols(), top.field());
  for (int j = 0; j < top.cols(); ++j) {
    for (int i = 0; i < top.rows(); ++i)
      if (out.is_exact())
        out.r(i, j) = top.r(i, j);
      else
        out.f(i, j) = top.f(i, j);
    for (int i = 0; i < bottom.rows(); ++i)
      if (out.is_exact())
        out.r(top.rows() + i, j) = bottom.r(i, j);
      else
        out.f(top.rows() + i, j) = bottom.f(i, j);
  }
  return out;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  return vstack(left.transpose(), right.transpose()).transpose();
}

bool exactly_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.field().kind != b.field().kind)
    return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a.is_exact()) {
        if (a.r(i, j) != b.r(i, j)) return false;
      } else {
        if (a.f(i, j) != b.f(i, j)) return false;
      }
    }
  return true;
}

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (std::fabs(a.entry_as_double(i, j) - b.entry_as_double(i, j)) > tol) return false;
  return true;
}

Matrix obsv_matrix(const Matrix& C, const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("state matrix must be square");
  if (C.cols() != A.rows()) throw std::invalid_argument("dimension mismatch between C and A");
  Matrix stacked = C;
  Matrix power = C;
  for (int k = 1; k < A.rows(); ++k) {
    power = power * A;
    stacked = vstack(stacked, power);
  }
  return stacked;
}

Matrix ctrb_matrix(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols()) throw std::invalid_argument("state matrix must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("dimension mismatch between A and B");
  Matrix stacked = B;
  Matrix power = B;
  for (int k = 1; k < A.rows(); ++k) {
    power = A * power;
    stacked = hstack(stacked, power);
  }
  return stacked;
}

}  // namespace functal
