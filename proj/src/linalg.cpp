#include "functal/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <limits>
#include <stdexcept>
#include <vector>

namespace functal {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Fraction-free (Bareiss) elimination over big integers; exact rank.
int bareiss_rank(const Matrix& M) {
  const int rows = M.rows();
  const int cols = M.cols();
  if (rows == 0 || cols == 0) return 0;

  // Clear denominators row by row so the elimination stays over integers.
  std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
  for (int i = 0; i < rows; ++i) {
    BigInt scale = 1;
    for (int j = 0; j < cols; ++j) scale = lcm(scale, denominator(M.r(i, j)));
    for (int j = 0; j < cols; ++j) {
      const Rational v = M.r(i, j) * scale;
      a[i][j] = numerator(v);
    }
  }

  BigInt prev = 1;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < rows; ++i)
      if (a[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[rank], a[pivot]);
    for (int i = rank + 1; i < rows; ++i) {
      for (int j = col + 1; j < cols; ++j)
        a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

// Reduced row echelon form over rationals. Returns pivot columns.
std::vector<int> rref_exact(Matrix& M) {
  std::vector<int> pivots;
  int lead = 0;
  for (int col = 0; col < M.cols() && lead < M.rows(); ++col) {
    int pivot = -1;
    for (int i = lead; i < M.rows(); ++i)
      if (M.r(i, col) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != lead)
      for (int j = 0; j < M.cols(); ++j) std::swap(M.r(lead, j), M.r(pivot, j));
    const Rational inv = Rational(1) / M.r(lead, col);
    for (int j = 0; j < M.cols(); ++j) M.r(lead, j) *= inv;
    for (int i = 0; i < M.rows(); ++i) {
      if (i == lead || M.r(i, col) == 0) continue;
      const Rational factor = M.r(i, col);
      for (int j = 0; j < M.cols(); ++j) M.r(i, j) -= factor * M.r(lead, j);
    }
    pivots.push_back(col);
    ++lead;
  }
  return pivots;
}

double float_rank_tolerance(const Eigen::VectorXd& singular_values, int rows, int cols,
                            double override_tol) {
  if (override_tol > 0.0) return override_tol;
  const double smax = singular_values.size() > 0 ? singular_values(0) : 0.0;
  return std::max(rows, cols) * kEps * smax;
}

}  // namespace

int numerical_rank(const Matrix& M) { return numerical_rank(M, 0.0); }

int numerical_rank(const Matrix& M, double tolerance_override) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  if (M.is_exact()) return bareiss_rank(M);
  const double tol =
      tolerance_override > 0.0 ? tolerance_override : M.field().rank_tolerance;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.dense());
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = float_rank_tolerance(sv, M.rows(), M.cols(), tol);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

int numerical_rank_complex(const Eigen::MatrixXcd& M, double tolerance) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut =
      float_rank_tolerance(sv, static_cast<int>(M.rows()), static_cast<int>(M.cols()), tolerance);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

Subspace null_space(const Matrix& M) {
  const int n = M.cols();
  if (M.is_exact()) {
    Matrix R = M;
    const std::vector<int> pivots = rref_exact(R);
    std::vector<bool> is_pivot(n, false);
    for (int p : pivots) is_pivot[p] = true;
    const int dim = n - static_cast<int>(pivots.size());
    Matrix basis(n, dim, ScalarField::exact());
    int col = 0;
    for (int free = 0; free < n; ++free) {
      if (is_pivot[free]) continue;
      basis.r(free, col) = 1;
      for (size_t pi = 0; pi < pivots.size(); ++pi)
        basis.r(pivots[pi], col) = -R.r(static_cast<int>(pi), free);
      ++col;
    }
    return Subspace{n, basis};
  }

  if (M.rows() == 0 || n == 0) {
    return Subspace{n, Matrix::identity(n, M.field())};
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.dense(), Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = float_rank_tolerance(sv, M.rows(), n, M.field().rank_tolerance);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  Eigen::MatrixXd basis = svd.matrixV().rightCols(n - rank);
  return Subspace{n, Matrix::from_dense(basis, M.field())};
}

ComplexSubspace null_space_complex(const Eigen::MatrixXcd& M, double tolerance) {
  const int n = static_cast<int>(M.cols());
  if (M.rows() == 0 || n == 0)
    return ComplexSubspace{n, Eigen::MatrixXcd::Identity(n, n)};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = float_rank_tolerance(sv, static_cast<int>(M.rows()), n, tolerance);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return ComplexSubspace{n, svd.matrixV().rightCols(n - rank)};
}

bool row_space_inclusion(const Matrix& F, const Matrix& M) {
  if (F.cols() != M.cols()) throw std::invalid_argument("row_space_inclusion width mismatch");
  return numerical_rank(vstack(M, F)) == numerical_rank(M);
}

Subspace subspace_intersect(const Subspace& s1, const Subspace& s2) {
  return subspace_intersect(s1, s2, 0.0);
}

Subspace subspace_intersect(const Subspace& s1, const Subspace& s2, double tolerance) {
  if (s1.ambient_dim != s2.ambient_dim)
    throw std::invalid_argument("subspace ambient dimension mismatch");
  if (s1.basis.field().kind != s2.basis.field().kind)
    throw std::invalid_argument("subspace backend mismatch");
  const int n = s1.ambient_dim;
  if (s1.dim() == 0 || s2.dim() == 0)
    return Subspace{n, Matrix::zeros(n, 0, s1.basis.field())};

  const Matrix negated =
      s2.basis.is_exact() ? s2.basis.scaled(Rational(-1)) : s2.basis.scaled(-1.0);
  Matrix stacked = hstack(s1.basis, negated);
  if (!stacked.is_exact() && tolerance > 0.0)
    stacked.set_tolerances(tolerance, stacked.field().eig_cluster_tolerance);
  const Subspace combos = null_space(stacked);
  const Matrix top = combos.basis.block(0, 0, s1.dim(), combos.dim());
  Matrix inter = s1.basis * top;
  if (!inter.is_exact() && inter.cols() > 0) {
    inter = Matrix::from_dense(orthonormal_columns(inter.dense()), inter.field());
  }
  return Subspace{n, inter};
}

ComplexSubspace subspace_intersect(const ComplexSubspace& s1, const ComplexSubspace& s2) {
  return subspace_intersect(s1, s2, 0.0);
}

ComplexSubspace subspace_intersect(const ComplexSubspace& s1, const ComplexSubspace& s2,
                                   double tolerance) {
  if (s1.ambient_dim != s2.ambient_dim)
    throw std::invalid_argument("subspace ambient dimension mismatch");
  const int n = s1.ambient_dim;
  if (s1.dim() == 0 || s2.dim() == 0)
    return ComplexSubspace{n, Eigen::MatrixXcd::Zero(n, 0)};
  Eigen::MatrixXcd stacked(n, s1.dim() + s2.dim());
  stacked << s1.basis, -s2.basis;
  const ComplexSubspace combos = null_space_complex(stacked, tolerance);
  Eigen::MatrixXcd inter = s1.basis * combos.basis.topRows(s1.dim());
  return ComplexSubspace{n, orthonormal_columns_complex(inter)};
}

int pencil_rank(const Eigen::MatrixXcd& M, double override_tolerance) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  if (override_tolerance > 0.0) return numerical_rank_complex(M, override_tolerance);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = 1e-6 * (1.0 + sv(0));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

StackedRankPair stacked_pencil_ranks(const Eigen::MatrixXcd& extended, int base_rows,
                                     double override_tolerance) {
  StackedRankPair out;
  if (extended.cols() == 0 || extended.rows() == 0) return out;
  if (override_tolerance > 0.0) {
    out.rank_base = numerical_rank_complex(extended.topRows(base_rows), override_tolerance);
    out.rank_extended = numerical_rank_complex(extended, override_tolerance);
    return out;
  }
  Eigen::MatrixXcd eq = extended;
  for (int i = 0; i < eq.rows(); ++i) {
    const double nrm = eq.row(i).norm();
    if (nrm > 0.0) eq.row(i) /= nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd_ext(eq);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd_base(eq.topRows(base_rows));
  const double cut = 1e-6 * (1.0 + svd_ext.singularValues()(0));
  for (int i = 0; i < svd_base.singularValues().size(); ++i)
    if (svd_base.singularValues()(i) > cut) ++out.rank_base;
  for (int i = 0; i < svd_ext.singularValues().size(); ++i)
    if (svd_ext.singularValues()(i) > cut) ++out.rank_extended;
  return out;
}

Subspace column_space(const Matrix& M) {
  if (M.is_exact()) {
    // Pivot columns of the RREF give an exact spanning subset of M's columns.
    Matrix R = M;
    const std::vector<int> pivots = rref_exact(R);
    Matrix basis(M.rows(), static_cast<int>(pivots.size()), ScalarField::exact());
    for (size_t k = 0; k < pivots.size(); ++k)
      for (int i = 0; i < M.rows(); ++i) basis.r(i, static_cast<int>(k)) = M.r(i, pivots[k]);
    return Subspace{M.rows(), basis};
  }
  return Subspace{M.rows(),
                  Matrix::from_dense(orthonormal_columns(M.dense(), M.field().rank_tolerance),
                                     M.field())};
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& M, double tolerance) {
  if (M.cols() == 0) return Eigen::MatrixXd::Zero(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut =
      float_rank_tolerance(sv, static_cast<int>(M.rows()), static_cast<int>(M.cols()), tolerance);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXcd orthonormal_columns_complex(const Eigen::MatrixXcd& M, double tolerance) {
  if (M.cols() == 0) return Eigen::MatrixXcd::Zero(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut =
      float_rank_tolerance(sv, static_cast<int>(M.rows()), static_cast<int>(M.cols()), tolerance);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

RowBasis independent_rows(const Matrix& M) {
  RowBasis out;
  out.matrix = Matrix::zeros(0, M.cols(), M.field());
  int rank = 0;
  for (int i = 0; i < M.rows(); ++i) {
    const Matrix candidate = out.matrix.rows() == 0 ? M.row(i) : vstack(out.matrix, M.row(i));
    const int r = numerical_rank(candidate);
    if (r > rank) {
      out.matrix = candidate;
      out.kept.push_back(i);
      rank = r;
    }
  }
  return out;
}

ComplexSubspace complexify(const Subspace& real_space) {
  return ComplexSubspace{real_space.ambient_dim,
                         real_space.basis.to_dense().cast<std::complex<double>>()};
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A, double t) {
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix exponential of non-square matrix");
  return (A * t).exp();
}

Matrix matrix_exponential(const Matrix& A, double t) {
  if (A.is_exact())
    throw std::invalid_argument("matrix exponential requires a Float64 matrix; lift() first");
  return Matrix::from_dense(matrix_exponential(A.dense(), t), A.field());
}

}  // namespace functal
