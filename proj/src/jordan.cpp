#include "functal/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "functal/errors.hpp"
#include "functal/linalg.hpp"

namespace functal {
namespace {

// Relative singular-value cut for Jordan structure decisions. Sits well above
// the eigenvalue-cluster noise floor and well below the smallest structural
// singular values of moderately conditioned systems.
constexpr double kStructureTol = 1e-6;
constexpr double kConditionWarning = 1e8;

double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
}

// ---------------------------------------------------------------------------
// Exact-backend spectrum: characteristic polynomial + verified rational roots.

// Faddeev-LeVerrier; returns monic coefficients c[0..n], p(x) = sum c[k] x^k.
std::vector<Rational> characteristic_polynomial(const Matrix& A) {
  const int n = A.rows();
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  Matrix Mk = Matrix::identity(n, ScalarField::exact());
  for (int k = 1; k <= n; ++k) {
    const Matrix AM = A * Mk;
    Rational tr = 0;
    for (int i = 0; i < n; ++i) tr += AM.r(i, i);
    c[n - k] = -tr / k;
    if (k < n) {
      Mk = AM;
      for (int i = 0; i < n; ++i) Mk.r(i, i) += c[n - k];
    }
  }
  return c;
}

Rational eval_poly(const std::vector<Rational>& c, const Rational& x) {
  Rational acc = 0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * x + c[k];
  return acc;
}

// Synthetic division by (x - r); requires zero remainder.
bool deflate_root(std::vector<Rational>& c, const Rational& r) {
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1) return false;
  std::vector<Rational> q(d);
  q[d - 1] = c[d];
  for (int k = d - 1; k >= 1; --k) q[k - 1] = c[k] + r * q[k];
  const Rational rem = c[0] + r * q[0];
  if (rem != 0) return false;
  c = q;
  return true;
}

std::vector<Rational> convergents_of(double value, const BigInt& max_den) {
  std::vector<Rational> out;
  const bool negative = value < 0;
  double x = std::fabs(value);
  BigInt p_prev = 1, q_prev = 0;
  BigInt p_cur(static_cast<long long>(std::floor(x)));
  BigInt q_cur = 1;
  out.emplace_back(negative ? -Rational(p_cur, q_cur) : Rational(p_cur, q_cur));
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    x = 1.0 / frac;
    const double fl = std::floor(x);
    if (fl > 9e18) break;
    BigInt a(static_cast<long long>(fl));
    BigInt p_next = a * p_cur + p_prev;
    BigInt q_next = a * q_cur + q_prev;
    if (q_next > max_den) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    out.emplace_back(negative ? -Rational(p_cur, q_cur) : Rational(p_cur, q_cur));
    frac = x - fl;
  }
  return out;
}

// All rational roots with multiplicity, sorted ascending. Numeric eigenvalues
// serve only as hints; every accepted root is verified by exact division.
std::vector<std::pair<Rational, int>> rational_spectrum(const Matrix& A) {
  const int n = A.rows();
  std::vector<Rational> poly = characteristic_polynomial(A);

  const Eigen::MatrixXd Ad = A.to_dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(Ad);
  const double scale = 1.0 + Ad.cwiseAbs().maxCoeff();

  std::vector<std::pair<Rational, int>> roots;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> ev = es.eigenvalues()(i);
    if (std::fabs(ev.imag()) > 1e-4 * scale) continue;  // complex pair, cannot be rational
    for (const Rational& cand : convergents_of(ev.real(), BigInt(1000000))) {
      if (eval_poly(poly, cand) != 0) continue;
      int mult = 0;
      while (deflate_root(poly, cand)) ++mult;
      if (mult > 0) roots.emplace_back(cand, mult);
      break;
    }
    if (poly.size() == 1) break;
  }
  if (poly.size() > 1) {
    throw SpectrumNotRationalError(
        "characteristic polynomial does not split over the rationals; "
        "re-run this analysis over float64");
  }
  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return roots;
}

// ---------------------------------------------------------------------------
// Float64 clustering.

std::vector<ClusteredEigenvalue> cluster_float(const Matrix& A) {
  const Eigen::MatrixXd Ad = A.dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(Ad);
  if (es.info() != Eigen::Success)
    throw DefectiveDecompositionError("eigenvalue iteration failed to converge");
  std::vector<std::complex<double>> evs(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(evs.begin(), evs.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  const double tol = A.field().resolved_eig_cluster_tolerance() * (1.0 + spectral_norm(Ad));

  std::vector<ClusteredEigenvalue> clusters;
  std::complex<double> sum = 0.0;
  int count = 0;
  auto flush = [&]() {
    if (count > 0) clusters.push_back({sum / static_cast<double>(count), Rational(0), count});
    sum = 0.0;
    count = 0;
  };
  for (const auto& ev : evs) {
    if (count > 0 && std::abs(ev - sum / static_cast<double>(count)) > tol) flush();
    sum += ev;
    ++count;
  }
  flush();
  return clusters;
}

// ---------------------------------------------------------------------------
// Chain construction over complex scalars.

struct Chain {
  std::vector<Eigen::VectorXcd> vectors;  // bottom-up: vectors[0] is the eigenvector
  int height() const { return static_cast<int>(vectors.size()); }
};

Eigen::MatrixXcd project_off(const Eigen::MatrixXcd& basis, const Eigen::MatrixXcd& M) {
  if (basis.cols() == 0) return M;
  return M - basis * (basis.adjoint() * M);
}

std::vector<Chain> build_chains_float(const Eigen::MatrixXcd& M, int multiplicity,
                                      double sigma_cut) {
  const int n = static_cast<int>(M.rows());

  // Staircase kernels: N_j spans ker(M^j), computed as ker((I - proj N_{j-1}) M)
  // so every rank decision happens at the scale of M itself.
  std::vector<Eigen::MatrixXcd> kernels;  // kernels[j-1] = basis of ker(M^j)
  Eigen::MatrixXcd current(n, 0);
  while (static_cast<int>(current.cols()) < multiplicity) {
    if (static_cast<int>(kernels.size()) == n)
      throw DefectiveDecompositionError(
          "generalized eigenspace failed to reach the algebraic multiplicity; "
          "try a larger eigenvalue cluster tolerance");
    const Eigen::MatrixXcd B = project_off(current, Eigen::MatrixXcd(M));
    ComplexSubspace ker = null_space_complex(B, sigma_cut);
    if (ker.dim() <= static_cast<int>(current.cols()))
      throw DefectiveDecompositionError(
          "generalized eigenspace stalled below the algebraic multiplicity; "
          "try a larger eigenvalue cluster tolerance");
    if (ker.dim() > multiplicity)
      throw DefectiveDecompositionError(
          "generalized eigenspace exceeded the algebraic multiplicity; "
          "try a smaller eigenvalue cluster tolerance");
    current = ker.basis;
    kernels.push_back(current);
  }

  const int index = static_cast<int>(kernels.size());
  std::vector<int> weyr(index + 2, 0);  // weyr[j] = dim ker(M^j) - dim ker(M^(j-1))
  for (int j = 1; j <= index; ++j)
    weyr[j] = static_cast<int>(kernels[j - 1].cols()) - (j >= 2 ? static_cast<int>(kernels[j - 2].cols()) : 0);

  std::vector<Chain> chains;
  for (int j = index; j >= 1; --j) {
    const int wanted = weyr[j] - weyr[j + 1];
    if (wanted == 0) continue;

    // Span to avoid: ker(M^(j-1)) plus the level-j vectors of taller chains.
    Eigen::MatrixXcd avoid(n, 0);
    const Eigen::MatrixXcd& lower = j >= 2 ? kernels[j - 2] : Eigen::MatrixXcd(n, 0);
    std::vector<Eigen::VectorXcd> descended;
    for (const Chain& c : chains)
      if (c.height() > j) descended.push_back(c.vectors[j - 1]);
    avoid.resize(n, lower.cols() + static_cast<long>(descended.size()));
    avoid.leftCols(lower.cols()) = lower;
    for (size_t k = 0; k < descended.size(); ++k) avoid.col(lower.cols() + k) = descended[k];
    const Eigen::MatrixXcd avoid_on = orthonormal_columns_complex(avoid);

    // Deterministic pick: pivoted QR of the projected kernel basis.
    const Eigen::MatrixXcd candidates = project_off(avoid_on, kernels[j - 1]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(candidates);
    Eigen::MatrixXcd picked =
        qr.householderQ() * Eigen::MatrixXcd::Identity(n, std::min<long>(n, candidates.cols()));
    for (int k = 0; k < wanted; ++k) {
      if (k >= qr.matrixR().rows() || std::abs(qr.matrixR()(k, k)) <= 1e-10)
        throw DefectiveDecompositionError(
            "chain-top selection ran out of independent directions; "
            "try a larger eigenvalue cluster tolerance");
      Chain chain;
      chain.vectors.assign(j, Eigen::VectorXcd());
      chain.vectors[j - 1] = picked.col(k);
      for (int level = j - 1; level >= 1; --level)
        chain.vectors[level - 1] = M * chain.vectors[level];
      chains.push_back(std::move(chain));
    }
  }
  std::stable_sort(chains.begin(), chains.end(),
                   [](const Chain& a, const Chain& b) { return a.height() > b.height(); });
  return chains;
}

// ---------------------------------------------------------------------------
// Exact chain construction.

struct ExactChain {
  std::vector<Matrix> vectors;  // n x 1 columns, bottom-up
  int height() const { return static_cast<int>(vectors.size()); }
};

Matrix append_col(const Matrix& M, const Matrix& col) {
  return M.cols() == 0 ? col : hstack(M, col);
}

std::vector<ExactChain> build_chains_exact(const Matrix& M, int multiplicity) {
  const int n = M.rows();
  std::vector<Matrix> kernels;  // kernels[j-1] = exact basis of ker(M^j)
  Matrix power = M;
  while (true) {
    const Subspace ker = null_space(power);
    kernels.push_back(ker.basis);
    if (ker.dim() >= multiplicity) break;
    if (static_cast<int>(kernels.size()) == n)
      throw DefectiveDecompositionError("exact generalized eigenspace failed to close");
    power = power * M;
  }

  const int index = static_cast<int>(kernels.size());
  std::vector<int> weyr(index + 2, 0);
  for (int j = 1; j <= index; ++j)
    weyr[j] = kernels[j - 1].cols() - (j >= 2 ? kernels[j - 2].cols() : 0);

  std::vector<ExactChain> chains;
  for (int j = index; j >= 1; --j) {
    const int wanted = weyr[j] - weyr[j + 1];
    if (wanted == 0) continue;
    Matrix avoid = j >= 2 ? kernels[j - 2] : Matrix::zeros(n, 0, ScalarField::exact());
    for (const ExactChain& c : chains)
      if (c.height() > j) avoid = append_col(avoid, c.vectors[j - 1]);

    int picked = 0;
    int avoid_rank = numerical_rank(avoid);
    for (int cand = 0; cand < kernels[j - 1].cols() && picked < wanted; ++cand) {
      const Matrix candidate = kernels[j - 1].col(cand);
      const Matrix extended = append_col(avoid, candidate);
      if (numerical_rank(extended) <= avoid_rank) continue;
      avoid = extended;
      ++avoid_rank;
      ++picked;
      ExactChain chain;
      chain.vectors.assign(j, Matrix());
      chain.vectors[j - 1] = candidate;
      for (int level = j - 1; level >= 1; --level)
        chain.vectors[level - 1] = M * chain.vectors[level];
      chains.push_back(std::move(chain));
    }
    if (picked < wanted)
      throw DefectiveDecompositionError("exact chain-top selection ran out of directions");
  }
  std::stable_sort(chains.begin(), chains.end(),
                   [](const ExactChain& a, const ExactChain& b) { return a.height() > b.height(); });
  return chains;
}

Matrix invert_exact(const Matrix& V) {
  const int n = V.rows();
  Matrix work = hstack(V, Matrix::identity(n, ScalarField::exact()));
  int lead = 0;
  for (int col = 0; col < n && lead < n; ++col) {
    int pivot = -1;
    for (int i = lead; i < n; ++i)
      if (work.r(i, col) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) throw DefectiveDecompositionError("exact Jordan basis is singular");
    if (pivot != lead)
      for (int j = 0; j < 2 * n; ++j) std::swap(work.r(lead, j), work.r(pivot, j));
    const Rational inv = Rational(1) / work.r(lead, col);
    for (int j = 0; j < 2 * n; ++j) work.r(lead, j) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == lead || work.r(i, col) == 0) continue;
      const Rational factor = work.r(i, col);
      for (int j = 0; j < 2 * n; ++j) work.r(i, j) -= factor * work.r(lead, j);
    }
    ++lead;
  }
  if (lead < n) throw DefectiveDecompositionError("exact Jordan basis is singular");
  return work.block(0, n, n, n);
}

}  // namespace

std::vector<ClusteredEigenvalue> eigen_cluster(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigen_cluster: matrix must be square");
  if (A.rows() == 0) return {};
  if (A.is_exact()) {
    std::vector<ClusteredEigenvalue> out;
    for (const auto& [root, mult] : rational_spectrum(A))
      out.push_back({std::complex<double>(to_double(root), 0.0), root, mult});
    return out;
  }
  return cluster_float(A);
}

int JordanForm::size() const {
  return is_exact() ? J_exact.rows() : static_cast<int>(J.rows());
}

bool JordanForm::diagonalizable() const {
  for (const auto& g : groups)
    for (int b : g.block_sizes)
      if (b > 1) return false;
  return true;
}

JordanForm jordan_decompose(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("jordan_decompose: matrix must be square");
  const int n = A.rows();
  if (n == 0) throw std::invalid_argument("jordan_decompose: empty matrix");

  JordanForm jf;
  jf.field = A.field();
  const std::vector<ClusteredEigenvalue> spectrum = eigen_cluster(A);

  if (A.is_exact()) {
    Matrix V = Matrix::zeros(n, 0, ScalarField::exact());
    Matrix J = Matrix::zeros(n, n, ScalarField::exact());
    int col = 0;
    for (const auto& ev : spectrum) {
      Matrix shifted = A;
      for (int i = 0; i < n; ++i) shifted.r(i, i) -= ev.lambda_exact;
      const auto chains = build_chains_exact(shifted, ev.multiplicity);

      EigenGroup group;
      group.lambda = ev.lambda;
      group.lambda_exact = ev.lambda_exact;
      group.algebraic_multiplicity = ev.multiplicity;
      group.geometric_multiplicity = static_cast<int>(chains.size());
      group.column_begin = col;
      for (const auto& chain : chains) {
        group.block_sizes.push_back(chain.height());
        if (ev.multiplicity > 1) group.lead_column_indices.push_back(col);
        for (const Matrix& v : chain.vectors) {
          V = append_col(V, v);
          J.r(col, col) = ev.lambda_exact;
          ++col;
        }
      }
      jf.groups.push_back(std::move(group));
    }
    // Superdiagonal ones inside each block.
    for (const auto& g : jf.groups) {
      int c = g.column_begin;
      for (int b : g.block_sizes) {
        for (int k = 1; k < b; ++k) J.r(c + k - 1, c + k) = 1;
        c += b;
      }
    }
    jf.J_exact = J;
    jf.P_inv_exact = V;
    jf.P_exact = invert_exact(V);
    const Matrix residual = jf.P_exact * A * jf.P_inv_exact - J;
    if (!residual.is_zero())
      throw DefectiveDecompositionError("exact Jordan reconstruction failed");
    jf.condition_P = 1.0;  // not meaningful on the exact backend
    return jf;
  }

  const Eigen::MatrixXd Ad = A.dense();
  const Eigen::MatrixXcd Ac = Ad.cast<std::complex<double>>();
  const double norm2 = spectral_norm(Ad);

  Eigen::MatrixXcd V(n, n);
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
  int col = 0;
  for (const auto& ev : spectrum) {
    const Eigen::MatrixXcd shifted = Ac - ev.lambda * Eigen::MatrixXcd::Identity(n, n);
    const double sigma_cut = kStructureTol * (1.0 + norm2);
    const auto chains = build_chains_float(shifted, ev.multiplicity, sigma_cut);

    EigenGroup group;
    group.lambda = ev.lambda;
    group.algebraic_multiplicity = ev.multiplicity;
    group.geometric_multiplicity = static_cast<int>(chains.size());
    group.column_begin = col;
    for (const auto& chain : chains) {
      group.block_sizes.push_back(chain.height());
      if (ev.multiplicity > 1) group.lead_column_indices.push_back(col);
      for (int k = 0; k < chain.height(); ++k) {
        V.col(col) = chain.vectors[k];
        J(col, col) = ev.lambda;
        if (k > 0) J(col - 1, col) = 1.0;
        ++col;
      }
    }
    jf.groups.push_back(std::move(group));
  }
  if (col != n)
    throw DefectiveDecompositionError("Jordan chains do not fill the space; "
                                      "try a larger eigenvalue cluster tolerance");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
  const double smin = svd.singularValues()(n - 1);
  jf.condition_P = smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
  if (!(smin > 0.0))
    throw DefectiveDecompositionError("Jordan basis is numerically singular");
  if (jf.condition_P > kConditionWarning) {
    std::ostringstream os;
    os << "ill-conditioned Jordan basis (condition " << jf.condition_P << ")";
    jf.warnings.push_back(os.str());
  }

  jf.J = J;
  jf.P_inv = V;
  jf.P = V.partialPivLu().inverse();
  const double residual = (jf.P * Ac * jf.P_inv - J).norm();
  if (residual > 1e-8 * (1.0 + Ad.norm())) {
    std::ostringstream os;
    os << "Jordan reconstruction residual " << residual
       << " exceeds the gate; try a larger eigenvalue cluster tolerance";
    throw DefectiveDecompositionError(os.str());
  }
  return jf;
}

Eigen::MatrixXcd jordan_row_coords(const JordanForm& jf, const Matrix& M) {
  if (jf.is_exact()) throw std::logic_error("jordan_row_coords on an exact decomposition");
  return M.to_dense().cast<std::complex<double>>() * jf.P_inv;
}

Matrix jordan_row_coords_exact(const JordanForm& jf, const Matrix& M) {
  if (!jf.is_exact()) throw std::logic_error("jordan_row_coords_exact on a Float64 decomposition");
  return M * jf.P_inv_exact;
}

Eigen::MatrixXcd lead_columns(const Eigen::MatrixXcd& Mbar, const EigenGroup& group) {
  Eigen::MatrixXcd out(Mbar.rows(), group.lead_column_indices.size());
  for (size_t k = 0; k < group.lead_column_indices.size(); ++k)
    out.col(k) = Mbar.col(group.lead_column_indices[k]);
  return out;
}

Matrix lead_columns(const Matrix& Mbar_exact, const EigenGroup& group) {
  Matrix out(Mbar_exact.rows(), static_cast<int>(group.lead_column_indices.size()),
             ScalarField::exact());
  for (size_t k = 0; k < group.lead_column_indices.size(); ++k)
    for (int i = 0; i < Mbar_exact.rows(); ++i)
      out.r(i, static_cast<int>(k)) = Mbar_exact.r(i, group.lead_column_indices[k]);
  return out;
}

LeadColumnCheck lead_columns_independent(const JordanForm& jf, const Matrix& M) {
  LeadColumnCheck check;
  if (jf.is_exact()) {
    const Matrix Mbar = jordan_row_coords_exact(jf, M);
    for (const auto& g : jf.groups) {
      const Matrix part = Mbar.block(0, g.column_begin, Mbar.rows(), g.algebraic_multiplicity);
      const bool skip = g.algebraic_multiplicity == 1 || part.is_zero();
      check.skipped.push_back(skip);
      bool ok = true;
      if (!skip) {
        const Matrix leads = lead_columns(Mbar, g);
        ok = numerical_rank(leads) == leads.cols();
      }
      check.per_group.push_back(ok);
      check.all_ok = check.all_ok && ok;
    }
    return check;
  }

  const Eigen::MatrixXcd Mbar = jordan_row_coords(jf, M);
  const double zero_tol = 1e-9 * std::max(1.0, Mbar.cwiseAbs().maxCoeff());
  for (const auto& g : jf.groups) {
    const Eigen::MatrixXcd part = Mbar.middleCols(g.column_begin, g.algebraic_multiplicity);
    const bool skip =
        g.algebraic_multiplicity == 1 || part.cwiseAbs().maxCoeff() <= zero_tol;
    check.skipped.push_back(skip);
    bool ok = true;
    if (!skip) {
      const Eigen::MatrixXcd leads = lead_columns(Mbar, g);
      ok = numerical_rank_complex(leads) == static_cast<int>(leads.cols());
    }
    check.per_group.push_back(ok);
    check.all_ok = check.all_ok && ok;
  }
  return check;
}

}  // namespace functal
