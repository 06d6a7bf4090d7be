#include "functal/duality.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "functal/errors.hpp"
#include "functal/gramian.hpp"
#include "functal/jordan.hpp"
#include "functal/linalg.hpp"

namespace functal {
namespace {

// Cross products (F U_image)' (F U_kernel) are measured raw against the
// scale ||F||^2 instead of normalizing the projected blocks first: a kernel
// eigenvalue of W below the split cut only bounds the matching observability
// content by its square root, so F times a numerical kernel direction can
// legitimately reach ~1e-6 * scale of roundoff, and normalizing that noise
// would fabricate a direction.
constexpr double kOrthTol = 1e-6;
constexpr double kNormalTol = 1e-10;
// Singular-value cut separating the image of the observability matrix from
// its kernel, relative to the matrix norm (same rationale as the
// controllability-matrix floor: power-cascade roundoff sits well above the
// plain epsilon cut). A positive user tolerance still wins.
constexpr double kSplitFloor = 1e-9;

void merge_warnings(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  for (const auto& w : src)
    if (std::find(dst.begin(), dst.end(), w) == dst.end()) dst.push_back(w);
}

Matrix exact_pencil(const Matrix& A, const Rational& lambda) {
  Matrix S = Matrix::zeros(A.rows(), A.cols(), A.field());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) S.r(i, j) = (i == j ? lambda : Rational(0)) - A.r(i, j);
  return S;
}

}  // namespace

CtrbTriple dualize(const ObsvTriple& t) {
  return CtrbTriple::make(t.A.transpose(), t.C.transpose(), t.F);
}

ObsvTriple dualize(const CtrbTriple& t) {
  return ObsvTriple::make(t.B.transpose(), t.A.transpose(), t.F);
}

DualityReport check_weak_duality(const ObsvTriple& t) {
  DualityReport rep;
  const ObsvReport primal = test_functional_obsv_kalman(t);
  const CtrbReport dual = test_output_ctrb_kalman(dualize(t));
  rep.primal_obsv = primal.verdict;
  rep.dual_ctrb = dual.verdict;
  if (rep.primal_obsv && !rep.dual_ctrb)
    throw InternalConsistencyError(
        "functionally observable triple whose transposed counterpart tested output "
        "uncontrollable; the implication is a theorem, so a rank tolerance is off");
  if (primal.certificate) rep.certificates.push_back(*primal.certificate);
  if (dual.certificate) rep.certificates.push_back(*dual.certificate);
  merge_warnings(rep.warnings, primal.warnings);
  merge_warnings(rep.warnings, dual.warnings);
  return rep;
}

DualityReport check_strong_duality(const ObsvTriple& t, double t1) {
  if (!(t1 > 0.0)) throw std::invalid_argument("gramian horizon must be positive");
  DualityReport rep = check_weak_duality(t);
  rep.gramian_horizon = t1;
  if (t.A.is_exact())
    rep.warnings.push_back("gramian orthogonality clause evaluated in floating point");

  // Im(W(t1)) equals the row space of the observability matrix and ker(W(t1))
  // equals its kernel for every t1 > 0, so the split is computed from that
  // matrix in the linear singular-value metric. Splitting W's own spectrum
  // does not work: its eigenvalues are squares of horizon-weighted mode
  // strengths, which pushes weak-but-real modes below machine epsilon where
  // they are indistinguishable from true kernel directions.
  const Eigen::MatrixXd F = t.F.to_dense();
  const Eigen::MatrixXd O = obsv_matrix(t.C, t.A).to_dense();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(O, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double override_tol = t.A.field().rank_tolerance;
  const double cut = override_tol > 0.0 ? override_tol : kSplitFloor * (1.0 + O.norm());
  const int n = static_cast<int>(O.cols());
  int image_dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++image_dim;
  const Eigen::MatrixXd U_image = svd.matrixV().leftCols(image_dim);
  const Eigen::MatrixXd U_kernel = svd.matrixV().rightCols(n - image_dim);

  bool orth = true;
  if (U_image.cols() > 0 && U_kernel.cols() > 0) {
    const Eigen::MatrixXd P_image = F * U_image;
    const Eigen::MatrixXd P_kernel = F * U_kernel;
    const Eigen::MatrixXd G = P_image.transpose() * P_kernel;
    Eigen::Index bi = 0, bj = 0;
    const double worst = G.cwiseAbs().maxCoeff(&bi, &bj);
    orth = worst <= kOrthTol * (1.0 + F.squaredNorm());
    if (!orth) {
      Certificate cert;
      cert.kind = CertificateKind::WitnessVector;
      std::ostringstream os;
      os << "projected Gramian image direction with inner product " << worst
         << " against a projected Gramian kernel direction";
      cert.description = os.str();
      cert.vector = (P_image.col(bi) / P_image.col(bi).norm()).cast<std::complex<double>>();
      rep.certificates.push_back(cert);
    }
  }
  rep.orthogonality_ok = orth;
  rep.strong_duality_consistent = (rep.primal_obsv == (rep.dual_ctrb && orth));
  return rep;
}

PencilDualityReport check_pencil_rank_duality(const ObsvTriple& t) {
  PencilDualityReport rep;
  merge_warnings(rep.warnings, t.warnings);
  const int n = t.n();
  const int q = t.C.rows();
  const std::vector<ClusteredEigenvalue> spectrum = eigen_cluster(t.A);
  const int rank_target = numerical_rank(t.F);

  if (t.A.is_exact()) {
    for (const auto& evp : spectrum) {
      PencilDualityPoint pt;
      pt.lambda = evp.lambda;
      const Matrix psi = vstack(exact_pencil(t.A, evp.lambda_exact), t.C);
      pt.rank_pencil = numerical_rank(psi);
      pt.rank_pencil_target = numerical_rank(vstack(psi, t.F));
      pt.rank_target = rank_target;
      pt.rank_target_pencil = numerical_rank(t.F * psi.transpose());
      pt.premise = pt.rank_pencil_target == pt.rank_pencil;
      pt.conclusion = pt.rank_target_pencil == pt.rank_target;
      pt.ok = !pt.premise || pt.conclusion;
      rep.all_ok = rep.all_ok && pt.ok;
      rep.points.push_back(pt);
    }
    return rep;
  }

  const double tol = t.A.field().rank_tolerance;
  const Eigen::MatrixXcd A = t.A.dense().cast<std::complex<double>>();
  const Eigen::MatrixXcd C = t.C.dense().cast<std::complex<double>>();
  const Eigen::MatrixXcd F = t.F.dense().cast<std::complex<double>>();
  for (const auto& evp : spectrum) {
    PencilDualityPoint pt;
    pt.lambda = evp.lambda;
    Eigen::MatrixXcd psi(n + q, n);
    psi.topRows(n) = pt.lambda * Eigen::MatrixXcd::Identity(n, n) - A;
    psi.bottomRows(q) = C;
    Eigen::MatrixXcd stacked(n + q + t.F.rows(), n);
    stacked.topRows(n + q) = psi;
    stacked.bottomRows(t.F.rows()) = F;
    const StackedRankPair pair = stacked_pencil_ranks(stacked, n + q, tol);
    pt.rank_pencil = pair.rank_base;
    pt.rank_pencil_target = pair.rank_extended;
    pt.rank_target = rank_target;
    pt.rank_target_pencil = pencil_rank(F * psi.transpose(), tol);
    pt.premise = pt.rank_pencil_target == pt.rank_pencil;
    pt.conclusion = pt.rank_target_pencil == pt.rank_target;
    pt.ok = !pt.premise || pt.conclusion;
    rep.all_ok = rep.all_ok && pt.ok;
    rep.points.push_back(pt);
  }
  return rep;
}

StructuralDualityReport check_structural_duality_conditions(const ObsvTriple& t) {
  StructuralDualityReport rep;
  merge_warnings(rep.warnings, t.warnings);
  const Eigen::MatrixXd A = t.A.to_dense();
  const Eigen::MatrixXd C = t.C.to_dense();
  const Eigen::MatrixXd F = t.F.to_dense();

  const double comm = (A * A.transpose() - A.transpose() * A).norm();
  rep.normal_A = comm <= kNormalTol * (1.0 + A.squaredNorm());

  if (rep.normal_A) {
    // For a normal matrix the Schur basis is a unitary eigenvector basis.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<std::complex<double>>(), true);
    if (schur.info() != Eigen::Success) throw std::runtime_error("schur decomposition failed");
    const Eigen::MatrixXcd CQ = C.cast<std::complex<double>>() * schur.matrixU();
    bool orth = true;
    for (int i = 0; i < CQ.cols() && orth; ++i)
      for (int j = i + 1; j < CQ.cols() && orth; ++j) {
        const double g = std::abs(CQ.col(i).dot(CQ.col(j)));
        const double scale = std::sqrt(CQ.col(i).squaredNorm() * CQ.col(j).squaredNorm());
        if (g > kOrthTol * (1.0 + scale)) orth = false;
      }
    rep.orthogonal_modal_output_columns = orth;
  }

  const std::vector<ClusteredEigenvalue> spectrum = eigen_cluster(t.A);
  const Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
  bool rows_ok = true;
  for (int i = 0; i < F.rows() && rows_ok; ++i) {
    const Eigen::VectorXcd f = F.row(i).transpose().cast<std::complex<double>>();
    const double nf = f.norm();
    if (nf == 0.0) continue;
    bool inside = false;
    for (const auto& evp : spectrum) {
      const double res = (Ac * f - evp.lambda * f).norm();
      if (res <= kOrthTol * (1.0 + std::abs(evp.lambda)) * nf) {
        inside = true;
        break;
      }
    }
    rows_ok = inside;
  }
  rep.target_rows_in_eigenspaces = rows_ok;

  rep.applicable = rep.normal_A && rep.orthogonal_modal_output_columns && rows_ok;
  if (rep.applicable) {
    rep.primal_obsv = test_functional_obsv_kalman(t).verdict;
    rep.dual_ctrb = test_output_ctrb_kalman(dualize(t)).verdict;
    if (*rep.primal_obsv != *rep.dual_ctrb)
      rep.warnings.push_back(
          "structural conditions hold but the primal and transposed verdicts differ; a "
          "target row inside a repeated eigenvalue's eigenspace can mix reconstructible "
          "and unreconstructible directions");
  }
  return rep;
}

}  // namespace functal
