#include "functal/obsv.hpp"

#include <cmath>
#include <sstream>

#include "functal/errors.hpp"
#include "functal/gramian.hpp"
#include "functal/linalg.hpp"

namespace functal {
namespace {

double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
}

std::string necessary_only_warning() {
  return "lead columns of the target in Jordan coordinates are dependent within a group; "
         "the eigenvalue test is necessary-only and a passing verdict is not authoritative";
}

// Shared pencil sweep for the full test and the detectability restriction.
ObsvReport pbh_core(const ObsvTriple& t, const JordanForm& jf, bool unstable_only) {
  ObsvReport rep;
  rep.method = ObsvMethod::Pbh;
  rep.warnings = t.warnings;
  const bool exact = t.A.is_exact();
  const int n = t.n();

  const LeadColumnCheck gate = lead_columns_independent(jf, t.F);
  rep.assumption_ok = gate.all_ok;
  if (!gate.all_ok) rep.warnings.push_back(necessary_only_warning());

  double margin = 0.0;
  if (!exact && unstable_only)
    margin = t.A.field().resolved_eig_cluster_tolerance() * (1.0 + spectral_norm(t.A.dense()));

  const double override_tol = t.A.field().rank_tolerance;
  bool all_ok = true;
  for (const auto& g : jf.groups) {
    if (unstable_only) {
      if (exact && g.lambda_exact < 0) continue;
      if (!exact && g.lambda.real() < -margin) continue;
    }
    PencilPoint pt;
    pt.lambda = g.lambda;
    if (exact) {
      Matrix pencil = t.A.scaled(Rational(-1));
      for (int i = 0; i < n; ++i) pencil.r(i, i) += g.lambda_exact;
      const Matrix base = vstack(pencil, t.C);
      pt.rank_base = numerical_rank(base);
      pt.rank_extended = numerical_rank(vstack(base, t.F));
    } else {
      const Eigen::MatrixXcd pencil =
          g.lambda * Eigen::MatrixXcd::Identity(n, n) - t.A.dense().cast<std::complex<double>>();
      Eigen::MatrixXcd ext(n + t.C.rows() + t.F.rows(), n);
      ext.topRows(n) = pencil;
      ext.middleRows(n, t.C.rows()) = t.C.dense().cast<std::complex<double>>();
      ext.bottomRows(t.F.rows()) = t.F.dense().cast<std::complex<double>>();
      const StackedRankPair pair = stacked_pencil_ranks(ext, n + t.C.rows(), override_tol);
      pt.rank_base = pair.rank_base;
      pt.rank_extended = pair.rank_extended;
    }
    pt.ok = pt.rank_extended == pt.rank_base;
    if (!pt.ok && all_ok) {
      all_ok = false;
      Certificate cert;
      cert.kind = CertificateKind::FailingEigenvalue;
      cert.eigenvalue = g.lambda;
      std::ostringstream os;
      os << "rank of the stacked pencil with the target rows exceeds the base pencil rank at "
            "lambda = ("
         << g.lambda.real() << ", " << g.lambda.imag() << ")";
      cert.description = os.str();
      rep.certificate = cert;
    }
    rep.points.push_back(pt);
  }
  rep.verdict = all_ok;
  return rep;
}

}  // namespace

ObsvTriple ObsvTriple::make(Matrix C, Matrix A, Matrix F) {
  if (A.rows() != A.cols()) throw std::invalid_argument("state matrix must be square");
  if (C.cols() != A.rows()) throw std::invalid_argument("measurement matrix width mismatch");
  if (F.cols() != A.rows()) throw std::invalid_argument("target matrix width mismatch");
  if (C.rows() == 0) throw std::invalid_argument("measurement matrix needs at least one row");
  if (F.rows() == 0) throw std::invalid_argument("target matrix needs at least one row");
  if (!same_kind(C.field(), A.field()) || !same_kind(F.field(), A.field()))
    throw std::invalid_argument("mixed scalar backends in a triple");

  ObsvTriple t;
  t.A = std::move(A);
  t.C = std::move(C);
  RowBasis basis = independent_rows(F);
  if (static_cast<int>(basis.kept.size()) < F.rows()) {
    std::ostringstream os;
    os << "target matrix rows reduced from " << F.rows() << " to " << basis.kept.size()
       << " (dependent target rows are recoverable from the kept ones)";
    t.warnings.push_back(os.str());
    t.F = std::move(basis.matrix);
  } else {
    t.F = std::move(F);
  }
  t.kept_rows = std::move(basis.kept);
  return t;
}

ObsvReport test_functional_obsv_kalman(const ObsvTriple& t) {
  ObsvReport rep;
  rep.method = ObsvMethod::Kalman;
  rep.warnings = t.warnings;
  const Matrix O = obsv_matrix(t.C, t.A);
  const int rank_O = numerical_rank(O);
  const int rank_stacked = numerical_rank(vstack(O, t.F));
  rep.ranks["obsv"] = rank_O;
  rep.ranks["stacked"] = rank_stacked;
  rep.verdict = rank_stacked == rank_O;
  if (!rep.verdict) {
    for (int i = 0; i < t.F.rows(); ++i) {
      if (numerical_rank(vstack(O, t.F.row(i))) == rank_O) continue;
      Certificate cert;
      cert.kind = CertificateKind::WitnessRow;
      cert.row_index = i;
      cert.vector = t.F.row(i).to_dense().transpose().cast<std::complex<double>>();
      std::ostringstream os;
      os << "target row " << i << " lies outside the observability row space";
      cert.description = os.str();
      rep.certificate = cert;
      break;
    }
  }
  return rep;
}

ObsvReport test_functional_obsv_stacked(const ObsvTriple& t) {
  ObsvReport rep;
  rep.method = ObsvMethod::Stacked;
  rep.warnings = t.warnings;
  const Matrix OC = obsv_matrix(t.C, t.A);
  const Matrix OF = obsv_matrix(t.F, t.A);
  const int rank_O = numerical_rank(OC);
  const int rank_stacked = numerical_rank(vstack(OC, OF));
  rep.ranks["obsv"] = rank_O;
  rep.ranks["stacked"] = rank_stacked;
  rep.verdict = rank_stacked == rank_O;
  if (!rep.verdict) {
    for (int i = 0; i < OF.rows(); ++i) {
      if (numerical_rank(vstack(OC, OF.row(i))) == rank_O) continue;
      Certificate cert;
      cert.kind = CertificateKind::WitnessRow;
      cert.row_index = i;
      cert.vector = OF.row(i).to_dense().transpose().cast<std::complex<double>>();
      std::ostringstream os;
      os << "row " << i << " of the target observability stack lies outside the "
            "measurement observability row space";
      cert.description = os.str();
      rep.certificate = cert;
      break;
    }
  }
  return rep;
}

ObsvReport test_functional_obsv_pbh(const ObsvTriple& t) {
  return pbh_core(t, jordan_decompose(t.A), false);
}

ObsvReport test_functional_obsv_pbh(const ObsvTriple& t, const JordanForm& jf) {
  return pbh_core(t, jf, false);
}

ObsvReport test_functional_detectability(const ObsvTriple& t) {
  return pbh_core(t, jordan_decompose(t.A), true);
}

ObsvReport test_functional_detectability(const ObsvTriple& t, const JordanForm& jf) {
  return pbh_core(t, jf, true);
}

CanonicalObsvDecomposition canonical_obsv_decomposition(const Matrix& C, const Matrix& A,
                                                        const Matrix& F) {
  const Matrix Af = A.lift();
  const Matrix Cf = C.lift();
  const Matrix Ff = F.lift();
  const int n = Af.rows();
  const Matrix O = obsv_matrix(Cf, Af);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(O.dense(), Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double override_tol = A.field().rank_tolerance;
  const double cut = override_tol > 0.0
                         ? override_tol
                         : std::max(O.rows(), O.cols()) *
                               std::numeric_limits<double>::epsilon() *
                               (sv.size() > 0 ? sv(0) : 0.0);
  int n_o = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++n_o;

  const Eigen::MatrixXd Q = svd.matrixV().transpose();
  const Eigen::MatrixXd Abar = Q * Af.dense() * Q.transpose();
  const Eigen::MatrixXd Cbar = Cf.dense() * Q.transpose();
  const Eigen::MatrixXd Fbar = Ff.dense() * Q.transpose();

  CanonicalObsvDecomposition out;
  out.n_o = n_o;
  out.Q = Matrix::from_dense(Q);
  out.A_o = Matrix::from_dense(Abar.topLeftCorner(n_o, n_o));
  out.A_12 = Matrix::from_dense(Abar.bottomLeftCorner(n - n_o, n_o));
  out.A_u = Matrix::from_dense(Abar.bottomRightCorner(n - n_o, n - n_o));
  out.C_o = Matrix::from_dense(Cbar.leftCols(n_o));
  out.F_o = Matrix::from_dense(Fbar.leftCols(n_o));
  out.F_u = Matrix::from_dense(Fbar.rightCols(n - n_o));
  return out;
}

ReconstructionResult reconstruct_target(const ObsvTriple& t, const Matrix& B, const Signal& u,
                                        const Signal& y, double t1) {
  const int n = t.n();
  if (!(t1 > 0.0)) throw std::invalid_argument("reconstruction horizon must be positive");
  if (B.rows() != n) throw std::invalid_argument("input matrix height mismatch");
  if (y.dim() != t.C.rows()) throw std::invalid_argument("output signal dimension mismatch");
  if (u.dim() != B.cols()) throw std::invalid_argument("input signal dimension mismatch");
  if (y.samples() != u.samples())
    throw std::invalid_argument("input and output signals must share one grid");
  if (y.samples() < 16)
    throw std::invalid_argument("reconstruction grid too coarse (need at least 16 samples)");
  const double grid_tol = 1e-9 * std::max(1.0, t1);
  if (std::fabs(y.t1 - t1) > grid_tol || std::fabs(u.t1 - t1) > grid_tol)
    throw std::invalid_argument("signal horizon does not match the requested horizon");

  const ObsvReport kal = test_functional_obsv_kalman(t);
  if (!kal.verdict) {
    std::string detail = kal.certificate ? "; " + kal.certificate->description : "";
    throw NotFunctionallyObservableError(
        "target reconstruction requires functional observability" + detail);
  }

  const Eigen::MatrixXd Ad = t.A.to_dense();
  const Eigen::MatrixXd Cd = t.C.to_dense();
  const Eigen::MatrixXd Fd = t.F.to_dense();
  const Eigen::MatrixXd Bd = B.to_dense();

  const int N = y.samples();
  const double dt = y.dt();
  const Eigen::MatrixXd E = matrix_exponential(Ad, dt);
  const Eigen::MatrixXd Et = E.transpose();

  // h(t) = y(t) - C * (forced state response); the target part of y survives.
  Eigen::MatrixXd H = y.values;
  const bool driven = u.values.size() > 0 && u.values.cwiseAbs().maxCoeff() > 0.0;
  if (driven) {
    Eigen::VectorXd xu = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < N; ++k) {
      if (k > 0)
        xu = E * xu + 0.5 * dt * (E * (Bd * u.values.col(k - 1)) + Bd * u.values.col(k));
      H.col(k) -= Cd * xu;
    }
  }

  // integral of e^(A't) C' h(t) dt, trapezoid on the grid.
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < N; ++k) {
    const double w = (k == 0 || k == N - 1) ? 0.5 * dt : dt;
    acc += w * (Phi * (Cd.transpose() * H.col(k)));
    Phi = Et * Phi;
  }

  const Eigen::MatrixXd Wo = finite_horizon_gramian(Ad, Cd, t1, GramianSide::Observability);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Wo, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = n * std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  const Eigen::MatrixXd Wo_pinv =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();

  ReconstructionResult out;
  out.warnings = kal.warnings;
  out.G = Fd * Wo_pinv;
  out.gramian_residual = (out.G * Wo - Fd).norm();
  if (out.gramian_residual > 1e-8 * std::max(Fd.norm(), 1e-300)) {
    std::ostringstream os;
    os << "Gramian solve residual " << out.gramian_residual
       << " exceeds 1e-8 * ||F||; the target is only marginally observable at this horizon";
    out.warnings.push_back(os.str());
  }
  out.z0 = out.G * acc;
  return out;
}

}  // namespace functal
