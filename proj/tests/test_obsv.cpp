#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "functal/ctrb.hpp"
#include "functal/errors.hpp"
#include "functal/obsv.hpp"
#include "functal/system_file.hpp"
#include "support/helpers.hpp"

using namespace functal;

namespace {

ObsvTriple fixture_triple(const std::string& name) {
  const SystemFile sf = load_system_file(testsupport::fixture_path(name));
  REQUIRE(sf.C.has_value());
  return ObsvTriple::make(*sf.C, sf.A, sf.F);
}

ObsvTriple lifted(const ObsvTriple& t) {
  return ObsvTriple::make(t.C.lift(), t.A.lift(), t.F.lift());
}

Signal output_of(const ObsvTriple& t, const Matrix& B, const Eigen::VectorXd& x0, const Signal& u,
                 double t1) {
  const Signal x = simulate_lti(t.A, B, x0, u, t1);
  Signal y;
  y.t1 = t1;
  y.values = t.C.to_dense() * x.values;
  return y;
}

}  // namespace

TEST_CASE("interior target on the chain: image-space and stacked tests reject, pencil diverges") {
  const ObsvTriple t = fixture_triple("obsv_chain_mid.json");

  const ObsvReport kal = test_functional_obsv_kalman(t);
  CHECK_FALSE(kal.verdict);
  CHECK(kal.ranks.at("obsv") == 1);
  CHECK(kal.ranks.at("stacked") == 2);
  REQUIRE(kal.certificate.has_value());
  CHECK(kal.certificate->kind == CertificateKind::WitnessRow);

  const ObsvReport st = test_functional_obsv_stacked(t);
  CHECK_FALSE(st.verdict);
  CHECK(st.ranks.at("obsv") == 1);

  const ObsvReport pbh = test_functional_obsv_pbh(t);
  REQUIRE(pbh.points.size() == 1);
  CHECK(pbh.points[0].lambda == std::complex<double>(0.0, 0.0));
  CHECK(pbh.points[0].ok);       // the rank equality holds at lambda = 0 ...
  CHECK(pbh.verdict);            // ... so the rank clause alone would accept ...
  REQUIRE(pbh.assumption_ok.has_value());
  CHECK_FALSE(*pbh.assumption_ok);  // ... but the sufficiency gate is violated.
  bool warned = false;
  for (const auto& w : pbh.warnings)
    if (w.find("necessary-only") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("head target on the chain: all three routes reject conclusively") {
  const ObsvTriple t = fixture_triple("obsv_chain_head.json");
  const ObsvReport kal = test_functional_obsv_kalman(t);
  CHECK_FALSE(kal.verdict);
  const ObsvReport pbh = test_functional_obsv_pbh(t);
  CHECK_FALSE(pbh.verdict);
  REQUIRE(pbh.assumption_ok.has_value());
  CHECK(*pbh.assumption_ok);
  REQUIRE(pbh.certificate.has_value());
  CHECK(pbh.certificate->kind == CertificateKind::FailingEigenvalue);
  CHECK(std::abs(pbh.certificate->eigenvalue) <= 1e-12);
  CHECK_FALSE(test_functional_obsv_stacked(t).verdict);
}

TEST_CASE("tail target equals the measurement: observable, assumption still violated") {
  const ObsvTriple t = fixture_triple("obsv_chain_tail.json");
  CHECK(test_functional_obsv_kalman(t).verdict);
  CHECK(test_functional_obsv_stacked(t).verdict);
  const ObsvReport pbh = test_functional_obsv_pbh(t);
  CHECK(pbh.verdict);  // necessity direction: a true property keeps the clause true
  REQUIRE(pbh.assumption_ok.has_value());
  CHECK_FALSE(*pbh.assumption_ok);
}

TEST_CASE("float backend agrees with the exact backend on the chain fixtures") {
  for (const char* name : {"obsv_chain_mid.json", "obsv_chain_head.json", "obsv_chain_tail.json"}) {
    const ObsvTriple te = fixture_triple(name);
    const ObsvTriple tf = lifted(te);
    CHECK(test_functional_obsv_kalman(te).verdict == test_functional_obsv_kalman(tf).verdict);
    CHECK(test_functional_obsv_stacked(te).verdict == test_functional_obsv_stacked(tf).verdict);
    const ObsvReport pe = test_functional_obsv_pbh(te);
    const ObsvReport pf = test_functional_obsv_pbh(tf);
    CHECK(pe.verdict == pf.verdict);
    CHECK(*pe.assumption_ok == *pf.assumption_ok);
  }
}

TEST_CASE("dependent target rows are reduced with a recorded warning") {
  const Matrix A = Matrix::exact_from_rows({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const Matrix C = Matrix::exact_from_rows({{0, 0, 1}});
  const Matrix F = Matrix::exact_from_rows({{1, 0, 0}, {2, 0, 0}, {0, 1, 0}});
  const ObsvTriple t = ObsvTriple::make(C, A, F);
  CHECK(t.F.rows() == 2);
  CHECK(t.kept_rows == std::vector<int>{0, 2});
  CHECK_FALSE(t.warnings.empty());

  CHECK_THROWS_AS(ObsvTriple::make(C, Matrix::exact_from_rows({{1, 2}}), F),
                  std::invalid_argument);
  CHECK_THROWS_AS(ObsvTriple::make(C.lift(), A, F), std::invalid_argument);
}

TEST_CASE("canonical decomposition splits the target across the observability boundary") {
  const ObsvTriple mid = fixture_triple("obsv_chain_mid.json");
  const CanonicalObsvDecomposition dec =
      canonical_obsv_decomposition(mid.C, mid.A, mid.F);
  CHECK(dec.n_o == 1);
  CHECK(dec.F_u.frobenius_norm() > 0.5);  // unreachable part of the target is visible
  // Block triangularity: unobservable coordinates never feed observable ones,
  // so the top-right block of Q A Q' vanishes.
  const Eigen::MatrixXd Abar = dec.Q.dense() * mid.A.to_dense() * dec.Q.dense().transpose();
  CHECK(Abar.topRightCorner(1, 2).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((Abar.bottomLeftCorner(2, 1) - dec.A_12.to_dense()).cwiseAbs().maxCoeff() <= 1e-12);

  const ObsvTriple tail = fixture_triple("obsv_chain_tail.json");
  const CanonicalObsvDecomposition dec2 =
      canonical_obsv_decomposition(tail.C, tail.A, tail.F);
  CHECK(dec2.n_o == 1);
  CHECK(dec2.F_u.frobenius_norm() <= 1e-12);  // observable target has no hidden part
}

TEST_CASE("target reconstruction from free response on the chain") {
  const ObsvTriple t = fixture_triple("obsv_chain_tail.json");
  const Matrix B = Matrix::zeros(3, 1);
  const double t1 = 1.0;
  const Signal u = Signal::zero(1, 2048, t1);
  Eigen::VectorXd x0(3);
  x0 << 0.3, -1.2, 0.7;
  const Signal y = output_of(t, B, x0, u, t1);
  const ReconstructionResult res = reconstruct_target(t, B, u, y, t1);
  REQUIRE(res.z0.size() == 1);
  CHECK(std::abs(res.z0(0) - 0.7) <= 1e-9);
  CHECK(res.gramian_residual <= 1e-9);
}

TEST_CASE("target reconstruction subtracts the forced response") {
  // Input drives the measured state directly, so ignoring it would corrupt z0.
  const Matrix A = Matrix::from_rows({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const Matrix C = Matrix::from_rows({{0, 0, 1}});
  const Matrix F = Matrix::from_rows({{0, 0, 1}});
  const Matrix B = Matrix::from_rows({{0}, {0}, {1}});
  const ObsvTriple t = ObsvTriple::make(C, A, F);
  const double t1 = 1.0;
  const int samples = 2048;
  Signal u = Signal::zero(1, samples, t1);
  for (int k = 0; k < samples; ++k)
    u.values(0, k) = std::sin(2.0 * M_PI * u.time_at(k));
  Eigen::VectorXd x0(3);
  x0 << 0.1, 0.4, -0.9;
  const Signal y = output_of(t, B, x0, u, t1);
  const ReconstructionResult res = reconstruct_target(t, B, u, y, t1);
  CHECK(std::abs(res.z0(0) - (-0.9)) <= 1e-6);
}

TEST_CASE("reconstruction rejects bad grids and unobservable targets") {
  const ObsvTriple t = fixture_triple("obsv_chain_tail.json");
  const Matrix B = Matrix::zeros(3, 1);
  const Signal ok_u = Signal::zero(1, 64, 1.0);
  const Signal ok_y = Signal::zero(1, 64, 1.0);
  CHECK_THROWS_AS(reconstruct_target(t, B, Signal::zero(1, 32, 1.0), ok_y, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(reconstruct_target(t, B, ok_u, Signal::zero(1, 64, 2.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(reconstruct_target(t, B, Signal::zero(1, 8, 1.0), Signal::zero(1, 8, 1.0), 1.0),
                  std::invalid_argument);

  const ObsvTriple mid = fixture_triple("obsv_chain_mid.json");
  CHECK_THROWS_AS(reconstruct_target(mid, B, ok_u, ok_y, 1.0), NotFunctionallyObservableError);
}

TEST_CASE("detectability accepts stable hidden targets and rejects marginal ones") {
  // Hidden mode at -1 is stable: the target on it is detectable, not observable.
  const Matrix A1 = Matrix::from_rows({{-1, 0}, {0, 1}});
  const Matrix C1 = Matrix::from_rows({{0, 1}});
  const Matrix F1 = Matrix::from_rows({{1, 0}});
  const ObsvTriple t1 = ObsvTriple::make(C1, A1, F1);
  CHECK_FALSE(test_functional_obsv_kalman(t1).verdict);
  CHECK_FALSE(test_functional_obsv_pbh(t1).verdict);
  const ObsvReport det1 = test_functional_detectability(t1);
  CHECK(det1.verdict);
  REQUIRE(det1.points.size() == 1);  // only the unstable eigenvalue is swept
  CHECK(std::abs(det1.points[0].lambda.real() - 1.0) <= 1e-9);

  // Hidden mode at 0 is not asymptotically stable: not detectable.
  const Matrix A2 = Matrix::from_rows({{0, 0}, {0, -1}});
  const ObsvTriple t2 = ObsvTriple::make(C1, A2, F1);
  CHECK_FALSE(test_functional_detectability(t2).verdict);

  // Observability implies detectability.
  const ObsvTriple tail = fixture_triple("obsv_chain_tail.json");
  CHECK(test_functional_detectability(tail).verdict);
}
