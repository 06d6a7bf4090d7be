// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Criteria 1-3 pin the worked-example fixtures exactly; 4-7 are equivalence
// sweeps over generated systems; 8-9 are quantitative Gramian pipelines;
// 10 exercises the canonical-form machinery. Target runtime: well under a
// minute single-threaded.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "functal/ctrb.hpp"
#include "functal/duality.hpp"
#include "functal/errors.hpp"
#include "functal/generate.hpp"
#include "functal/gramian.hpp"
#include "functal/jordan.hpp"
#include "functal/linalg.hpp"
#include "functal/obsv.hpp"
#include "functal/system_file.hpp"
#include "support/helpers.hpp"

using namespace functal;

namespace {

std::ostringstream detail;

ObsvTriple obsv_fixture(const std::string& name) {
  const SystemFile sf = load_system_file(testsupport::fixture_path(name));
  return ObsvTriple::make(*sf.C, sf.A, sf.F);
}

CtrbTriple ctrb_fixture(const std::string& name) {
  const SystemFile sf = load_system_file(testsupport::fixture_path(name));
  return CtrbTriple::make(sf.A, *sf.B, sf.F);
}

bool expect(bool ok, const std::string& what) {
  if (!ok) detail << "    failed: " << what << "\n";
  return ok;
}

// ---------------------------------------------------------------------------

bool criterion1_observability_fixture() {
  bool ok = true;
  const ObsvTriple t = obsv_fixture("obsv_chain_mid.json");

  const ObsvReport kal = test_functional_obsv_kalman(t);
  ok &= expect(!kal.verdict, "image-space verdict must be false");
  ok &= expect(kal.ranks.at("stacked") == 2, "stacked rank must be 2");
  ok &= expect(kal.ranks.at("obsv") == 1, "observability rank must be 1");

  const ObsvReport st = test_functional_obsv_stacked(t);
  ok &= expect(st.verdict == kal.verdict, "stacked test must agree");

  const ObsvReport pbh = test_functional_obsv_pbh(t);
  ok &= expect(pbh.points.size() == 1, "single spectrum point expected");
  ok &= expect(pbh.points[0].lambda == std::complex<double>(0.0, 0.0), "lambda must be 0");
  ok &= expect(pbh.points[0].ok, "pencil rank equality must hold at lambda = 0");
  ok &= expect(pbh.assumption_ok.has_value() && !*pbh.assumption_ok,
               "assumption_ok must be false");
  ok &= expect(pbh.verdict && !kal.verdict,
               "the rank clause alone must accept while the image-space test rejects");
  return ok;
}

bool criterion2_controllability_fixture() {
  bool ok = true;
  const CtrbTriple t = ctrb_fixture("ctrb_chain_mid.json");

  const CtrbReport kal = test_output_ctrb_kalman(t);
  ok &= expect(!kal.verdict, "image-space verdict must be false");
  ok &= expect(kal.ranks.at("F_ctrb") == 0, "F * ctrb must vanish");

  const CtrbReport pbh = test_output_ctrb_pbh(t);
  ok &= expect(pbh.points.size() == 1 && pbh.points[0].ok,
               "product pencil clause must pass at lambda = 0");
  // The product row itself: F [0 I - A, B] = [0, 0, -1, 0] up to the pencil sign.
  Eigen::RowVectorXd row(4);
  row.head(3) = -(t.F.to_dense() * t.A.to_dense());
  row(3) = (t.F.to_dense() * t.B.to_dense())(0, 0);
  Eigen::RowVectorXd want(4);
  want << 0, 0, 1, 0;
  ok &= expect((row.cwiseAbs() - want).cwiseAbs().maxCoeff() == 0.0,
               "pencil row must equal [0,0,1,0] in absolute value");
  ok &= expect(pbh.intersection_nonempty.has_value() && !*pbh.intersection_nonempty,
               "no eigenspace witness may exist");
  ok &= expect(!eigenspace_intersection_witness(t).has_value(), "witness must be absent");
  ok &= expect(!pbh.verdict, "eigenvalue-route verdict must be false");
  return ok;
}

bool criterion3_duality_fixture() {
  bool ok = true;
  const ObsvTriple t = obsv_fixture("duality_chain_sum.json");
  const DualityReport rep = check_strong_duality(t, 1.0);
  ok &= expect(!rep.primal_obsv, "primal functional observability must be false");
  ok &= expect(rep.dual_ctrb, "dual output controllability must be true");
  ok &= expect(rep.orthogonality_ok.has_value() && !*rep.orthogonality_ok,
               "orthogonality_ok must be false");
  ok &= expect(rep.strong_duality_consistent.has_value() && *rep.strong_duality_consistent,
               "strong duality must be consistent");
  return ok;
}

bool criterion4_theorem1_sweep() {
  const EnsureProperty modes[] = {EnsureProperty::None, EnsureProperty::Obsv,
                                  EnsureProperty::NotObsv, EnsureProperty::AssumptionFail};
  int total = 0, assumption_held = 0, assumption_broken = 0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    const GeneratorOptions opt = testsupport::sweep_options(k, modes[k % 4], 3, 8);
    const GeneratedSystem sys = generate_system(opt);
    const ObsvTriple t = ObsvTriple::make(sys.C, sys.A, sys.F);
    const ObsvReport kal = test_functional_obsv_kalman(t);
    const ObsvReport st = test_functional_obsv_stacked(t);
    const ObsvReport pbh = test_functional_obsv_pbh(t);
    if (!expect(kal.verdict == st.verdict, "statement 2 vs 3 mismatch at k=" + std::to_string(k)))
      return false;
    if (*pbh.assumption_ok) {
      ++assumption_held;
      if (!expect(pbh.verdict == kal.verdict,
                  "statement 2 vs 4 mismatch under the assumption at k=" + std::to_string(k)))
        return false;
    } else {
      ++assumption_broken;
    }
    if (kal.verdict &&
        !expect(pbh.verdict, "necessity of statement 4 violated at k=" + std::to_string(k)))
      return false;
    ++total;
  }
  bool ok = expect(total >= 500, "sweep too small");
  ok &= expect(assumption_held >= 100, "too few assumption-satisfying draws");
  ok &= expect(assumption_broken >= 100, "too few assumption-violating draws");
  return ok;
}

bool criterion5_theorem2_sweep() {
  const EnsureProperty modes[] = {EnsureProperty::None, EnsureProperty::Ctrb,
                                  EnsureProperty::NotCtrb};
  int total = 0, deficient = 0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    const GeneratorOptions opt = testsupport::sweep_options(k ^ 0xC0FFEE, modes[k % 3], 3, 8);
    const GeneratedSystem sys = generate_system(opt);
    const CtrbTriple t = CtrbTriple::make(sys.A, sys.B, sys.F);
    const CtrbReport kal = test_output_ctrb_kalman(t);
    const CtrbReport pbh = test_output_ctrb_pbh(t);
    if (!expect(kal.verdict == pbh.verdict,
                "condition 1 vs eigenvalue route mismatch at k=" + std::to_string(k)))
      return false;
    if (!pbh.full_state_controllable) {
      ++deficient;
      const auto w = uncontrollable_eigenvector(t.A, t.B);
      if (!expect(w.has_value(), "missing uncontrollable eigenvector at k=" + std::to_string(k)))
        return false;
      const Eigen::MatrixXcd At = t.A.to_dense().transpose().cast<std::complex<double>>();
      const Eigen::MatrixXcd Ct =
          ctrb_matrix(t.A, t.B).to_dense().transpose().cast<std::complex<double>>();
      const double scale = 1.0 + t.A.to_dense().norm();
      const bool is_eigvec = (At * w->vector - w->lambda * w->vector).norm() <= 1e-6 * scale;
      const bool in_kernel = (Ct * w->vector).norm() <= 1e-6 * (1.0 + Ct.norm());
      if (!expect(is_eigvec && in_kernel,
                  "eigenvector-in-kernel property violated at k=" + std::to_string(k)))
        return false;
    }
    ++total;
  }
  bool ok = expect(total >= 500, "sweep too small");
  ok &= expect(deficient >= 100, "too few non-full-state-controllable draws");
  return ok;
}

bool criterion6_corollary_sweeps() {
  int total = 0;

  // Observability side: random diagonalizable draws (distinct spectra) plus
  // explicit semisimple structures with repeated eigenvalues.
  const EnsureProperty omodes[] = {EnsureProperty::None, EnsureProperty::Obsv,
                                   EnsureProperty::NotObsv};
  for (std::uint64_t k = 0; k < 75; ++k) {
    GeneratorOptions opt = testsupport::sweep_options(k ^ 0xD1A6, omodes[k % 3], 3, 7);
    opt.force_diagonalizable = true;
    const GeneratedSystem sys = generate_system(opt);
    const ObsvTriple t = ObsvTriple::make(sys.C, sys.A, sys.F);
    if (!expect(test_functional_obsv_pbh(t).verdict == test_functional_obsv_kalman(t).verdict,
                "diagonalizable observability mismatch at k=" + std::to_string(k)))
      return false;
    ++total;
  }
  const char* semisimple_specs[] = {"0.5:[1,1];-1:[1]", "1:[1,1,1];0:[1]",
                                    "-0.5:[1,1];0.25:[1,1]"};
  for (std::uint64_t k = 0; k < 75; ++k) {
    GeneratorOptions opt = testsupport::sweep_options(k ^ 0x5E11, omodes[k % 3], 3, 7);
    opt.structure = parse_jordan_spec(semisimple_specs[k % 3]);
    int n = 0;
    for (const auto& g : opt.structure) n += g.multiplicity();
    opt.n = n;
    opt.force_diagonalizable = false;
    const GeneratedSystem sys = generate_system(opt);
    const ObsvTriple t = ObsvTriple::make(sys.C, sys.A, sys.F);
    if (!expect(test_functional_obsv_pbh(t).verdict == test_functional_obsv_kalman(t).verdict,
                "repeated semisimple observability mismatch at k=" + std::to_string(k)))
      return false;
    ++total;
  }

  // Controllability side, inside the provable zone: generic inputs are
  // full-state controllable; deliberate deficiencies concentrate in a single
  // eigenvalue of multiplicity one, where the bare product clause is exact.
  const EnsureProperty cmodes[] = {EnsureProperty::Ctrb, EnsureProperty::NotCtrb,
                                   EnsureProperty::None};
  for (std::uint64_t k = 0; k < 225; ++k) {
    GeneratorOptions opt = testsupport::sweep_options(k ^ 0xBEAD, cmodes[k % 3], 3, 7);
    opt.force_diagonalizable = true;
    const GeneratedSystem sys = generate_system(opt);
    const CtrbTriple t = CtrbTriple::make(sys.A, sys.B, sys.F);
    const CtrbReport pbh = test_output_ctrb_pbh(t);
    bool bare_clause = true;
    for (const auto& pt : pbh.points) bare_clause &= pt.ok;
    if (!expect(bare_clause == test_output_ctrb_kalman(t).verdict,
                "diagonalizable controllability mismatch at k=" + std::to_string(k)))
      return false;
    ++total;
  }
  return expect(total >= 300, "sweep too small");
}

bool criterion7_duality_sweep() {
  const EnsureProperty modes[] = {EnsureProperty::None, EnsureProperty::Obsv,
                                  EnsureProperty::NotObsv, EnsureProperty::Ctrb,
                                  EnsureProperty::AssumptionFail};
  int total = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const GeneratorOptions opt = testsupport::sweep_options(k ^ 0xD0A1, modes[k % 5], 3, 6);
    const GeneratedSystem sys = generate_system(opt);
    const ObsvTriple t = ObsvTriple::make(sys.C, sys.A, sys.F);
    try {
      (void)check_weak_duality(t);
    } catch (const InternalConsistencyError& e) {
      return expect(false, std::string("weak duality violated at k=") + std::to_string(k) + ": " +
                               e.what());
    }
    for (double t1 : {0.5, 1.0, 2.0}) {
      const DualityReport rep = check_strong_duality(t, t1);
      if (!expect(rep.strong_duality_consistent.has_value() && *rep.strong_duality_consistent,
                  "strong duality inconsistent at k=" + std::to_string(k) +
                      ", t1=" + std::to_string(t1)))
        return false;
    }
    ++total;
  }
  return expect(total >= 1000, "sweep too small");
}

bool criterion8_gramian_reconstruction() {
  std::uint64_t cursor = 0x6A11;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_rel = 0.0, worst_gram = 0.0;
  for (int i = 0; i < 50; ++i) {
    const GeneratedSystem sys = testsupport::draw_tame_obsv_system(cursor);
    const ObsvTriple t = ObsvTriple::make(sys.C, sys.A, sys.F);
    const int n = t.n();
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0(j) = normal(rng);

    const double t1 = 1.0;
    const int samples = 2048;
    const Matrix B = Matrix::zeros(n, 1);
    const Signal u = Signal::zero(1, samples, t1);
    const Signal x = simulate_lti(t.A, B, x0, u, t1);
    Signal y;
    y.t1 = t1;
    y.values = t.C.dense() * x.values;

    const ReconstructionResult res = reconstruct_target(t, B, u, y, t1);
    const Eigen::VectorXd z_true = t.F.dense() * x0;
    const double rel = (res.z0 - z_true).norm() / std::max(1.0, z_true.norm());
    worst_rel = std::max(worst_rel, rel);
    if (!expect(rel <= 1e-6, "reconstruction error " + std::to_string(rel) + " at i=" +
                                 std::to_string(i)))
      return false;

    const Eigen::MatrixXd W =
        finite_horizon_gramian(sys.A.dense(), sys.C.dense(), t1, GramianSide::Observability);
    const Eigen::MatrixXd Q =
        gramian_quadrature(sys.A.dense(), sys.C.dense(), t1, GramianSide::Observability);
    const double gram_rel = (W - Q).norm() / (1.0 + W.norm());
    worst_gram = std::max(worst_gram, gram_rel);
    if (!expect(gram_rel <= 1e-8, "gramian route discrepancy " + std::to_string(gram_rel)))
      return false;
  }
  detail << "    worst reconstruction rel err " << worst_rel << ", worst gramian discrepancy "
         << worst_gram << "\n";
  return true;
}

bool criterion9_min_energy_steering() {
  std::uint64_t cursor = 0x57EE;
  std::mt19937_64 rng(91);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    const GeneratorOptions opt = testsupport::tame_options(cursor++, EnsureProperty::Ctrb);
    const GeneratedSystem sys = generate_system(opt);
    const CtrbTriple t = CtrbTriple::make(sys.A, sys.B, sys.F);
    Eigen::VectorXd x0(t.n());
    for (int j = 0; j < t.n(); ++j) x0(j) = normal(rng);
    Eigen::VectorXd z(t.F.rows());
    for (int j = 0; j < z.size(); ++j) z(j) = normal(rng);

    const double t1 = 1.0;
    SteeringPlan plan;
    try {
      plan = min_energy_steering(t, x0, z, t1, 16384);
    } catch (const SingularProjectionError&) {
      continue;  // ill-conditioned draw; take the next seed
    }
    if (plan.condition_number > 1e4) continue;  // outside the documented test class
    const Signal x = simulate_lti(t.A, t.B, x0, plan.u, t1);
    const Eigen::VectorXd z_end = t.F.dense() * x.values.col(x.samples() - 1);
    const double err = (z_end - z).norm();
    worst = std::max(worst, err / (1.0 + z.norm()));
    if (!expect(err <= 1e-6 * (1.0 + z.norm()),
                "steering endpoint error " + std::to_string(err) + " at i=" + std::to_string(done)))
      return false;
    ++done;
  }
  detail << "    worst normalized endpoint error " << worst << "\n";
  return true;
}

bool criterion10_jordan_module() {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Invariance of the block structure under 100 orthogonal conjugations,
  // with the reconstruction residual gate on every decomposition. All base
  // structures contain at least one block of size >= 2.
  const char* defective_specs[] = {
      "0:[2];-0.5:[1]",          "1:[3]",
      "0.5:[2,1];-1:[1]",        "-0.25:[2,2]",
      "0:[3];1:[2]",             "0.75:[2];-0.5:[2];0.25:[1]",
      "1:[4];0:[2]",             "-1:[3,2]",
      "0.5:[3,1];-0.75:[2]",     "0:[2];0.5:[2];1:[1]"};
  for (int base = 0; base < 10; ++base) {
    GeneratorOptions opt =
        testsupport::sweep_options(0x70AD + base, EnsureProperty::None, 3, 6);
    opt.structure = parse_jordan_spec(defective_specs[base]);
    opt.n = 0;
    for (const auto& g : opt.structure) opt.n += g.multiplicity();
    opt.force_diagonalizable = false;
    const GeneratedSystem sys = generate_system(opt);
    const JordanForm ref = jordan_decompose(sys.A);
    auto signature = [](const JordanForm& jf) {
      std::vector<std::pair<double, std::vector<int>>> sig;
      for (const auto& g : jf.groups)
        sig.emplace_back(std::round(g.lambda.real() * 1e3) / 1e3 +
                             std::round(g.lambda.imag() * 1e3) / 1e6,
                         g.block_sizes);
      std::sort(sig.begin(), sig.end());
      return sig;
    };
    const auto want = signature(ref);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = sys.A.rows();
      Eigen::MatrixXd G(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
      const Eigen::MatrixXd Q =
          Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
      Matrix A2 = Matrix::from_dense(Q * sys.A.dense() * Q.transpose());
      A2.set_tolerances(0.0, sys.A.field().eig_cluster_tolerance);
      const JordanForm jf = jordan_decompose(A2);
      if (!expect(signature(jf) == want,
                  "conjugation changed the block structure at base=" + std::to_string(base)))
        return false;
      const Eigen::MatrixXcd Ad = A2.dense().cast<std::complex<double>>();
      const double resid = (jf.P_inv * jf.J * jf.P - Ad).norm();
      if (!expect(resid <= 1e-8 * (1.0 + A2.frobenius_norm()),
                  "reconstruction residual " + std::to_string(resid)))
        return false;
    }
  }

  // Generalized eigenvector chain relations on 200 randomized block systems.
  for (std::uint64_t k = 0; k < 200; ++k) {
    GeneratorOptions opt =
        testsupport::sweep_options(k ^ 0x10CA1, EnsureProperty::None, 3, 6);
    opt.force_diagonalizable = false;
    const GeneratedSystem sys = generate_system(opt);
    const JordanForm jf = jordan_decompose(sys.A);
    const Eigen::MatrixXcd Ad = sys.A.dense().cast<std::complex<double>>();
    const double resid = (jf.P_inv * jf.J * jf.P - Ad).norm();
    if (!expect(resid <= 1e-8 * (1.0 + sys.A.frobenius_norm()),
                "reconstruction residual " + std::to_string(resid) + " at k=" + std::to_string(k)))
      return false;
    const double scale = 1.0 + sys.A.frobenius_norm();
    for (const auto& g : jf.groups) {
      int col = g.column_begin;
      for (int size : g.block_sizes) {
        for (int j = 0; j < size; ++j, ++col) {
          Eigen::VectorXcd want_col = g.lambda * jf.P_inv.col(col);
          if (j > 0) want_col += jf.P_inv.col(col - 1);
          const double r = (Ad * jf.P_inv.col(col) - want_col).norm();
          if (!expect(r <= 1e-6 * scale,
                      "chain relation residual " + std::to_string(r) + " at k=" +
                          std::to_string(k)))
            return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<bool()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1: interior-target chain fixture, three observability routes", criterion1_observability_fixture},
      {"2: vanishing-product chain fixture, controllability routes", criterion2_controllability_fixture},
      {"3: summed-target chain fixture, strong duality verdicts", criterion3_duality_fixture},
      {"4: observability equivalence sweep (500 systems)", criterion4_theorem1_sweep},
      {"5: controllability equivalence sweep (500 systems)", criterion5_theorem2_sweep},
      {"6: diagonalizable rank-clause sweeps (375 systems)", criterion6_corollary_sweeps},
      {"7: duality sweep (1000 systems, horizons 0.5/1/2)", criterion7_duality_sweep},
      {"8: Gramian reconstruction accuracy (50 systems)", criterion8_gramian_reconstruction},
      {"9: minimum-energy steering accuracy (50 systems)", criterion9_min_energy_steering},
      {"10: canonical-form residuals, invariance, chain relations", criterion10_jordan_module},
  };

  int failures = 0;
  const auto t_start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    detail.str("");
    bool ok = false;
    std::string aborted;
    const auto c_start = std::chrono::steady_clock::now();
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      aborted = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - c_start).count();
    std::printf("[%s] %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.label, secs);
    if (!ok) {
      ++failures;
      if (!aborted.empty()) std::printf("    aborted: %s\n", aborted.c_str());
      const std::string why = detail.str();
      if (!why.empty()) std::fputs(why.c_str(), stdout);
    } else {
      const std::string why = detail.str();
      if (!why.empty()) std::fputs(why.c_str(), stdout);
    }
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
