#include "functal/analyze.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

#include "functal/errors.hpp"
#include "functal/jordan.hpp"

namespace functal {
namespace {

using nlohmann::ordered_json;

void note_disagreement(AnalysisReport& rep, const std::string& what) {
  rep.internal_consistency_ok = false;
  rep.consistency_notes.push_back(what);
}

void record_agreement(AnalysisReport& rep, const std::string& label, bool ok,
                      const std::string& dump) {
  rep.agreement.emplace_back(label, ok);
  if (!ok) note_disagreement(rep, dump);
}

ordered_json certificate_json(const Certificate& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  j["description"] = c.description;
  if (c.kind == CertificateKind::FailingEigenvalue)
    j["eigenvalue"] = {c.eigenvalue.real(), c.eigenvalue.imag()};
  if (c.row_index >= 0) j["row_index"] = c.row_index;
  if (c.vector.size() > 0) {
    ordered_json v = ordered_json::array();
    for (Eigen::Index i = 0; i < c.vector.size(); ++i)
      v.push_back({c.vector(i).real(), c.vector(i).imag()});
    j["vector"] = v;
  }
  return j;
}

ordered_json points_json(const std::vector<PencilPoint>& pts) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : pts) {
    ordered_json j;
    j["lambda"] = {p.lambda.real(), p.lambda.imag()};
    j["rank_base"] = p.rank_base;
    j["rank_extended"] = p.rank_extended;
    j["ok"] = p.ok;
    arr.push_back(j);
  }
  return arr;
}

ordered_json obsv_report_json(const ObsvReport& r) {
  ordered_json j;
  j["verdict"] = r.verdict;
  j["method"] = to_string(r.method);
  j["ranks"] = ordered_json(r.ranks);
  if (r.assumption_ok) j["assumption_ok"] = *r.assumption_ok;
  if (!r.points.empty()) {
    j["points"] = points_json(r.points);
    j["lambda_set"] = "eigenvalues of A (the rank equality holds identically elsewhere)";
  }
  if (r.certificate) j["certificate"] = certificate_json(*r.certificate);
  j["warnings"] = r.warnings;
  return j;
}

ordered_json ctrb_report_json(const CtrbReport& r) {
  ordered_json j;
  j["verdict"] = r.verdict;
  j["method"] = to_string(r.method);
  j["full_state_controllable"] = r.full_state_controllable;
  if (r.intersection_nonempty) j["intersection_nonempty"] = *r.intersection_nonempty;
  j["ranks"] = ordered_json(r.ranks);
  if (!r.points.empty()) {
    j["points"] = points_json(r.points);
    j["lambda_set"] = "eigenvalues of A (the rank equality holds identically elsewhere)";
  }
  if (r.certificate) j["certificate"] = certificate_json(*r.certificate);
  j["warnings"] = r.warnings;
  return j;
}

ordered_json duality_json(const DualityReport& r) {
  ordered_json j;
  j["primal_obsv"] = r.primal_obsv;
  j["dual_ctrb"] = r.dual_ctrb;
  if (r.orthogonality_ok) j["orthogonality_ok"] = *r.orthogonality_ok;
  if (r.strong_duality_consistent) j["strong_duality_consistent"] = *r.strong_duality_consistent;
  j["gramian_horizon"] = r.gramian_horizon;
  ordered_json certs = ordered_json::array();
  for (const auto& c : r.certificates) certs.push_back(certificate_json(c));
  j["certificates"] = certs;
  j["warnings"] = r.warnings;
  return j;
}

ordered_json pencil_duality_json(const PencilDualityReport& r) {
  ordered_json j;
  j["all_ok"] = r.all_ok;
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json pj;
    pj["lambda"] = {p.lambda.real(), p.lambda.imag()};
    pj["rank_pencil"] = p.rank_pencil;
    pj["rank_pencil_target"] = p.rank_pencil_target;
    pj["rank_target"] = p.rank_target;
    pj["rank_target_pencil"] = p.rank_target_pencil;
    pj["premise"] = p.premise;
    pj["conclusion"] = p.conclusion;
    pj["ok"] = p.ok;
    pts.push_back(pj);
  }
  j["points"] = pts;
  j["warnings"] = r.warnings;
  return j;
}

ordered_json structural_duality_json(const StructuralDualityReport& r) {
  ordered_json j;
  j["normal_A"] = r.normal_A;
  j["orthogonal_modal_output_columns"] = r.orthogonal_modal_output_columns;
  j["target_rows_in_eigenspaces"] = r.target_rows_in_eigenspaces;
  j["applicable"] = r.applicable;
  if (r.primal_obsv) j["primal_obsv"] = *r.primal_obsv;
  if (r.dual_ctrb) j["dual_ctrb"] = *r.dual_ctrb;
  j["warnings"] = r.warnings;
  return j;
}

const char* yn(bool b) { return b ? "yes" : "no"; }

std::string eigen_verdict_line(const ObsvReport& r) {
  std::ostringstream os;
  bool rank_holds = true;
  for (const auto& p : r.points) rank_holds = rank_holds && p.ok;
  os << (rank_holds ? "rank equality holds" : "rank equality fails");
  if (r.assumption_ok && !*r.assumption_ok)
    os << "; assumption violated; inconclusive (necessary-only)";
  else if (r.assumption_ok)
    os << "; assumption satisfied; verdict " << (r.verdict ? "true" : "false");
  return os.str();
}

void render_certificate(std::ostringstream& os, const Certificate& c) {
  os << "    certificate [" << to_string(c.kind) << "]: " << c.description << "\n";
}

void render_warnings(std::ostringstream& os, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) os << "    warning: " << w << "\n";
}

}  // namespace

AnalysisReport analyze_system(const SystemFile& sf, const AnalysisOptions& opt) {
  AnalysisReport rep;
  rep.name = sf.name;
  const bool run_all = !opt.any();
  const bool want_obsv = opt.obsv || run_all;
  const bool want_detect = opt.detectability || run_all;
  const bool want_ctrb = opt.ctrb || run_all;
  const bool want_duality = opt.duality || run_all;

  if ((opt.obsv || opt.detectability || opt.duality) && !sf.C)
    throw std::invalid_argument(
        "the requested analysis needs an output matrix C, which the file does not provide");
  if (opt.ctrb && !sf.B)
    throw std::invalid_argument(
        "the requested analysis needs an input matrix B, which the file does not provide");

  std::optional<JordanForm> jf;
  std::string jordan_failure;
  if (sf.C || sf.B) {
    try {
      jf = jordan_decompose(sf.A);
    } catch (const SpectrumNotRationalError& e) {
      jordan_failure = e.what();
    } catch (const DefectiveDecompositionError& e) {
      jordan_failure = e.what();
    }
  }

  if ((want_obsv || want_detect || want_duality) && sf.C) {
    const ObsvTriple t = ObsvTriple::make(*sf.C, sf.A, sf.F);

    if (want_obsv) {
      rep.obsv_kalman = test_functional_obsv_kalman(t);
      rep.obsv_stacked = test_functional_obsv_stacked(t);
      {
        const bool same = rep.obsv_kalman->verdict == rep.obsv_stacked->verdict;
        std::ostringstream os;
        os << "image-space and stacked observability verdicts differ ("
           << yn(rep.obsv_kalman->verdict) << " vs " << yn(rep.obsv_stacked->verdict)
           << "); the two are provably equivalent";
        record_agreement(rep, "obsv: kalman/stacked", same, os.str());
      }
      if (jf) {
        rep.obsv_eigen = test_functional_obsv_pbh(t, *jf);
        const bool assumption = rep.obsv_eigen->assumption_ok.value_or(false);
        if (assumption) {
          const bool same = rep.obsv_eigen->verdict == rep.obsv_kalman->verdict;
          std::ostringstream os;
          os << "eigenspace verdict differs from the image-space verdict although the "
                "lead-column assumption holds ("
             << yn(rep.obsv_eigen->verdict) << " vs " << yn(rep.obsv_kalman->verdict) << ")";
          record_agreement(rep, "obsv: kalman/eigenspace", same, os.str());
        } else {
          const bool necessity = !rep.obsv_kalman->verdict || rep.obsv_eigen->verdict;
          record_agreement(rep, "obsv: kalman=>eigenspace (necessity)", necessity,
                           "image-space observability holds but the eigenspace rank equality "
                           "fails; the equality is necessary unconditionally");
        }
      } else {
        rep.warnings.push_back("eigenspace observability test skipped: " + jordan_failure);
      }
    }

    if (want_detect) {
      if (jf) {
        rep.detectability = test_functional_detectability(t, *jf);
        if (rep.obsv_kalman) {
          const bool implied = !rep.obsv_kalman->verdict || rep.detectability->verdict;
          record_agreement(rep, "obsv=>detectability", implied,
                           "functionally observable system tested non-detectable; the "
                           "unstable rank clauses are a subset of the full eigenspace test");
        }
      } else {
        rep.warnings.push_back("detectability test skipped: " + jordan_failure);
      }
    }

    if (want_duality) {
      try {
        rep.duality = check_strong_duality(t, sf.horizon);
      } catch (const InternalConsistencyError& e) {
        note_disagreement(rep, e.what());
      }
      if (rep.duality) {
        record_agreement(rep, "duality: weak implication", true, "");
        if (rep.duality->strong_duality_consistent)
          record_agreement(rep, "duality: strong consistency", *rep.duality->strong_duality_consistent,
                           "primal observability verdict disagrees with dual controllability AND "
                           "Gramian orthogonality; the three are provably equivalent");
      }
      rep.pencil_duality = check_pencil_rank_duality(t);
      record_agreement(rep, "duality: pencil rank implication", rep.pencil_duality->all_ok,
                       "the pencil rank premise held at an eigenvalue where the transposed-"
                       "factor rank conclusion failed; the implication is a theorem");
      rep.structural_duality = check_structural_duality_conditions(t);
    }
  }

  if (want_ctrb && sf.B) {
    const CtrbTriple t = CtrbTriple::make(sf.A, *sf.B, sf.F);
    rep.ctrb_kalman = test_output_ctrb_kalman(t);
    try {
      rep.ctrb_eigen = test_output_ctrb_pbh(t);
      const bool same = rep.ctrb_eigen->verdict == rep.ctrb_kalman->verdict;
      std::ostringstream os;
      os << "image-space and eigenspace controllability verdicts differ ("
         << yn(rep.ctrb_kalman->verdict) << " vs " << yn(rep.ctrb_eigen->verdict)
         << "); the two routes are provably equivalent";
      record_agreement(rep, "ctrb: kalman/eigenspace", same, os.str());
    } catch (const SpectrumNotRationalError& e) {
      rep.warnings.push_back(std::string("eigenspace controllability test skipped: ") + e.what());
    }
  }

  return rep;
}

std::string render_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "system: " << r.name << "\n";

  if (r.obsv_kalman || r.obsv_stacked || r.obsv_eigen) {
    os << "  functional observability\n";
    if (r.obsv_kalman) {
      os << "    kalman:  " << (r.obsv_kalman->verdict ? "observable" : "not observable");
      os << "  (rank obsv=" << r.obsv_kalman->ranks.at("obsv")
         << ", stacked=" << r.obsv_kalman->ranks.at("stacked") << ")\n";
      if (r.obsv_kalman->certificate) render_certificate(os, *r.obsv_kalman->certificate);
      render_warnings(os, r.obsv_kalman->warnings);
    }
    if (r.obsv_stacked) {
      os << "    stacked: " << (r.obsv_stacked->verdict ? "observable" : "not observable")
         << "  (rank obsv=" << r.obsv_stacked->ranks.at("obsv")
         << ", stacked=" << r.obsv_stacked->ranks.at("stacked") << ")\n";
    }
    if (r.obsv_eigen) {
      os << "    eigenspace: " << eigen_verdict_line(*r.obsv_eigen) << "\n";
      if (r.obsv_eigen->certificate) render_certificate(os, *r.obsv_eigen->certificate);
      render_warnings(os, r.obsv_eigen->warnings);
    }
  }

  if (r.detectability) {
    os << "  functional detectability\n";
    os << "    eigenspace (unstable spectrum): " << eigen_verdict_line(*r.detectability) << "\n";
    if (r.detectability->certificate) render_certificate(os, *r.detectability->certificate);
    render_warnings(os, r.detectability->warnings);
  }

  if (r.ctrb_kalman || r.ctrb_eigen) {
    os << "  output controllability\n";
    if (r.ctrb_kalman) {
      os << "    kalman:  " << (r.ctrb_kalman->verdict ? "controllable" : "not controllable")
         << "  (rank F=" << r.ctrb_kalman->ranks.at("F")
         << ", F*ctrb=" << r.ctrb_kalman->ranks.at("F_ctrb") << ", full-state "
         << yn(r.ctrb_kalman->full_state_controllable) << ")\n";
      if (r.ctrb_kalman->certificate) render_certificate(os, *r.ctrb_kalman->certificate);
      render_warnings(os, r.ctrb_kalman->warnings);
    }
    if (r.ctrb_eigen) {
      os << "    eigenspace: " << (r.ctrb_eigen->verdict ? "controllable" : "not controllable");
      if (r.ctrb_eigen->intersection_nonempty)
        os << "  (eigenspace intersection witness: " << yn(*r.ctrb_eigen->intersection_nonempty)
           << ")";
      os << "\n";
      if (r.ctrb_eigen->certificate) render_certificate(os, *r.ctrb_eigen->certificate);
      render_warnings(os, r.ctrb_eigen->warnings);
    }
  }

  if (r.duality) {
    os << "  duality\n";
    os << "    primal observability: " << yn(r.duality->primal_obsv)
       << ", dual controllability: " << yn(r.duality->dual_ctrb) << "\n";
    if (r.duality->orthogonality_ok)
      os << "    gramian orthogonality: " << yn(*r.duality->orthogonality_ok)
         << " (horizon " << r.duality->gramian_horizon << ")\n";
    if (r.duality->strong_duality_consistent)
      os << "    strong-duality consistency: " << yn(*r.duality->strong_duality_consistent)
         << "\n";
    render_warnings(os, r.duality->warnings);
    if (r.pencil_duality)
      os << "    pencil rank implication: " << (r.pencil_duality->all_ok ? "holds" : "VIOLATED")
         << " at " << r.pencil_duality->points.size() << " eigenvalue(s)\n";
    if (r.structural_duality) {
      os << "    structural conditions: normal A " << yn(r.structural_duality->normal_A)
         << ", orthogonal modal output columns "
         << yn(r.structural_duality->orthogonal_modal_output_columns)
         << ", target rows in eigenspaces "
         << yn(r.structural_duality->target_rows_in_eigenspaces) << " -> applicable "
         << yn(r.structural_duality->applicable) << "\n";
      render_warnings(os, r.structural_duality->warnings);
    }
  }

  for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
  for (const auto& [label, ok] : r.agreement)
    os << "  agreement: " << label << ": " << (ok ? "ok" : "VIOLATED") << "\n";
  if (!r.internal_consistency_ok) {
    os << "  INTERNAL CONSISTENCY VIOLATION\n";
    for (const auto& n : r.consistency_notes) os << "    " << n << "\n";
  }
  return os.str();
}

std::string render_json(const AnalysisReport& r) {
  ordered_json j;
  j["version"] = "1";
  j["name"] = r.name;
  ordered_json sections;
  if (r.obsv_kalman || r.obsv_stacked || r.obsv_eigen) {
    ordered_json s;
    if (r.obsv_kalman) s["kalman"] = obsv_report_json(*r.obsv_kalman);
    if (r.obsv_stacked) s["stacked"] = obsv_report_json(*r.obsv_stacked);
    if (r.obsv_eigen) s["eigenspace"] = obsv_report_json(*r.obsv_eigen);
    sections["functional_observability"] = s;
  }
  if (r.detectability)
    sections["functional_detectability"] = obsv_report_json(*r.detectability);
  if (r.ctrb_kalman || r.ctrb_eigen) {
    ordered_json s;
    if (r.ctrb_kalman) s["kalman"] = ctrb_report_json(*r.ctrb_kalman);
    if (r.ctrb_eigen) s["eigenspace"] = ctrb_report_json(*r.ctrb_eigen);
    sections["output_controllability"] = s;
  }
  if (r.duality || r.pencil_duality || r.structural_duality) {
    ordered_json s;
    if (r.duality) s["strong"] = duality_json(*r.duality);
    if (r.pencil_duality) s["pencil_rank"] = pencil_duality_json(*r.pencil_duality);
    if (r.structural_duality) s["structural"] = structural_duality_json(*r.structural_duality);
    sections["duality"] = s;
  }
  j["sections"] = sections;
  ordered_json agreement;
  for (const auto& [label, ok] : r.agreement) agreement[label] = ok;
  j["agreement"] = agreement;
  j["internal_consistency_ok"] = r.internal_consistency_ok;
  j["consistency_notes"] = r.consistency_notes;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

}  // namespace functal
