#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "functal/ctrb.hpp"
#include "functal/duality.hpp"
#include "functal/obsv.hpp"
#include "functal/system_file.hpp"

namespace functal {

// Which analysis sections to run. No flag set means "everything the file's
// matrices support".
struct AnalysisOptions {
  bool obsv = false;
  bool ctrb = false;
  bool duality = false;
  bool detectability = false;
  bool any() const { return obsv || ctrb || duality || detectability; }
};

struct AnalysisReport {
  std::string name;
  std::optional<ObsvReport> obsv_kalman;
  std::optional<ObsvReport> obsv_stacked;
  std::optional<ObsvReport> obsv_eigen;
  std::optional<ObsvReport> detectability;
  std::optional<CtrbReport> ctrb_kalman;
  std::optional<CtrbReport> ctrb_eigen;
  std::optional<DualityReport> duality;
  std::optional<PencilDualityReport> pencil_duality;
  std::optional<StructuralDualityReport> structural_duality;
  // Named agreement checks between routes that must concur (or whose
  // one-way implication must hold), with their outcomes.
  std::vector<std::pair<std::string, bool>> agreement;
  bool internal_consistency_ok = true;
  std::vector<std::string> consistency_notes;
  std::vector<std::string> warnings;
};

// Runs the requested tests on a parsed system. Missing matrices fail with
// std::invalid_argument when the section was requested explicitly and are
// skipped with a warning otherwise. Internal-consistency violations are
// recorded in the report rather than thrown.
AnalysisReport analyze_system(const SystemFile& sf, const AnalysisOptions& opt);

std::string render_text(const AnalysisReport& r);
std::string render_json(const AnalysisReport& r);  // schema: docs/report.schema.json

}  // namespace functal
