#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "functal/ctrb.hpp"
#include "functal/obsv.hpp"
#include "functal/report.hpp"

namespace functal {

// Transposed counterpart of a triple: the estimation problem (C, A; F) maps
// to the control problem (A^T, C^T; F) and vice versa. Applying the two
// mappings in sequence returns the original triple.
CtrbTriple dualize(const ObsvTriple& t);
ObsvTriple dualize(const CtrbTriple& t);

struct DualityReport {
  bool primal_obsv = false;
  bool dual_ctrb = false;
  // F*Im(W) perpendicular to F*ker(W), W the finite-horizon observability
  // Gramian. Unset until the Gramian clause is evaluated.
  std::optional<bool> orthogonality_ok;
  // primal_obsv == (dual_ctrb AND orthogonality_ok), reported as computed.
  std::optional<bool> strong_duality_consistent;
  double gramian_horizon = 0.0;
  std::vector<Certificate> certificates;
  std::vector<std::string> warnings;
};

// Image-space observability of the triple vs image-space output
// controllability of its transposed counterpart. The one-way implication
// (observable => dual controllable) is a theorem, so an observed violation
// throws InternalConsistencyError instead of being reported as a verdict.
DualityReport check_weak_duality(const ObsvTriple& t);

// Weak duality plus the Gramian clause that upgrades the implication to an
// equivalence: primal_obsv <=> dual_ctrb AND F*Im(W) perp F*ker(W). The zero
// subspace counts as orthogonal to everything. Exact input is lifted to
// Float64 for the Gramian (warning recorded).
DualityReport check_strong_duality(const ObsvTriple& t, double t1);

// Per-eigenvalue rank implication on the pencil P(l) = [l*I - A; C]:
// rank [P; F] == rank P  implies  rank (F * P^T) == rank F, with the plain
// (non-conjugating) transpose.
struct PencilDualityPoint {
  std::complex<double> lambda{0.0, 0.0};
  int rank_pencil = 0;         // rank P
  int rank_pencil_target = 0;  // rank [P; F]
  int rank_target = 0;         // rank F
  int rank_target_pencil = 0;  // rank F * P^T
  bool premise = false;
  bool conclusion = false;
  bool ok = true;  // !premise || conclusion
};

struct PencilDualityReport {
  std::vector<PencilDualityPoint> points;
  bool all_ok = true;
  std::vector<std::string> warnings;
};

PencilDualityReport check_pencil_rank_duality(const ObsvTriple& t);

// Structural conditions under which the primal and transposed verdicts
// coincide: A normal (unitarily diagonalizable), the columns of C expressed
// on the unitary eigenvector basis pairwise orthogonal, and every row of F
// inside a single eigenspace of A. When all three hold the two verdicts are
// computed so callers can compare them. With a repeated eigenvalue a target
// row inside one multi-dimensional eigenspace can mix reconstructible and
// unreconstructible directions, so equality of the verdicts is only
// guaranteed for distinct spectra; a mismatch is recorded as a warning.
struct StructuralDualityReport {
  bool normal_A = false;
  bool orthogonal_modal_output_columns = false;
  bool target_rows_in_eigenspaces = false;
  bool applicable = false;
  std::optional<bool> primal_obsv;
  std::optional<bool> dual_ctrb;
  std::vector<std::string> warnings;
};

StructuralDualityReport check_structural_duality_conditions(const ObsvTriple& t);

}  // namespace functal
