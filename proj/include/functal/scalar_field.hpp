#pragma once

namespace functal {

enum class ScalarKind { ExactRational, Float64 };

// Tags every matrix with its arithmetic backend and the tolerances used by
// rank decisions and eigenvalue clustering. A zero tolerance means "use the
// per-operation default" (rank: max(m,n)*eps*sigma_max, clustering: 1e-8).
struct ScalarField {
  ScalarKind kind = ScalarKind::Float64;
  double rank_tolerance = 0.0;
  double eig_cluster_tolerance = 0.0;

  static ScalarField exact() { return {ScalarKind::ExactRational, 0.0, 0.0}; }
  static ScalarField float64(double rank_tol = 0.0, double eig_tol = 0.0) {
    return {ScalarKind::Float64, rank_tol, eig_tol};
  }

  bool is_exact() const { return kind == ScalarKind::ExactRational; }
  double resolved_eig_cluster_tolerance() const {
    return eig_cluster_tolerance > 0.0 ? eig_cluster_tolerance : 1e-8;
  }
};

inline bool same_kind(const ScalarField& a, const ScalarField& b) { return a.kind == b.kind; }

}  // namespace functal
