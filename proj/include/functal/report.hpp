#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace functal {

// Machine-checkable witness attached to a verdict.
enum class CertificateKind {
  FailingEigenvalue,     // lambda where a rank equality breaks
  WitnessRow,            // row of a stacked matrix outside a row space
  WitnessVector,         // nonzero vector in an intersection / kernel
  DeficientCombination,  // left combination q with q^T M = 0 but q^T F != 0
};

struct Certificate {
  CertificateKind kind = CertificateKind::WitnessVector;
  std::string description;
  std::complex<double> eigenvalue{0.0, 0.0};  // FailingEigenvalue
  Eigen::VectorXcd vector;                    // witness / combination entries
  int row_index = -1;                         // WitnessRow
};

enum class ObsvMethod { Kalman, Stacked, Pbh };
enum class CtrbMethod { Kalman, Pbh };

const char* to_string(ObsvMethod m);
const char* to_string(CtrbMethod m);
const char* to_string(CertificateKind k);

// Per-eigenvalue record of a pencil rank comparison.
struct PencilPoint {
  std::complex<double> lambda;
  int rank_base = 0;      // rank without the target rows / target factor
  int rank_extended = 0;  // rank with them
  bool ok = true;
};

struct ObsvReport {
  bool verdict = false;
  ObsvMethod method = ObsvMethod::Kalman;
  std::map<std::string, int> ranks;
  std::optional<bool> assumption_ok;  // eigenvalue-route lead-column gate
  std::vector<PencilPoint> points;    // eigenvalue route only
  std::optional<Certificate> certificate;
  std::vector<std::string> warnings;
};

struct CtrbReport {
  bool verdict = false;
  CtrbMethod method = CtrbMethod::Kalman;
  bool full_state_controllable = false;
  std::optional<bool> intersection_nonempty;  // eigenspace clause, non-FSC route
  std::map<std::string, int> ranks;
  std::vector<PencilPoint> points;  // eigenvalue route only
  std::optional<Certificate> certificate;
  std::vector<std::string> warnings;
};

}  // namespace functal
