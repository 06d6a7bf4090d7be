#include "functal/report.hpp"

namespace functal {

const char* to_string(ObsvMethod m) {
  switch (m) {
    case ObsvMethod::Kalman: return "kalman";
    case ObsvMethod::Stacked: return "stacked";
    case ObsvMethod::Pbh: return "pbh";
  }
  return "?";
}

const char* to_string(CtrbMethod m) {
  switch (m) {
    case CtrbMethod::Kalman: return "kalman";
    case CtrbMethod::Pbh: return "pbh";
  }
  return "?";
}

const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::FailingEigenvalue: return "failing_eigenvalue";
    case CertificateKind::WitnessRow: return "witness_row";
    case CertificateKind::WitnessVector: return "witness_vector";
    case CertificateKind::DeficientCombination: return "deficient_combination";
  }
  return "?";
}

}  // namespace functal
