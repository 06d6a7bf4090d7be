#pragma once

#include <stdexcept>
#include <string>

namespace functal {

// Exact-backend eigenvalue search failed: the characteristic polynomial has
// no full set of rational roots. Callers may retry over Float64.
struct SpectrumNotRationalError : std::runtime_error {
  explicit SpectrumNotRationalError(const std::string& what) : std::runtime_error(what) {}
};

// Jordan machinery could not produce a decomposition meeting the residual
// gate; usually a clustering-tolerance problem.
struct DefectiveDecompositionError : std::runtime_error {
  explicit DefectiveDecompositionError(const std::string& what) : std::runtime_error(what) {}
};

// Precondition failures for target reconstruction / steering (carry the
// verdict context in the message; certificates live in the reports).
struct NotFunctionallyObservableError : std::runtime_error {
  explicit NotFunctionallyObservableError(const std::string& what) : std::runtime_error(what) {}
};

struct NotOutputControllableError : std::runtime_error {
  explicit NotOutputControllableError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularProjectionError : std::runtime_error {
  explicit SingularProjectionError(const std::string& what) : std::runtime_error(what) {}
};

// Randomized system generation could not satisfy the requested property
// within the attempt budget (or the request is structurally infeasible).
struct GenerationFailedError : std::runtime_error {
  explicit GenerationFailedError(const std::string& what) : std::runtime_error(what) {}
};

// A proven implication between two implemented tests was observed to fail;
// indicates a rank-tolerance or clustering bug, never a system property.
struct InternalConsistencyError : std::logic_error {
  explicit InternalConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace functal
