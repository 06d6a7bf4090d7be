#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "functal/matrix.hpp"

namespace functal {

// One eigenvalue group of a requested Jordan structure.
struct JordanSpecGroup {
  double lambda = 0.0;
  std::vector<int> block_sizes;
  int multiplicity() const;
};

// Parse "l1:[s1,s2];l2:[s3]" (";"-separated groups, eigenvalue before the
// colon, block sizes in brackets). Throws std::invalid_argument.
std::vector<JordanSpecGroup> parse_jordan_spec(const std::string& text);

enum class EnsureProperty { None, Obsv, NotObsv, Ctrb, NotCtrb, AssumptionFail };

// "", "obsv", "not-obsv", "ctrb", "not-ctrb", "assumption-fail".
EnsureProperty parse_ensure(const std::string& text);

struct GeneratorOptions {
  int n = 4;  // states
  int q = 1;  // output rows
  int r = 1;  // target rows
  int p = 1;  // input columns
  std::vector<JordanSpecGroup> structure;  // empty: randomized per attempt
  std::uint64_t seed = 0;
  EnsureProperty ensure = EnsureProperty::None;
  // Modal-matrix condition number range (evenly log-spaced singular values).
  double condition_min = 2.0;
  double condition_max = 20.0;
  // Eigenvalue pool for randomized structures; empty means multiples of 0.5
  // in [-2, 2]. Values must be distinct.
  std::vector<double> eigenvalue_pool;
  bool force_diagonalizable = false;  // randomized structure: distinct eigenvalues only
  bool unit_output_rows = false;      // normalize the rows of C
  int max_attempts = 1000;
};

struct GeneratedSystem {
  Matrix A, B, C, F;
  std::vector<JordanSpecGroup> structure;  // realized structure
  std::uint64_t seed = 0;
};

// Draw a Float64 system A = P^-1 J P with the requested (or randomized)
// Jordan structure and well-conditioned random modal matrix, then draw
// B, C, F so the requested property holds; the property is re-verified with
// the module tests before returning. Deterministic for a fixed seed.
// Throws GenerationFailedError when the request is infeasible or the attempt
// budget runs out.
GeneratedSystem generate_system(const GeneratorOptions& opt);

}  // namespace functal
