#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "functal/matrix.hpp"

namespace functal {

// JSON system description: name, scalar backend ("float64" or "rational",
// rational entries as integers or "p/q" strings), matrices A (required),
// B/C (optional), F (required), simulation horizon (default 1.0), and
// optional tolerance overrides {"rank", "eig_cluster"}.
struct SystemFile {
  std::string name;
  ScalarField field;
  Matrix A;
  std::optional<Matrix> B;
  std::optional<Matrix> C;
  Matrix F;
  double horizon = 1.0;
};

// Parse failure; byte_offset > 0 points into the source text for syntax
// errors, 0 means the problem is structural (missing key, bad dimensions).
struct SystemParseError : std::runtime_error {
  std::size_t byte_offset = 0;
  SystemParseError(const std::string& what, std::size_t byte)
      : std::runtime_error(what), byte_offset(byte) {}
};

SystemFile parse_system_text(const std::string& text, const std::string& name_hint = "");
SystemFile load_system_file(const std::string& path);

// Stable, human-diffable serialization; parse(serialize(s)) reproduces s.
std::string serialize_system(const SystemFile& sf);

// 1-based line/column of a byte offset in text (for parse diagnostics).
struct TextPosition {
  int line = 1;
  int column = 1;
};
TextPosition text_position(const std::string& text, std::size_t byte_offset);

}  // namespace functal
