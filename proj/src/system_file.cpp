#include "functal/system_file.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "functal/rational.hpp"

namespace functal {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw SystemParseError(what, 0); }

Matrix parse_matrix(const json& j, const std::string& key, const ScalarField& field) {
  const json& m = j.at(key);
  if (!m.is_array() || m.empty()) fail("matrix '" + key + "' must be a non-empty array of rows");
  const int rows = static_cast<int>(m.size());
  int cols = -1;
  for (const auto& row : m) {
    if (!row.is_array() || row.empty())
      fail("matrix '" + key + "' rows must be non-empty arrays");
    if (cols < 0)
      cols = static_cast<int>(row.size());
    else if (cols != static_cast<int>(row.size()))
      fail("matrix '" + key + "' rows have inconsistent lengths");
  }
  if (field.is_exact()) {
    Matrix M = Matrix::zeros(rows, cols, field);
    for (int i = 0; i < rows; ++i)
      for (int c = 0; c < cols; ++c) {
        const json& e = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
        if (e.is_string()) {
          try {
            M.r(i, c) = parse_rational(e.get<std::string>());
          } catch (const std::invalid_argument& ex) {
            fail("matrix '" + key + "' entry (" + std::to_string(i) + "," + std::to_string(c) +
                 "): " + ex.what());
          }
        } else if (e.is_number_integer()) {
          M.r(i, c) = Rational(e.get<long long>());
        } else {
          fail("matrix '" + key + "' entry (" + std::to_string(i) + "," + std::to_string(c) +
               ") must be an integer or a 'p/q' string in rational mode");
        }
      }
    return M;
  }
  Eigen::MatrixXd D(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) {
      const json& e = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
      if (!e.is_number())
        fail("matrix '" + key + "' entry (" + std::to_string(i) + "," + std::to_string(c) +
             ") must be a number in float64 mode");
      D(i, c) = e.get<double>();
    }
  return Matrix::from_dense(D, field);
}

ordered_json matrix_json(const Matrix& M) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < M.cols(); ++j) {
      if (M.is_exact())
        row.push_back(rational_to_string(M.r(i, j)));
      else
        row.push_back(M.dense()(i, j));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

SystemFile parse_system_text(const std::string& text, const std::string& name_hint) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SystemParseError(e.what(), e.byte);
  }
  if (!j.is_object()) fail("top level must be a JSON object");

  SystemFile sf;
  try {
    sf.name = j.value("name", name_hint);
    const std::string scalar = j.value("scalar", std::string("float64"));
    if (scalar == "rational")
      sf.field = ScalarField::exact();
    else if (scalar == "float64")
      sf.field = ScalarField::float64();
    else
      fail("scalar must be \"float64\" or \"rational\", got \"" + scalar + "\"");

    if (j.contains("tolerances")) {
      const json& tol = j.at("tolerances");
      if (!tol.is_object()) fail("tolerances must be an object");
      const double rank = tol.value("rank", 0.0);
      const double eig = tol.value("eig_cluster", 0.0);
      if (rank < 0.0 || eig < 0.0) fail("tolerances must be non-negative");
      sf.field.rank_tolerance = rank;
      sf.field.eig_cluster_tolerance = eig;
    }

    sf.horizon = j.value("horizon", 1.0);
    if (!(sf.horizon > 0.0)) fail("horizon must be positive");

    if (!j.contains("A")) fail("missing matrix 'A'");
    if (!j.contains("F")) fail("missing matrix 'F'");
    sf.A = parse_matrix(j, "A", sf.field);
    sf.F = parse_matrix(j, "F", sf.field);
    if (j.contains("B")) sf.B = parse_matrix(j, "B", sf.field);
    if (j.contains("C")) sf.C = parse_matrix(j, "C", sf.field);
  } catch (const json::exception& e) {
    fail(e.what());
  }

  const int n = sf.A.rows();
  if (sf.A.cols() != n) fail("A must be square");
  if (sf.F.cols() != n) fail("F must have as many columns as A");
  if (sf.B && sf.B->rows() != n) fail("B must have as many rows as A");
  if (sf.C && sf.C->cols() != n) fail("C must have as many columns as A");
  return sf;
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SystemParseError("cannot open file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  const size_t slash = stem.find_last_of('/');
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  const size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_system_text(buf.str(), stem);
}

std::string serialize_system(const SystemFile& sf) {
  ordered_json j;
  j["name"] = sf.name;
  j["scalar"] = sf.field.is_exact() ? "rational" : "float64";
  j["horizon"] = sf.horizon;
  if (sf.field.rank_tolerance > 0.0 || sf.field.eig_cluster_tolerance > 0.0) {
    ordered_json tol;
    if (sf.field.rank_tolerance > 0.0) tol["rank"] = sf.field.rank_tolerance;
    if (sf.field.eig_cluster_tolerance > 0.0) tol["eig_cluster"] = sf.field.eig_cluster_tolerance;
    j["tolerances"] = tol;
  }
  j["A"] = matrix_json(sf.A);
  if (sf.B) j["B"] = matrix_json(*sf.B);
  if (sf.C) j["C"] = matrix_json(*sf.C);
  j["F"] = matrix_json(sf.F);
  return j.dump(2) + "\n";
}

TextPosition text_position(const std::string& text, std::size_t byte_offset) {
  // The parser reports the 1-based position one past the offending byte.
  TextPosition pos;
  if (byte_offset == 0) return pos;
  const std::size_t end = std::min(byte_offset - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

}  // namespace functal
