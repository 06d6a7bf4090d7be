#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "functal/generate.hpp"
#include "functal/gramian.hpp"
#include "functal/matrix.hpp"
#include "json.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(FUNCTAL_FIXTURE_DIR) + "/" + name;
}

inline std::string cli_path() { return std::string(FUNCTAL_CLI_PATH); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

// Runs the CLI with the given argument string through /bin/sh; env_prefix
// may carry VAR=value assignments.
inline CommandResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const std::string out_path =
      "/tmp/functal_test_out_" + std::to_string(getpid()) + "_" + std::to_string(counter++);
  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += "'" + cli_path() + "' " + args + " > '" + out_path + "' 2>&1";
  const int status = std::system(cmd.c_str());
  CommandResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.output = read_file(out_path);
  std::remove(out_path.c_str());
  return res;
}

// Deterministic mixed-shape generator options for sweep index k.
inline functal::GeneratorOptions sweep_options(std::uint64_t k, functal::EnsureProperty ensure,
                                               int n_min = 3, int n_max = 8) {
  std::mt19937_64 rng(0x5EEDBA5Eull + k * 0x9E3779B97F4A7C15ull);
  functal::GeneratorOptions opt;
  opt.n = n_min + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max - n_min + 1));
  opt.q = 1 + static_cast<int>(rng() % 3);
  opt.r = 1 + static_cast<int>(rng() % 2);
  opt.p = 1 + static_cast<int>(rng() % 3);
  opt.force_diagonalizable = (rng() % 2) == 0;
  if (ensure == functal::EnsureProperty::AssumptionFail) opt.force_diagonalizable = false;
  opt.ensure = ensure;
  opt.seed = rng();
  return opt;
}

// Slow, mildly conditioned, well-separated class on which trapezoidal
// quadrature at 2048 samples reaches 1e-6 reconstruction accuracy.
inline functal::GeneratorOptions tame_options(std::uint64_t seed, functal::EnsureProperty ensure) {
  std::mt19937_64 rng(seed);
  functal::GeneratorOptions opt;
  opt.n = 3 + static_cast<int>(rng() % 3);
  opt.q = 2 + static_cast<int>(rng() % 2);
  opt.r = 1 + static_cast<int>(rng() % 2);
  opt.p = 1 + static_cast<int>(rng() % 2);
  opt.force_diagonalizable = true;
  opt.unit_output_rows = true;
  opt.condition_min = 1.2;
  opt.condition_max = 2.0;
  opt.eigenvalue_pool = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5};
  opt.ensure = ensure;
  opt.seed = rng();
  return opt;
}

// Draws from the tame class until the observability Gramian at horizon 1 is
// well conditioned; returns the accepted system.
inline functal::GeneratedSystem draw_tame_obsv_system(std::uint64_t& seed_cursor) {
  for (;;) {
    const functal::GeneratedSystem sys =
        functal::generate_system(tame_options(seed_cursor++, functal::EnsureProperty::Obsv));
    const Eigen::MatrixXd W = functal::finite_horizon_gramian(
        sys.A.dense(), sys.C.dense(), 1.0, functal::GramianSide::Observability);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin > 0.0 && lmax / lmin <= 100.0) return sys;
  }
}

// --- Minimal JSON-schema subset validator -----------------------------------
// Supports: $ref into #/definitions, type, enum (strings), required,
// properties, additionalProperties (schema), items (single schema),
// minItems/maxItems. Enough to check reports against docs/report.schema.json.

namespace detail {

inline const nlohmann::json& resolve_ref(const nlohmann::json& root, const std::string& ref) {
  const std::string prefix = "#/definitions/";
  if (ref.rfind(prefix, 0) != 0) throw std::runtime_error("unsupported $ref: " + ref);
  return root.at("definitions").at(ref.substr(prefix.size()));
}

inline bool type_matches(const nlohmann::json& inst, const std::string& type) {
  if (type == "object") return inst.is_object();
  if (type == "array") return inst.is_array();
  if (type == "string") return inst.is_string();
  if (type == "boolean") return inst.is_boolean();
  if (type == "integer") return inst.is_number_integer() || inst.is_number_unsigned();
  if (type == "number") return inst.is_number();
  if (type == "null") return inst.is_null();
  throw std::runtime_error("unsupported schema type: " + type);
}

inline void validate(const nlohmann::json& inst, const nlohmann::json& schema,
                     const nlohmann::json& root, const std::string& path,
                     std::vector<std::string>& errors) {
  if (schema.contains("$ref")) {
    validate(inst, resolve_ref(root, schema["$ref"].get<std::string>()), root, path, errors);
    return;
  }
  if (schema.contains("type") &&
      !type_matches(inst, schema["type"].get<std::string>())) {
    errors.push_back(path + ": expected type " + schema["type"].get<std::string>());
    return;
  }
  if (schema.contains("enum")) {
    bool hit = false;
    for (const auto& v : schema["enum"])
      if (v == inst) hit = true;
    if (!hit) errors.push_back(path + ": value not in enum");
  }
  if (inst.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!inst.contains(key.get<std::string>()))
          errors.push_back(path + ": missing required key " + key.get<std::string>());
    const auto* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (auto it = inst.begin(); it != inst.end(); ++it) {
      if (props && props->contains(it.key())) {
        validate(it.value(), (*props)[it.key()], root, path + "/" + it.key(), errors);
      } else if (schema.contains("additionalProperties") &&
                 schema["additionalProperties"].is_object()) {
        validate(it.value(), schema["additionalProperties"], root, path + "/" + it.key(), errors);
      }
    }
  }
  if (inst.is_array()) {
    if (schema.contains("minItems") && inst.size() < schema["minItems"].get<size_t>())
      errors.push_back(path + ": too few items");
    if (schema.contains("maxItems") && inst.size() > schema["maxItems"].get<size_t>())
      errors.push_back(path + ": too many items");
    if (schema.contains("items")) {
      int i = 0;
      for (const auto& el : inst)
        validate(el, schema["items"], root, path + "/" + std::to_string(i++), errors);
    }
  }
}

}  // namespace detail

inline std::vector<std::string> schema_errors(const nlohmann::json& instance,
                                              const nlohmann::json& schema_document) {
  std::vector<std::string> errors;
  detail::validate(instance, schema_document, schema_document, "", errors);
  return errors;
}

}  // namespace testsupport
