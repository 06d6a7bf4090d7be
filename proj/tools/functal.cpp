#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "functal/analyze.hpp"
#include "functal/errors.hpp"
#include "functal/generate.hpp"
#include "functal/system_file.hpp"

namespace {

using namespace functal;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInconsistent = 2;
constexpr int kExitPrecondition = 3;

double env_rank_tolerance() {
  const char* raw = std::getenv("FUNCTAL_TOL");
  if (!raw || !*raw) return 0.0;
  double v = 0.0;
  try {
    v = std::stod(raw);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("cannot parse FUNCTAL_TOL value: ") + raw);
  }
  if (!(v > 0.0)) throw std::invalid_argument("FUNCTAL_TOL must be a positive number");
  return v;
}

// The environment override fills in the default; an explicit per-file
// tolerance wins.
void apply_env_tolerance(SystemFile& sf, double tol) {
  if (tol <= 0.0 || sf.field.rank_tolerance > 0.0) return;
  sf.field.rank_tolerance = tol;
  const double eig = sf.field.eig_cluster_tolerance;
  sf.A.set_tolerances(tol, eig);
  sf.F.set_tolerances(tol, eig);
  if (sf.B) sf.B->set_tolerances(tol, eig);
  if (sf.C) sf.C->set_tolerances(tol, eig);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SystemParseError("cannot open file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string name_hint(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument("trailing characters");
      vals.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse " + flag + " entry '" + item +
                                  "' (expected comma-separated numbers)");
    }
  }
  if (vals.empty()) throw std::invalid_argument(flag + " must list at least one number");
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

void print_parse_error(const SystemParseError& e, const std::string& text) {
  if (e.byte_offset > 0) {
    const TextPosition pos = text_position(text, e.byte_offset);
    std::cerr << "error: " << e.what() << " (line " << pos.line << ", column " << pos.column
              << ")\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
}

struct AnalyzeFlags {
  AnalysisOptions sections;
  bool json = false;
};

int analyze_one(const std::string& path, const AnalyzeFlags& flags, double env_tol,
                std::string* json_out) {
  const std::string text = read_file(path);
  SystemFile sf;
  try {
    sf = parse_system_text(text, name_hint(path));
  } catch (const SystemParseError& e) {
    print_parse_error(e, text);
    return kExitInput;
  }
  apply_env_tolerance(sf, env_tol);
  const AnalysisReport rep = analyze_system(sf, flags.sections);
  if (flags.json) {
    std::string dump = render_json(rep);
    if (json_out) {
      *json_out = std::move(dump);
    } else {
      std::cout << dump;
    }
  } else {
    std::cout << render_text(rep);
  }
  return rep.internal_consistency_ok ? kExitOk : kExitInconsistent;
}

int cmd_analyze(const std::string& path, const AnalyzeFlags& flags) {
  const double env_tol = env_rank_tolerance();
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return analyze_one(path, flags, env_tol, nullptr);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::invalid_argument("no .json files in directory: " + path);

  int worst = kExitOk;
  std::vector<std::string> json_parts;
  for (const auto& f : files) {
    std::string part;
    int code = kExitOk;
    try {
      code = analyze_one(f.string(), flags, env_tol, flags.json ? &part : nullptr);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << f.string() << ": " << e.what() << "\n";
      code = kExitInput;
    }
    if (flags.json && code != kExitInput) json_parts.push_back(std::move(part));
    if (!flags.json && code == kExitOk) std::cout << "\n";
    worst = std::max(worst, code);
  }
  if (flags.json) {
    std::cout << "[\n";
    for (size_t i = 0; i < json_parts.size(); ++i) {
      std::string& part = json_parts[i];
      while (!part.empty() && part.back() == '\n') part.pop_back();
      std::cout << part << (i + 1 < json_parts.size() ? ",\n" : "\n");
    }
    std::cout << "]\n";
  }
  return worst;
}

int cmd_generate(int n, int q, int r, int p, const std::string& jordan_spec, std::uint64_t seed,
                 const std::string& ensure) {
  GeneratorOptions opt;
  opt.n = n;
  opt.q = q;
  opt.r = r;
  opt.p = p;
  opt.seed = seed;
  if (!jordan_spec.empty()) opt.structure = parse_jordan_spec(jordan_spec);
  opt.ensure = parse_ensure(ensure);
  const GeneratedSystem g = generate_system(opt);
  SystemFile sf;
  sf.name = "generated-seed" + std::to_string(seed);
  sf.field = g.A.field();
  sf.A = g.A;
  sf.B = g.B;
  sf.C = g.C;
  sf.F = g.F;
  sf.horizon = 1.0;
  std::cout << serialize_system(sf);
  return kExitOk;
}

int cmd_reconstruct(const std::string& path, const std::string& x0_text, double t1_flag,
                    int samples) {
  const double env_tol = env_rank_tolerance();
  const std::string text = read_file(path);
  SystemFile sf;
  try {
    sf = parse_system_text(text, name_hint(path));
  } catch (const SystemParseError& e) {
    print_parse_error(e, text);
    return kExitInput;
  }
  apply_env_tolerance(sf, env_tol);
  if (!sf.C) throw std::invalid_argument("reconstruction needs an output matrix C");
  const int n = sf.A.rows();
  const Eigen::VectorXd x0 = parse_vector(x0_text, "--x0");
  if (x0.size() != n)
    throw std::invalid_argument("--x0 must have " + std::to_string(n) + " entries");
  const double t1 = t1_flag > 0.0 ? t1_flag : sf.horizon;

  const Matrix B = sf.B ? *sf.B : Matrix::zeros(n, 1, sf.field);
  const Signal u = Signal::zero(B.cols(), samples, t1);
  const Signal x = simulate_lti(sf.A, B, x0, u, t1);
  Signal y;
  y.t1 = t1;
  y.values = sf.C->to_dense() * x.values;

  const ObsvTriple t = ObsvTriple::make(*sf.C, sf.A, sf.F);
  for (const auto& w : t.warnings) std::cout << "note: " << w << "\n";
  const ReconstructionResult res = reconstruct_target(t, B, u, y, t1);
  const Eigen::VectorXd reference = t.F.to_dense() * x0;
  const double err = (res.z0 - reference).norm();
  const double rel = err / (1.0 + reference.norm());

  std::cout << "system: " << sf.name << "\n";
  std::cout << "horizon: " << t1 << ", samples: " << samples << "\n";
  std::cout << "reconstructed z(0): " << res.z0.transpose() << "\n";
  std::cout << "reference F*x(0):   " << reference.transpose() << "\n";
  std::cout << "absolute error: " << err << ", relative error: " << rel << "\n";
  for (const auto& w : res.warnings) std::cout << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_steer(const std::string& path, const std::string& x0_text, const std::string& z_text,
              double t1_flag, int samples) {
  const double env_tol = env_rank_tolerance();
  const std::string text = read_file(path);
  SystemFile sf;
  try {
    sf = parse_system_text(text, name_hint(path));
  } catch (const SystemParseError& e) {
    print_parse_error(e, text);
    return kExitInput;
  }
  apply_env_tolerance(sf, env_tol);
  if (!sf.B) throw std::invalid_argument("steering needs an input matrix B");
  const int n = sf.A.rows();
  const Eigen::VectorXd x0 = parse_vector(x0_text, "--x0");
  if (x0.size() != n)
    throw std::invalid_argument("--x0 must have " + std::to_string(n) + " entries");
  const double t1 = t1_flag > 0.0 ? t1_flag : sf.horizon;

  const CtrbTriple t = CtrbTriple::make(sf.A, *sf.B, sf.F);
  for (const auto& w : t.warnings) std::cout << "note: " << w << "\n";
  const Eigen::VectorXd z_target = parse_vector(z_text, "--z-target");
  if (z_target.size() != t.F.rows())
    throw std::invalid_argument("--z-target must have " + std::to_string(t.F.rows()) +
                                " entries (independent target rows)");

  const SteeringPlan plan = min_energy_steering(t, x0, z_target, t1, samples);
  const Signal traj = simulate_lti(sf.A, *sf.B, x0, plan.u, t1);
  const Eigen::VectorXd achieved = t.F.to_dense() * traj.values.col(traj.samples() - 1);
  const double residual = (achieved - z_target).norm();

  Signal energy_signal;
  energy_signal.t1 = t1;
  energy_signal.values = plan.u.values.colwise().squaredNorm();
  const double energy = trapezoid_integral(energy_signal)(0);

  std::cout << "system: " << sf.name << "\n";
  std::cout << "horizon: " << t1 << ", samples: " << samples
            << ", projected Gramian condition: " << plan.condition_number << "\n";
  std::cout << "target z(t1):    " << z_target.transpose() << "\n";
  std::cout << "predicted z(t1): " << plan.predicted_z_t1.transpose() << "\n";
  std::cout << "achieved z(t1):  " << achieved.transpose() << "\n";
  std::cout << "residual: " << residual << ", input energy: " << energy << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional observability, output controllability, and duality analyzer"};
  app.require_subcommand(1);

  std::string path;
  AnalyzeFlags aflags;
  CLI::App* analyze = app.add_subcommand("analyze", "analyze a system file or directory");
  analyze->add_option("path", path, "system file or directory of .json files")->required();
  analyze->add_flag("--obsv", aflags.sections.obsv, "functional observability tests");
  analyze->add_flag("--ctrb", aflags.sections.ctrb, "output controllability tests");
  analyze->add_flag("--duality", aflags.sections.duality, "duality checks");
  analyze->add_flag("--detectability", aflags.sections.detectability,
                    "functional detectability test");
  analyze->add_flag("--json", aflags.json, "structured report on standard output");

  int gn = 4, gq = 1, gr = 1, gp = 1;
  std::uint64_t gseed = 0;
  std::string gjordan, gensure;
  CLI::App* generate = app.add_subcommand("generate", "emit a randomized system file");
  generate->add_option("--n", gn, "state dimension")->check(CLI::PositiveNumber);
  generate->add_option("--q", gq, "output rows")->check(CLI::PositiveNumber);
  generate->add_option("--r", gr, "target rows")->check(CLI::PositiveNumber);
  generate->add_option("--p", gp, "input columns")->check(CLI::PositiveNumber);
  generate->add_option("--jordan-spec", gjordan,
                       "eigenvalue structure, e.g. \"0:[3];-1:[1,1]\"");
  generate->add_option("--seed", gseed, "random seed (same seed, same output)");
  generate->add_option("--ensure", gensure,
                       "obsv|not-obsv|ctrb|not-ctrb|assumption-fail");

  std::string rx0, rz;
  double rt1 = 0.0;
  int rsamples = 2048;
  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "reconstruct z(0) = F x(0) from simulated output");
  reconstruct->add_option("path", path, "system file")->required();
  reconstruct->add_option("--x0", rx0, "initial state, comma-separated")->required();
  reconstruct->add_option("--t1", rt1, "horizon (default: file horizon)");
  reconstruct->add_option("--samples", rsamples, "grid samples")->check(CLI::Range(16, 1 << 22));

  CLI::App* steer = app.add_subcommand("steer", "minimum-energy steering of z(t1) = F x(t1)");
  steer->add_option("path", path, "system file")->required();
  steer->add_option("--x0", rx0, "initial state, comma-separated")->required();
  steer->add_option("--z-target", rz, "target value at t1, comma-separated")->required();
  steer->add_option("--t1", rt1, "horizon (default: file horizon)");
  steer->add_option("--samples", rsamples, "grid samples")->check(CLI::Range(16, 1 << 22));

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(path, aflags);
    if (generate->parsed()) return cmd_generate(gn, gq, gr, gp, gjordan, gseed, gensure);
    if (reconstruct->parsed()) return cmd_reconstruct(path, rx0, rt1, rsamples);
    if (steer->parsed()) return cmd_steer(path, rx0, rz, rt1, rsamples);
  } catch (const NotFunctionallyObservableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const NotOutputControllableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const SingularProjectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const InternalConsistencyError& e) {
    std::cerr << "internal consistency violation: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const SystemParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
