#include "functal/generate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "functal/ctrb.hpp"
#include "functal/errors.hpp"
#include "functal/jordan.hpp"
#include "functal/linalg.hpp"
#include "functal/obsv.hpp"

namespace functal {
namespace {

// Defective structures shift eigenvalues by roughly eps^(1/s) under the
// modal similarity; keep random blocks small and the conditioning moderate
// so the decomposition's clustering stays reliable.
constexpr int kMaxRandomBlock = 3;
constexpr double kDefectiveConditionCap = 10.0;
constexpr double kDefectiveClusterTol = 1e-4;

std::vector<double> default_pool() {
  std::vector<double> pool;
  for (int i = -4; i <= 4; ++i) pool.push_back(0.5 * i);
  return pool;
}

bool has_multiplicity(const std::vector<JordanSpecGroup>& groups) {
  for (const auto& g : groups)
    if (g.multiplicity() > 1) return true;
  return false;
}

bool has_defective_block(const std::vector<JordanSpecGroup>& groups) {
  for (const auto& g : groups)
    for (int s : g.block_sizes)
      if (s > 1) return true;
  return false;
}

std::vector<JordanSpecGroup> random_structure(const GeneratorOptions& opt, std::mt19937_64& rng) {
  std::vector<double> pool = opt.eigenvalue_pool.empty() ? default_pool() : opt.eigenvalue_pool;
  if (static_cast<int>(pool.size()) < 1)
    throw GenerationFailedError("empty eigenvalue pool");
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<JordanSpecGroup> groups;
  int remaining = opt.n;
  size_t next = 0;
  bool forced_multiplicity = false;
  while (remaining > 0) {
    if (next >= pool.size())
      throw GenerationFailedError(
          "eigenvalue pool too small for the requested dimension; supply more values");
    JordanSpecGroup g;
    g.lambda = pool[next++];
    int m = 1;
    if (!opt.force_diagonalizable) {
      m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                   std::min(kMaxRandomBlock, remaining)));
      if (opt.ensure == EnsureProperty::AssumptionFail && !forced_multiplicity) {
        if (remaining < 2)
          throw GenerationFailedError(
              "an assumption-violating system needs an eigenvalue of multiplicity at least 2");
        m = std::max(m, 2);
        forced_multiplicity = true;
      }
    }
    if (m == 1 || rng() % 5 < 2)
      g.block_sizes.assign(static_cast<size_t>(m), 1);  // semisimple group
    else
      g.block_sizes.assign(1, m);  // single chain
    groups.push_back(g);
    remaining -= m;
  }
  return groups;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

Eigen::MatrixXd random_dense(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = normal(rng);
  return M;
}

struct ModalBasis {
  Eigen::MatrixXd P, P_inv;
};

ModalBasis random_modal_basis(int n, double cond_min, double cond_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(cond_min, cond_max);
  const double kappa = std::max(1.0, u(rng));
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i)
    s(i) = n == 1 ? 1.0 : std::pow(kappa, static_cast<double>(i) / (n - 1));
  const Eigen::MatrixXd Q1 = random_orthogonal(n, rng);
  const Eigen::MatrixXd Q2 = random_orthogonal(n, rng);
  ModalBasis basis;
  basis.P = Q1 * s.asDiagonal() * Q2.transpose();
  basis.P_inv = Q2 * s.cwiseInverse().asDiagonal() * Q1.transpose();
  return basis;
}

Eigen::MatrixXd build_jordan(const std::vector<JordanSpecGroup>& groups, int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  int col = 0;
  for (const auto& g : groups)
    for (int s : g.block_sizes) {
      for (int k = 0; k < s; ++k) {
        J(col + k, col + k) = g.lambda;
        if (k + 1 < s) J(col + k, col + k + 1) = 1.0;
      }
      col += s;
    }
  return J;
}

// Global column index of each group's columns and lead (chain-start) columns.
struct GroupColumns {
  int begin = 0;
  int size = 0;
  std::vector<int> leads;
};

std::vector<GroupColumns> group_columns(const std::vector<JordanSpecGroup>& groups) {
  std::vector<GroupColumns> out;
  int col = 0;
  for (const auto& g : groups) {
    GroupColumns gc;
    gc.begin = col;
    gc.size = g.multiplicity();
    for (int s : g.block_sizes) {
      gc.leads.push_back(col);
      col += s;
    }
    out.push_back(gc);
  }
  return out;
}

int pick_group_with_multiplicity(const std::vector<JordanSpecGroup>& groups) {
  for (size_t i = 0; i < groups.size(); ++i)
    if (groups[i].multiplicity() > 1) return static_cast<int>(i);
  return -1;
}

}  // namespace

int JordanSpecGroup::multiplicity() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

std::vector<JordanSpecGroup> parse_jordan_spec(const std::string& text) {
  std::vector<JordanSpecGroup> groups;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("jordan spec group needs 'eigenvalue:[sizes]': " + part);
    JordanSpecGroup g;
    try {
      g.lambda = std::stod(part.substr(0, colon));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad eigenvalue in jordan spec: " + part);
    }
    std::string sizes = part.substr(colon + 1);
    if (sizes.size() < 2 || sizes.front() != '[' || sizes.back() != ']')
      throw std::invalid_argument("jordan spec sizes must be bracketed: " + part);
    sizes = sizes.substr(1, sizes.size() - 2);
    std::stringstream sz(sizes);
    std::string item;
    while (std::getline(sz, item, ',')) {
      int s = 0;
      try {
        s = std::stoi(item);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad block size in jordan spec: " + part);
      }
      if (s < 1) throw std::invalid_argument("block sizes must be positive: " + part);
      g.block_sizes.push_back(s);
    }
    if (g.block_sizes.empty())
      throw std::invalid_argument("jordan spec group has no block sizes: " + part);
    for (const auto& other : groups)
      if (other.lambda == g.lambda)
        throw std::invalid_argument("duplicate eigenvalue in jordan spec");
    groups.push_back(g);
  }
  if (groups.empty()) throw std::invalid_argument("empty jordan spec");
  return groups;
}

EnsureProperty parse_ensure(const std::string& text) {
  if (text.empty() || text == "none") return EnsureProperty::None;
  if (text == "obsv") return EnsureProperty::Obsv;
  if (text == "not-obsv") return EnsureProperty::NotObsv;
  if (text == "ctrb") return EnsureProperty::Ctrb;
  if (text == "not-ctrb") return EnsureProperty::NotCtrb;
  if (text == "assumption-fail") return EnsureProperty::AssumptionFail;
  throw std::invalid_argument("unknown ensure property: " + text);
}

GeneratedSystem generate_system(const GeneratorOptions& opt) {
  if (opt.n < 1 || opt.q < 1 || opt.r < 1 || opt.p < 1)
    throw std::invalid_argument("system dimensions must be positive");
  if (!opt.structure.empty()) {
    int total = 0;
    for (const auto& g : opt.structure) total += g.multiplicity();
    if (total != opt.n)
      throw std::invalid_argument("jordan structure sizes must sum to the state dimension");
    if (opt.ensure == EnsureProperty::AssumptionFail && !has_multiplicity(opt.structure))
      throw GenerationFailedError(
          "an assumption-violating system needs an eigenvalue of multiplicity at least 2");
  }
  if (opt.ensure == EnsureProperty::AssumptionFail && opt.n < 2)
    throw GenerationFailedError(
        "an assumption-violating system needs an eigenvalue of multiplicity at least 2");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::string last_failure = "no attempt made";

  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    std::vector<JordanSpecGroup> groups =
        opt.structure.empty() ? random_structure(opt, rng) : opt.structure;
    const bool defective = has_defective_block(groups);
    if (opt.ensure == EnsureProperty::Ctrb) {
      int max_blocks = 0;
      for (const auto& g : groups)
        max_blocks = std::max(max_blocks, static_cast<int>(g.block_sizes.size()));
      if (max_blocks > opt.p) {
        if (!opt.structure.empty())
          throw GenerationFailedError(
              "an eigenvalue with more Jordan blocks than input columns cannot be "
              "full-state controllable");
        last_failure = "randomized structure exceeded the input count";
        continue;
      }
    }

    const double cond_max = defective ? std::min(opt.condition_max, kDefectiveConditionCap)
                                      : opt.condition_max;
    const ModalBasis basis =
        random_modal_basis(opt.n, std::min(opt.condition_min, cond_max), cond_max, rng);
    const Eigen::MatrixXd J = build_jordan(groups, opt.n);
    const std::vector<GroupColumns> cols = group_columns(groups);

    Eigen::MatrixXd Cm = random_dense(opt.q, opt.n, rng);
    Eigen::MatrixXd Bm = random_dense(opt.n, opt.p, rng);
    Eigen::MatrixXd Fm = random_dense(opt.r, opt.n, rng);

    switch (opt.ensure) {
      case EnsureProperty::None:
      case EnsureProperty::Obsv:
      case EnsureProperty::Ctrb:
        break;
      case EnsureProperty::NotObsv: {
        const GroupColumns& g = cols[rng() % cols.size()];
        Cm.middleCols(g.begin, g.size).setZero();
        Fm(0, g.begin) = 1.0 + std::abs(normal(rng));
        break;
      }
      case EnsureProperty::NotCtrb: {
        const GroupColumns& g = cols[rng() % cols.size()];
        Bm.middleRows(g.begin, g.size).setZero();
        Fm.row(0).setZero();
        Fm(0, g.begin + static_cast<int>(rng() % static_cast<std::uint64_t>(g.size))) =
            1.0 + std::abs(normal(rng));
        break;
      }
      case EnsureProperty::AssumptionFail: {
        const int gi = pick_group_with_multiplicity(groups);
        const GroupColumns& g = cols[static_cast<size_t>(gi)];
        int big_block_lead = -1;
        int col = g.begin;
        for (int s : groups[static_cast<size_t>(gi)].block_sizes) {
          if (s > 1 && big_block_lead < 0) big_block_lead = col;
          col += s;
        }
        for (int lead : g.leads) Fm.col(lead).setZero();
        if (big_block_lead >= 0) {
          // Chain present: leave the lead zero, point at the next chain slot.
          Fm(0, big_block_lead + 1) = 1.0 + std::abs(normal(rng));
        } else {
          // Semisimple group: equal lead columns are dependent but nonzero.
          Eigen::VectorXd v = random_dense(opt.r, 1, rng);
          v(0) = 1.0 + std::abs(v(0));
          for (int lead : g.leads) Fm.col(lead) = v;
        }
        break;
      }
    }

    const Eigen::MatrixXd Ad = basis.P_inv * J * basis.P;
    Eigen::MatrixXd Cd = Cm * basis.P;
    const Eigen::MatrixXd Bd = basis.P_inv * Bm;
    Eigen::MatrixXd Fd = Fm * basis.P;
    if (opt.unit_output_rows)
      for (int i = 0; i < Cd.rows(); ++i) {
        const double nrm = Cd.row(i).norm();
        if (nrm > 0.0) Cd.row(i) /= nrm;
      }

    const ScalarField field = ScalarField::float64(0.0, defective ? kDefectiveClusterTol : 0.0);
    Matrix A = Matrix::from_dense(Ad, field);
    Matrix B = Matrix::from_dense(Bd, field);
    Matrix C = Matrix::from_dense(Cd, field);
    Matrix F = Matrix::from_dense(Fd, field);

    if (opt.ensure == EnsureProperty::Obsv) {
      // Draw the target inside the reconstructible row space.
      const Matrix O = obsv_matrix(C, A);
      Fd = random_dense(opt.r, O.rows(), rng) * O.dense();
      F = Matrix::from_dense(Fd, field);
    }

    if (numerical_rank(F) != opt.r) {
      last_failure = "target matrix lost row rank";
      continue;
    }

    try {
      bool ok = true;
      switch (opt.ensure) {
        case EnsureProperty::None:
          break;
        case EnsureProperty::Obsv:
          ok = test_functional_obsv_kalman(ObsvTriple::make(C, A, F)).verdict;
          break;
        case EnsureProperty::NotObsv:
          ok = !test_functional_obsv_kalman(ObsvTriple::make(C, A, F)).verdict;
          break;
        case EnsureProperty::Ctrb: {
          const CtrbReport rep = test_output_ctrb_kalman(CtrbTriple::make(A, B, F));
          ok = rep.verdict && rep.full_state_controllable;
          break;
        }
        case EnsureProperty::NotCtrb:
          ok = !test_output_ctrb_kalman(CtrbTriple::make(A, B, F)).verdict;
          break;
        case EnsureProperty::AssumptionFail: {
          const JordanForm jf = jordan_decompose(A);
          ok = !lead_columns_independent(jf, F).all_ok;
          break;
        }
      }
      if (!ok) {
        last_failure = "drawn system failed post-verification";
        continue;
      }
    } catch (const DefectiveDecompositionError& e) {
      last_failure = e.what();
      continue;
    }

    GeneratedSystem out;
    out.A = A;
    out.B = B;
    out.C = C;
    out.F = F;
    out.structure = groups;
    out.seed = opt.seed;
    return out;
  }

  std::ostringstream os;
  os << "could not generate the requested system in " << opt.max_attempts
     << " attempts (last failure: " << last_failure << ")";
  throw GenerationFailedError(os.str());
}

}  // namespace functal
