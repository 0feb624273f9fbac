#include "rbandits/arm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rbandits/rng.hpp"

namespace rbandits {

namespace {
constexpr double kRowSumTol = 1e-12;
}

StochasticMatrix::StochasticMatrix(std::vector<double> row_major, int size)
    : entries_(std::move(row_major)), size_(size) {
  if (size < 1 || entries_.size() != static_cast<std::size_t>(size) * size)
    throw std::invalid_argument("StochasticMatrix: bad dimensions");
  for (int r = 0; r < size_; ++r) {
    double sum = 0.0;
    for (int c = 0; c < size_; ++c) {
      double v = (*this)(r, c);
      if (!(v >= 0.0 && v <= 1.0 + kRowSumTol))
        throw std::invalid_argument("StochasticMatrix: entry outside [0,1]");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kRowSumTol)
      throw std::invalid_argument("StochasticMatrix: row does not sum to 1");
  }
}

ResetPmf::ResetPmf(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty())
    throw std::invalid_argument("ResetPmf: empty");
  double sum = 0.0;
  for (double v : probabilities_) {
    if (!(v >= 0.0)) throw std::invalid_argument("ResetPmf: negative entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kRowSumTol)
    throw std::invalid_argument("ResetPmf: does not sum to 1");
}

double CostSpec::max_cost() const {
  double m = 0.0;
  for (double v : passive) m = std::max(m, v);
  for (double v : active) m = std::max(m, v);
  return m;
}

void Arm::validate() const {
  int n = P.size();
  if (n < 2) throw std::invalid_argument("Arm: need at least 2 states");
  if (Q.size() != n) throw std::invalid_argument("Arm: Q size mismatch");
  if (static_cast<int>(cost.passive.size()) != n ||
      static_cast<int>(cost.active.size()) != n)
    throw std::invalid_argument("Arm: cost table size mismatch");
  for (int x = 0; x < n; ++x) {
    if (cost.passive[x] < 0.0 || cost.active[x] < 0.0)
      throw std::invalid_argument("Arm: costs must be nonnegative");
  }
}

StochasticMatrix make_structured_matrix(int family, double p, int size) {
  if (family < 1 || family > 4)
    throw std::invalid_argument("make_structured_matrix: family must be 1..4");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("make_structured_matrix: p outside [0,1]");
  if (size < 2)
    throw std::invalid_argument("make_structured_matrix: size must be >= 2");

  std::vector<double> m(static_cast<std::size_t>(size) * size, 0.0);
  auto at = [&](int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * size + c];
  };

  if (family == 4) {
    for (int i = 0; i < size - 1; ++i) {
      at(i, i) = p;
      double qi = (1.0 - p) / (size - 1 - i);
      for (int j = i + 1; j < size; ++j) at(i, j) = qi;
    }
  } else {
    double q1, q2;
    switch (family) {
      case 1: q1 = 1.0 - p; q2 = 0.0; break;
      case 2: q1 = (1.0 - p) / 2.0; q2 = (1.0 - p) / 2.0; break;
      default: q1 = 2.0 * (1.0 - p) / 3.0; q2 = (1.0 - p) / 3.0; break;
    }
    for (int i = 0; i < size - 1; ++i) {
      at(i, i) = p;
      if (i + 2 <= size - 1) {
        at(i, i + 1) = q1;
        at(i, i + 2) = q2;
      } else {
        // second-to-last row: both jumps land in the absorbing state
        at(i, i + 1) = q1 + q2;
      }
    }
  }
  at(size - 1, size - 1) = 1.0;
  return StochasticMatrix(std::move(m), size);
}

ResetPmf sample_reset_pmf(int size, std::uint64_t seed) {
  if (size < 2) throw std::invalid_argument("sample_reset_pmf: size >= 2");
  Rng rng(seed);
  std::vector<double> q(size);
  double sum = 0.0;
  for (double& v : q) {
    v = rng.exponential();
    sum += v;
  }
  for (double& v : q) v /= sum;
  // exact renormalization so the pmf invariant holds bit-for-bit
  double s2 = 0.0;
  for (double v : q) s2 += v;
  q.back() += 1.0 - s2;
  return ResetPmf(std::move(q));
}

CostSpec default_cost(int size) {
  if (size < 2) throw std::invalid_argument("default_cost: size >= 2");
  CostSpec c;
  c.passive.resize(size);
  c.active.assign(size, 0.5 * size * size);
  for (int i = 0; i < size; ++i) c.passive[i] = static_cast<double>(i) * i;
  return c;
}

namespace {

// tail(r, z) = sum of row r over columns >= z
double row_tail(const StochasticMatrix& p, int r, int z) {
  double s = 0.0;
  for (int c = z; c < p.size(); ++c) s += p(r, c);
  return s;
}

}  // namespace

AssumptionReport validate_assumptions(const Arm& arm) {
  constexpr double tol = 1e-10;
  const auto& P = arm.P;
  int n = P.size();
  AssumptionReport rep;

  // monotone: tail mass at every cutoff is nondecreasing in the row
  rep.p_stochastically_monotone = true;
  for (int z = 0; z < n && rep.p_stochastically_monotone; ++z) {
    for (int r = 0; r + 1 < n; ++r) {
      if (row_tail(P, r, z) > row_tail(P, r + 1, z) + tol) {
        rep.p_stochastically_monotone = false;
        break;
      }
    }
  }

  // dominates identity: row r keeps all mass on states >= r
  rep.p_dominates_identity = true;
  for (int r = 0; r < n && rep.p_dominates_identity; ++r) {
    if (row_tail(P, r, r) < 1.0 - tol) rep.p_dominates_identity = false;
  }

  auto nondecreasing = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] > v[i + 1] + tol) return false;
    return true;
  };
  rep.passive_cost_nondecreasing = nondecreasing(arm.cost.passive);
  rep.active_cost_nondecreasing = nondecreasing(arm.cost.active);

  rep.cost_submodular = true;
  for (int x = 0; x + 1 < n; ++x) {
    double d0 = arm.cost.active[x] - arm.cost.passive[x];
    double d1 = arm.cost.active[x + 1] - arm.cost.passive[x + 1];
    if (d1 > d0 + tol) {
      rep.cost_submodular = false;
      break;
    }
  }
  return rep;
}

std::string AssumptionReport::describe() const {
  std::ostringstream os;
  os << "P monotone: " << (p_stochastically_monotone ? "yes" : "NO")
     << ", P >= I: " << (p_dominates_identity ? "yes" : "NO")
     << ", passive cost nondecreasing: "
     << (passive_cost_nondecreasing ? "yes" : "NO")
     << ", active cost nondecreasing: "
     << (active_cost_nondecreasing ? "yes" : "NO")
     << ", submodular: " << (cost_submodular ? "yes" : "NO");
  return os.str();
}

std::string arm_to_json(const Arm& arm) {
  nlohmann::json j;
  j["size"] = arm.size();
  j["P"] = arm.P.entries();
  j["Q"] = std::vector<double>(arm.Q.values().begin(), arm.Q.values().end());
  j["cost_passive"] = arm.cost.passive;
  j["cost_active"] = arm.cost.active;
  return j.dump(2);
}

Arm arm_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int size = j.at("size").get<int>();
  Arm arm{StochasticMatrix(j.at("P").get<std::vector<double>>(), size),
          ResetPmf(j.at("Q").get<std::vector<double>>()),
          CostSpec{j.at("cost_passive").get<std::vector<double>>(),
                   j.at("cost_active").get<std::vector<double>>()}};
  arm.validate();
  return arm;
}

}  // namespace rbandits
