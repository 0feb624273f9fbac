#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rbandits {

// Row-stochastic square matrix. Rows index the current state, columns the
// next state; states are 0-based indices in code and reported as 1-based
// labels at I/O boundaries.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  // Validates: square, entries in [0,1], row sums within 1e-12 of 1.
  StochasticMatrix(std::vector<double> row_major, int size);

  int size() const { return size_; }
  double operator()(int row, int col) const {
    return entries_[static_cast<std::size_t>(row) * size_ + col];
  }
  std::span<const double> row(int r) const {
    return {entries_.data() + static_cast<std::size_t>(r) * size_,
            static_cast<std::size_t>(size_)};
  }
  const std::vector<double>& entries() const { return entries_; }

 private:
  std::vector<double> entries_;
  int size_ = 0;
};

// Reset distribution: where the state lands after the active action.
class ResetPmf {
 public:
  ResetPmf() = default;
  // Validates: nonnegative, sums to 1 within 1e-12.
  explicit ResetPmf(std::vector<double> probabilities);

  int size() const { return static_cast<int>(probabilities_.size()); }
  double operator[](int i) const { return probabilities_[i]; }
  std::span<const double> values() const { return probabilities_; }

 private:
  std::vector<double> probabilities_;
};

// Per-state costs for the passive and active actions:
// c(x, 0) = passive[x], c(x, 1) = active[x].
struct CostSpec {
  std::vector<double> passive;
  std::vector<double> active;

  double cost(int state, int action) const {
    return action == 0 ? passive[state] : active[state];
  }
  double max_cost() const;
};

// One restart bandit: passive transitions follow P, the active action
// resets the state according to Q regardless of where the arm was.
struct Arm {
  StochasticMatrix P;
  ResetPmf Q;
  CostSpec cost;

  int size() const { return P.size(); }

  // Throws std::invalid_argument on any inconsistency (sizes, nonnegative
  // costs, P/Q invariants).
  void validate() const;
};

using Belief = std::vector<double>;

// Structured upper-triangular transition families P1..P4. All four are
// stochastically monotone, dominate the identity, and make the last state
// absorbing. `p` is the probability of staying put.
//   P1: superdiagonal gets 1-p.
//   P2: 1-p split evenly over the next two states.
//   P3: 1-p split 2/3, 1/3 over the next two states.
//   P4: 1-p spread evenly over all higher states.
// Rows that would overflow fold the excess into the last column.
StochasticMatrix make_structured_matrix(int family, double p, int size);

// Reset pmf with iid Exp(1) entries, normalized. Deterministic per seed;
// every entry strictly positive.
ResetPmf sample_reset_pmf(int size, std::uint64_t seed);

// Machine-maintenance costs: passive (x-1)^2 over labels x = 1..size,
// active 0.5*size^2 flat.
CostSpec default_cost(int size);

// Structural checks behind the threshold/indexability theory. A report,
// not an exception: callers that require the assumptions gate on ok().
struct AssumptionReport {
  bool p_stochastically_monotone = false;
  bool p_dominates_identity = false;
  bool passive_cost_nondecreasing = false;
  bool active_cost_nondecreasing = false;
  bool cost_submodular = false;  // active - passive nonincreasing in state

  bool ok() const {
    return p_stochastically_monotone && p_dominates_identity &&
           passive_cost_nondecreasing && active_cost_nondecreasing &&
           cost_submodular;
  }
  std::string describe() const;
};

AssumptionReport validate_assumptions(const Arm& arm);

// JSON document {size, P (row-major), Q, cost_passive, cost_active};
// doubles round-trip exactly.
std::string arm_to_json(const Arm& arm);
Arm arm_from_json(const std::string& text);

}  // namespace rbandits
