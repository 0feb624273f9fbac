#pragma once

#include <string>
#include <vector>

#include "rbandits/policy_eval.hpp"

namespace rbandits {

// Whittle indices for model A, one per elapsed-time state k. Indexability
// makes w nondecreasing in k up to numerical ties; violations beyond
// tolerance are recorded rather than silently accepted.
struct IndexTableA {
  std::vector<double> w;
  bool monotone = true;
  std::vector<int> monotone_violations;
};

// Whittle indices for model B together with the provenance of the adaptive
// greedy run: the distinct index values (breakpoints) in increasing order
// and, after each breakpoint, the per-state thresholds describing the grown
// passive set.
struct IndexTableB {
  int num_states = 0;
  int ell = 0;
  std::vector<double> w;                        // (s, k) row-major
  std::vector<double> breakpoints;              // ascending, distinct
  std::vector<std::vector<int>> passive_chain;  // thresholds per breakpoint

  double at(int s, int k) const {
    return w[static_cast<std::size_t>(s) * (ell + 1) + k];
  }
};

// Passive set over the truncated model-B state space. The algorithms only
// ever produce sets that are downward closed in k for every s (threshold
// representable); the free functions below validate that.
struct PassiveSetB {
  int num_states = 0;
  int ell = 0;
  std::vector<char> member;  // (s, k) row-major

  static PassiveSetB empty(int num_states, int ell);
  bool contains(int s, int k) const {
    return member[static_cast<std::size_t>(s) * (ell + 1) + k] != 0;
  }
  void insert(int s, int k) {
    member[static_cast<std::size_t>(s) * (ell + 1) + k] = 1;
  }
};

// Per-state thresholds of a threshold-representable passive set; throws if
// the set is not downward closed in k.
std::vector<int> thresholds_of(const PassiveSetB& w);

// Frontier of a passive set: for every s that is not yet fully passive, the
// single candidate (s, theta_s) whose addition keeps the set threshold
// representable. Empty set yields all (s, 0).
std::vector<InfoStateB> frontier(const PassiveSetB& w);

// Index ratio of one frontier candidate y probed at one state: the change
// in discounted cost per unit of activation measure given up when y is made
// passive. Throws if the probe is outside the comparison set (the two
// policies have equal activation measure there).
double mu_ratio(const ArmCache& cache, double beta, const PassiveSetB& w,
                InfoStateB y, InfoStateB probe);

// Closed-form Whittle indices for model A.
IndexTableA whittle_table_a(const ArmCache& cache, double beta);

// Adaptive-greedy Whittle indices for model B.
IndexTableB whittle_table_b(const ArmCache& cache, double beta);

std::string index_table_a_to_csv(const IndexTableA& table);
std::string index_table_b_to_csv(const IndexTableB& table);
std::string index_table_a_to_json(const IndexTableA& table);
std::string index_table_b_to_json(const IndexTableB& table);

// Equality tolerance used for activation-measure comparisons: closed forms
// differ by powers of beta, so genuine ties are structural rather than
// round-off. Relative 1e-10 with an absolute floor of 1e-12.
bool n_values_differ(double a, double b);

}  // namespace rbandits
