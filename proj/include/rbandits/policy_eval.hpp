#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rbandits/info.hpp"

namespace rbandits {

// Threshold policies: passive while k < theta, active for k >= theta.
// theta == ell+1 is the sentinel for "never activate within the truncation";
// under it the elapsed-time coordinate absorbs at ell.
struct ThresholdPolicyA {
  int theta = 0;
};
struct ThresholdPolicyB {
  std::vector<int> theta;  // one threshold per last-observed state
};

// Normalized discounted cost D and activation measure N of a stationary
// policy, per information state. Both are (1-beta)-normalized, so N lies in
// [0, 1] and equals 1 exactly for the always-active policy.
struct PolicyValue {
  ObsModel model = ObsModel::A;
  int num_states = 1;  // 1 for model A, |X| for model B
  int ell = 0;
  std::vector<double> D;
  std::vector<double> N;

  double d(int s, int k) const { return D[idx(s, k)]; }
  double n(int s, int k) const { return N[idx(s, k)]; }
  double d_a(int k) const { return D[k]; }
  double n_a(int k) const { return N[k]; }
  std::size_t idx(int s, int k) const {
    return static_cast<std::size_t>(s) * (ell + 1) + k;
  }
  std::size_t table_size() const {
    return static_cast<std::size_t>(num_states) * (ell + 1);
  }
};

// L(k): expected discounted cost accrued from k until the first activation
// (or forever, under the sentinel). M(k): discounted weight of that first
// activation. States at or above the threshold activate immediately.
std::pair<std::vector<double>, std::vector<double>> lm_values_a(
    const ArmCache& cache, ThresholdPolicyA policy, double beta);
std::pair<std::vector<double>, std::vector<double>> lm_values_b(
    const ArmCache& cache, const ThresholdPolicyB& policy, double beta);

// Closed-form D/N via renewal at k = 0 (model A) and via the dense solve of
// the |X| x |X| renewal system (model B).
PolicyValue dn_values_a(const ArmCache& cache, ThresholdPolicyA policy,
                        double beta);
PolicyValue dn_values_b(const ArmCache& cache, const ThresholdPolicyB& policy,
                        double beta);

// Independent check: backward recursion over `horizon` steps of the
// truncated info-state chain. tail_bound is the worst-case contribution of
// the discarded tail.
struct FiniteHorizonResult {
  PolicyValue value;
  double tail_bound = 0.0;
};
FiniteHorizonResult finite_horizon_eval(const ArmCache& cache,
                                        ThresholdPolicyA policy, int horizon,
                                        double beta);
FiniteHorizonResult finite_horizon_eval(const ArmCache& cache,
                                        const ThresholdPolicyB& policy,
                                        int horizon, double beta);

// CSV with columns s,k,D,N; s is a 1-based state label for model B and 0
// for model A (no observed-state coordinate).
std::string policy_value_to_csv(const PolicyValue& pv);

void check_beta(double beta);
void check_threshold(int theta, int ell);

}  // namespace rbandits
