#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "rbandits/policy_eval.hpp"

namespace rbandits {

// Converged value function of the penalty-lambda single-arm problem on the
// truncated info-state space, with the greedy action table. Ties resolve to
// the active action.
struct ValueFunction {
  ObsModel model = ObsModel::A;
  int num_states = 1;  // 1 for model A, |X| for model B
  int ell = 0;
  double lambda = 0.0;
  std::vector<double> V;
  std::vector<char> g;

  std::size_t idx(int s, int k) const {
    return static_cast<std::size_t>(s) * (ell + 1) + k;
  }
};

// Value iteration to sup-norm accuracy `tol` (stops once both the span and
// the sup norm of successive differences fall below tol*(1-beta)/(2beta)).
// `warm_start`, when given, must match the state-space size.
ValueFunction value_iteration(const ArmCache& cache, ObsModel model,
                              double lambda, double beta, double tol = 1e-10,
                              const std::vector<double>* warm_start = nullptr);

// Smallest k with g = 1 (per s for model B); ell+1 when g is identically
// passive. Throws if g is not of threshold form.
ThresholdPolicyA extract_threshold_a(const ValueFunction& vf);
ThresholdPolicyB extract_threshold_b(const ValueFunction& vf);

// Memoized penalized-problem solver for one arm: maps lambda to a converged
// ValueFunction, warm-starting each solve from the nearest solved lambda.
// Bisection queries cluster around each state's index, so the cache saves
// most of the sweeps.
class PenalizedDp {
 public:
  PenalizedDp(const ArmCache& cache, ObsModel model, double beta,
              double vi_tol = 1e-12);

  const ValueFunction& solve(double lambda);

  // Half-width of a bracket that provably pins every index: beyond
  // +/- max_cost/(1-beta) one action is uniformly optimal.
  double bracket() const { return bracket_; }
  ObsModel model() const { return model_; }
  const ArmCache& cache() const { return cache_; }
  double beta() const { return beta_; }
  std::size_t space_size() const { return space_; }

 private:
  const ArmCache& cache_;
  ObsModel model_;
  double beta_;
  double vi_tol_;
  double bracket_;
  std::size_t space_;
  std::map<double, ValueFunction> solved_;
};

// Whittle index oracle: bisection on lambda for the flip point of the
// optimal action at one state. Throws with a lambda trace if the bracket
// endpoints do not show the expected actions.
double index_by_bisection(PenalizedDp& dp, InfoStateA state,
                          double tol_lambda = 1e-8);
double index_by_bisection(PenalizedDp& dp, InfoStateB state,
                          double tol_lambda = 1e-8);

// Passive sets along an ascending lambda grid plus the inclusion-chain
// check behind indexability. A report, not an exception.
struct PassiveScan {
  std::vector<double> lambdas;
  std::vector<std::vector<char>> passive;  // one membership table per lambda
  bool indexable = true;
  int first_violation = -1;  // grid index where inclusion first failed
};
PassiveScan passive_set_scan(PenalizedDp& dp,
                             std::span<const double> lambda_grid);

// ---------------------------------------------------------------------------
// Joint (multi-arm) chain: exact optimal policy and exact evaluation of
// stationary info-state policies, for fleets small enough to enumerate.
// ---------------------------------------------------------------------------

// Mixed-radix encoding of the product info-state space. A local state is k
// (model A) or s*(ell+1)+k (model B).
class JointChain {
 public:
  JointChain(std::vector<const ArmCache*> arms, ObsModel model,
             std::size_t state_cap = 1000000);

  int num_arms() const { return static_cast<int>(arms_.size()); }
  ObsModel model() const { return model_; }
  std::size_t num_states() const { return num_states_; }
  int local_size(int arm) const { return radix_[arm]; }
  const ArmCache& arm(int i) const { return *arms_[i]; }

  std::size_t encode(std::span<const int> locals) const;
  void decode(std::size_t state, std::span<int> locals) const;

  int local_of_a(int k) const { return k; }
  int local_of_b(int s, int k) const { return s * (ell_ + 1) + k; }
  int ell() const { return ell_; }

  double local_cost(int arm, int local, int action) const;
  int passive_next(int arm, int local) const;

 private:
  std::vector<const ArmCache*> arms_;
  ObsModel model_;
  int ell_;
  std::vector<int> radix_;
  std::vector<std::size_t> stride_;
  std::size_t num_states_;
};

// Action = bitmask over arms (bit i set = arm i active).
using JointAction = std::uint32_t;

struct JointPolicy {
  std::vector<JointAction> action;
  std::vector<double> value;
};

// Exact optimal joint policy with at most m activations per step (idling
// allowed). Ties prefer more activations, then lower arm ids.
JointPolicy joint_optimal_policy(const JointChain& chain, int m, double beta,
                                 double tol = 1e-10);

// Exact value of a fixed stationary policy given as a function of the local
// info states.
std::vector<double> joint_policy_value(
    const JointChain& chain,
    const std::function<JointAction(std::span<const int>)>& policy,
    double beta, double tol = 1e-10);

// Expected value at the start of an episode: all arms at k = 0 for model A;
// last-observed states drawn from each arm's Q for model B.
double initial_state_value(const JointChain& chain,
                           std::span<const double> value);

}  // namespace rbandits
