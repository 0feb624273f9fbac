#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rbandits/dp.hpp"
#include "rbandits/whittle.hpp"

namespace rbandits {

// n heterogeneous arms sharing one observation model, m of which can be
// activated per step.
struct Fleet {
  ObsModel model = ObsModel::A;
  int m = 1;
  std::vector<std::shared_ptr<const ArmCache>> arms;

  int size() const { return static_cast<int>(arms.size()); }
  void validate() const;
};

struct SimConfig {
  int horizon = 1000;
  int paths = 5000;
  double beta = 0.99;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SimResult {
  std::string policy;
  double j_hat = 0.0;
  double std_err = 0.0;
  int paths = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  double tail_bound = 0.0;  // discarded geometric tail, worst case
};

// A scheduling decision as a function of the per-arm local info states
// (model A: k; model B: s*(ell+1)+k). Implementations must be const and
// thread-safe; sample paths run in parallel.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual std::string name() const = 0;
  virtual JointAction decide(std::span<const int> locals) const = 0;
};

// Whittle index policy: activates exactly the m arms whose current states
// carry the largest indices; ties go to the lowest arm id.
class WhittleIndexPolicy : public SchedulingPolicy {
 public:
  WhittleIndexPolicy(const Fleet& fleet, double beta);
  // index tables supplied directly (one local-indexed vector per arm)
  WhittleIndexPolicy(std::vector<std::vector<double>> index_by_local, int m);

  std::string name() const override { return "wip"; }
  JointAction decide(std::span<const int> locals) const override;

 private:
  std::vector<std::vector<double>> w_;
  int m_;
};

// Myopic heuristic: m rounds of picking, from the remaining pool, the arm
// whose activation minimizes the pool's total immediate expected cost.
class MyopicPolicy : public SchedulingPolicy {
 public:
  MyopicPolicy(const Fleet& fleet);

  std::string name() const override { return "myp"; }
  JointAction decide(std::span<const int> locals) const override;

 private:
  std::vector<std::vector<double>> cost0_;  // per arm, per local state
  std::vector<std::vector<double>> cost1_;
  int m_;
};

// Table lookup into an exactly solved joint policy.
class OptPolicy : public SchedulingPolicy {
 public:
  OptPolicy(std::shared_ptr<const JointChain> chain,
            std::shared_ptr<const JointPolicy> policy);

  std::string name() const override { return "opt"; }
  JointAction decide(std::span<const int> locals) const override;

 private:
  std::shared_ptr<const JointChain> chain_;
  std::shared_ptr<const JointPolicy> policy_;
};

// Fixed-decision wrapper for tests and custom baselines.
class FunctionPolicy : public SchedulingPolicy {
 public:
  using Fn = std::function<JointAction(std::span<const int>)>;
  FunctionPolicy(std::string name, Fn fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  JointAction decide(std::span<const int> locals) const override {
    return fn_(locals);
  }

 private:
  std::string name_;
  Fn fn_;
};

// Monte Carlo estimate of the normalized discounted cost of `policy` on the
// fleet. Hidden states evolve per arm (passive: row of P; active: draw from
// Q) and drive the model-B observations; the policy only ever sees info
// states. Costs accrue as the expected cost of the current information
// state, the same objective the policy tables are solved against. One RNG
// substream per (path, arm) makes the result reproducible bit-for-bit and
// gives common random numbers across policies. Throws if the policy ever
// activates more than m arms.
SimResult simulate(const Fleet& fleet, const SchedulingPolicy& policy,
                   const SimConfig& config);

// Relative performance metrics, in percent.
double alpha_opt(double j_opt, double j_wip);
double eps_myp(double j_myp, double j_wip);

// Per-arm Whittle index tables of a fleet, flattened to local indexing.
std::vector<std::vector<double>> fleet_index_tables(const Fleet& fleet,
                                                    double beta);

// Adapters for exact joint-chain evaluation of a scheduling policy.
std::function<JointAction(std::span<const int>)> as_joint_policy(
    const SchedulingPolicy& policy);

}  // namespace rbandits
