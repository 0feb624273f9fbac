#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rbandits/arm.hpp"

namespace rbandits {

// Observation models. Under A the operator sees nothing; under B the
// post-reset state is revealed whenever the arm is activated.
enum class ObsModel { A, B };

// Model A information state: steps since the last activation.
struct InfoStateA {
  int k = 0;
};

// Model B information state: last observed state (0-based index) plus
// steps elapsed since that observation.
struct InfoStateB {
  int state = 0;
  int k = 0;
};

// Deterministic info-state dynamics with the elapsed-time coordinate capped
// at ell. Model B activation consumes the freshly drawn post-reset state.
InfoStateA step_info(InfoStateA info, int action, int ell);
InfoStateB step_info(InfoStateB info, int action, int ell,
                     std::optional<int> revealed_state);

// Precomputed beliefs and expected one-step costs for one arm over the
// truncated window k = 0..ell. Immutable after construction; safe to share
// across threads.
//
// belief_b(s, k) is row s of P^k, belief_a(k) = Q P^k. Powers are built by
// repeated row-vector multiplication; rows are renormalized if accumulated
// drift exceeds 1e-12.
class ArmCache {
 public:
  ArmCache(Arm arm, int ell);

  const Arm& arm() const { return arm_; }
  int ell() const { return ell_; }
  int size() const { return arm_.size(); }

  std::span<const double> belief_a(int k) const {
    return {belief_b_.data() + offset_a(k), static_cast<std::size_t>(size_)};
  }
  std::span<const double> belief_b(int s, int k) const {
    return {belief_b_.data() + offset_b(s, k),
            static_cast<std::size_t>(size_)};
  }

  // Expected cost of the current belief under an action.
  double cost_a(int k, int action) const {
    return cbar_a_[static_cast<std::size_t>(action) * (ell_ + 1) + k];
  }
  double cost_b(int s, int k, int action) const {
    return cbar_b_[(static_cast<std::size_t>(action) * size_ + s) *
                       (ell_ + 1) +
                   k];
  }

  double max_cost() const { return max_cost_; }

 private:
  std::size_t offset_b(int s, int k) const {
    return (static_cast<std::size_t>(s) * (ell_ + 1) + k) * size_;
  }
  std::size_t offset_a(int k) const {
    return (static_cast<std::size_t>(size_) * (ell_ + 1) + k) * size_;
  }

  Arm arm_;
  int ell_;
  int size_;
  // rows of P^k for every s (model B), then the Q P^k block (model A)
  std::vector<double> belief_b_;
  std::vector<double> cbar_a_;
  std::vector<double> cbar_b_;
  double max_cost_;
};

// Spec-level accessors over the cache.
Belief belief_of_info(const ArmCache& cache, InfoStateA info);
Belief belief_of_info(const ArmCache& cache, InfoStateB info);
double expected_cost(const ArmCache& cache, InfoStateA info, int action);
double expected_cost(const ArmCache& cache, InfoStateB info, int action);

}  // namespace rbandits
