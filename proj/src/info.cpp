#include "rbandits/info.hpp"

#include <cmath>
#include <stdexcept>

namespace rbandits {

InfoStateA step_info(InfoStateA info, int action, int ell) {
  if (action == 1) return {0};
  return {std::min(info.k + 1, ell)};
}

InfoStateB step_info(InfoStateB info, int action, int ell,
                     std::optional<int> revealed_state) {
  if (action == 1) {
    if (!revealed_state)
      throw std::invalid_argument(
          "step_info: model B activation needs the revealed reset state");
    return {*revealed_state, 0};
  }
  if (revealed_state)
    throw std::invalid_argument(
        "step_info: passive step must not carry a revealed state");
  return {info.state, std::min(info.k + 1, ell)};
}

ArmCache::ArmCache(Arm arm, int ell) : arm_(std::move(arm)), ell_(ell) {
  arm_.validate();
  if (ell < 1) throw std::invalid_argument("ArmCache: ell must be >= 1");
  size_ = arm_.size();
  const int n = size_;
  const auto& P = arm_.P;

  belief_b_.assign(static_cast<std::size_t>(n + 1) * (ell + 1) * n, 0.0);
  // k = 0: point masses for each s, Q for the model-A block
  for (int s = 0; s < n; ++s) belief_b_[offset_b(s, 0) + s] = 1.0;
  for (int x = 0; x < n; ++x) belief_b_[offset_a(0) + x] = arm_.Q[x];

  std::vector<double> next(n);
  for (int row = 0; row <= n; ++row) {
    for (int k = 1; k <= ell; ++k) {
      const double* prev = belief_b_.data() +
                           (row < n ? offset_b(row, k - 1) : offset_a(k - 1));
      std::fill(next.begin(), next.end(), 0.0);
      for (int x = 0; x < n; ++x) {
        double px = prev[x];
        if (px == 0.0) continue;
        auto prow = P.row(x);
        for (int y = 0; y < n; ++y) next[y] += px * prow[y];
      }
      double sum = 0.0;
      for (double v : next) sum += v;
      if (std::fabs(sum - 1.0) > 1e-12)
        for (double& v : next) v /= sum;
      double* dst =
          belief_b_.data() + (row < n ? offset_b(row, k) : offset_a(k));
      std::copy(next.begin(), next.end(), dst);
    }
  }

  cbar_a_.assign(2 * static_cast<std::size_t>(ell + 1), 0.0);
  cbar_b_.assign(2 * static_cast<std::size_t>(n) * (ell + 1), 0.0);
  for (int a = 0; a < 2; ++a) {
    const auto& c = a == 0 ? arm_.cost.passive : arm_.cost.active;
    for (int k = 0; k <= ell; ++k) {
      double acc = 0.0;
      auto bel = belief_a(k);
      for (int x = 0; x < n; ++x) acc += bel[x] * c[x];
      cbar_a_[static_cast<std::size_t>(a) * (ell + 1) + k] = acc;
      for (int s = 0; s < n; ++s) {
        double accs = 0.0;
        auto bs = belief_b(s, k);
        for (int x = 0; x < n; ++x) accs += bs[x] * c[x];
        cbar_b_[(static_cast<std::size_t>(a) * n + s) * (ell + 1) + k] = accs;
      }
    }
  }
  max_cost_ = arm_.cost.max_cost();
}

Belief belief_of_info(const ArmCache& cache, InfoStateA info) {
  auto b = cache.belief_a(info.k);
  return Belief(b.begin(), b.end());
}

Belief belief_of_info(const ArmCache& cache, InfoStateB info) {
  auto b = cache.belief_b(info.state, info.k);
  return Belief(b.begin(), b.end());
}

double expected_cost(const ArmCache& cache, InfoStateA info, int action) {
  return cache.cost_a(info.k, action);
}

double expected_cost(const ArmCache& cache, InfoStateB info, int action) {
  return cache.cost_b(info.state, info.k, action);
}

}  // namespace rbandits
