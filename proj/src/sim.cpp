#include "rbandits/sim.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rbandits/rng.hpp"

namespace rbandits {

void Fleet::validate() const {
  int n = size();
  if (n < 2) throw std::invalid_argument("Fleet: need at least 2 arms");
  if (m < 1 || m >= n)
    throw std::invalid_argument("Fleet: require 1 <= m < n");
  int ell = arms[0]->ell();
  for (const auto& a : arms) {
    if (!a) throw std::invalid_argument("Fleet: null arm");
    if (a->ell() != ell)
      throw std::invalid_argument("Fleet: arms must share ell");
  }
}

void SimConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("SimConfig: horizon >= 1");
  if (paths < 1) throw std::invalid_argument("SimConfig: paths >= 1");
  check_beta(beta);
}

WhittleIndexPolicy::WhittleIndexPolicy(const Fleet& fleet, double beta)
    : WhittleIndexPolicy(fleet_index_tables(fleet, beta), fleet.m) {}

WhittleIndexPolicy::WhittleIndexPolicy(
    std::vector<std::vector<double>> index_by_local, int m)
    : w_(std::move(index_by_local)), m_(m) {}

JointAction WhittleIndexPolicy::decide(std::span<const int> locals) const {
  const int n = static_cast<int>(w_.size());
  JointAction mask = 0;
  for (int round = 0; round < m_; ++round) {
    int best = -1;
    double best_w = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (JointAction{1} << i)) continue;
      double wi = w_[i][locals[i]];
      if (best < 0 || wi > best_w) {
        best = i;
        best_w = wi;
      }
    }
    mask |= JointAction{1} << best;
  }
  return mask;
}

MyopicPolicy::MyopicPolicy(const Fleet& fleet) : m_(fleet.m) {
  fleet.validate();
  for (const auto& cache : fleet.arms) {
    int ell = cache->ell();
    int locals = fleet.model == ObsModel::A ? ell + 1
                                            : cache->size() * (ell + 1);
    std::vector<double> c0(locals), c1(locals);
    for (int z = 0; z < locals; ++z) {
      if (fleet.model == ObsModel::A) {
        c0[z] = cache->cost_a(z, 0);
        c1[z] = cache->cost_a(z, 1);
      } else {
        c0[z] = cache->cost_b(z / (ell + 1), z % (ell + 1), 0);
        c1[z] = cache->cost_b(z / (ell + 1), z % (ell + 1), 1);
      }
    }
    cost0_.push_back(std::move(c0));
    cost1_.push_back(std::move(c1));
  }
}

JointAction MyopicPolicy::decide(std::span<const int> locals) const {
  const int n = static_cast<int>(cost0_.size());
  JointAction mask = 0;
  // pool cost with everyone passive; each round re-evaluates the literal
  // "activate i, rest of pool passive" total
  double pool_passive = 0.0;
  std::vector<char> in_pool(n, 1);
  for (int i = 0; i < n; ++i) pool_passive += cost0_[i][locals[i]];
  for (int round = 0; round < m_; ++round) {
    int best = -1;
    double best_total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!in_pool[i]) continue;
      double total =
          pool_passive - cost0_[i][locals[i]] + cost1_[i][locals[i]];
      if (best < 0 || total < best_total) {
        best = i;
        best_total = total;
      }
    }
    mask |= JointAction{1} << best;
    in_pool[best] = 0;
    pool_passive -= cost0_[best][locals[best]];
  }
  return mask;
}

OptPolicy::OptPolicy(std::shared_ptr<const JointChain> chain,
                     std::shared_ptr<const JointPolicy> policy)
    : chain_(std::move(chain)), policy_(std::move(policy)) {
  if (!chain_ || !policy_ ||
      policy_->action.size() != chain_->num_states())
    throw std::invalid_argument("OptPolicy: chain/table mismatch");
}

JointAction OptPolicy::decide(std::span<const int> locals) const {
  return policy_->action[chain_->encode(locals)];
}

std::vector<std::vector<double>> fleet_index_tables(const Fleet& fleet,
                                                    double beta) {
  fleet.validate();
  std::vector<std::vector<double>> tables;
  tables.reserve(fleet.arms.size());
  for (const auto& cache : fleet.arms) {
    if (fleet.model == ObsModel::A) {
      tables.push_back(whittle_table_a(*cache, beta).w);
    } else {
      tables.push_back(whittle_table_b(*cache, beta).w);
    }
  }
  return tables;
}

namespace {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

// One sample path; the per-arm substreams are fixed by (seed, path, arm),
// so the draw sequence is identical for every policy (common random
// numbers) and every thread layout.
double run_path(const Fleet& fleet, const SchedulingPolicy& policy,
                const SimConfig& config, int path) {
  const int n = fleet.size();
  const int ell = fleet.arms[0]->ell();
  std::vector<Rng> rng;
  rng.reserve(n);
  for (int i = 0; i < n; ++i)
    rng.emplace_back(derive_stream(config.seed, static_cast<std::uint64_t>(path),
                                   static_cast<std::uint64_t>(i)));

  std::vector<int> hidden(n);  // true states, never shown to the policy
  std::vector<int> locals(n);
#ifndef NDEBUG
  std::vector<InfoStateA> shadow_a(n);
  std::vector<InfoStateB> shadow_b(n);
#endif
  for (int i = 0; i < n; ++i) {
    hidden[i] = rng[i].categorical(fleet.arms[i]->arm().Q.values());
    if (fleet.model == ObsModel::A) {
      locals[i] = 0;
    } else {
      locals[i] = hidden[i] * (ell + 1);
#ifndef NDEBUG
      shadow_b[i] = InfoStateB{hidden[i], 0};
#endif
    }
  }

  double value = 0.0;
  double weight = 1.0 - config.beta;
  for (int t = 0; t < config.horizon; ++t) {
    JointAction mask = policy.decide(locals);
    if (std::popcount(mask) > fleet.m)
      throw std::runtime_error("simulate: policy exceeded the budget m");

    // costs accrue as the expected cost of the current information state:
    // this is the objective every policy table is solved against, so OPT
    // stays optimal for the measured quantity (hidden states beyond the
    // truncation cap would otherwise leak costs the DP cannot see)
    double step_cost = 0.0;
    for (int i = 0; i < n; ++i) {
      int a = (mask >> i) & 1;
      if (fleet.model == ObsModel::A)
        step_cost += fleet.arms[i]->cost_a(locals[i], a);
      else
        step_cost += fleet.arms[i]->cost_b(locals[i] / (ell + 1),
                                           locals[i] % (ell + 1), a);
    }
    value += weight * step_cost;
    weight *= config.beta;

    for (int i = 0; i < n; ++i) {
      int a = (mask >> i) & 1;
      const Arm& arm = fleet.arms[i]->arm();
      if (a == 1) {
        hidden[i] = rng[i].categorical(arm.Q.values());
        locals[i] =
            fleet.model == ObsModel::A ? 0 : hidden[i] * (ell + 1);
      } else {
        hidden[i] = rng[i].categorical(arm.P.row(hidden[i]));
        if (fleet.model == ObsModel::A) {
          locals[i] = std::min(locals[i] + 1, ell);
        } else {
          int s = locals[i] / (ell + 1);
          locals[i] = s * (ell + 1) + std::min(locals[i] % (ell + 1) + 1, ell);
        }
      }
#ifndef NDEBUG
      // shadow recomputation through the public info-state dynamics
      if (fleet.model == ObsModel::A) {
        shadow_a[i] = step_info(shadow_a[i], a, ell);
        assert(locals[i] == shadow_a[i].k);
      } else {
        shadow_b[i] = step_info(shadow_b[i], a, ell,
                                a == 1 ? std::optional<int>(hidden[i])
                                       : std::nullopt);
        assert(locals[i] == shadow_b[i].state * (ell + 1) + shadow_b[i].k);
      }
#endif
    }
  }
  return value;
}

}  // namespace

SimResult simulate(const Fleet& fleet, const SchedulingPolicy& policy,
                   const SimConfig& config) {
  fleet.validate();
  config.validate();

  std::vector<double> path_value(config.paths);
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, config.paths));

  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&](int begin, int end) {
    try {
      for (int p = begin; p < end; ++p)
        path_value[p] = run_path(fleet, policy, config, p);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0, config.paths);
  } else {
    std::vector<std::thread> pool;
    int chunk = (config.paths + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int begin = t * chunk;
      int end = std::min(config.paths, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  // deterministic reduction independent of the thread layout
  double mean = pairwise_sum(path_value.data(), path_value.size()) /
                config.paths;
  double stderr_ = 0.0;
  if (config.paths > 1) {
    std::vector<double> sq(config.paths);
    for (int p = 0; p < config.paths; ++p) {
      double d = path_value[p] - mean;
      sq[p] = d * d;
    }
    double var =
        pairwise_sum(sq.data(), sq.size()) / (config.paths - 1);
    stderr_ = std::sqrt(var / config.paths);
  }

  double max_cost = 0.0;
  for (const auto& a : fleet.arms) max_cost += a->max_cost();
  SimResult result;
  result.policy = policy.name();
  result.j_hat = mean;
  result.std_err = stderr_;
  result.paths = config.paths;
  result.horizon = config.horizon;
  result.seed = config.seed;
  result.tail_bound =
      std::pow(config.beta, config.horizon) * max_cost / (1.0 - config.beta);
  return result;
}

double alpha_opt(double j_opt, double j_wip) {
  if (!(j_wip > 0.0)) throw std::invalid_argument("alpha_opt: J(wip) > 0");
  return 100.0 * j_opt / j_wip;
}

double eps_myp(double j_myp, double j_wip) {
  if (!(j_myp > 0.0)) throw std::invalid_argument("eps_myp: J(myp) > 0");
  return 100.0 * (j_myp - j_wip) / j_myp;
}

std::function<JointAction(std::span<const int>)> as_joint_policy(
    const SchedulingPolicy& policy) {
  return [&policy](std::span<const int> locals) {
    return policy.decide(locals);
  };
}

}  // namespace rbandits
