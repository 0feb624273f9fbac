#include "rbandits/dp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace rbandits {

namespace {

constexpr long kMaxSweeps = 2000000;

struct SweepResult {
  double sup_diff;
  double span_diff;
};

// One Bellman sweep of the truncated single-arm problem. Model A states are
// k; model B states are (s, k) flattened. Writes the minimizing values into
// `out` and greedy actions (tie -> active) into `g`.
SweepResult bellman_sweep(const ArmCache& cache, ObsModel model,
                          double lambda, double beta,
                          const std::vector<double>& v,
                          std::vector<double>& out, std::vector<char>& g) {
  const int ell = cache.ell();
  const int n = cache.size();
  double max_d = -std::numeric_limits<double>::infinity();
  double min_d = std::numeric_limits<double>::infinity();
  double sup = 0.0;

  auto update = [&](std::size_t z, double h0, double h1) {
    double val;
    if (h1 <= h0) {
      val = h1;
      g[z] = 1;
    } else {
      val = h0;
      g[z] = 0;
    }
    double d = val - v[z];
    sup = std::max(sup, std::fabs(d));
    max_d = std::max(max_d, d);
    min_d = std::min(min_d, d);
    out[z] = val;
  };

  if (model == ObsModel::A) {
    double v_reset = v[0];
    for (int k = 0; k <= ell; ++k) {
      double h0 = (1.0 - beta) * cache.cost_a(k, 0) +
                  beta * v[std::min(k + 1, ell)];
      double h1 = (1.0 - beta) * (cache.cost_a(k, 1) + lambda) +
                  beta * v_reset;
      update(k, h0, h1);
    }
  } else {
    double v_reset = 0.0;
    for (int r = 0; r < n; ++r)
      v_reset += cache.arm().Q[r] *
                 v[static_cast<std::size_t>(r) * (ell + 1)];
    for (int s = 0; s < n; ++s) {
      std::size_t off = static_cast<std::size_t>(s) * (ell + 1);
      for (int k = 0; k <= ell; ++k) {
        double h0 = (1.0 - beta) * cache.cost_b(s, k, 0) +
                    beta * v[off + std::min(k + 1, ell)];
        double h1 = (1.0 - beta) * (cache.cost_b(s, k, 1) + lambda) +
                    beta * v_reset;
        update(off + k, h0, h1);
      }
    }
  }
  return {sup, max_d - min_d};
}

}  // namespace

ValueFunction value_iteration(const ArmCache& cache, ObsModel model,
                              double lambda, double beta, double tol,
                              const std::vector<double>* warm_start) {
  check_beta(beta);
  if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol > 0");
  const int ell = cache.ell();
  const int rows = model == ObsModel::A ? 1 : cache.size();
  const std::size_t space = static_cast<std::size_t>(rows) * (ell + 1);

  ValueFunction vf;
  vf.model = model;
  vf.num_states = rows;
  vf.ell = ell;
  vf.lambda = lambda;
  if (warm_start != nullptr) {
    if (warm_start->size() != space)
      throw std::invalid_argument("value_iteration: warm start size");
    vf.V = *warm_start;
  } else {
    vf.V.assign(space, 0.0);
  }
  vf.g.assign(space, 0);

  std::vector<double> next(space);
  const double stop = tol * (1.0 - beta) / (2.0 * beta);
  for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
    SweepResult r = bellman_sweep(cache, model, lambda, beta, vf.V, next,
                                  vf.g);
    vf.V.swap(next);
    if (r.sup_diff < stop && r.span_diff < stop) return vf;
  }
  throw std::runtime_error("value_iteration: sweep budget exhausted");
}

namespace {

int first_active(const std::vector<char>& g, std::size_t off, int ell) {
  int theta = ell + 1;
  for (int k = 0; k <= ell; ++k) {
    if (g[off + k] != 0) {
      theta = k;
      break;
    }
  }
  for (int k = theta; k <= ell; ++k) {
    if (g[off + k] == 0)
      throw std::runtime_error(
          "extract_threshold: greedy policy is not of threshold form");
  }
  return theta;
}

}  // namespace

ThresholdPolicyA extract_threshold_a(const ValueFunction& vf) {
  if (vf.model != ObsModel::A)
    throw std::invalid_argument("extract_threshold_a: model mismatch");
  return ThresholdPolicyA{first_active(vf.g, 0, vf.ell)};
}

ThresholdPolicyB extract_threshold_b(const ValueFunction& vf) {
  if (vf.model != ObsModel::B)
    throw std::invalid_argument("extract_threshold_b: model mismatch");
  ThresholdPolicyB pol;
  pol.theta.resize(vf.num_states);
  for (int s = 0; s < vf.num_states; ++s)
    pol.theta[s] =
        first_active(vf.g, static_cast<std::size_t>(s) * (vf.ell + 1),
                     vf.ell);
  return pol;
}

PenalizedDp::PenalizedDp(const ArmCache& cache, ObsModel model, double beta,
                         double vi_tol)
    : cache_(cache), model_(model), beta_(beta), vi_tol_(vi_tol) {
  check_beta(beta);
  bracket_ = cache.max_cost() / (1.0 - beta) + 1.0;
  space_ = static_cast<std::size_t>(model == ObsModel::A ? 1 : cache.size()) *
           (cache.ell() + 1);
}

const ValueFunction& PenalizedDp::solve(double lambda) {
  auto it = solved_.lower_bound(lambda);
  if (it != solved_.end() && it->first == lambda) return it->second;

  // warm start from the nearest solved penalty
  const std::vector<double>* warm = nullptr;
  if (it != solved_.end()) warm = &it->second.V;
  if (it != solved_.begin()) {
    auto prev = std::prev(it);
    if (warm == nullptr ||
        lambda - prev->first < it->first - lambda)
      warm = &prev->second.V;
  }
  ValueFunction vf =
      value_iteration(cache_, model_, lambda, beta_, vi_tol_, warm);
  return solved_.emplace(lambda, std::move(vf)).first->second;
}

namespace {

double bisect_index(PenalizedDp& dp, std::size_t state_index,
                    double tol_lambda) {
  if (!(tol_lambda > 0.0))
    throw std::invalid_argument("index_by_bisection: tol_lambda > 0");
  double lo = -dp.bracket();
  double hi = dp.bracket();
  if (dp.solve(lo).g[state_index] != 1 || dp.solve(hi).g[state_index] != 0) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "index_by_bisection: bracket [%g, %g] does not pin the "
                  "action flip at state %zu",
                  lo, hi, state_index);
    throw std::runtime_error(msg);
  }
  while (hi - lo > tol_lambda) {
    double mid = 0.5 * (lo + hi);
    if (dp.solve(mid).g[state_index] == 0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double index_by_bisection(PenalizedDp& dp, InfoStateA state,
                          double tol_lambda) {
  if (dp.model() != ObsModel::A)
    throw std::invalid_argument("index_by_bisection: model mismatch");
  return bisect_index(dp, static_cast<std::size_t>(state.k), tol_lambda);
}

double index_by_bisection(PenalizedDp& dp, InfoStateB state,
                          double tol_lambda) {
  if (dp.model() != ObsModel::B)
    throw std::invalid_argument("index_by_bisection: model mismatch");
  std::size_t z = static_cast<std::size_t>(state.state) *
                      (dp.cache().ell() + 1) +
                  state.k;
  return bisect_index(dp, z, tol_lambda);
}

PassiveScan passive_set_scan(PenalizedDp& dp,
                             std::span<const double> lambda_grid) {
  for (std::size_t i = 0; i + 1 < lambda_grid.size(); ++i) {
    if (lambda_grid[i] > lambda_grid[i + 1])
      throw std::invalid_argument("passive_set_scan: grid must be ascending");
  }
  PassiveScan scan;
  scan.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
  scan.passive.reserve(lambda_grid.size());
  for (double lam : lambda_grid) {
    const ValueFunction& vf = dp.solve(lam);
    std::vector<char> w(vf.g.size());
    for (std::size_t z = 0; z < vf.g.size(); ++z) w[z] = vf.g[z] == 0;
    scan.passive.push_back(std::move(w));
  }
  for (std::size_t i = 0; i + 1 < scan.passive.size(); ++i) {
    for (std::size_t z = 0; z < scan.passive[i].size(); ++z) {
      if (scan.passive[i][z] && !scan.passive[i + 1][z]) {
        scan.indexable = false;
        scan.first_violation = static_cast<int>(i);
        return scan;
      }
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Joint chain
// ---------------------------------------------------------------------------

JointChain::JointChain(std::vector<const ArmCache*> arms, ObsModel model,
                       std::size_t state_cap)
    : arms_(std::move(arms)), model_(model) {
  if (arms_.empty()) throw std::invalid_argument("JointChain: no arms");
  if (arms_.size() > 25) throw std::invalid_argument("JointChain: too many arms");
  ell_ = arms_[0]->ell();
  for (const auto* a : arms_) {
    if (a->ell() != ell_)
      throw std::invalid_argument("JointChain: arms must share ell");
  }
  radix_.resize(arms_.size());
  stride_.resize(arms_.size());
  num_states_ = 1;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    radix_[i] = model == ObsModel::A ? ell_ + 1
                                     : arms_[i]->size() * (ell_ + 1);
    stride_[i] = num_states_;
    if (num_states_ > state_cap / radix_[i] + 1)
      throw std::invalid_argument("JointChain: state space exceeds cap");
    num_states_ *= radix_[i];
    if (num_states_ > state_cap)
      throw std::invalid_argument("JointChain: state space exceeds cap");
  }
}

std::size_t JointChain::encode(std::span<const int> locals) const {
  std::size_t z = 0;
  for (std::size_t i = 0; i < arms_.size(); ++i)
    z += stride_[i] * static_cast<std::size_t>(locals[i]);
  return z;
}

void JointChain::decode(std::size_t state, std::span<int> locals) const {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    locals[i] = static_cast<int>(state % radix_[i]);
    state /= radix_[i];
  }
}

double JointChain::local_cost(int arm, int local, int action) const {
  if (model_ == ObsModel::A) return arms_[arm]->cost_a(local, action);
  return arms_[arm]->cost_b(local / (ell_ + 1), local % (ell_ + 1), action);
}

int JointChain::passive_next(int, int local) const {
  if (model_ == ObsModel::A) return std::min(local + 1, ell_);
  int s = local / (ell_ + 1);
  int k = local % (ell_ + 1);
  return s * (ell_ + 1) + std::min(k + 1, ell_);
}

namespace {

// Expected continuation value for a joint action: passive arms move
// deterministically, each active arm branches over its reset distribution
// (model B) or jumps to k = 0 (model A).
class JointBackup {
 public:
  JointBackup(const JointChain& chain, const std::vector<double>& v)
      : chain_(chain),
        v_(v),
        locals_(chain.num_arms()),
        next_(chain.num_arms()) {}

  double operator()(std::size_t state, JointAction action) {
    const int n = chain_.num_arms();
    chain_.decode(state, locals_);
    active_.clear();
    for (int i = 0; i < n; ++i) {
      if (action & (JointAction{1} << i)) {
        if (chain_.model() == ObsModel::A)
          next_[i] = 0;
        else
          active_.push_back(i);
      } else {
        next_[i] = chain_.passive_next(i, locals_[i]);
      }
    }
    if (active_.empty()) return v_[chain_.encode(next_)];
    return branch(0, 1.0);
  }

  std::span<const int> locals() const { return locals_; }

 private:
  double branch(std::size_t idx, double prob) {
    if (idx == active_.size()) return prob * v_[chain_.encode(next_)];
    int arm = active_[idx];
    const auto& q = chain_.arm(arm).arm().Q;
    double acc = 0.0;
    for (int r = 0; r < q.size(); ++r) {
      if (q[r] == 0.0) continue;
      next_[arm] = chain_.local_of_b(r, 0);
      acc += branch(idx + 1, prob * q[r]);
    }
    return acc;
  }

  const JointChain& chain_;
  const std::vector<double>& v_;
  std::vector<int> locals_;
  std::vector<int> next_;
  std::vector<int> active_;
};

std::vector<JointAction> enumerate_actions(int n, int m) {
  std::vector<JointAction> actions;
  for (JointAction mask = 0; mask < (JointAction{1} << n); ++mask) {
    if (std::popcount(mask) <= m) actions.push_back(mask);
  }
  // prefer more activations, then lower arm ids, when values tie
  std::stable_sort(actions.begin(), actions.end(),
                   [](JointAction a, JointAction b) {
                     int pa = std::popcount(a), pb = std::popcount(b);
                     if (pa != pb) return pa > pb;
                     return a < b;
                   });
  return actions;
}

double joint_state_cost(const JointChain& chain, std::span<const int> locals,
                        JointAction action) {
  double c = 0.0;
  for (int i = 0; i < chain.num_arms(); ++i)
    c += chain.local_cost(i, locals[i],
                          (action >> i) & 1);
  return c;
}

}  // namespace

JointPolicy joint_optimal_policy(const JointChain& chain, int m, double beta,
                                 double tol) {
  check_beta(beta);
  if (m < 0 || m > chain.num_arms())
    throw std::invalid_argument("joint_optimal_policy: bad budget");
  const std::size_t space = chain.num_states();
  std::vector<JointAction> actions = enumerate_actions(chain.num_arms(), m);

  JointPolicy pol;
  pol.value.assign(space, 0.0);
  pol.action.assign(space, 0);
  std::vector<double> next(space);

  const double stop = tol * (1.0 - beta) / (2.0 * beta);
  for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
    JointBackup backup(chain, pol.value);
    double sup = 0.0, max_d = -1e300, min_d = 1e300;
    for (std::size_t z = 0; z < space; ++z) {
      double best = std::numeric_limits<double>::infinity();
      JointAction best_a = 0;
      for (JointAction a : actions) {
        double cont = backup(z, a);
        double h = (1.0 - beta) * joint_state_cost(chain, backup.locals(), a) +
                   beta * cont;
        if (h < best) {
          best = h;
          best_a = a;
        }
      }
      pol.action[z] = best_a;
      double d = best - pol.value[z];
      sup = std::max(sup, std::fabs(d));
      max_d = std::max(max_d, d);
      min_d = std::min(min_d, d);
      next[z] = best;
    }
    pol.value.swap(next);
    if (sup < stop && max_d - min_d < stop) return pol;
  }
  throw std::runtime_error("joint_optimal_policy: sweep budget exhausted");
}

std::vector<double> joint_policy_value(
    const JointChain& chain,
    const std::function<JointAction(std::span<const int>)>& policy,
    double beta, double tol) {
  check_beta(beta);
  const std::size_t space = chain.num_states();

  // freeze the policy once; evaluation then sweeps a fixed kernel
  std::vector<JointAction> action(space);
  {
    std::vector<int> locals(chain.num_arms());
    for (std::size_t z = 0; z < space; ++z) {
      chain.decode(z, locals);
      JointAction a = policy(locals);
      if (std::popcount(a) > chain.num_arms())
        throw std::invalid_argument("joint_policy_value: bad action");
      action[z] = a;
    }
  }

  std::vector<double> v(space, 0.0), next(space);
  const double stop = tol * (1.0 - beta) / (2.0 * beta);
  for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
    JointBackup backup(chain, v);
    double sup = 0.0, max_d = -1e300, min_d = 1e300;
    for (std::size_t z = 0; z < space; ++z) {
      double cont = backup(z, action[z]);
      double h =
          (1.0 - beta) * joint_state_cost(chain, backup.locals(), action[z]) +
          beta * cont;
      double d = h - v[z];
      sup = std::max(sup, std::fabs(d));
      max_d = std::max(max_d, d);
      min_d = std::min(min_d, d);
      next[z] = h;
    }
    v.swap(next);
    if (sup < stop && max_d - min_d < stop) return v;
  }
  throw std::runtime_error("joint_policy_value: sweep budget exhausted");
}

namespace {

double initial_value_rec(const JointChain& chain,
                         std::span<const double> value,
                         std::vector<int>& locals, int arm) {
  if (arm == chain.num_arms()) return value[chain.encode(locals)];
  const auto& q = chain.arm(arm).arm().Q;
  double acc = 0.0;
  for (int s = 0; s < q.size(); ++s) {
    if (q[s] == 0.0) continue;
    locals[arm] = chain.local_of_b(s, 0);
    acc += q[s] * initial_value_rec(chain, value, locals, arm + 1);
  }
  return acc;
}

}  // namespace

double initial_state_value(const JointChain& chain,
                           std::span<const double> value) {
  std::vector<int> locals(chain.num_arms(), 0);
  if (chain.model() == ObsModel::A) return value[chain.encode(locals)];
  return initial_value_rec(chain, value, locals, 0);
}

}  // namespace rbandits
