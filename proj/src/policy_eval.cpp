#include "rbandits/policy_eval.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rbandits/linalg.hpp"

namespace rbandits {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in (0,1)");
}

void check_threshold(int theta, int ell) {
  if (theta < 0 || theta > ell + 1)
    throw std::invalid_argument("threshold outside [0, ell+1]");
}

namespace {

// Shared L/M backward recursion for one observed-state row. cost(k, a)
// abstracts over the two models.
template <typename CostFn>
void lm_row(CostFn&& cost, int theta, int ell, double beta, double* L,
            double* M) {
  if (theta <= ell) {
    for (int k = theta; k <= ell; ++k) {
      L[k] = (1.0 - beta) * cost(k, 1);
      M[k] = 1.0 - beta;
    }
    for (int k = theta - 1; k >= 0; --k) {
      L[k] = (1.0 - beta) * cost(k, 0) + beta * L[k + 1];
      M[k] = beta * M[k + 1];
    }
  } else {
    // never activate: the chain absorbs at ell and pays passive cost forever
    L[ell] = cost(ell, 0);
    M[ell] = 0.0;
    for (int k = ell - 1; k >= 0; --k) {
      L[k] = (1.0 - beta) * cost(k, 0) + beta * L[k + 1];
      M[k] = 0.0;
    }
  }
}

// Renewal exponent: beta^{theta-k+1}, clamped for states already past the
// threshold (they activate immediately, so the renewal is one step away).
double renewal_pow(double beta, int theta, int k) {
  return std::pow(beta, std::max(theta - k, 0) + 1);
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> lm_values_a(
    const ArmCache& cache, ThresholdPolicyA policy, double beta) {
  check_beta(beta);
  check_threshold(policy.theta, cache.ell());
  const int ell = cache.ell();
  std::vector<double> L(ell + 1), M(ell + 1);
  lm_row([&](int k, int a) { return cache.cost_a(k, a); }, policy.theta, ell,
         beta, L.data(), M.data());
  return {std::move(L), std::move(M)};
}

std::pair<std::vector<double>, std::vector<double>> lm_values_b(
    const ArmCache& cache, const ThresholdPolicyB& policy, double beta) {
  check_beta(beta);
  const int ell = cache.ell();
  const int n = cache.size();
  if (static_cast<int>(policy.theta.size()) != n)
    throw std::invalid_argument("lm_values_b: one threshold per state");
  std::vector<double> L(static_cast<std::size_t>(n) * (ell + 1));
  std::vector<double> M(L.size());
  for (int s = 0; s < n; ++s) {
    check_threshold(policy.theta[s], ell);
    std::size_t off = static_cast<std::size_t>(s) * (ell + 1);
    lm_row([&](int k, int a) { return cache.cost_b(s, k, a); },
           policy.theta[s], ell, beta, L.data() + off, M.data() + off);
  }
  return {std::move(L), std::move(M)};
}

PolicyValue dn_values_a(const ArmCache& cache, ThresholdPolicyA policy,
                        double beta) {
  auto [L, M] = lm_values_a(cache, policy, beta);
  const int ell = cache.ell();
  PolicyValue pv{ObsModel::A, 1, ell, std::move(L), std::move(M)};
  if (policy.theta == ell + 1) {
    // D = L already; N = M = 0
    return pv;
  }
  double denom = 1.0 - std::pow(beta, policy.theta + 1);
  double d0 = pv.D[0] / denom;
  double n0 = pv.N[0] / denom;
  for (int k = 0; k <= ell; ++k) {
    double w = renewal_pow(beta, policy.theta, k);
    pv.D[k] += w * d0;
    pv.N[k] += w * n0;
  }
  return pv;
}

PolicyValue dn_values_b(const ArmCache& cache, const ThresholdPolicyB& policy,
                        double beta) {
  auto [L, M] = lm_values_b(cache, policy, beta);
  const int ell = cache.ell();
  const int n = cache.size();
  PolicyValue pv{ObsModel::B, n, ell, std::move(L), std::move(M)};

  // Renewal system for the k = 0 vectors: (I - Z) v = L(.,0), with
  // Z[s][r] = beta^{theta_s + 1} Q[r]; sentinel rows never renew.
  std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> d0(n), n0(n);
  for (int s = 0; s < n; ++s) {
    double w =
        policy.theta[s] <= ell ? std::pow(beta, policy.theta[s] + 1) : 0.0;
    for (int r = 0; r < n; ++r) A[static_cast<std::size_t>(s) * n + r] =
        (s == r ? 1.0 : 0.0) - w * cache.arm().Q[r];
    d0[s] = pv.d(s, 0);
    n0[s] = pv.n(s, 0);
  }
  // spectral radius of Z is at most beta < 1, so the system is regular;
  // a singular report here means corrupted inputs
  solve_dense_inplace(A, static_cast<std::size_t>(n), {&d0, &n0});

  double qd = 0.0, qn = 0.0;
  for (int r = 0; r < n; ++r) {
    qd += cache.arm().Q[r] * d0[r];
    qn += cache.arm().Q[r] * n0[r];
  }
  for (int s = 0; s < n; ++s) {
    if (policy.theta[s] > ell) continue;  // absorbing row: D = L, N = 0
    for (int k = 0; k <= ell; ++k) {
      double w = renewal_pow(beta, policy.theta[s], k);
      pv.D[pv.idx(s, k)] += w * qd;
      pv.N[pv.idx(s, k)] += w * qn;
    }
  }
  return pv;
}

FiniteHorizonResult finite_horizon_eval(const ArmCache& cache,
                                        ThresholdPolicyA policy, int horizon,
                                        double beta) {
  check_beta(beta);
  check_threshold(policy.theta, cache.ell());
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int ell = cache.ell();
  std::vector<double> D(ell + 1, 0.0), N(ell + 1, 0.0);
  std::vector<double> Dn(ell + 1), Nn(ell + 1);
  for (int t = 0; t < horizon; ++t) {
    for (int k = 0; k <= ell; ++k) {
      int a = k >= policy.theta ? 1 : 0;
      int next = a == 1 ? 0 : std::min(k + 1, ell);
      Dn[k] = (1.0 - beta) * cache.cost_a(k, a) + beta * D[next];
      Nn[k] = (1.0 - beta) * a + beta * N[next];
    }
    D.swap(Dn);
    N.swap(Nn);
  }
  double tail =
      std::pow(beta, horizon) * cache.max_cost() / (1.0 - beta);
  return {PolicyValue{ObsModel::A, 1, ell, std::move(D), std::move(N)}, tail};
}

FiniteHorizonResult finite_horizon_eval(const ArmCache& cache,
                                        const ThresholdPolicyB& policy,
                                        int horizon, double beta) {
  check_beta(beta);
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int ell = cache.ell();
  const int n = cache.size();
  if (static_cast<int>(policy.theta.size()) != n)
    throw std::invalid_argument("finite_horizon_eval: theta size mismatch");
  for (int s = 0; s < n; ++s) check_threshold(policy.theta[s], ell);

  std::size_t sz = static_cast<std::size_t>(n) * (ell + 1);
  std::vector<double> D(sz, 0.0), N(sz, 0.0), Dn(sz), Nn(sz);
  auto idx = [&](int s, int k) {
    return static_cast<std::size_t>(s) * (ell + 1) + k;
  };
  for (int t = 0; t < horizon; ++t) {
    double qd = 0.0, qn = 0.0;  // value after a reset, averaged over Q
    for (int r = 0; r < n; ++r) {
      qd += cache.arm().Q[r] * D[idx(r, 0)];
      qn += cache.arm().Q[r] * N[idx(r, 0)];
    }
    for (int s = 0; s < n; ++s) {
      for (int k = 0; k <= ell; ++k) {
        int a = k >= policy.theta[s] ? 1 : 0;
        double dnext = a == 1 ? qd : D[idx(s, std::min(k + 1, ell))];
        double nnext = a == 1 ? qn : N[idx(s, std::min(k + 1, ell))];
        Dn[idx(s, k)] = (1.0 - beta) * cache.cost_b(s, k, a) + beta * dnext;
        Nn[idx(s, k)] = (1.0 - beta) * a + beta * nnext;
      }
    }
    D.swap(Dn);
    N.swap(Nn);
  }
  double tail =
      std::pow(beta, horizon) * cache.max_cost() / (1.0 - beta);
  return {PolicyValue{ObsModel::B, n, ell, std::move(D), std::move(N)}, tail};
}

std::string policy_value_to_csv(const PolicyValue& pv) {
  std::string out = "s,k,D,N\n";
  char buf[96];
  for (int s = 0; s < pv.num_states; ++s) {
    int label = pv.model == ObsModel::B ? s + 1 : 0;
    for (int k = 0; k <= pv.ell; ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", label, k,
                    pv.d(s, k), pv.n(s, k));
      out += buf;
    }
  }
  return out;
}

}  // namespace rbandits
