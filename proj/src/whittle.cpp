#include "rbandits/whittle.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace rbandits {

bool n_values_differ(double a, double b) {
  double tol =
      std::max(1e-12, 1e-10 * std::max(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) > tol;
}

namespace {

void require_assumptions(const ArmCache& cache) {
  AssumptionReport rep = validate_assumptions(cache.arm());
  if (!rep.ok())
    throw std::invalid_argument(
        "whittle: arm fails the structural assumptions (" + rep.describe() +
        ")");
}

// Tie admission for argmin groups. The D/N values behind each ratio pass
// through a dense solve, which scatters members of a genuine tie group by
// around 1e-9; admission must be wider than that scatter and still far
// below the 1e-6 index tolerance.
double tie_tol(double lambda) {
  return std::max(1e-11, 1e-8 * std::fabs(lambda));
}

// Decreases beyond this are treated as a real indexability failure rather
// than tie noise.
double violation_tol(double lambda) {
  return std::max(1e-9, 1e-6 * std::fabs(lambda));
}

// min over probe states of the D/N difference ratio between the current
// policy and the one-state-more-passive policy; +inf when no probe state
// separates them.
double min_mu_over_probes(const PolicyValue& base, const PolicyValue& more) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < base.D.size(); ++z) {
    if (!n_values_differ(base.N[z], more.N[z])) continue;
    double mu = (more.D[z] - base.D[z]) / (base.N[z] - more.N[z]);
    if (mu < best) best = mu;
  }
  return best;
}

}  // namespace

IndexTableA whittle_table_a(const ArmCache& cache, double beta) {
  check_beta(beta);
  require_assumptions(cache);
  const int ell = cache.ell();

  std::vector<PolicyValue> dn(ell + 2);
  for (int theta = 0; theta <= ell + 1; ++theta)
    dn[theta] = dn_values_a(cache, ThresholdPolicyA{theta}, beta);

  IndexTableA table;
  table.w.resize(ell + 1);
  for (int k = 0; k <= ell; ++k) {
    const PolicyValue& lo = dn[k];      // threshold k: activate at k
    const PolicyValue& hi = dn[k + 1];  // threshold k+1: stay passive at k
    double best = std::numeric_limits<double>::infinity();
    for (int k0 = 0; k0 <= ell; ++k0) {
      if (!n_values_differ(lo.n_a(k0), hi.n_a(k0))) continue;
      double mu =
          (hi.d_a(k0) - lo.d_a(k0)) / (lo.n_a(k0) - hi.n_a(k0));
      if (mu < best) best = mu;
    }
    if (!std::isfinite(best)) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "whittle_table_a: no probe separates thresholds %d and "
                    "%d (degenerate N values)",
                    k, k + 1);
      throw std::runtime_error(msg);
    }
    table.w[k] = best;
  }

  for (int k = 0; k + 1 <= ell; ++k) {
    if (table.w[k] > table.w[k + 1] + tie_tol(table.w[k])) {
      table.monotone = false;
      table.monotone_violations.push_back(k);
    }
  }
  return table;
}

PassiveSetB PassiveSetB::empty(int num_states, int ell) {
  PassiveSetB w;
  w.num_states = num_states;
  w.ell = ell;
  w.member.assign(static_cast<std::size_t>(num_states) * (ell + 1), 0);
  return w;
}

std::vector<int> thresholds_of(const PassiveSetB& w) {
  std::vector<int> theta(w.num_states);
  for (int s = 0; s < w.num_states; ++s) {
    int t = 0;
    while (t <= w.ell && w.contains(s, t)) ++t;
    for (int k = t; k <= w.ell; ++k) {
      if (w.contains(s, k))
        throw std::invalid_argument(
            "passive set is not threshold representable");
    }
    theta[s] = t;
  }
  return theta;
}

std::vector<InfoStateB> frontier(const PassiveSetB& w) {
  std::vector<int> theta = thresholds_of(w);
  std::vector<InfoStateB> out;
  for (int s = 0; s < w.num_states; ++s) {
    if (theta[s] <= w.ell) out.push_back(InfoStateB{s, theta[s]});
  }
  return out;
}

double mu_ratio(const ArmCache& cache, double beta, const PassiveSetB& w,
                InfoStateB y, InfoStateB probe) {
  check_beta(beta);
  std::vector<int> theta = thresholds_of(w);
  if (y.k != theta[y.state])
    throw std::invalid_argument("mu_ratio: y is not on the frontier");
  ThresholdPolicyB base{theta};
  theta[y.state] += 1;
  ThresholdPolicyB more{std::move(theta)};

  PolicyValue pv_base = dn_values_b(cache, base, beta);
  PolicyValue pv_more = dn_values_b(cache, more, beta);
  std::size_t z = pv_base.idx(probe.state, probe.k);
  if (!n_values_differ(pv_base.N[z], pv_more.N[z]))
    throw std::invalid_argument(
        "mu_ratio: probe state does not separate the two policies");
  return (pv_more.D[z] - pv_base.D[z]) / (pv_base.N[z] - pv_more.N[z]);
}

IndexTableB whittle_table_b(const ArmCache& cache, double beta) {
  check_beta(beta);
  require_assumptions(cache);
  const int ell = cache.ell();
  const int n = cache.size();
  const std::size_t space = static_cast<std::size_t>(n) * (ell + 1);

  IndexTableB table;
  table.num_states = n;
  table.ell = ell;
  table.w.assign(space, std::numeric_limits<double>::quiet_NaN());

  // Adaptive greedy: grow the passive set one frontier tie-group at a time.
  // The set stays threshold representable, so it is carried as thresholds.
  std::vector<int> theta(n, 0);
  std::size_t assigned = 0;
  int iterations = 0;
  const int max_iterations = n * (ell + 1) + 1;

  while (assigned < space) {
    if (++iterations > max_iterations)
      throw std::runtime_error("whittle_table_b: failed to terminate");

    PolicyValue base = dn_values_b(cache, ThresholdPolicyB{theta}, beta);
    std::vector<double> mu_star(n,
                                std::numeric_limits<double>::infinity());
    double lambda = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
      if (theta[s] > ell) continue;
      std::vector<int> grown = theta;
      grown[s] += 1;
      PolicyValue more =
          dn_values_b(cache, ThresholdPolicyB{std::move(grown)}, beta);
      mu_star[s] = min_mu_over_probes(base, more);
      lambda = std::min(lambda, mu_star[s]);
    }
    if (!std::isfinite(lambda))
      throw std::runtime_error(
          "whittle_table_b: no frontier candidate is separable "
          "(degenerate N values)");

    if (!table.breakpoints.empty() &&
        lambda < table.breakpoints.back() - violation_tol(lambda))
      throw std::runtime_error(
          "whittle_table_b: breakpoints decreased; indexability violated");

    // a value tied with the previous breakpoint (or microscopically below
    // it) is the same index; keep the representative so equal indices
    // compare equal
    bool merge = !table.breakpoints.empty() &&
                 !(lambda > table.breakpoints.back() + tie_tol(lambda));
    if (merge) lambda = table.breakpoints.back();

    // all argmin candidates join in one step
    for (int s = 0; s < n; ++s) {
      if (theta[s] > ell) continue;
      if (mu_star[s] <= lambda + tie_tol(lambda)) {
        table.w[static_cast<std::size_t>(s) * (ell + 1) + theta[s]] = lambda;
        theta[s] += 1;
        ++assigned;
      }
    }

    if (merge) {
      table.passive_chain.back() = theta;
    } else {
      table.breakpoints.push_back(lambda);
      table.passive_chain.push_back(theta);
    }
  }
  return table;
}

std::string index_table_a_to_csv(const IndexTableA& table) {
  std::string out = "k,w\n";
  char buf[64];
  for (std::size_t k = 0; k < table.w.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", k, table.w[k]);
    out += buf;
  }
  return out;
}

std::string index_table_b_to_csv(const IndexTableB& table) {
  std::string out = "s,k,w\n";
  char buf[80];
  for (int s = 0; s < table.num_states; ++s) {
    for (int k = 0; k <= table.ell; ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", s + 1, k,
                    table.at(s, k));
      out += buf;
    }
  }
  return out;
}

std::string index_table_a_to_json(const IndexTableA& table) {
  nlohmann::json j;
  j["model"] = "A";
  j["w"] = table.w;
  j["monotone"] = table.monotone;
  j["monotone_violations"] = table.monotone_violations;
  return j.dump(2);
}

std::string index_table_b_to_json(const IndexTableB& table) {
  nlohmann::json j;
  j["model"] = "B";
  j["num_states"] = table.num_states;
  j["ell"] = table.ell;
  nlohmann::json rows = nlohmann::json::array();
  for (int s = 0; s < table.num_states; ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k <= table.ell; ++k) row.push_back(table.at(s, k));
    rows.push_back(std::move(row));
  }
  j["w"] = std::move(rows);
  j["breakpoints"] = table.breakpoints;
  j["passive_chain_thresholds"] = table.passive_chain;
  return j.dump(2);
}

}  // namespace rbandits
