#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rbandits/dp.hpp"
#include "rbandits/rng.hpp"
#include "rbandits/whittle.hpp"

using namespace rbandits;

namespace {

Arm tiny_arm() {
  return Arm{make_structured_matrix(1, 0.5, 2), ResetPmf({1.0, 0.0}),
             default_cost(2)};
}

Arm random_arm(int size, std::uint64_t seed) {
  Rng rng(seed);
  int family = 1 + static_cast<int>(rng.uniform01() * 4) % 4;
  double p = 0.05 + 0.9 * rng.uniform01();
  return Arm{make_structured_matrix(family, p, size),
             sample_reset_pmf(size, rng.next_u64()), default_cost(size)};
}

}  // namespace

TEST_CASE("model A closed-form indices on the tiny arm") {
  ArmCache cache(tiny_arm(), 10);
  IndexTableA table = whittle_table_a(cache, 0.5);
  CHECK(std::fabs(table.w[0] - (-2.0)) < 1e-12);
  CHECK(std::fabs(table.w[1] - (-1.25)) < 1e-12);
  CHECK(table.monotone);
}

TEST_CASE("model A indices are nondecreasing on structured arms") {
  for (int family = 1; family <= 4; ++family) {
    Arm arm = Arm{make_structured_matrix(family, 0.45, 5),
                  sample_reset_pmf(5, 11 + family), default_cost(5)};
    ArmCache cache(arm, 12);
    for (double beta : {0.5, 0.9, 0.99}) {
      IndexTableA table = whittle_table_a(cache, beta);
      CHECK(table.monotone);
      for (std::size_t k = 0; k + 1 < table.w.size(); ++k)
        CHECK(table.w[k] <= table.w[k + 1] + 1e-9);
    }
  }
}

TEST_CASE("whittle tables reject arms that break the assumptions") {
  Arm arm = tiny_arm();
  arm.cost.passive = {1.0, 0.0};  // decreasing
  ArmCache cache(arm, 5);
  CHECK_THROWS_AS(whittle_table_a(cache, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(whittle_table_b(cache, 0.9), std::invalid_argument);
}

TEST_CASE("frontier of a passive set") {
  SUBCASE("empty set exposes (s, 0) for every s") {
    PassiveSetB w = PassiveSetB::empty(3, 3);
    auto f = frontier(w);
    REQUIRE(f.size() == 3);
    for (int s = 0; s < 3; ++s) {
      CHECK(f[s].state == s);
      CHECK(f[s].k == 0);
    }
  }
  SUBCASE("full space has no frontier") {
    PassiveSetB w = PassiveSetB::empty(3, 3);
    for (int s = 0; s < 3; ++s)
      for (int k = 0; k <= 3; ++k) w.insert(s, k);
    CHECK(frontier(w).empty());
  }
  SUBCASE("mixed thresholds") {
    // thresholds (2, 0) over ell = 3: candidates (s1, 2) and (s2, 0)
    PassiveSetB w = PassiveSetB::empty(2, 3);
    w.insert(0, 0);
    w.insert(0, 1);
    auto f = frontier(w);
    REQUIRE(f.size() == 2);
    CHECK(f[0].state == 0);
    CHECK(f[0].k == 2);
    CHECK(f[1].state == 1);
    CHECK(f[1].k == 0);
  }
  SUBCASE("non-threshold sets are rejected") {
    PassiveSetB w = PassiveSetB::empty(2, 3);
    w.insert(0, 2);  // hole below
    CHECK_THROWS_AS(frontier(w), std::invalid_argument);
  }
}

TEST_CASE("mu ratio properties on a toy arm") {
  Arm arm = random_arm(2, 505);
  ArmCache cache(arm, 4);
  const double beta = 0.9;
  PassiveSetB w = PassiveSetB::empty(2, 4);
  InfoStateB y{0, 0};

  // the more-passive policy gives up activation measure wherever it differs
  ThresholdPolicyB base{{0, 0}};
  ThresholdPolicyB more{{1, 0}};
  PolicyValue pv_base = dn_values_b(cache, base, beta);
  PolicyValue pv_more = dn_values_b(cache, more, beta);
  bool any = false;
  for (std::size_t z = 0; z < pv_base.N.size(); ++z) {
    if (n_values_differ(pv_base.N[z], pv_more.N[z])) {
      any = true;
      CHECK(pv_base.N[z] > pv_more.N[z]);
    }
  }
  CHECK(any);

  // mu_ratio matches an independent finite-horizon evaluation of the same
  // two policies
  int horizon = 400;
  PolicyValue fh_base = finite_horizon_eval(cache, base, horizon, beta).value;
  PolicyValue fh_more = finite_horizon_eval(cache, more, horizon, beta).value;
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k <= 4; ++k) {
      std::size_t z = pv_base.idx(s, k);
      if (!n_values_differ(pv_base.N[z], pv_more.N[z])) continue;
      double mu = mu_ratio(cache, beta, w, y, InfoStateB{s, k});
      double oracle = (fh_more.D[z] - fh_base.D[z]) /
                      (fh_base.N[z] - fh_more.N[z]);
      CHECK(mu == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
}

TEST_CASE("mu ratio rejects probes that do not separate the policies") {
  // with Q a point mass on state 0, states (1, k) never reach the changed
  // threshold row, so their activation measures coincide
  Arm arm{make_structured_matrix(1, 0.5, 2), ResetPmf({1.0, 0.0}),
          default_cost(2)};
  ArmCache cache(arm, 4);
  PassiveSetB w = PassiveSetB::empty(2, 4);
  for (int k = 0; k <= 4; ++k) w.insert(1, k);  // s=1 fully passive
  // frontier candidate at s=1 is gone; grow s=0 and probe inside s=1
  InfoStateB y{0, 0};
  CHECK_THROWS_AS(mu_ratio(cache, 0.9, w, y, InfoStateB{1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mu_ratio(cache, 0.9, w, InfoStateB{0, 3}, InfoStateB{0, 0}),
                  std::invalid_argument);  // y not on the frontier
}

TEST_CASE("adaptive greedy output structure") {
  Arm arm = random_arm(3, 99);
  ArmCache cache(arm, 3);
  IndexTableB table = whittle_table_b(cache, 0.9);

  SUBCASE("every state got exactly one index") {
    for (double w : table.w) CHECK(std::isfinite(w));
  }
  SUBCASE("per-state monotone in k") {
    for (int s = 0; s < 3; ++s)
      for (int k = 0; k < 3; ++k)
        CHECK(table.at(s, k) <= table.at(s, k + 1) + 1e-10);
  }
  SUBCASE("breakpoints strictly increase") {
    for (std::size_t b = 0; b + 1 < table.breakpoints.size(); ++b)
      CHECK(table.breakpoints[b] < table.breakpoints[b + 1]);
  }
  SUBCASE("chain grows to the full space") {
    std::vector<int> prev(3, 0);
    for (const auto& snapshot : table.passive_chain) {
      int grown = 0;
      for (int s = 0; s < 3; ++s) {
        CHECK(snapshot[s] >= prev[s]);
        grown += snapshot[s] - prev[s];
      }
      CHECK(grown >= 1);
      prev = snapshot;
    }
    for (int s = 0; s < 3; ++s) CHECK(prev[s] == 4);
  }
  SUBCASE("indices are the breakpoints in chain order") {
    for (int s = 0; s < 3; ++s) {
      int prev_theta = 0;
      for (std::size_t b = 0; b < table.breakpoints.size(); ++b) {
        for (int k = prev_theta; k < table.passive_chain[b][s]; ++k)
          CHECK(table.at(s, k) == table.breakpoints[b]);
        prev_theta = table.passive_chain[b][s];
      }
    }
  }
}

TEST_CASE("adaptive greedy matches the bisection oracle") {
  Rng seeds(606);
  for (int trial = 0; trial < 3; ++trial) {
    Arm arm = random_arm(3, seeds.next_u64());
    ArmCache cache(arm, 3);
    const double beta = 0.9;
    IndexTableB table = whittle_table_b(cache, beta);
    PenalizedDp dp(cache, ObsModel::B, beta, 1e-12);
    for (int s = 0; s < 3; ++s) {
      for (int k = 0; k <= 3; ++k) {
        double oracle = index_by_bisection(dp, InfoStateB{s, k}, 1e-9);
        CHECK(std::fabs(oracle - table.at(s, k)) < 1e-6);
      }
    }
  }
}

TEST_CASE("model A closed form matches the bisection oracle") {
  Rng seeds(707);
  for (int trial = 0; trial < 4; ++trial) {
    Arm arm = random_arm(2 + trial % 3, seeds.next_u64());
    ArmCache cache(arm, 6);
    const double beta = trial % 2 == 0 ? 0.9 : 0.5;
    IndexTableA table = whittle_table_a(cache, beta);
    PenalizedDp dp(cache, ObsModel::A, beta, 1e-12);
    for (int k = 0; k <= 6; ++k) {
      double oracle = index_by_bisection(dp, InfoStateA{k}, 1e-9);
      CHECK(std::fabs(oracle - table.w[k]) < 1e-6);
    }
  }
}

TEST_CASE("point-mass resets collapse model B onto model A") {
  // with Q = delta_sigma the reachable model-B states are (sigma, k) and
  // their indices must agree with model A's table for the same arm
  const int size = 3, ell = 6, sigma = 1;
  std::vector<double> q(size, 0.0);
  q[sigma] = 1.0;
  Arm arm{make_structured_matrix(2, 0.4, size), ResetPmf(q),
          default_cost(size)};
  ArmCache cache(arm, ell);
  const double beta = 0.9;
  IndexTableA a = whittle_table_a(cache, beta);
  IndexTableB b = whittle_table_b(cache, beta);
  for (int k = 0; k <= ell; ++k)
    CHECK(std::fabs(a.w[k] - b.at(sigma, k)) < 1e-8);
}

TEST_CASE("index table exports") {
  ArmCache cache(tiny_arm(), 3);
  IndexTableA a = whittle_table_a(cache, 0.5);
  std::string csv = index_table_a_to_csv(a);
  CHECK(csv.rfind("k,w\n", 0) == 0);
  CHECK(csv.find("0,-2") != std::string::npos);

  IndexTableB b = whittle_table_b(cache, 0.5);
  std::string csvb = index_table_b_to_csv(b);
  CHECK(csvb.rfind("s,k,w\n", 0) == 0);
  std::string js = index_table_b_to_json(b);
  CHECK(js.find("breakpoints") != std::string::npos);
  CHECK(js.find("passive_chain_thresholds") != std::string::npos);
}
