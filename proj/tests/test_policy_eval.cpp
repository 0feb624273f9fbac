#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rbandits/policy_eval.hpp"
#include "rbandits/rng.hpp"

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

int horizon_for(double beta, double eps = 1e-12) {
  return static_cast<int>(std::ceil(std::log(eps) / std::log(beta)));
}

}  // namespace

TEST_CASE("L and M on the tiny arm, hand values") {
  ArmCache cache(tiny_arm(), 10);
  const double beta = 0.5;

  SUBCASE("theta = 1") {
    auto [L, M] = lm_values_a(cache, ThresholdPolicyA{1}, beta);
    // passive at k=0 (cost 0), activate at k=1 (cost 2)
    CHECK(L[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(M[0] == doctest::Approx(0.25).epsilon(1e-14));
    // at the threshold the first activation happens now
    CHECK(M[1] == doctest::Approx(1 - beta));
  }
  SUBCASE("theta = 0 has an empty passive sum") {
    auto [L, M] = lm_values_a(cache, ThresholdPolicyA{0}, beta);
    CHECK(L[0] == doctest::Approx((1 - beta) * 2.0));
    CHECK(M[0] == doctest::Approx(1 - beta));
  }
  SUBCASE("immediate activation above the threshold") {
    auto [L, M] = lm_values_a(cache, ThresholdPolicyA{1}, beta);
    for (int k = 1; k <= 10; ++k) {
      CHECK(L[k] == doctest::Approx((1 - beta) * 2.0));
      CHECK(M[k] == doctest::Approx(1 - beta));
    }
  }
}

TEST_CASE("D and N closed forms on the tiny arm") {
  ArmCache cache(tiny_arm(), 10);
  const double beta = 0.5;

  SUBCASE("theta = 1") {
    PolicyValue pv = dn_values_a(cache, ThresholdPolicyA{1}, beta);
    CHECK(pv.d_a(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(pv.n_a(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(pv.d_a(1) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(pv.n_a(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  }
  SUBCASE("theta = 2") {
    PolicyValue pv = dn_values_a(cache, ThresholdPolicyA{2}, beta);
    CHECK(pv.d_a(0) == doctest::Approx(3.0 / 7.0).epsilon(1e-13));
    CHECK(pv.n_a(0) == doctest::Approx(1.0 / 7.0).epsilon(1e-13));
  }
  SUBCASE("always active: N is exactly 1") {
    PolicyValue pv = dn_values_a(cache, ThresholdPolicyA{0}, beta);
    for (int k = 0; k <= 10; ++k) CHECK(pv.n_a(k) == doctest::Approx(1.0));
  }
  SUBCASE("never active: N is exactly 0") {
    PolicyValue pv = dn_values_a(cache, ThresholdPolicyA{11}, beta);
    for (int k = 0; k <= 10; ++k) {
      CHECK(pv.n_a(k) == 0.0);
      CHECK(pv.d_a(k) >= 0.0);
    }
  }
}

TEST_CASE("model B L values use point-mass beliefs") {
  ArmCache cache(tiny_arm(), 10);
  auto [L, M] = lm_values_b(cache, ThresholdPolicyB{{1, 0}}, 0.5);
  // starting from observed state 1 (label), passive cost 0 now, activate next
  CHECK(L[0] == doctest::Approx(0.5).epsilon(1e-14));
  // state with theta = 0 activates immediately
  CHECK(L[static_cast<std::size_t>(1) * 11] == doctest::Approx(0.5 * 2.0));
  CHECK(M[static_cast<std::size_t>(1) * 11] == doctest::Approx(0.5));
}

TEST_CASE("model B renewal solve endpoints") {
  Arm arm = random_arm(4, 202);
  ArmCache cache(arm, 8);
  SUBCASE("all thresholds zero: N(s,0) = 1") {
    PolicyValue pv = dn_values_b(cache, ThresholdPolicyB{{0, 0, 0, 0}}, 0.9);
    for (int s = 0; s < 4; ++s)
      CHECK(pv.n(s, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("all thresholds at the sentinel: N is identically 0") {
    PolicyValue pv = dn_values_b(cache, ThresholdPolicyB{{9, 9, 9, 9}}, 0.9);
    for (std::size_t z = 0; z < pv.N.size(); ++z) CHECK(pv.N[z] == 0.0);
  }
}

TEST_CASE("finite horizon oracle basics") {
  ArmCache cache(tiny_arm(), 10);
  SUBCASE("always active converges to N = 1") {
    auto r = finite_horizon_eval(cache, ThresholdPolicyA{0}, 100, 0.5);
    CHECK(std::fabs(r.value.n_a(0) - 1.0) < 1e-30);
  }
  SUBCASE("agrees with the theta = 1 hand value") {
    auto r = finite_horizon_eval(cache, ThresholdPolicyA{1}, 200, 0.5);
    CHECK(r.value.d_a(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(r.tail_bound < 1e-30);
  }
  SUBCASE("horizon 1 is the first step only") {
    auto r = finite_horizon_eval(cache, ThresholdPolicyA{1}, 1, 0.5);
    CHECK(r.value.d_a(0) == doctest::Approx(0.0));        // passive, cost 0
    CHECK(r.value.d_a(1) == doctest::Approx(0.5 * 2.0));  // active now
    CHECK(r.value.n_a(1) == doctest::Approx(0.5));
  }
}

TEST_CASE("closed forms match the finite-horizon oracle") {
  Rng seeds(4242);
  for (int trial = 0; trial < 12; ++trial) {
    int size = 2 + static_cast<int>(seeds.uniform01() * 5) % 5;
    Arm arm = random_arm(size, seeds.next_u64());
    for (double beta : {0.5, 0.9, 0.99}) {
      int ell = 6;
      ArmCache cache(arm, ell);
      int horizon = horizon_for(beta);
      for (int theta = 0; theta <= ell + 1; ++theta) {
        PolicyValue closed = dn_values_a(cache, ThresholdPolicyA{theta}, beta);
        PolicyValue fh =
            finite_horizon_eval(cache, ThresholdPolicyA{theta}, horizon, beta)
                .value;
        for (std::size_t z = 0; z < closed.D.size(); ++z) {
          REQUIRE(std::fabs(closed.D[z] - fh.D[z]) < 1e-8);
          REQUIRE(std::fabs(closed.N[z] - fh.N[z]) < 1e-8);
        }
      }
      // a few random model-B threshold vectors, incl. sentinel entries
      Rng rng(seeds.next_u64());
      for (int rep = 0; rep < 6; ++rep) {
        ThresholdPolicyB pol;
        for (int s = 0; s < size; ++s)
          pol.theta.push_back(static_cast<int>(rng.uniform01() * (ell + 2)));
        PolicyValue closed = dn_values_b(cache, pol, beta);
        PolicyValue fh = finite_horizon_eval(cache, pol, horizon, beta).value;
        for (std::size_t z = 0; z < closed.D.size(); ++z) {
          REQUIRE(std::fabs(closed.D[z] - fh.D[z]) < 1e-8);
          REQUIRE(std::fabs(closed.N[z] - fh.N[z]) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("penalized cost decomposes as D + lambda N") {
  // evaluating the arm with active cost shifted by lambda must equal
  // D + lambda * N of the unshifted arm
  Arm arm = random_arm(4, 33);
  const double lambda = 2.0, beta = 0.9;
  Arm shifted = arm;
  for (double& c : shifted.cost.active) c += lambda;
  int ell = 6;
  ArmCache cache(arm, ell), cache_shifted(shifted, ell);
  for (int theta : {0, 2, 5, 7}) {
    PolicyValue pv = dn_values_a(cache, ThresholdPolicyA{theta}, beta);
    PolicyValue pvs =
        dn_values_a(cache_shifted, ThresholdPolicyA{theta}, beta);
    for (int k = 0; k <= ell; ++k)
      CHECK(pvs.d_a(k) ==
            doctest::Approx(pv.d_a(k) + lambda * pv.n_a(k)).epsilon(1e-10));
  }
}

TEST_CASE("N is monotone in k and antitone in the threshold") {
  Arm arm = random_arm(5, 77);
  int ell = 9;
  ArmCache cache(arm, ell);
  const double beta = 0.9;
  std::vector<PolicyValue> by_theta;
  for (int theta = 0; theta <= ell + 1; ++theta)
    by_theta.push_back(dn_values_a(cache, ThresholdPolicyA{theta}, beta));
  for (int theta = 0; theta <= ell + 1; ++theta) {
    for (int k = 0; k < ell; ++k)
      CHECK(by_theta[theta].n_a(k + 1) >= by_theta[theta].n_a(k) - 1e-12);
  }
  for (int theta = 0; theta <= ell; ++theta) {
    for (int k = 0; k < theta; ++k)
      CHECK(by_theta[theta + 1].n_a(k) <= by_theta[theta].n_a(k) + 1e-12);
  }
}

TEST_CASE("threshold validation") {
  ArmCache cache(tiny_arm(), 5);
  CHECK_THROWS_AS(dn_values_a(cache, ThresholdPolicyA{-1}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(dn_values_a(cache, ThresholdPolicyA{7}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(dn_values_a(cache, ThresholdPolicyA{2}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(dn_values_b(cache, ThresholdPolicyB{{1}}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("policy value CSV shape") {
  ArmCache cache(tiny_arm(), 2);
  PolicyValue pv = dn_values_b(cache, ThresholdPolicyB{{1, 1}}, 0.5);
  std::string csv = policy_value_to_csv(pv);
  CHECK(csv.rfind("s,k,D,N\n", 0) == 0);
  // 2 states x 3 k values + header
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 7);
  CHECK(csv.find("\n1,0,") != std::string::npos);
  CHECK(csv.find("\n2,0,") != std::string::npos);
}
