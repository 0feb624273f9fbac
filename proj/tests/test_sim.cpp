#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>

#include "rbandits/rng.hpp"
#include "rbandits/sim.hpp"

using namespace rbandits;

namespace {

Arm random_arm(int size, std::uint64_t seed) {
  Rng rng(seed);
  int family = 1 + static_cast<int>(rng.uniform01() * 4) % 4;
  double p = 0.05 + 0.9 * rng.uniform01();
  return Arm{make_structured_matrix(family, p, size),
             sample_reset_pmf(size, rng.next_u64()), default_cost(size)};
}

Fleet random_fleet(ObsModel model, int n, int m, int size, int ell,
                   std::uint64_t seed) {
  Fleet fleet;
  fleet.model = model;
  fleet.m = m;
  for (int i = 0; i < n; ++i)
    fleet.arms.push_back(std::make_shared<ArmCache>(
        random_arm(size, derive_stream(seed, i)), ell));
  return fleet;
}

}  // namespace

TEST_CASE("deterministic fleet under the all-passive policy") {
  // identity transitions and point-mass resets: every path is the same,
  // so the estimate equals the exact truncated discounted sum
  Arm arm{make_structured_matrix(1, 1.0, 2), ResetPmf({0.0, 1.0}),
          CostSpec{{1.0, 3.0}, {5.0, 5.0}}};
  Fleet fleet;
  fleet.model = ObsModel::A;
  fleet.m = 1;
  fleet.arms = {std::make_shared<ArmCache>(arm, 5),
                std::make_shared<ArmCache>(arm, 5)};

  FunctionPolicy passive("idle", [](std::span<const int>) { return 0u; });
  SimConfig config;
  config.horizon = 40;
  config.paths = 8;
  config.beta = 0.9;
  config.seed = 5;
  SimResult r = simulate(fleet, passive, config);
  // both arms start in the ruined state and stay: per-step cost 3 + 3
  double expect = 6.0 * (1.0 - std::pow(0.9, 40));
  CHECK(r.j_hat == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.std_err < 1e-14);  // identical paths up to summation rounding
}

TEST_CASE("whittle policy argmax and tie-breaks") {
  SUBCASE("largest index wins") {
    WhittleIndexPolicy pol({{3.1}, {2.0}}, 1);
    int locals[2] = {0, 0};
    CHECK(pol.decide(locals) == 0b01u);
  }
  SUBCASE("ties select the lowest arm ids") {
    WhittleIndexPolicy pol({{1.0}, {1.0}, {1.0}, {1.0}}, 2);
    int locals[4] = {0, 0, 0, 0};
    CHECK(pol.decide(locals) == 0b0011u);
  }
}

TEST_CASE("myopic policy selections") {
  SUBCASE("m = 1 minimizes the activation cost gap") {
    Fleet fleet = random_fleet(ObsModel::A, 4, 1, 3, 10, 99);
    MyopicPolicy pol(fleet);
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> locals(4);
      for (int& z : locals) z = static_cast<int>(rng.uniform01() * 11);
      JointAction mask = pol.decide(locals);
      REQUIRE(std::popcount(mask) == 1);
      int chosen = std::countr_zero(mask);
      double chosen_gap = fleet.arms[chosen]->cost_a(locals[chosen], 1) -
                          fleet.arms[chosen]->cost_a(locals[chosen], 0);
      for (int i = 0; i < 4; ++i) {
        double gap = fleet.arms[i]->cost_a(locals[i], 1) -
                     fleet.arms[i]->cost_a(locals[i], 0);
        CHECK(chosen_gap <= gap + 1e-12);
      }
    }
  }
  SUBCASE("matches a literal reimplementation at m = 2") {
    Fleet fleet = random_fleet(ObsModel::B, 3, 2, 3, 6, 17);
    MyopicPolicy pol(fleet);
    Rng rng(321);
    auto cbar = [&](int i, int local, int a) {
      return fleet.arms[i]->cost_b(local / 7, local % 7, a);
    };
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> locals(3);
      for (int& z : locals) z = static_cast<int>(rng.uniform01() * 21);
      JointAction mask = pol.decide(locals);

      // sequential rule, written out the slow way
      std::vector<int> pool = {0, 1, 2};
      JointAction expect = 0;
      for (int round = 0; round < 2; ++round) {
        int best = -1;
        double best_total = 0.0;
        for (int i : pool) {
          double total = cbar(i, locals[i], 1);
          for (int j : pool)
            if (j != i) total += cbar(j, locals[j], 0);
          if (best < 0 || total < best_total) {
            best = i;
            best_total = total;
          }
        }
        expect |= JointAction{1} << best;
        std::erase(pool, best);
      }
      CHECK(mask == expect);
    }
  }
}

TEST_CASE("budget feasibility across random states") {
  Fleet fleet = random_fleet(ObsModel::B, 4, 2, 3, 8, 3);
  const double beta = 0.9;
  WhittleIndexPolicy wip(fleet, beta);
  MyopicPolicy myp(fleet);
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> locals(4);
    for (int& z : locals) z = static_cast<int>(rng.uniform01() * (3 * 9));
    CHECK(std::popcount(wip.decide(locals)) == 2);
    CHECK(std::popcount(myp.decide(locals)) == 2);
  }
}

TEST_CASE("policies that overdraw the budget are rejected") {
  Fleet fleet = random_fleet(ObsModel::A, 3, 1, 2, 4, 8);
  FunctionPolicy greedy("all", [](std::span<const int> locals) {
    return (JointAction{1} << locals.size()) - 1;
  });
  SimConfig config;
  config.horizon = 3;
  config.paths = 1;
  config.beta = 0.9;
  CHECK_THROWS_AS(simulate(fleet, greedy, config), std::runtime_error);
}

TEST_CASE("simulation is reproducible and seed-sensitive") {
  Fleet fleet = random_fleet(ObsModel::B, 3, 1, 3, 6, 21);
  WhittleIndexPolicy pol(fleet, 0.95);
  SimConfig config;
  config.horizon = 100;
  config.paths = 50;
  config.beta = 0.95;
  config.seed = 777;

  SimResult a = simulate(fleet, pol, config);
  SimResult b = simulate(fleet, pol, config);
  CHECK(a.j_hat == b.j_hat);
  CHECK(a.std_err == b.std_err);

  config.threads = 1;  // thread layout must not change the reduction
  SimResult c = simulate(fleet, pol, config);
  CHECK(a.j_hat == c.j_hat);

  config.threads = 0;
  config.seed = 778;
  SimResult d = simulate(fleet, pol, config);
  CHECK(a.j_hat != d.j_hat);
}

TEST_CASE("estimates agree with exact evaluation on the joint chain") {
  const double beta = 0.9;
  for (ObsModel model : {ObsModel::A, ObsModel::B}) {
    Fleet fleet =
        random_fleet(model, 2, 1, 2, 5, 400 + (model == ObsModel::B));
    WhittleIndexPolicy pol(fleet, beta);

    std::vector<const ArmCache*> raw;
    for (const auto& a : fleet.arms) raw.push_back(a.get());
    JointChain chain(raw, model);
    std::vector<double> v =
        joint_policy_value(chain, as_joint_policy(pol), beta, 1e-11);
    double exact = initial_state_value(chain, v);

    SimConfig config;
    config.horizon = 500;
    config.paths = 4000;
    config.beta = beta;
    config.seed = 31337;
    SimResult r = simulate(fleet, pol, config);
    if (model == ObsModel::A) {
      // the model-A info chain is deterministic under a fixed policy
      CHECK(r.std_err < 1e-12);
      CHECK(std::fabs(r.j_hat - exact) <= r.tail_bound + 1e-10);
    } else {
      REQUIRE(r.std_err > 0.0);
      CHECK(std::fabs(r.j_hat - exact) < 4.0 * r.std_err + r.tail_bound);
    }
  }
}

TEST_CASE("std_err shrinks roughly as 1/sqrt(paths)") {
  Fleet fleet = random_fleet(ObsModel::B, 3, 1, 3, 6, 67);
  MyopicPolicy pol(fleet);
  SimConfig config;
  config.horizon = 200;
  config.beta = 0.9;
  config.seed = 1;
  config.paths = 200;
  double se_small = simulate(fleet, pol, config).std_err;
  config.paths = 3200;  // 16x the paths, expect ~4x smaller
  double se_big = simulate(fleet, pol, config).std_err;
  CHECK(se_big < se_small / 2.0);
  CHECK(se_big > se_small / 8.0);
}

TEST_CASE("metric arithmetic") {
  CHECK(alpha_opt(1.0, 1.0) == 100.0);
  CHECK(alpha_opt(1.0, 2.0) == 50.0);
  CHECK(eps_myp(2.0, 2.0) == 0.0);
  CHECK(eps_myp(2.0, 1.0) == 50.0);
  CHECK_THROWS_AS(alpha_opt(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eps_myp(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("fleet validation") {
  Fleet fleet = random_fleet(ObsModel::A, 3, 1, 2, 4, 2);
  fleet.m = 3;
  CHECK_THROWS_AS(fleet.validate(), std::invalid_argument);
  fleet.m = 0;
  CHECK_THROWS_AS(fleet.validate(), std::invalid_argument);
}
