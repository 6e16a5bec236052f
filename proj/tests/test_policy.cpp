#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qbandit/bounds.hpp"
#include "qbandit/policy.hpp"
#include "qbandit/rng.hpp"

using namespace qbandit;

TEST_CASE("argmax: lowest-index ties, shift invariance") {
  std::vector<double> xs = {0.3, 0.7, 0.7, 0.1};
  CHECK(argmax_lowest(xs, [](double v) { return v; }) == 1);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    for (int i = 0; i < 8; ++i) v.push_back(std::round(rng::uniform01(3, ++ctr, 0) * 4) / 4.0);
    const double c = rng::uniform01(3, ++ctr, 1) * 10 - 5;
    const auto base = argmax_lowest(v, [](double x) { return x; });
    const auto shifted = argmax_lowest(v, [c](double x) { return x + c; });
    CHECK(base == shifted);
  }
}

TEST_CASE("phased: single-arm phase plays rate 1") {
  PhasedUcbPolicy p(PhaseSchedule(0.04, 1.0 / 6.0));  // d_1 = 1
  for (std::int64_t t = 1; t <= 8; ++t) {
    CHECK(p.choose(t) == 1.0);
    p.observe(t, false, 0.0);
  }
}

TEST_CASE("phased: initial tie-break picks arm 1") {
  PhasedUcbPolicy p(PhaseSchedule(0.9, 1.0 / 6.0));  // d_1 = 2
  CHECK(p.choose(1) == 0.5);
  const double init = std::sqrt((7.0 - 2.0 / 6.0) * std::log(8.0) / 4.0);
  for (const auto& a : p.arms()) CHECK(a.ucb == doctest::Approx(init).epsilon(1e-14));
}

TEST_CASE("phased: UCB index after one ack matches the closed form") {
  PhasedUcbPolicy p(PhaseSchedule(0.9, 1.0 / 6.0));  // d_1 = 2, T_1 = 8
  // t=1,2: arm 1 twice (ack), its index dips below the untouched init
  CHECK(p.choose(1) == 0.5);
  p.observe(1, true, 0.0);
  CHECK(p.choose(2) == 0.5);
  p.observe(2, true, 0.0);
  // t=3: arm 2, service sample 1.0
  CHECK(p.choose(3) == 1.0);
  p.observe(3, true, 0.0);
  const double expect = 1.0 + std::sqrt((20.0 / 3.0) * std::log(8.0) / 4.0);
  CHECK(p.arms()[1].ucb == doctest::Approx(expect).epsilon(1e-14));
  CHECK(p.arms()[1].ucb == doctest::Approx(2.8617).epsilon(1e-4));
  CHECK(p.choose(4) == 1.0);  // 2.8617 beats arm 1
  p.observe(4, true, 0.0);
}

TEST_CASE("phased: radius after n=4 in a T_l=16 phase") {
  PhasedUcbPolicy p(PhaseSchedule(0.9, 1.0 / 6.0));  // d_2 = 3 in phase 2
  for (std::int64_t t = 1; t <= 18; ++t) {
    p.choose(t);
    p.observe(t, false, 0.0);
  }
  REQUIRE(p.current_phase() == 2);
  REQUIRE(p.grid() == 3);
  CHECK(p.arms()[0].n == 4);
  const double expect = std::sqrt((20.0 / 3.0) * std::log(16.0) / 16.0);
  CHECK(p.arms()[0].ucb == doctest::Approx(expect).epsilon(1e-14));
  CHECK(p.arms()[0].ucb == doctest::Approx(1.0748).epsilon(1e-4));
}

TEST_CASE("phased: observe uses the sample (k/d_l) * ack") {
  PhaseSchedule sched(0.79, 1.0 / 6.0);
  PhasedUcbPolicy p(sched);
  // walk to phase 5 where d_5 = 4
  std::int64_t t = 1;
  for (; t <= PhaseSchedule::phase_start_sum(5); ++t) {
    p.choose(t);
    p.observe(t, false, 0.0);
  }
  REQUIRE(sched.grid_size(5) == 4);
  CHECK(p.choose(t) == 0.25);  // fresh phase, tie-break to arm 1
  p.observe(t, false, 0.0);
  ++t;
  // arm 1's mean drops to 0, still tied in radius; arm 1 pulled again
  CHECK(p.choose(t) == 0.25);
  p.observe(t, true, 0.0);
  CHECK(p.arms()[0].mean == doctest::Approx(0.125).epsilon(1e-14));  // (0 + 0.25)/2
  ++t;
  CHECK(p.choose(t) == 0.5);  // arm 2 now holds the max index
  p.observe(t, true, 0.0);
  CHECK(p.arms()[1].mean == 0.5);
}

TEST_CASE("phased: reset at every phase start, counts add up within phase") {
  PhasedUcbPolicy p(PhaseSchedule(0.5, 1.0 / 6.0));
  std::uint64_t ctr = 0;
  std::int64_t within = 0;
  for (std::int64_t t = 1; t <= 120; ++t) {
    const auto [l, u] = PhaseSchedule::phase_of(t);
    const double rate = p.choose(t);
    if (u == 1) {
      within = 0;
      const double init =
          std::sqrt((7.0 - 2.0 / 6.0) * std::log(static_cast<double>(PhaseSchedule::phase_length(l))) / 4.0);
      for (const auto& a : p.arms()) {
        CHECK(a.n == 0);
        CHECK(a.mean == 0.0);
        CHECK(a.ucb == doctest::Approx(init).epsilon(1e-14));
      }
      CHECK(p.grid() == PhaseSchedule(0.5, 1.0 / 6.0).grid_size(l));
    }
    // chosen rate lies on the current grid
    bool on_grid = false;
    for (int k = 1; k <= p.grid(); ++k) {
      on_grid = on_grid || rate == static_cast<double>(k) / p.grid();
    }
    CHECK(on_grid);
    p.observe(t, rng::uniform01(9, ++ctr, 0) < 0.5, 0.0);
    ++within;
    std::int64_t total = 0;
    for (const auto& a : p.arms()) total += a.n;
    CHECK(total == within);
  }
}

TEST_CASE("ucb1: round-robin start, then index argmax") {
  KnownEpsUcbPolicy p(0.5);
  REQUIRE(p.grid() == 6);
  const std::vector<bool> acks = {false, true, true, true, false, false};
  for (std::int64_t t = 1; t <= 6; ++t) {
    CHECK(p.choose(t) == doctest::Approx(static_cast<double>(t) / 6.0).epsilon(1e-15));
    p.observe(t, acks[static_cast<std::size_t>(t - 1)], 0.0);
  }
  // means (0, 2/6, 3/6, 4/6, 0, 0), equal bonuses cancel: arm 4
  CHECK(p.choose(7) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  p.observe(7, false, 0.0);
  std::int64_t total = 0;
  for (const auto& a : p.arms()) total += a.n;
  CHECK(total == 7);
}

TEST_CASE("ucb1: d = ceil(3/eps)") {
  CHECK(KnownEpsUcbPolicy(1.0 / 144.0).grid() == 432);
  CHECK(KnownEpsUcbPolicy(0.6).grid() == 5);  // guard keeps 3/0.6 at 5
  CHECK(KnownEpsUcbPolicy(1.0).grid() == 3);
  CHECK_THROWS_AS(KnownEpsUcbPolicy(0.0), std::domain_error);
}

TEST_CASE("ucb1: index uses sqrt(2 log t / n)") {
  KnownEpsUcbPolicy p(1.0);  // d = 3
  const std::vector<bool> acks = {true, false, false};
  for (std::int64_t t = 1; t <= 3; ++t) {
    p.choose(t);
    p.observe(t, acks[static_cast<std::size_t>(t - 1)], 0.0);
  }
  CHECK(p.choose(4) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const double expect = 1.0 / 3.0 + std::sqrt(2.0 * std::log(4.0) / 1.0);
  CHECK(p.arms()[0].ucb == doctest::Approx(expect).epsilon(1e-14));
  p.observe(4, true, 0.0);
}

TEST_CASE("fixed rate and oracle") {
  FixedRatePolicy fr(0.3);
  for (std::int64_t t = 1; t <= 5; ++t) {
    CHECK(fr.choose(t) == 0.3);
    fr.observe(t, true, 0.5);
  }

  auto uni = make_custom_environment(ArrivalDistribution::bernoulli(0.2),
                                     CapacityDistribution::uniform01());
  OracleGridPolicy oracle(uni, 10);
  CHECK(oracle.rate() == 0.5);

  for (int k = 1; k <= 5; ++k) {
    auto env = make_converse_environment(1.0 / 144.0, k);
    for (int d : {432, 500}) {
      OracleGridPolicy o(env, d);
      CHECK(env.capacity.g(o.rate()) - 0.5 >= (2.0 / 3.0) * (1.0 / 144.0) - 1e-12);
    }
  }
}

TEST_CASE("policy contract violations") {
  KnownEpsUcbPolicy p(1.0);
  CHECK_THROWS_AS(p.observe(1, true, 0.0), contract_error);
  CHECK_THROWS_AS(p.choose(3), contract_error);
  CHECK(p.choose(1) > 0.0);
  CHECK_THROWS_AS(p.choose(2), contract_error);  // observe(1) still pending
  p.observe(1, true, 0.0);
  CHECK_THROWS_AS(p.observe(1, true, 0.0), contract_error);
}

TEST_CASE("ucb1 pull counts stay under the pull-count bound (small Monte-Carlo)") {
  // 5 arms via eps = 0.6; capacity gaps computed analytically.
  auto cap = CapacityDistribution::finite_support(
      {{0.2, 0.05}, {0.4, 0.1}, {0.6, 0.15}, {0.8, 0.5}, {1.0, 0.2}});
  const int d = 5;
  std::vector<double> mu;
  for (int k = 1; k <= d; ++k) mu.push_back(cap.g(static_cast<double>(k) / d));
  const double mu_star = *std::max_element(mu.begin(), mu.end());

  const std::int64_t horizon = 3000;
  const int n_seeds = 10;
  std::vector<double> mean_pulls(static_cast<std::size_t>(d), 0.0);
  for (int s = 1; s <= n_seeds; ++s) {
    KnownEpsUcbPolicy p(0.6);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const double rate = p.choose(t);
      const double c = cap.sample(rng::uniform01(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(t), 1));
      p.observe(t, rate <= c, 0.0);
    }
    for (int k = 0; k < d; ++k)
      mean_pulls[static_cast<std::size_t>(k)] += static_cast<double>(p.arms()[static_cast<std::size_t>(k)].n) / n_seeds;
  }
  for (int k = 0; k < d; ++k) {
    const double gap = mu_star - mu[static_cast<std::size_t>(k)];
    if (gap < 0.05) continue;  // (near-)optimal arm
    CHECK(mean_pulls[static_cast<std::size_t>(k)] <=
          ucb1_pull_bound(gap, static_cast<double>(horizon)));
  }
}
