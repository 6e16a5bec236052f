#include <cmath>

#include "doctest.h"
#include "qbandit/rng.hpp"
#include "qbandit/sched.hpp"

using namespace qbandit;

namespace {

// Definitional phase lookup: scan cumulative sums.
std::pair<int, std::int64_t> phase_of_reference(std::int64_t t) {
  std::int64_t sum = 0;
  for (int l = 1;; ++l) {
    const std::int64_t len = PhaseSchedule::phase_length(l);
    if (t <= sum + len) return {l, t - sum};
    sum += len;
  }
}

}  // namespace

TEST_CASE("phase_length") {
  CHECK(PhaseSchedule::phase_length(1) == 8);
  CHECK(PhaseSchedule::phase_length(2) == 16);
  CHECK(PhaseSchedule::phase_length(10) == 4096);
  CHECK_THROWS_AS(PhaseSchedule::phase_length(0), std::domain_error);
  CHECK_THROWS_AS(PhaseSchedule::phase_length(61), std::domain_error);
}

TEST_CASE("grid_size") {
  CHECK(PhaseSchedule(0.04, 1.0 / 6.0).grid_size(1) == 1);
  CHECK(PhaseSchedule(0.5, 1.0 / 6.0).grid_size(10) == 8);     // 0.5 * 4096^{1/3} = 8 exactly
  CHECK(PhaseSchedule(0.04, 1.0 / 6.0).grid_size(40) == 656);  // 0.04 * 2^14
}

TEST_CASE("phase_of") {
  CHECK(PhaseSchedule::phase_of(1) == std::pair<int, std::int64_t>{1, 1});
  CHECK(PhaseSchedule::phase_of(8) == std::pair<int, std::int64_t>{1, 8});
  CHECK(PhaseSchedule::phase_of(9) == std::pair<int, std::int64_t>{2, 1});
  CHECK_THROWS_AS(PhaseSchedule::phase_of(0), std::domain_error);
}

TEST_CASE("phase layout: boundaries and random t up to 2^30") {
  for (int l = 1; l <= 27; ++l) {
    const std::int64_t first = PhaseSchedule::phase_start_sum(l) + 1;
    const std::int64_t last = PhaseSchedule::phase_start_sum(l) + PhaseSchedule::phase_length(l);
    for (std::int64_t t : {first, first + 1, last - 1, last}) {
      if (t < first) continue;
      const auto [pl, pu] = PhaseSchedule::phase_of(t);
      CHECK(pl == l);
      CHECK(pu == t - PhaseSchedule::phase_start_sum(l));
      CHECK(pu >= 1);
      CHECK(pu <= PhaseSchedule::phase_length(l));
    }
    // sum of earlier phase lengths + 1 is the first slot of phase l
    std::int64_t sum = 0;
    for (int i = 1; i < l; ++i) sum += PhaseSchedule::phase_length(i);
    CHECK(sum + 1 == first);
  }
  for (std::uint64_t i = 0; i < 200000; ++i) {
    const std::int64_t t =
        1 + static_cast<std::int64_t>(rng::uniform01(5, i, 0) * ((1 << 30) - 1));
    CHECK(PhaseSchedule::phase_of(t) == phase_of_reference(t));
  }
}

TEST_CASE("grid sizes: d_l >= 1 and nondecreasing") {
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double c = 1e-3 + 0.998 * rng::uniform01(31, ++ctr, 0);
    const double delta = 1e-3 + 0.497 * rng::uniform01(31, ++ctr, 1);
    PhaseSchedule sched(c, delta);
    int prev = 1;
    for (int l = 1; l <= 40; ++l) {
      const int d = sched.grid_size(l);
      CHECK(d >= 1);
      CHECK(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("first_stable_phase") {
  {
    PhaseSchedule sched(0.5, 1.0 / 6.0);
    const auto sp = sched.first_stable_phase(0.25, 2.0);
    CHECK(sp.l == 10);
    // T_b^sum < 2 (gamma/(eps C))^{2/(1-2delta)} = 2 * 16^3
    CHECK(sp.t_sum < 8192);
    // brute-force the minimality
    for (int l = 1; l < sp.l; ++l) CHECK(sched.grid_size(l) < 8);
    CHECK(sched.grid_size(sp.l) >= 8);
  }
  {
    PhaseSchedule sched(0.9, 0.1);
    const auto sp = sched.first_stable_phase(1.0, 2.0);
    int expect = 0;
    for (int l = 1; l <= 60; ++l) {
      if (sched.grid_size(l) >= 2) {
        expect = l;
        break;
      }
    }
    CHECK(sp.l == expect);
  }
}

TEST_CASE("stable-phase start stays under its closed-form cap") {
  std::uint64_t ctr = 0;
  int tested = 0;
  while (tested < 200) {
    const double c = 0.02 + 0.9 * rng::uniform01(41, ++ctr, 0);
    const double delta = 0.02 + 0.4 * rng::uniform01(41, ++ctr, 1);
    const double eps = 0.05 + 0.95 * rng::uniform01(41, ++ctr, 2);
    const double gamma = 1.1 + 4.0 * rng::uniform01(41, ++ctr, 3);
    // skip tuples whose stable phase lies beyond the 60-phase schedule depth
    const double needed_l = std::log2(gamma / (eps * c)) / (0.5 - delta) - 2.0;
    if (needed_l > 58.0) continue;
    ++tested;
    PhaseSchedule sched(c, delta);
    const auto sp = sched.first_stable_phase(eps, gamma);
    const double bound = 2.0 * std::pow(gamma / (eps * c), 2.0 / (1.0 - 2.0 * delta));
    CHECK(static_cast<double>(sp.t_sum) < bound);
  }
}
