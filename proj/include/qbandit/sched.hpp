#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>

#include "qbandit/common.hpp"

namespace qbandit {

// Deterministic phase bookkeeping for the phased algorithm: phase l lasts
// T_l = 2^{l+2} slots and carries a uniform grid of d_l = ceil(C T_l^{1/2-delta})
// rate levels.
class PhaseSchedule {
 public:
  PhaseSchedule(double C, double delta) : C_(C), delta_(delta) {
    require_domain(C > 0.0 && C < 1.0, "PhaseSchedule: C must lie in (0,1)");
    require_domain(delta > 0.0 && delta < 0.5, "PhaseSchedule: delta must lie in (0,1/2)");
  }

  double C() const { return C_; }
  double delta() const { return delta_; }

  // T_l = 2^{l+2}.
  static std::int64_t phase_length(int l) {
    require_domain(l >= 1 && l <= 60, "phase_length: l must lie in [1,60]");
    return std::int64_t{1} << (l + 2);
  }

  // T_l^sum = sum_{i<l} T_i = 2^{l+2} - 8; last slot of phase l-1.
  static std::int64_t phase_start_sum(int l) {
    require_domain(l >= 1 && l <= 60, "phase_start_sum: l must lie in [1,60]");
    return (std::int64_t{1} << (l + 2)) - 8;
  }

  // d_l; fractional power in doubles, ceiling with the 1e-9 downward guard.
  int grid_size(int l) const {
    const double t = static_cast<double>(phase_length(l));
    const double raw = C_ * std::pow(t, 0.5 - delta_);
    const std::int64_t d = std::max<std::int64_t>(1, ceil_guarded(raw));
    require_domain(d <= (std::int64_t{1} << 31), "grid_size: grid too large");
    return static_cast<int>(d);
  }

  // (a(t), u): the phase of slot t and its index within the phase, u in [1:T_l].
  static std::pair<int, std::int64_t> phase_of(std::int64_t t) {
    require_domain(t >= 1, "phase_of: t must be >= 1");
    // a(t) = min{l : 2^{l+2} - 8 >= t} - 1 = ceil(log2(t+8)) - 3.
    const auto l = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(t) + 7) - 3);
    return {l, t - phase_start_sum(l)};
  }

  struct StablePhase {
    int l = 0;
    std::int64_t t_sum = 0;  // T_b^sum, for comparison against 2(gamma/(eps C))^{2/(1-2delta)}
  };

  // b = min{l : d_l >= gamma/eps}.
  StablePhase first_stable_phase(double epsilon, double gamma) const {
    require_domain(epsilon > 0.0 && epsilon <= 1.0, "first_stable_phase: epsilon must lie in (0,1]");
    require_domain(gamma > 1.0, "first_stable_phase: gamma must exceed 1");
    const double target = gamma / epsilon;
    for (int l = 1; l <= 60; ++l) {
      if (static_cast<double>(grid_size(l)) >= target) return {l, phase_start_sum(l)};
    }
    throw std::domain_error("first_stable_phase: no phase l <= 60 reaches gamma/epsilon");
  }

 private:
  double C_;
  double delta_;
};

}  // namespace qbandit
