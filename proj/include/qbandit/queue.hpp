#pragma once

#include <algorithm>

#include "qbandit/common.hpp"

namespace qbandit {

// One slot of Q(t+1) = [Q(t) + A(t) - V(t) 1{V(t) <= C(t)}]_+.
// Transmission at exact equality V = C succeeds.
struct SlotOutcome {
  bool ack = false;
  double served = 0.0;
  double arrival = 0.0;
  double q_next = 0.0;
};

inline SlotOutcome step(double q, double arrival, double rate, double capacity) {
  require_domain(q >= 0.0, "step: queue must be nonnegative");
  require_domain(arrival >= 0.0 && arrival <= 1.0, "step: arrival must lie in [0,1]");
  require_domain(rate >= 0.0 && rate <= 1.0, "step: rate must lie in [0,1]");
  require_domain(capacity >= 0.0 && capacity <= 1.0, "step: capacity must lie in [0,1]");
  SlotOutcome out;
  out.ack = rate <= capacity;
  out.served = out.ack ? rate : 0.0;
  out.arrival = arrival;
  out.q_next = std::max(q + arrival - out.served, 0.0);
  return out;
}

}  // namespace qbandit
