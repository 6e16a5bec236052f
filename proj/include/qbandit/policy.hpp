#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qbandit/common.hpp"
#include "qbandit/dists.hpp"
#include "qbandit/sched.hpp"

namespace qbandit {

// Per-arm learning state: pull count, empirical mean of observed service,
// current upper confidence index.
struct ArmStats {
  std::int64_t n = 0;
  double sum = 0.0;
  double mean = 0.0;
  double ucb = 0.0;
};

// Behavioral contract: choose(t) then observe(t, ...) exactly once per slot.
// Policies never see Q(t) or C(t); the arrival is delivered to observe so
// history-dependent baselines can condition on it, the built-in learners
// discard it.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual double choose(std::int64_t t) = 0;
  virtual void observe(std::int64_t t, bool ack, double arrival) = 0;
  virtual std::string name() const = 0;

 protected:
  void check_choose_clock(std::int64_t t) {
    if (t != clock_ + 1) throw contract_error("policy: choose clock mismatch");
    if (pending_observe_) throw contract_error("policy: choose called before observe");
    clock_ = t;
    pending_observe_ = true;
  }
  void check_observe_clock(std::int64_t t) {
    if (!pending_observe_ || t != clock_) throw contract_error("policy: observe without matching choose");
    pending_observe_ = false;
  }

 private:
  std::int64_t clock_ = 0;
  bool pending_observe_ = false;
};

// Phased UCB on a refining uniform mesh. Every phase starts from blank
// statistics with all indices at sqrt((7-2delta) log(T_l) / 4); within a
// phase the log(T_l) term is constant, so only the chosen arm's index moves.
class PhasedUcbPolicy : public Policy {
 public:
  explicit PhasedUcbPolicy(PhaseSchedule sched) : sched_(sched) {}

  double choose(std::int64_t t) override {
    check_choose_clock(t);
    auto [l, u] = PhaseSchedule::phase_of(t);
    if (u == 1) reset_phase(l);
    chosen_ = argmax_lowest(arms_, [](const ArmStats& a) { return a.ucb; });
    return rate_of(chosen_);
  }

  void observe(std::int64_t t, bool ack, double /*arrival*/) override {
    check_observe_clock(t);
    ArmStats& a = arms_[chosen_];
    const double sample = rate_of(chosen_) * (ack ? 1.0 : 0.0);
    a.n += 1;
    a.sum += sample;
    a.mean = a.sum / static_cast<double>(a.n);
    a.ucb = a.mean + radius(a.n);
  }

  std::string name() const override { return "phased-ucb"; }

  const PhaseSchedule& schedule() const { return sched_; }
  int current_phase() const { return phase_; }
  int grid() const { return static_cast<int>(arms_.size()); }
  const std::vector<ArmStats>& arms() const { return arms_; }
  double rate_of(std::size_t arm_index) const {
    return static_cast<double>(arm_index + 1) / static_cast<double>(arms_.size());
  }

 private:
  void reset_phase(int l) {
    phase_ = l;
    const int d = sched_.grid_size(l);
    const double t_l = static_cast<double>(PhaseSchedule::phase_length(l));
    const double init = std::sqrt((7.0 - 2.0 * sched_.delta()) * std::log(t_l) / 4.0);
    arms_.assign(static_cast<std::size_t>(d), ArmStats{0, 0.0, 0.0, init});
  }

  double radius(std::int64_t n) const {
    const double t_l = static_cast<double>(PhaseSchedule::phase_length(phase_));
    const double m = static_cast<double>(std::max<std::int64_t>(1, n));
    return std::sqrt((7.0 - 2.0 * sched_.delta()) * std::log(t_l) / (4.0 * m));
  }

  PhaseSchedule sched_;
  int phase_ = 0;
  std::vector<ArmStats> arms_;
  std::size_t chosen_ = 0;
};

// UCB1 on the fixed grid {k/d : k in [1:d]} with d = ceil(3/epsilon).
// Slots 1..d pull each arm once; afterwards the index is
// mean + sqrt(2 log t / n), lowest index on ties.
class KnownEpsUcbPolicy : public Policy {
 public:
  explicit KnownEpsUcbPolicy(double epsilon) : eps_(epsilon) {
    require_domain(epsilon > 0.0 && epsilon <= 1.0, "KnownEpsUcbPolicy: epsilon must lie in (0,1]");
    d_ = static_cast<int>(ceil_guarded(3.0 / epsilon));
    arms_.assign(static_cast<std::size_t>(d_), ArmStats{});
  }

  double choose(std::int64_t t) override {
    check_choose_clock(t);
    if (t <= d_) {
      chosen_ = static_cast<std::size_t>(t - 1);
    } else {
      const double logt = std::log(static_cast<double>(t));
      for (auto& a : arms_) a.ucb = a.mean + std::sqrt(2.0 * logt / static_cast<double>(a.n));
      chosen_ = argmax_lowest(arms_, [](const ArmStats& a) { return a.ucb; });
    }
    return rate_of(chosen_);
  }

  void observe(std::int64_t t, bool ack, double /*arrival*/) override {
    check_observe_clock(t);
    ArmStats& a = arms_[chosen_];
    a.n += 1;
    a.sum += rate_of(chosen_) * (ack ? 1.0 : 0.0);
    a.mean = a.sum / static_cast<double>(a.n);
  }

  std::string name() const override { return "ucb1"; }

  double epsilon() const { return eps_; }
  int grid() const { return d_; }
  const std::vector<ArmStats>& arms() const { return arms_; }
  double rate_of(std::size_t arm_index) const {
    return static_cast<double>(arm_index + 1) / static_cast<double>(d_);
  }

 private:
  double eps_;
  int d_;
  std::vector<ArmStats> arms_;
  std::size_t chosen_ = 0;
};

class FixedRatePolicy : public Policy {
 public:
  explicit FixedRatePolicy(double rate) : rate_(rate) {
    require_domain(rate >= 0.0 && rate <= 1.0, "FixedRatePolicy: rate must lie in [0,1]");
  }
  double choose(std::int64_t t) override {
    check_choose_clock(t);
    return rate_;
  }
  void observe(std::int64_t t, bool, double) override { check_observe_clock(t); }
  std::string name() const override { return "fixed-rate"; }
  double rate() const { return rate_; }

 private:
  double rate_;
};

// Plays argmax_k g(k/d) computed from the environment's analytic g.
class OracleGridPolicy : public Policy {
 public:
  OracleGridPolicy(const Environment& env, int d) {
    require_domain(d >= 1, "OracleGridPolicy: d must be >= 1");
    double best = -1.0;
    for (int k = 1; k <= d; ++k) {
      const double r = static_cast<double>(k) / static_cast<double>(d);
      const double v = env.capacity.g(r);
      if (v > best) {
        best = v;
        rate_ = r;
      }
    }
  }
  double choose(std::int64_t t) override {
    check_choose_clock(t);
    return rate_;
  }
  void observe(std::int64_t t, bool, double) override { check_observe_clock(t); }
  std::string name() const override { return "oracle-grid"; }
  double rate() const { return rate_; }

 private:
  double rate_ = 1.0;
};

inline std::unique_ptr<Policy> fixed_rate_policy(double rate) {
  return std::make_unique<FixedRatePolicy>(rate);
}

inline std::unique_ptr<Policy> oracle_grid_policy(const Environment& env, int d) {
  return std::make_unique<OracleGridPolicy>(env, d);
}

}  // namespace qbandit
