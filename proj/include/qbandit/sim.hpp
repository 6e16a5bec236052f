#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qbandit/common.hpp"
#include "qbandit/dists.hpp"
#include "qbandit/policy.hpp"
#include "qbandit/queue.hpp"
#include "qbandit/rng.hpp"
#include "qbandit/sched.hpp"

namespace qbandit {

struct SimConfig {
  std::int64_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::int64_t record_stride = 1;

  void validate() const {
    if (horizon < 1) throw config_error("horizon must be >= 1");
    if (record_stride < 1) throw config_error("record_stride must be >= 1");
    if (seeds.empty()) throw config_error("at least one seed required");
  }
};

struct SlotRecord {
  std::int64_t t = 0;
  double rate = 0.0;
  bool ack = false;
  double arrival = 0.0;
  double q = 0.0;  // Q(t), the backlog at the start of slot t
};

struct PhaseSnapshot {
  int l = 0;
  std::int64_t t_l = 0;
  int d_l = 0;
  std::vector<std::int64_t> pulls;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  std::vector<SlotRecord> slots;          // every record_stride-th slot plus slot H
  std::vector<std::int64_t> avg_t;        // stride points
  std::vector<double> time_avg_q;         // (1/t) sum_{tau<=t} Q(tau), compensated
  std::vector<PhaseSnapshot> phase_log;   // phased policy only
  double final_time_avg_q = 0.0;
  double max_q = 0.0;
};

// One seeded replication: per slot draw A(t) then C(t) from the counter RNG,
// ask the policy for a rate, apply the queue recursion, deliver the ACK.
// Output is bitwise-identical for identical (env, policy, config, seed).
inline Trajectory run(const Environment& env, Policy& policy, const SimConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  Trajectory traj;
  traj.seed = seed;
  traj.horizon = cfg.horizon;

  auto* phased = dynamic_cast<PhasedUcbPolicy*>(&policy);

  double q = 0.0;
  CompensatedSum sum_q;
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const double arrival = env.arrivals.sample(rng::uniform01(seed, static_cast<std::uint64_t>(t), rng::kArrivalDraw));
    const double capacity = env.capacity.sample(rng::uniform01(seed, static_cast<std::uint64_t>(t), rng::kCapacityDraw));
    const double rate = policy.choose(t);
    const SlotOutcome out = step(q, arrival, rate, capacity);
    policy.observe(t, out.ack, arrival);

    if (q > static_cast<double>(t - 1)) throw std::logic_error("run: Q(t) <= t-1 violated");
    sum_q.add(q);
    traj.max_q = std::max(traj.max_q, q);

    const bool record = (t % cfg.record_stride == 0) || t == cfg.horizon;
    if (record) {
      traj.slots.push_back({t, rate, out.ack, arrival, q});
      traj.avg_t.push_back(t);
      traj.time_avg_q.push_back(sum_q.value() / static_cast<double>(t));
    }

    if (phased) {
      const auto [l, u] = PhaseSchedule::phase_of(t);
      const bool phase_ends = u == PhaseSchedule::phase_length(l) || t == cfg.horizon;
      if (phase_ends) {
        PhaseSnapshot snap;
        snap.l = l;
        snap.t_l = PhaseSchedule::phase_length(l);
        snap.d_l = phased->grid();
        snap.pulls.reserve(phased->arms().size());
        for (const auto& a : phased->arms()) snap.pulls.push_back(a.n);
        traj.phase_log.push_back(std::move(snap));
      }
    }

    q = out.q_next;
  }
  traj.final_time_avg_q = traj.time_avg_q.empty() ? 0.0 : traj.time_avg_q.back();
  return traj;
}

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

struct AggregateResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::int64_t> ts;
  std::vector<double> mean_time_avg_q;
  std::vector<double> se_time_avg_q;
  std::vector<double> per_seed_final;
  std::vector<double> per_seed_max_q;
  std::vector<Trajectory> trajectories;  // populated when keep_trajectories
};

// Seed-parallel replication. Seeds are independent streams, so the thread
// layout cannot change any trajectory; aggregation runs in seed order.
inline AggregateResult replicate(const Environment& env, const PolicyFactory& make_policy,
                                 const SimConfig& cfg, int threads = 1,
                                 bool keep_trajectories = true) {
  cfg.validate();
  if (threads < 1) throw config_error("threads must be >= 1");
  const std::size_t n = cfg.seeds.size();
  std::vector<Trajectory> trajs(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      auto policy = make_policy();
      trajs[i] = run(env, *policy, cfg, cfg.seeds[i]);
    }
  };
  if (threads == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int use = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
    pool.reserve(static_cast<std::size_t>(use));
    for (int i = 0; i < use; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  AggregateResult agg;
  agg.seeds = cfg.seeds;
  agg.ts = trajs.front().avg_t;
  const std::size_t m = agg.ts.size();
  agg.mean_time_avg_q.resize(m);
  agg.se_time_avg_q.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    CompensatedSum s;
    for (const auto& tr : trajs) s.add(tr.time_avg_q[j]);
    const double mean = s.value() / static_cast<double>(n);
    double var = 0.0;
    if (n > 1) {
      CompensatedSum sq;
      for (const auto& tr : trajs) {
        const double d = tr.time_avg_q[j] - mean;
        sq.add(d * d);
      }
      var = sq.value() / static_cast<double>(n - 1);
    }
    agg.mean_time_avg_q[j] = mean;
    agg.se_time_avg_q[j] = n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  }
  for (const auto& tr : trajs) {
    agg.per_seed_final.push_back(tr.final_time_avg_q);
    agg.per_seed_max_q.push_back(tr.max_q);
  }
  if (keep_trajectories) agg.trajectories = std::move(trajs);
  return agg;
}

struct ReplayResult {
  bool ok = false;
  std::string message;
};

// Re-applies the queue recursion to a recorded (arrival, rate, ack) sequence
// and verifies the stored q series bit-exactly. Needs slot-consecutive rows.
inline ReplayResult replay_slots(const std::vector<SlotRecord>& slots) {
  if (slots.empty()) return {false, "empty trajectory"};
  if (slots.front().t != 1)
    return {false, "trajectory must start at t=1 (record_stride 1 required for replay)"};
  double q = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const SlotRecord& row = slots[i];
    if (row.t != static_cast<std::int64_t>(i) + 1)
      return {false, "trajectory rows are not slot-consecutive (record_stride 1 required)"};
    if (row.q != q) {
      std::ostringstream os;
      os.precision(17);
      os << "q mismatch at t=" << row.t << ": recorded " << row.q << ", replayed " << q;
      return {false, os.str()};
    }
    if (!row.ack && row.rate <= 0.0)
      return {false, "inconsistent row: rate 0 cannot NACK"};
    const double synth_capacity = row.ack ? 1.0 : 0.0;
    q = step(q, row.arrival, row.rate, synth_capacity).q_next;
  }
  return {true, "replayed " + std::to_string(slots.size()) + " slots bit-exactly"};
}

}  // namespace qbandit
