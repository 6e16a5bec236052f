#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qbandit/common.hpp"
#include "qbandit/sim.hpp"

namespace qbandit {
namespace csv {

// 17 significant digits: doubles round-trip bit-exactly, '.' separator.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt(std::int64_t x) { return std::to_string(x); }
inline std::string fmt(std::uint64_t x) { return std::to_string(x); }

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot open for writing: " + path);
  f << "t,rate,ack,arrival,q\n";
  for (const auto& row : traj.slots) {
    f << row.t << ',' << fmt(row.rate) << ',' << (row.ack ? 1 : 0) << ',' << fmt(row.arrival)
      << ',' << fmt(row.q) << '\n';
  }
}

inline std::vector<SlotRecord> read_trajectory(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(f, line)) throw config_error("empty trajectory file: " + path);
  if (line != "t,rate,ack,arrival,q")
    throw config_error("unexpected trajectory header in " + path + ": " + line);
  std::vector<SlotRecord> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 5) throw config_error("malformed trajectory row: " + line);
    SlotRecord r;
    r.t = std::stoll(cells[0]);
    r.rate = std::strtod(cells[1].c_str(), nullptr);
    r.ack = cells[2] == "1";
    r.arrival = std::strtod(cells[3].c_str(), nullptr);
    r.q = std::strtod(cells[4].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

inline void write_time_average(const std::string& path, const AggregateResult& agg,
                               bool per_seed = false) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot open for writing: " + path);
  f << "t,mean_time_avg_q,se";
  if (per_seed) {
    for (auto s : agg.seeds) f << ",time_avg_q_seed_" << s;
  }
  f << '\n';
  for (std::size_t j = 0; j < agg.ts.size(); ++j) {
    f << agg.ts[j] << ',' << fmt(agg.mean_time_avg_q[j]) << ',' << fmt(agg.se_time_avg_q[j]);
    if (per_seed) {
      for (const auto& tr : agg.trajectories) f << ',' << fmt(tr.time_avg_q[j]);
    }
    f << '\n';
  }
}

inline void write_phase_log(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot open for writing: " + path);
  f << "l,T_l,d_l,pulls\n";
  for (const auto& snap : traj.phase_log) {
    f << snap.l << ',' << snap.t_l << ',' << snap.d_l << ',';
    for (std::size_t i = 0; i < snap.pulls.size(); ++i) {
      if (i) f << '|';
      f << snap.pulls[i];
    }
    f << '\n';
  }
}

}  // namespace csv
}  // namespace qbandit
