// Command-line front end: seeded simulation runs, epsilon sweeps, environment
// verification, bound tables, and bit-exact trajectory replay.
//
// Exit codes: 0 success, 1 invariant failure, 2 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qbandit/bounds.hpp"
#include "qbandit/config.hpp"
#include "qbandit/csv.hpp"
#include "qbandit/dists.hpp"
#include "qbandit/sim.hpp"

namespace fs = std::filesystem;
using namespace qbandit;

namespace {

int default_threads() {
  if (const char* env = std::getenv("QBANDIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::string> seeds_override;
  std::optional<std::int64_t> horizon_override;
  std::optional<std::int64_t> stride_override;
  int threads = default_threads();
};

void apply_overrides(SimConfig& sim, const CommonFlags& flags) {
  if (flags.seeds_override) {
    sim.seeds.clear();
    for (const auto& part : csv::split(*flags.seeds_override)) {
      sim.seeds.push_back(static_cast<std::uint64_t>(std::stoll(part)));
    }
  }
  if (flags.horizon_override) sim.horizon = *flags.horizon_override;
  if (flags.stride_override) sim.record_stride = *flags.stride_override;
  sim.validate();
}

int run_simulate(const CommonFlags& flags) {
  Config cfg = Config::from_file(flags.config_path);
  Environment env = build_environment(cfg);
  PolicySpec policy = build_policy(cfg, env);
  SimConfig sim = build_sim_config(cfg);
  const bool per_seed = cfg.optional_bool("output.per_seed", false);
  cfg.finish();
  apply_overrides(sim, flags);

  AggregateResult agg = replicate(env, policy.factory, sim, flags.threads, true);

  fs::create_directories(flags.out_dir);
  const fs::path out(flags.out_dir);
  csv::write_time_average((out / "timeavg.csv").string(), agg, per_seed);
  for (const auto& traj : agg.trajectories) {
    csv::write_trajectory((out / ("trajectory_seed_" + std::to_string(traj.seed) + ".csv")).string(), traj);
    if (!traj.phase_log.empty()) {
      csv::write_phase_log((out / ("phases_seed_" + std::to_string(traj.seed) + ".csv")).string(), traj);
    }
  }

  std::ofstream summary(out / "summary.txt");
  summary << "environment: " << env.name << " (arrivals " << env.arrivals.describe()
          << ", capacity " << env.capacity.describe() << ")\n";
  summary << "lambda: " << csv::fmt(env.lambda) << "  g_star: " << csv::fmt(env.g_star)
          << "  slack: " << csv::fmt(env.slack)
          << (env.stabilizable() ? "" : "  [unstabilizable]") << "\n";
  summary << "policy: " << policy.name << "\n";
  summary << "horizon: " << sim.horizon << "  record_stride: " << sim.record_stride
          << "  seeds: " << sim.seeds.size() << "\n";
  for (std::size_t i = 0; i < agg.seeds.size(); ++i) {
    summary << "seed " << agg.seeds[i] << ": time_avg_q(H)=" << csv::fmt(agg.per_seed_final[i])
            << " max_q=" << csv::fmt(agg.per_seed_max_q[i]) << "\n";
  }
  summary << "mean time_avg_q(H): " << csv::fmt(agg.mean_time_avg_q.back()) << " (se "
          << csv::fmt(agg.se_time_avg_q.back()) << ")\n";

  std::cout << "simulate: wrote " << (out / "timeavg.csv").string() << " ("
            << agg.ts.size() << " rows, " << agg.seeds.size() << " seeds)\n";
  return 0;
}

int run_sweep(const CommonFlags& flags) {
  Config cfg = Config::from_file(flags.config_path);
  const std::vector<double> eps_list = cfg.require_numbers("sweep.epsilons");
  const std::vector<std::string> policies = cfg.require_strings("sweep.policies");
  const int k = static_cast<int>(cfg.optional_int("sweep.k").value_or(1));
  const std::optional<double> phased_c = cfg.optional_number("policy.c");
  const std::optional<double> phased_delta = cfg.optional_number("policy.delta");
  SimConfig sim = build_sim_config(cfg);
  cfg.finish();
  apply_overrides(sim, flags);
  if (eps_list.empty() || policies.empty())
    throw config_error("sweep needs nonempty sweep.epsilons and sweep.policies");

  fs::create_directories(flags.out_dir);
  const fs::path out_path = fs::path(flags.out_dir) / "sweep.csv";
  std::ofstream out(out_path);
  if (!out) throw config_error("cannot open for writing: " + out_path.string());
  out << "epsilon,policy,horizon,seeds,mean_time_avg_q,se,known_eps_bound,lower_bound,"
         "phased_tuned_limit,within_known_eps_bound\n";

  for (double eps : eps_list) {
    Environment env = k == 0 ? make_env0(eps) : make_converse_environment(eps, k);
    for (const auto& pname : policies) {
      PolicyFactory factory;
      if (pname == "ucb1") {
        factory = [eps]() { return std::make_unique<KnownEpsUcbPolicy>(eps); };
      } else if (pname == "oracle-grid") {
        const int d = static_cast<int>(ceil_guarded(3.0 / eps));
        Environment env_copy = env;
        factory = [env_copy, d]() { return std::make_unique<OracleGridPolicy>(env_copy, d); };
      } else if (pname == "phased-ucb") {
        if (!phased_c || !phased_delta)
          throw config_error("sweep with phased-ucb needs policy.c and policy.delta");
        PhaseSchedule sched(*phased_c, *phased_delta);
        factory = [sched]() { return std::make_unique<PhasedUcbPolicy>(sched); };
      } else {
        throw config_error("sweep: unsupported policy '" + pname + "'");
      }
      AggregateResult agg = replicate(env, factory, sim, flags.threads, false);
      const double mean = agg.mean_time_avg_q.back();
      const double bound = known_eps_bound(eps);
      out << csv::fmt(eps) << ',' << pname << ',' << sim.horizon << ',' << sim.seeds.size() << ','
          << csv::fmt(mean) << ',' << csv::fmt(agg.se_time_avg_q.back()) << ','
          << csv::fmt(bound) << ',' << csv::fmt(lower_bound(eps)) << ','
          << csv::fmt(phased_tuned_limit(eps)) << ',' << (mean <= bound ? "pass" : "fail") << '\n';
    }
  }
  std::cout << "sweep: wrote " << out_path.string() << " (" << eps_list.size() * policies.size()
            << " cells)\n";
  return 0;
}

int run_verify_env(const CommonFlags& flags, double grid_step, const std::string& csv_out) {
  Config cfg = Config::from_file(flags.config_path);
  Environment env = build_environment(cfg);
  cfg.finish();

  std::vector<CheckResult> checks;
  const bool is_converse = env.capacity.kind() == CapacityDistribution::Kind::Converse;
  const bool is_env0 = env.capacity.kind() == CapacityDistribution::Kind::TruncatedReciprocal;
  if ((is_converse || is_env0) && env.capacity.epsilon() <= 1.0 / 144.0) {
    const ConverseFamily fam = build_converse_family(env.capacity.epsilon());
    std::cout << "converse family: K=" << fam.K << " for epsilon=" << csv::fmt(fam.epsilon) << "\n";
    for (auto& c : verify_converse_family(fam)) checks.push_back(std::move(c));
  }
  EnvReport report = verify_env(env, grid_step);
  for (auto& c : report.checks) checks.push_back(std::move(c));

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
    all = all && c.pass;
  }
  if (!csv_out.empty()) {
    std::ofstream f(csv_out);
    if (!f) throw config_error("cannot open for writing: " + csv_out);
    f << "check,pass,detail\n";
    for (const auto& c : checks) f << c.name << ',' << (c.pass ? 1 : 0) << ',' << c.detail << '\n';
  }
  std::cout << (all ? "all checks pass" : "some checks FAILED") << "\n";
  return all ? 0 : 1;
}

int run_bounds(const std::vector<double>& eps_list, const std::string& out_file) {
  if (eps_list.empty()) throw config_error("bounds: empty epsilon list");
  std::ostringstream table;
  table << std::left << std::setw(26) << "bound";
  for (double e : eps_list) table << std::setw(16) << ("eps=" + csv::fmt(e)).substr(0, 15);
  table << '\n';
  std::vector<std::vector<BoundReport>> cols;
  for (double e : eps_list) cols.push_back(bound_table(e));
  for (std::size_t row = 0; row < cols.front().size(); ++row) {
    table << std::left << std::setw(26) << cols.front()[row].name;
    for (const auto& col : cols) {
      std::ostringstream v;
      v.precision(8);
      v << col[row].value;
      table << std::setw(16) << v.str();
    }
    table << '\n';
  }
  std::cout << table.str();
  if (!out_file.empty()) {
    std::ofstream f(out_file);
    if (!f) throw config_error("cannot open for writing: " + out_file);
    f << "bound,epsilon,value,validity\n";
    for (const auto& col : cols) {
      for (const auto& r : col) {
        f << r.name << ',' << csv::fmt(r.eps) << ',' << csv::fmt(r.value) << ',' << r.validity << '\n';
      }
    }
  }
  return 0;
}

int run_replay(const std::string& input) {
  const auto rows = csv::read_trajectory(input);
  const ReplayResult res = replay_slots(rows);
  std::cout << (res.ok ? "replay OK: " : "replay FAILED: ") << res.message << "\n";
  return res.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbandit: single-queue rate adaptation under binary ACK/NACK feedback"};
  app.require_subcommand(1);

  CommonFlags flags;
  double grid_step = 1e-5;
  std::string verify_csv;
  std::string eps_arg;
  std::string bounds_out;
  std::string replay_input;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", flags.config_path, "run configuration file");
    if (needs_config) opt->required();
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_option("--seeds", flags.seeds_override, "comma-separated seed list override");
    sub->add_option("--horizon", flags.horizon_override, "horizon override");
    sub->add_option("--stride", flags.stride_override, "record stride override");
    sub->add_option("--threads", flags.threads, "worker threads (default $QBANDIT_THREADS or 1)");
  };

  auto* sim_cmd = app.add_subcommand("simulate", "run seeded replications, write CSV outputs");
  add_common(sim_cmd, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "epsilon x policy grid with bound columns");
  add_common(sweep_cmd, true);

  auto* verify_cmd = app.add_subcommand("verify-env", "check construction invariants and g properties");
  add_common(verify_cmd, true);
  verify_cmd->add_option("--grid-step", grid_step, "verification grid step (default 1e-5)");
  verify_cmd->add_option("--csv", verify_csv, "also write the report as CSV");

  auto* bounds_cmd = app.add_subcommand("bounds", "print the closed-form bound table");
  bounds_cmd->add_option("--eps", eps_arg, "comma-separated epsilon list")->required();
  bounds_cmd->add_option("--out", bounds_out, "also write the table as CSV");

  auto* replay_cmd = app.add_subcommand("replay", "re-run a trajectory CSV through the queue law");
  replay_cmd->add_option("--input", replay_input, "trajectory CSV (record_stride 1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(sim_cmd)) return run_simulate(flags);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(flags);
    if (app.got_subcommand(verify_cmd)) return run_verify_env(flags, grid_step, verify_csv);
    if (app.got_subcommand(bounds_cmd)) {
      std::vector<double> eps_list;
      for (const auto& part : csv::split(eps_arg)) {
        eps_list.push_back(Config::parse_number(part, "--eps"));
      }
      return run_bounds(eps_list, bounds_out);
    }
    if (app.got_subcommand(replay_cmd)) return run_replay(replay_input);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
