#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qbandit/common.hpp"

namespace qbandit {

// Closed-form evaluators for the queue-size guarantees and the converse
// quantities. Everything is 64-bit
// floating point; tests carry an independent high-precision recomputation.

struct PhasedBoundTerms {
  double horizon_free_1 = 0.0;  // 65 * 2^{2/(p-1)} gamma / ((gamma-1) eps)
  double horizon_free_2 = 0.0;  // (2^{(p+1)/(p-1)} + 2) (gamma/(eps C))^{2/(1-2delta)}
  double horizon_free_3 = 1.0;  // the +1
  double vanishing_1 = 0.0;     // C^q term, H^{1 - q/2 - delta q}
  double vanishing_2 = 0.0;     // H^{1-q} term

  double total() const {
    return horizon_free_1 + horizon_free_2 + horizon_free_3 + vanishing_1 + vanishing_2;
  }
  double horizon_free() const { return horizon_free_1 + horizon_free_2 + horizon_free_3; }
  double vanishing() const { return vanishing_1 + vanishing_2; }
};

inline PhasedBoundTerms phased_finite_bound_terms(double H, double eps, double C, double delta,
                                           double gamma, double q) {
  require_domain(H >= 1.0, "phased_finite_bound: H must be >= 1");
  require_domain(eps > 0.0 && eps <= 1.0, "phased_finite_bound: eps must lie in (0,1]");
  require_domain(C > 0.0 && C < 1.0, "phased_finite_bound: C must lie in (0,1)");
  require_domain(delta > 0.0 && delta < 0.5, "phased_finite_bound: delta must lie in (0,1/2)");
  require_domain(gamma > 1.0, "phased_finite_bound: gamma must exceed 1");
  require_domain(q > 1.0 && q < 2.0, "phased_finite_bound: q must lie in (1,2)");
  const double p = q / (q - 1.0);  // 1/p + 1/q = 1

  PhasedBoundTerms t;
  t.horizon_free_1 = 65.0 * std::pow(2.0, 2.0 / (p - 1.0)) * gamma / ((gamma - 1.0) * eps);
  const double expo = 2.0 / (1.0 - 2.0 * delta);
  t.horizon_free_2 = (std::pow(2.0, (p + 1.0) / (p - 1.0)) + 2.0) * std::pow(gamma / (eps * C), expo);
  t.horizon_free_3 = 1.0;

  const double log2h = std::log(2.0 * H);
  const double common = std::pow(gamma, 2.0 * q) * std::pow(7.0 - 2.0 * delta, q) *
                        std::pow(log2h, q + 2.0) /
                        (std::pow(gamma - 1.0, 2.0 * q) * std::pow(eps, 2.0 * q) *
                         std::pow(1.0 - q / 2.0, 2.0));
  t.vanishing_1 = std::pow(2.0, 2.5 * q - delta * q + 3.0) * std::pow(C, q) * common *
                  std::pow(H, 1.0 - q / 2.0 - delta * q);
  t.vanishing_2 = std::pow(2.0, 2.0 * q + 3.0) * common * std::pow(H, 1.0 - q);
  return t;
}

inline double phased_finite_bound(double H, double eps, double C, double delta, double gamma,
                                    double q) {
  return phased_finite_bound_terms(H, eps, C, delta, gamma, q).total();
}

// limsup bound: 65 * 2^{(2-4delta)/(1+2delta)} / eps.
inline double phased_limit_bound(double delta, double eps) {
  require_domain(delta > 0.0 && delta < 0.5, "phased_limit_bound: delta must lie in (0,1/2)");
  require_domain(eps > 0.0 && eps <= 1.0, "phased_limit_bound: eps must lie in (0,1]");
  return 65.0 * std::pow(2.0, (2.0 - 4.0 * delta) / (1.0 + 2.0 * delta)) / eps;
}

// Finite-horizon bound at C = 0.04, delta = 1/6.
inline double phased_tuned_bound(double eps) {
  require_domain(eps > 0.0 && eps <= 1.0, "phased_tuned_bound: eps must lie in (0,1]");
  const double inv3 = 1.0 / (eps * eps * eps);
  return 1.0 + 267.0 / eps + 16846843.0 * inv3 +
         2675.0 * std::pow(std::log(1.0 / eps), 3.5) * inv3;
}

inline double phased_tuned_limit(double eps) {
  require_domain(eps > 0.0 && eps <= 1.0, "phased_tuned_limit: eps must lie in (0,1]");
  return 130.0 / eps;
}

// Known-epsilon UCB1 bound, piecewise at e^{-3}; both branches are valid at
// the boundary, we report the larger one there.
inline double known_eps_bound(double eps) {
  require_domain(eps > 0.0 && eps <= 1.0, "known_eps_bound: eps must lie in (0,1]");
  const double boundary = std::exp(-3.0);
  const double log_branch = 1767.0 * std::log(1.0 / eps) / (eps * eps);
  const double flat_branch = 12378.0 / (eps * eps);
  if (eps < boundary) return log_branch;
  if (eps > boundary) return flat_branch;
  return std::max(log_branch, flat_branch);
}

// Worst-case converse constant: some environment forces at least this
// time-average queue. Proved for eps <= 1/144.
inline double lower_bound(double eps) {
  require_domain(eps > 0.0 && eps <= 1.0, "lower_bound: eps must lie in (0,1]");
  return 6e-7 / (eps * eps);
}

// The witness horizon from the converse proof:
// T = ceil((1/(160 sqrt(7) eps^{1.5}))^2 + 1); (160 sqrt7)^2 = 179200 exactly.
inline std::int64_t converse_horizon(double eps) {
  require_domain(eps > 0.0 && eps <= 1.0, "converse_horizon: eps must lie in (0,1]");
  const long double e = static_cast<long double>(eps);
  const long double v = 1.0L / (179200.0L * e * e * e) + 1.0L;
  return static_cast<std::int64_t>(std::ceil(v));
}

// Expected pulls of a suboptimal UCB1 arm: 8 log H / gap^2 + 1 + pi^2/3.
inline double ucb1_pull_bound(double gap, double H) {
  require_domain(gap > 0.0 && gap <= 1.0, "ucb1_pull_bound: gap must lie in (0,1]");
  require_domain(H >= 2.0, "ucb1_pull_bound: H must be >= 2");
  return 8.0 * std::log(H) / (gap * gap) + 1.0 + std::numbers::pi * std::numbers::pi / 3.0;
}

// KL divergence between Bernoulli(a) and Bernoulli(b), 0 log 0 = 0.
inline double kl_bernoulli(double a, double b) {
  require_domain(a >= 0.0 && a <= 1.0, "kl_bernoulli: a must lie in [0,1]");
  require_domain(b > 0.0 && b < 1.0, "kl_bernoulli: b must lie in (0,1)");
  double v = 0.0;
  if (a > 0.0) v += a * std::log(a / b);
  if (a < 1.0) v += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
  return v;
}

// Power-sum path bound: for x_1 = 0, |x_i - x_{i+1}| <= 1, x_i >= 0 and
// p >= 2, (sum x^p)^{1/p} <= 2^{(p-1)/(2p)} (sum x)^{(p+1)/(2p)}.
inline bool check_path_power_bound(std::span<const double> path, double p) {
  require_domain(p >= 2.0, "check_path_power_bound: p must be >= 2");
  require_domain(!path.empty(), "check_path_power_bound: empty path");
  require_domain(path.front() == 0.0, "check_path_power_bound: path must start at 0");
  for (std::size_t i = 0; i < path.size(); ++i) {
    require_domain(path[i] >= 0.0, "check_path_power_bound: entries must be nonnegative");
    if (i + 1 < path.size())
      require_domain(std::abs(path[i + 1] - path[i]) <= 1.0 + 1e-12,
                     "check_path_power_bound: successive differences must be <= 1");
  }
  CompensatedSum s, sp;
  for (double x : path) {
    s.add(x);
    sp.add(std::pow(x, p));
  }
  const double d = std::pow(sp.value(), 1.0 / p);
  const double rhs = std::pow(2.0, (p - 1.0) / (2.0 * p)) *
                     std::pow(s.value(), (p + 1.0) / (2.0 * p));
  return d <= rhs + 1e-9;
}

// ---------------------------------------------------------------------------
// Report table for the CLI.
// ---------------------------------------------------------------------------

struct BoundReport {
  std::string name;
  double eps = 0.0;
  double value = 0.0;
  std::string validity;  // parameter constraints under which the formula is proved
};

inline std::vector<BoundReport> bound_table(double eps) {
  std::vector<BoundReport> rows;
  rows.push_back({"phased_tuned_bound", eps, phased_tuned_bound(eps), "C=0.04, delta=1/6, any H"});
  rows.push_back({"phased_tuned_limit", eps, phased_tuned_limit(eps), "C=0.04, delta=1/6, H->inf"});
  rows.push_back({"phased_limit(delta=1/6)", eps, phased_limit_bound(1.0 / 6.0, eps), "H->inf"});
  rows.push_back({"known_eps_bound", eps, known_eps_bound(eps), "d=ceil(3/eps), any H"});
  rows.push_back({"lower_bound", eps, lower_bound(eps),
                  eps <= 1.0 / 144.0 ? "proved for eps <= 1/144"
                                     : "formula value; proved only for eps <= 1/144"});
  rows.push_back({"converse_horizon", eps, static_cast<double>(converse_horizon(eps)),
                  eps <= 1.0 / 144.0 ? "witness horizon of the converse"
                                     : "formula value; proved only for eps <= 1/144"});
  return rows;
}

}  // namespace qbandit
