#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qbandit/common.hpp"

namespace qbandit {

namespace detail {

using bigint = boost::multiprecision::cpp_int;

// n/d as double for arbitrarily large n, d > 0. Scales to ~96 significant
// bits before the final rounding so the quotient never overflows.
inline double rational_to_double(const bigint& n, const bigint& d) {
  if (n == 0) return 0.0;
  const long nb = static_cast<long>(boost::multiprecision::msb(n));
  const long db = static_cast<long>(boost::multiprecision::msb(d));
  const long shift = 96 - (nb - db);
  bigint scaled;
  if (shift >= 0) {
    scaled = (n << shift) / d;
  } else {
    scaled = n / (d << (-shift));
  }
  return scaled.convert_to<double>() * std::ldexp(1.0, static_cast<int>(-shift));
}

// x_1 = 7/12, x_{j+1} = x_j * (1 + 2eps/(1/2 - eps)). With eps = p/q the
// ratio is (q + 2p)/(q - 2p), so x_{j+1} = 7 (q+2p)^j / (12 (q-2p)^j) exactly.
struct ConverseSeq {
  Rational eps;
  bigint ratio_num;
  bigint ratio_den;

  explicit ConverseSeq(Rational e) : eps(e) {
    require_domain(e.num > 0 && e.den > 0, "converse: epsilon must be positive");
    require_domain(e.den > 2 * e.num, "converse: epsilon must be below 1/2");
    ratio_num = bigint(e.den) + 2 * bigint(e.num);
    ratio_den = bigint(e.den) - 2 * bigint(e.num);
  }

  // x_{j} for j >= 1.
  double x(int j) const {
    bigint n = 7 * pow(ratio_num, unsigned(j - 1));
    bigint d = 12 * pow(ratio_den, unsigned(j - 1));
    return rational_to_double(n, d);
  }

  // K = min{k : x_{k+1} >= 2/3}, decided exactly: 7 (q+2p)^k >= 8 (q-2p)^k.
  int terminal_index() const {
    bigint num = 7, den = 8;
    for (int k = 1; k <= 1000000; ++k) {
      num *= ratio_num;
      den *= ratio_den;
      if (num >= den) return k;
    }
    throw std::domain_error("converse: K search did not terminate");
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Converse family of environments (the x-sequence and its intervals).
// ---------------------------------------------------------------------------

struct ConverseFamily {
  double epsilon = 0.0;
  Rational eps_rational;
  int K = 0;
  std::vector<double> x;  // x_1 .. x_{K+1}

  double xk(int k) const { return x.at(static_cast<std::size_t>(k) - 1); }
  // |I_k| with I_k = (x_k, x_{k+1}], k in [1:K].
  double interval_length(int k) const { return xk(k + 1) - xk(k); }
};

// Full sequence up to x_{K+1}. The family-level guarantees hold only for
// epsilon in (0, 1/144]; environments for single k accept a wider range.
inline ConverseFamily build_converse_family(double epsilon) {
  require_domain(epsilon > 0.0 && epsilon <= 1.0 / 144.0,
                 "build_converse_family: epsilon must lie in (0, 1/144]");
  const Rational r = rational_of(epsilon);
  detail::ConverseSeq seq(r);
  ConverseFamily fam;
  fam.epsilon = epsilon;
  fam.eps_rational = r;
  fam.K = seq.terminal_index();
  fam.x.reserve(static_cast<std::size_t>(fam.K) + 1);
  for (int j = 1; j <= fam.K + 1; ++j) fam.x.push_back(seq.x(j));
  return fam;
}

// ---------------------------------------------------------------------------
// Capacity laws on [0,1]. Tail probabilities are analytic per family; the
// sampler is the generalized inverse CDF, exact at atoms.
// ---------------------------------------------------------------------------

class CapacityDistribution {
 public:
  enum class Kind { PointMass, Uniform01, FiniteSupport, TruncatedReciprocal, Converse };

  static CapacityDistribution point_mass(double c) {
    require_domain(c >= 0.0 && c <= 1.0, "point_mass: c must lie in [0,1]");
    CapacityDistribution d(Kind::PointMass);
    d.c_ = c;
    return d;
  }

  static CapacityDistribution uniform01() { return CapacityDistribution(Kind::Uniform01); }

  static CapacityDistribution finite_support(std::vector<std::pair<double, double>> points) {
    require_domain(!points.empty(), "finite_support: empty point list");
    std::sort(points.begin(), points.end());
    CapacityDistribution d(Kind::FiniteSupport);
    double total = 0.0;
    for (const auto& [v, p] : points) {
      require_domain(v >= 0.0 && v <= 1.0, "finite_support: values must lie in [0,1]");
      require_domain(p >= 0.0, "finite_support: probabilities must be nonnegative");
      total += p;
      if (!d.pts_.empty() && d.pts_.back().first == v) {
        d.pts_.back().second += p;
      } else {
        d.pts_.emplace_back(v, p);
      }
    }
    require_domain(std::abs(total - 1.0) <= 1e-12, "finite_support: probabilities must sum to 1");
    double cum = 0.0;
    for (const auto& [v, p] : d.pts_) {
      cum += p;
      d.cum_.push_back(cum);
    }
    d.cum_.back() = 1.0;
    return d;
  }

  // Environment 0: F(x) = 1 - (1/2 - eps)/x on (1/2 - eps, 1), atom at 1.
  static CapacityDistribution truncated_reciprocal(double eps) {
    require_domain(eps > 0.0 && eps < 0.5, "truncated_reciprocal: epsilon must lie in (0, 1/2)");
    CapacityDistribution d(Kind::TruncatedReciprocal);
    d.eps_ = eps;
    return d;
  }

  // Environment k: the reciprocal law flattened on I_k = (x_k, x_{k+1}].
  static CapacityDistribution converse(double eps, int k) {
    require_domain(eps > 0.0 && eps < 0.5, "converse: epsilon must lie in (0, 1/2)");
    require_domain(k >= 1, "converse: k must be >= 1");
    const Rational r = rational_of(eps);
    detail::ConverseSeq seq(r);
    const int K = seq.terminal_index();
    require_domain(k <= K, "converse: k exceeds K for this epsilon");
    CapacityDistribution d(Kind::Converse);
    d.eps_ = eps;
    d.k_ = k;
    d.xlo_ = seq.x(k);
    d.xhi_ = seq.x(k + 1);
    require_domain(d.xhi_ < 1.0, "converse: x_{k+1} must be below 1");
    return d;
  }

  Kind kind() const { return kind_; }
  double epsilon() const { return eps_; }
  int index() const { return k_; }
  double x_lo() const { return xlo_; }
  double x_hi() const { return xhi_; }

  // P{C >= r}.
  double tail(double r) const {
    require_domain(r >= 0.0 && r <= 1.0, "tail: r must lie in [0,1]");
    switch (kind_) {
      case Kind::PointMass:
        return r <= c_ ? 1.0 : 0.0;
      case Kind::Uniform01:
        return 1.0 - r;
      case Kind::FiniteSupport: {
        double t = 0.0;
        for (std::size_t i = pts_.size(); i-- > 0;) {
          if (pts_[i].first >= r) t += pts_[i].second;
          else break;
        }
        return t;
      }
      case Kind::TruncatedReciprocal: {
        const double lo = 0.5 - eps_;
        return r <= lo ? 1.0 : lo / r;
      }
      case Kind::Converse: {
        const double lo = 0.5 - eps_;
        if (r <= lo) return 1.0;
        if (r > xlo_ && r <= xhi_) return lo / xlo_;
        return lo / r;
      }
    }
    return 0.0;
  }

  // g(r) = r P{C >= r}.
  double g(double r) const { return r * tail(r); }

  double g_max() const {
    switch (kind_) {
      case Kind::PointMass:
        return c_;
      case Kind::Uniform01:
        return 0.25;
      case Kind::FiniteSupport: {
        double best = 0.0;
        for (const auto& [v, p] : pts_) best = std::max(best, g(v));
        return best;
      }
      case Kind::TruncatedReciprocal:
        return 0.5 - eps_;
      case Kind::Converse:
        return 0.5 + eps_;
    }
    return 0.0;
  }

  double g_argmax() const {
    switch (kind_) {
      case Kind::PointMass:
        return c_;
      case Kind::Uniform01:
        return 0.5;
      case Kind::FiniteSupport: {
        double best = 0.0, arg = 0.0;
        for (const auto& [v, p] : pts_) {
          const double val = g(v);
          if (val > best) {
            best = val;
            arg = v;
          }
        }
        return arg;
      }
      case Kind::TruncatedReciprocal:
        return 0.5 - eps_;
      case Kind::Converse:
        return xhi_;
    }
    return 0.0;
  }

  // F(x) = P{C <= x}, right-continuous.
  double cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    switch (kind_) {
      case Kind::PointMass:
        return x >= c_ ? 1.0 : 0.0;
      case Kind::Uniform01:
        return x;
      case Kind::FiniteSupport: {
        double f = 0.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
          if (pts_[i].first <= x) f = cum_[i];
          else break;
        }
        return f;
      }
      case Kind::TruncatedReciprocal: {
        const double lo = 0.5 - eps_;
        return x <= lo ? 0.0 : 1.0 - lo / x;
      }
      case Kind::Converse: {
        const double lo = 0.5 - eps_;
        if (x <= lo) return 0.0;
        if (x >= xlo_ && x < xhi_) return 1.0 - lo / xlo_;
        return 1.0 - lo / x;
      }
    }
    return 0.0;
  }

  // Generalized inverse CDF: smallest x with F(x) > u, valid for atomic laws.
  double sample(double u) const {
    require_domain(u >= 0.0 && u < 1.0, "sample: u must lie in [0,1)");
    switch (kind_) {
      case Kind::PointMass:
        return c_;
      case Kind::Uniform01:
        return u;
      case Kind::FiniteSupport: {
        for (std::size_t i = 0; i < pts_.size(); ++i) {
          if (cum_[i] > u) return pts_[i].first;
        }
        return pts_.back().first;
      }
      case Kind::TruncatedReciprocal: {
        const double lo = 0.5 - eps_;
        if (u >= 0.5 + eps_) return 1.0;
        return lo / (1.0 - u);
      }
      case Kind::Converse: {
        const double lo = 0.5 - eps_;
        const double flat = 1.0 - lo / xlo_;     // F on [x_k, x_{k+1})
        const double at_hi = 1.0 - lo / xhi_;    // F(x_{k+1})
        if (u >= 0.5 + eps_) return 1.0;         // atom at 1
        if (u >= flat && u < at_hi) return xhi_; // atom at x_{k+1}
        return lo / (1.0 - u);
      }
    }
    return 0.0;
  }

  std::vector<double> atoms() const {
    switch (kind_) {
      case Kind::PointMass:
        return {c_};
      case Kind::Uniform01:
        return {};
      case Kind::FiniteSupport: {
        std::vector<double> a;
        for (const auto& [v, p] : pts_)
          if (p > 0.0) a.push_back(v);
        return a;
      }
      case Kind::TruncatedReciprocal:
        return {1.0};
      case Kind::Converse:
        return {xhi_, 1.0};
    }
    return {};
  }

  const std::vector<std::pair<double, double>>& support_points() const { return pts_; }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::PointMass:
        os << "pointmass(" << c_ << ")";
        break;
      case Kind::Uniform01:
        os << "uniform01";
        break;
      case Kind::FiniteSupport: {
        os << "finite(";
        for (std::size_t i = 0; i < pts_.size(); ++i) {
          if (i) os << ",";
          os << pts_[i].first << ":" << pts_[i].second;
        }
        os << ")";
        break;
      }
      case Kind::TruncatedReciprocal:
        os << "truncated-reciprocal(" << eps_ << ")";
        break;
      case Kind::Converse:
        os << "converse(" << eps_ << "," << k_ << ")";
        break;
    }
    return os.str();
  }

 private:
  explicit CapacityDistribution(Kind k) : kind_(k) {}

  Kind kind_;
  double c_ = 0.0;
  std::vector<std::pair<double, double>> pts_;
  std::vector<double> cum_;
  double eps_ = 0.0;
  int k_ = 0;
  double xlo_ = 0.0, xhi_ = 0.0;
};

// ---------------------------------------------------------------------------
// Arrival laws on [0,1].
// ---------------------------------------------------------------------------

class ArrivalDistribution {
 public:
  enum class Kind { Bernoulli, FiniteSupport };

  static ArrivalDistribution bernoulli(double p) {
    require_domain(p >= 0.0 && p <= 1.0, "bernoulli: p must lie in [0,1]");
    ArrivalDistribution d(Kind::Bernoulli);
    d.p_ = p;
    d.mean_ = p;
    return d;
  }

  static ArrivalDistribution finite_support(std::vector<std::pair<double, double>> points) {
    ArrivalDistribution d(Kind::FiniteSupport);
    d.cap_ = CapacityDistribution::finite_support(std::move(points));
    double m = 0.0;
    for (const auto& [v, p] : d.cap_->support_points()) m += v * p;
    d.mean_ = m;
    return d;
  }

  double mean() const { return mean_; }

  double sample(double u) const {
    require_domain(u >= 0.0 && u < 1.0, "sample: u must lie in [0,1)");
    if (kind_ == Kind::Bernoulli) return u < 1.0 - p_ ? 0.0 : 1.0;
    return cap_->sample(u);
  }

  double cdf(double x) const {
    if (kind_ == Kind::Bernoulli) {
      if (x < 0.0) return 0.0;
      if (x < 1.0) return 1.0 - p_;
      return 1.0;
    }
    return cap_->cdf(x);
  }

  Kind kind() const { return kind_; }

  std::string describe() const {
    if (kind_ == Kind::Bernoulli) {
      std::ostringstream os;
      os.precision(17);
      os << "bernoulli(" << p_ << ")";
      return os.str();
    }
    return cap_->describe();
  }

 private:
  explicit ArrivalDistribution(Kind k) : kind_(k) {}

  Kind kind_;
  double p_ = 0.0;
  double mean_ = 0.0;
  std::optional<CapacityDistribution> cap_;  // finite-support backing
};

// ---------------------------------------------------------------------------
// Environments: arrival law + capacity law + derived quantities.
// ---------------------------------------------------------------------------

struct Environment {
  ArrivalDistribution arrivals;
  CapacityDistribution capacity;
  double lambda = 0.0;
  double r_star = 0.0;
  double g_star = 0.0;
  double slack = 0.0;  // g_star - lambda; negative means unstabilizable
  std::string name;

  bool stabilizable() const { return slack > 0.0; }
};

// Environment k of the converse construction: Bernoulli(1/2) arrivals, slack
// exactly epsilon with the maximizer at x_{k+1}.
inline Environment make_converse_environment(double epsilon, int k) {
  CapacityDistribution cap = CapacityDistribution::converse(epsilon, k);
  Environment env{ArrivalDistribution::bernoulli(0.5), cap,
                  0.5, cap.x_hi(), 0.5 + epsilon, epsilon, ""};
  std::ostringstream os;
  os << "converse(eps=" << epsilon << ",k=" << k << ")";
  env.name = os.str();
  return env;
}

// Environment 0: max g = 1/2 - eps < lambda, so no policy stabilizes it.
inline Environment make_env0(double epsilon) {
  CapacityDistribution cap = CapacityDistribution::truncated_reciprocal(epsilon);
  Environment env{ArrivalDistribution::bernoulli(0.5), cap,
                  0.5, 0.5 - epsilon, 0.5 - epsilon, -epsilon, ""};
  std::ostringstream os;
  os << "env0(eps=" << epsilon << ")";
  env.name = os.str();
  return env;
}

inline Environment make_custom_environment(ArrivalDistribution arrivals,
                                           CapacityDistribution capacity,
                                           std::string name = "custom") {
  Environment env{std::move(arrivals), std::move(capacity), 0.0, 0.0, 0.0, 0.0, std::move(name)};
  env.lambda = env.arrivals.mean();
  env.r_star = env.capacity.g_argmax();
  env.g_star = env.capacity.g_max();
  env.slack = env.g_star - env.lambda;
  return env;
}

// ---------------------------------------------------------------------------
// Environment verification.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct EnvReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::vector<double> probe_points(const CapacityDistribution& cap, double grid_step) {
  std::vector<double> pts;
  const auto n = static_cast<std::size_t>(std::ceil(1.0 / grid_step));
  pts.reserve(n + 8);
  for (std::size_t i = 0; i <= n; ++i) pts.push_back(std::min(1.0, static_cast<double>(i) * grid_step));
  for (double a : cap.atoms()) pts.push_back(a);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

// Grid-plus-atoms checks: one-sided Lipschitz continuity of g, the converse
// maximizer location and value, and CDF monotonicity/right-continuity.
inline EnvReport verify_env(const Environment& env, double grid_step = 1e-5) {
  require_domain(grid_step > 0.0 && grid_step <= 1e-3, "verify_env: grid_step must lie in (0, 1e-3]");
  EnvReport report;
  const auto pts = detail::probe_points(env.capacity, grid_step);

  {
    // g(r1) - g(r2) <= r1 - r2 for r2 <= r1; equivalent to r - g(r) nondecreasing.
    bool ok = true;
    std::ostringstream detail;
    double prev_h = pts.front() - env.capacity.g(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double h = pts[i] - env.capacity.g(pts[i]);
      if (h < prev_h - 1e-12) {
        ok = false;
        detail.precision(17);
        detail << "violated between r=" << pts[i - 1] << " and r=" << pts[i];
        break;
      }
      prev_h = h;
    }
    report.checks.push_back({"one_sided_lipschitz", ok, ok ? "" : detail.str()});
  }

  if (env.capacity.kind() == CapacityDistribution::Kind::Converse) {
    double best = -1.0, arg = 0.0;
    for (double r : pts) {
      const double v = env.capacity.g(r);
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    const double expect = 0.5 + env.capacity.epsilon();
    const bool val_ok = std::abs(best - expect) <= 1e-12;
    const bool arg_ok = arg == env.capacity.x_hi();
    std::ostringstream detail;
    detail.precision(17);
    detail << "max g=" << best << " at r=" << arg << " expected " << expect
           << " at x_{k+1}=" << env.capacity.x_hi();
    report.checks.push_back({"converse_max_value", val_ok, detail.str()});
    report.checks.push_back({"converse_max_location", arg_ok, detail.str()});
  }

  {
    bool ok = true;
    std::ostringstream detail;
    double prev = env.capacity.cdf(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double f = env.capacity.cdf(pts[i]);
      if (f < prev - 0.0) {
        ok = false;
        detail.precision(17);
        detail << "CDF decreases at x=" << pts[i];
        break;
      }
      prev = f;
    }
    report.checks.push_back({"cdf_monotone", ok, ok ? "" : detail.str()});
  }

  {
    // Right continuity at atoms: the jump sits at the atom itself.
    bool ok = true;
    std::ostringstream detail;
    for (double a : env.capacity.atoms()) {
      const double at = env.capacity.cdf(a);
      const double after = env.capacity.cdf(std::min(1.0, a + 1e-9));
      if (after - at > 1e-6) {
        ok = false;
        detail.precision(17);
        detail << "jump located above atom x=" << a;
        break;
      }
    }
    report.checks.push_back({"cdf_right_continuous", ok, ok ? "" : detail.str()});
  }

  {
    const double gm = env.capacity.g_max();
    const bool ok = std::abs(env.g_star - gm) <= 1e-12 &&
                    std::abs(env.slack - (env.g_star - env.lambda)) <= 1e-12;
    std::ostringstream detail;
    detail.precision(17);
    detail << "g_star=" << env.g_star << " slack=" << env.slack;
    report.checks.push_back({"derived_quantities", ok, detail.str()});
  }

  return report;
}

// Interval geometry and K lower bounds for a built family.
inline std::vector<CheckResult> verify_converse_family(const ConverseFamily& fam) {
  std::vector<CheckResult> checks;
  const double eps = fam.epsilon;

  bool gt2eps = true, lt3eps = true, subset = true;
  for (int k = 1; k <= fam.K; ++k) {
    const double len = fam.interval_length(k);
    if (!(len > 2.0 * eps)) gt2eps = false;
    if (!(len < 3.0 * eps)) lt3eps = false;
    if (!(fam.xk(k) >= 7.0 / 12.0 && fam.xk(k + 1) < 1.0)) subset = false;
  }
  checks.push_back({"interval_gt_2eps", gt2eps, ""});
  checks.push_back({"interval_lt_3eps", lt3eps, ""});
  checks.push_back({"intervals_in_[7/12,1)", subset, ""});

  {
    std::ostringstream detail;
    detail << "K=" << fam.K << " vs 1/(36eps)=" << 1.0 / (36.0 * eps);
    checks.push_back({"K_ge_1_over_36eps", static_cast<double>(fam.K) >= 1.0 / (36.0 * eps), detail.str()});
    checks.push_back({"K_ge_5", fam.K >= 5, detail.str()});
  }

  {
    const bool ok = fam.xk(1) == 7.0 / 12.0;
    checks.push_back({"x1_equals_7_12", ok, ""});
  }

  {
    // 2/3 lands in the terminal interval.
    const bool ok = fam.xk(fam.K) < 2.0 / 3.0 && fam.xk(fam.K + 1) >= 2.0 / 3.0;
    checks.push_back({"two_thirds_in_I_K", ok, ""});
  }

  return checks;
}

}  // namespace qbandit
