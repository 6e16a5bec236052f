#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbandit {

// Thrown when a caller breaks a policy interaction contract (e.g. observe
// without a prior choose, or a clock mismatch).
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Thrown for malformed run configurations.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error(what);
}

// Ceiling with a 1e-9 downward guard: values within 1e-9 above an integer are
// treated as that integer, so grid sizes do not jump on representation error.
inline std::int64_t ceil_guarded(double x) {
  require_domain(std::isfinite(x), "ceil_guarded: non-finite input");
  const double f = std::floor(x);
  if (x - f <= 1e-9) return static_cast<std::int64_t>(f);
  return static_cast<std::int64_t>(f) + 1;
}

// Neumaier compensated running sum. Horizons up to 1e8 slots accumulate
// rounding in naive sums of Q(t).
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Index of the largest element, lowest index on ties.
template <typename Container, typename Proj>
std::size_t argmax_lowest(const Container& xs, Proj&& proj) {
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = proj(xs[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Best rational approximation of x with denominator <= max_den (continued
// fractions). Returns nullopt when no such fraction reproduces x to 4 ulp.
inline std::optional<Rational> recover_rational(double x, std::int64_t max_den = 1000000) {
  if (!std::isfinite(x)) return std::nullopt;
  const bool neg = x < 0;
  double a = std::abs(x);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = a;
  for (int iter = 0; iter < 64; ++iter) {
    const double ai = std::floor(frac);
    if (ai > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) break;
    const std::int64_t aint = static_cast<std::int64_t>(ai);
    const std::int64_t p2 = aint * p1 + p0;
    const std::int64_t q2 = aint * q1 + q0;
    if (q2 > max_den || q2 <= 0 || p2 < 0) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double rem = frac - ai;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return std::nullopt;
  const double approx = static_cast<double>(p1) / static_cast<double>(q1);
  const double tol = 4.0 * std::max(std::numeric_limits<double>::denorm_min(),
                                    std::ldexp(std::numeric_limits<double>::epsilon(), std::ilogb(std::max(a, 1e-300))));
  if (std::abs(approx - a) > tol) return std::nullopt;
  return Rational{neg ? -p1 : p1, q1};
}

// Exact dyadic rational of a finite double (num / 2^shift).
inline Rational dyadic_rational(double x) {
  require_domain(std::isfinite(x), "dyadic_rational: non-finite input");
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
  std::int64_t num = static_cast<std::int64_t>(std::ldexp(m, 53));
  int shift = 53 - exp;
  while (shift > 0 && num % 2 == 0) {
    num /= 2;
    --shift;
  }
  if (shift < 0) throw std::domain_error("dyadic_rational: magnitude too large");
  if (shift > 62) throw std::domain_error("dyadic_rational: value too small to represent");
  return Rational{num, static_cast<std::int64_t>(1) << shift};
}

// Rational for x: a small fraction when one exists, the exact dyadic otherwise.
inline Rational rational_of(double x, std::int64_t max_den = 1000000) {
  if (auto r = recover_rational(x, max_den)) return *r;
  return dyadic_rational(x);
}

}  // namespace qbandit
