#pragma once

#include <string>

#include <gmpxx.h>

namespace selsig {

// Exact unbounded arithmetic is backed by GMP. Rational values are kept in
// canonical form (reduced, positive denominator) by mpq_class.
using Int = mpz_class;
using Rational = mpq_class;

Int pow2(long e);              // 2^e, e >= 0
Rational pow2q(long e);        // 2^e for any integer e
Rational qpow(const Rational& q, long e);

// A real value together with a rigorous absolute error bound. All
// operations propagate both truncation error and floating-point rounding
// conservatively.
struct TruncatedReal {
  double value = 0.0;
  double err = 0.0;

  TruncatedReal() = default;
  TruncatedReal(double v, double e) : value(v), err(e) {}

  static TruncatedReal exact(double v) { return {v, 0.0}; }
  static TruncatedReal from_rational(const Rational& r);

  TruncatedReal operator+(const TruncatedReal& o) const;
  TruncatedReal operator-(const TruncatedReal& o) const;
  TruncatedReal operator*(const TruncatedReal& o) const;
  TruncatedReal operator/(const TruncatedReal& o) const;
  TruncatedReal operator*(const Rational& r) const;

  double upper() const { return value + err; }
  double lower() const { return value - err; }

  // true if |value - x| <= err + tol
  bool matches(double x, double tol) const;

  // decimal rendering that never prints more digits than the error bound
  // certifies (at most max_decimals)
  std::string to_string(int max_decimals = 6) const;
};

std::string rational_to_string(const Rational& r);

}  // namespace selsig
