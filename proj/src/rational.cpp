#include "selsig/rational.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace selsig {

namespace {

// relative rounding cushion per floating operation: a few ulps
constexpr double kUlp = 0x1.0p-50;

double round_slop(double v) { return std::fabs(v) * kUlp + 0x1.0p-1000; }

}  // namespace

Int pow2(long e) {
  if (e < 0) throw std::invalid_argument("pow2: negative exponent");
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return r;
}

Rational pow2q(long e) {
  if (e >= 0) return Rational(pow2(e));
  return Rational(1, pow2(-e));
}

Rational qpow(const Rational& q, long e) {
  if (e == 0) return 1;
  Rational base = e > 0 ? q : Rational(1) / q;
  long n = e > 0 ? e : -e;
  Rational r = 1;
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

TruncatedReal TruncatedReal::from_rational(const Rational& r) {
  double v = r.get_d();  // within one ulp of the true value
  return {v, round_slop(v)};
}

TruncatedReal TruncatedReal::operator+(const TruncatedReal& o) const {
  double v = value + o.value;
  return {v, err + o.err + round_slop(v)};
}

TruncatedReal TruncatedReal::operator-(const TruncatedReal& o) const {
  double v = value - o.value;
  return {v, err + o.err + round_slop(v)};
}

TruncatedReal TruncatedReal::operator*(const TruncatedReal& o) const {
  double v = value * o.value;
  double e = std::fabs(value) * o.err + std::fabs(o.value) * err + err * o.err;
  return {v, e + round_slop(v)};
}

TruncatedReal TruncatedReal::operator/(const TruncatedReal& o) const {
  double denom_low = std::fabs(o.value) - o.err;
  if (denom_low <= 0) throw std::domain_error("TruncatedReal: division by interval containing 0");
  double v = value / o.value;
  double e = (err + std::fabs(v) * o.err) / denom_low;
  return {v, e + round_slop(v)};
}

TruncatedReal TruncatedReal::operator*(const Rational& r) const {
  return *this * from_rational(r);
}

bool TruncatedReal::matches(double x, double tol) const {
  return std::fabs(value - x) <= err + tol;
}

std::string TruncatedReal::to_string(int max_decimals) const {
  int decimals = max_decimals;
  // printed digits never exceed certified accuracy
  while (decimals > 0 && err > 0.5 * std::pow(10.0, -decimals)) --decimals;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string rational_to_string(const Rational& r) {
  return r.get_str();
}

}  // namespace selsig
