#include "selsig/cubicforms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace selsig {

namespace {

using i128 = __int128;

long long checked_ll(i128 v, const char* what) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    throw std::overflow_error(std::string(what) + ": value exceeds 64 bits");
  return static_cast<long long>(v);
}

i128 disc_i128(const CubicForm& f) {
  i128 a = f.a, b = f.b, c = f.c, d = f.d;
  return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c -
         27 * a * a * d * d;
}

long long gcd_ll(long long x, long long y) {
  x = std::llabs(x);
  y = std::llabs(y);
  while (y) {
    long long t = x % y;
    x = y;
    y = t;
  }
  return x;
}

long long content(const CubicForm& f) {
  return gcd_ll(gcd_ll(f.a, f.b), gcd_ll(f.c, f.d));
}

long long floor_div(long long num, long long den) {
  long long q = num / den, r = num % den;
  return (r != 0 && ((r < 0) != (den < 0))) ? q - 1 : q;
}

long long ceil_div(long long num, long long den) { return -floor_div(-num, den); }

// nearest integer to num/den for den > 0, ties rounded up
long long nearest_div(long long num, long long den) {
  return floor_div(2 * num + den, 2 * den);
}

bool is_hessian_reduced(const HessianForm& h) {
  return std::llabs(h.Q) <= h.P && h.P <= h.R;
}

}  // namespace

long long disc_cubic(const CubicForm& f) { return checked_ll(disc_i128(f), "disc_cubic"); }

HessianForm hessian(const CubicForm& f) {
  HessianForm h;
  h.P = checked_ll(i128(f.b) * f.b - 3 * i128(f.a) * f.c, "hessian");
  h.Q = checked_ll(i128(f.b) * f.c - 9 * i128(f.a) * f.d, "hessian");
  h.R = checked_ll(i128(f.c) * f.c - 3 * i128(f.b) * f.d, "hessian");
  // covariance identity pins the three formulas together
  if (i128(h.Q) * h.Q - 4 * i128(h.P) * h.R != -3 * disc_i128(f))
    throw std::logic_error("hessian: covariant identity Q^2 - 4PR = -3 disc failed");
  return h;
}

Int poly_disc(const std::vector<Int>& coeffs) {
  std::size_t lead = 0;
  if (coeffs.empty() || coeffs[0] == 0)
    throw std::invalid_argument("poly_disc: leading coefficient must be nonzero");
  int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) throw std::invalid_argument("poly_disc: degree >= 1 required");
  (void)lead;
  // derivative, descending order
  std::vector<Int> deriv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) deriv[static_cast<std::size_t>(i)] = coeffs[static_cast<std::size_t>(i)] * (n - i);
  // Sylvester matrix of f (degree n) and f' (degree n-1), size 2n-1
  int size = 2 * n - 1;
  std::vector<std::vector<Int>> m(static_cast<std::size_t>(size),
                                  std::vector<Int>(static_cast<std::size_t>(size), 0));
  for (int row = 0; row < n - 1; ++row)
    for (int j = 0; j <= n; ++j) m[row][row + j] = coeffs[static_cast<std::size_t>(j)];
  for (int row = 0; row < n; ++row)
    for (int j = 0; j <= n - 1; ++j) m[n - 1 + row][row + j] = deriv[static_cast<std::size_t>(j)];

  // fraction-free Bareiss determinant
  Int det_sign = 1, prev = 1;
  for (int k = 0; k < size - 1; ++k) {
    if (m[k][k] == 0) {
      int swap_row = -1;
      for (int i = k + 1; i < size; ++i)
        if (m[i][k] != 0) {
          swap_row = i;
          break;
        }
      if (swap_row < 0) return 0;  // resultant zero: repeated root
      std::swap(m[k], m[swap_row]);
      det_sign = -det_sign;
    }
    for (int i = k + 1; i < size; ++i) {
      for (int j = k + 1; j < size; ++j) {
        Int t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = t / prev;  // exact division
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  Int res = det_sign * m[static_cast<std::size_t>(size - 1)][static_cast<std::size_t>(size - 1)];
  // disc = (-1)^{n(n-1)/2} Res(f, f') / lc(f)
  Int disc = res / coeffs[0];
  if ((static_cast<long>(n) * (n - 1) / 2) % 2 != 0) disc = -disc;
  return disc;
}

CubicForm transform(const CubicForm& f, long long m00, long long m01, long long m10,
                    long long m11) {
  long long det = m00 * m11 - m01 * m10;
  if (det != 1 && det != -1) throw std::invalid_argument("transform: matrix must be unimodular");
  // g(x,y) = f(m00 x + m10 y, m01 x + m11 y) / det
  i128 a = f.a, b = f.b, c = f.c, d = f.d;
  i128 p = m00, q = m01, r = m10, s = m11;
  i128 ga = a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q;
  i128 gb = 3 * a * p * p * r + b * (p * p * s + 2 * p * q * r) + c * (q * q * r + 2 * p * q * s) +
            3 * d * q * q * s;
  i128 gc = 3 * a * p * r * r + b * (r * r * q + 2 * p * r * s) + c * (s * s * p + 2 * q * r * s) +
            3 * d * q * s * s;
  i128 gd = a * r * r * r + b * r * r * s + c * r * s * s + d * s * s * s;
  if (det < 0) {
    ga = -ga;
    gb = -gb;
    gc = -gc;
    gd = -gd;
  }
  return {checked_ll(ga, "transform"), checked_ll(gb, "transform"), checked_ll(gc, "transform"),
          checked_ll(gd, "transform")};
}

bool is_reduced(const CubicForm& f) {
  if (disc_i128(f) <= 0) throw std::invalid_argument("is_reduced: real forms only (disc > 0)");
  HessianForm h = hessian(f);
  if (!is_hessian_reduced(h)) return false;
  // Tie-breaks selecting one form per class among the Hessian-reduced ones.
  // The leading-coefficient condition and the b = 0 precedence in the first
  // bullet are required for uniqueness: without them every class keeps two
  // to five representatives (exhaustively checked for disc <= 3000).
  if (f.a <= 0) return false;
  if (!(f.b > 0 || (f.b == 0 && f.d < 0))) return false;
  if (!(h.Q != 0 || f.d < 0)) return false;
  if (!(h.P != h.Q || f.b < std::llabs(3 * f.a - f.b))) return false;
  if (!(h.P != h.R ||
        (f.a <= std::llabs(f.d) && (f.a != std::llabs(f.d) || f.b < std::llabs(f.c)))))
    return false;
  return true;
}

namespace {

CubicForm hessian_reduce(CubicForm f) {
  for (int guard = 0; guard < 256; ++guard) {
    HessianForm h = hessian(f);
    long long k = nearest_div(-h.Q, 2 * h.P);
    if (k != 0) {
      f = transform(f, 1, 0, k, 1);  // (P, Q, R) -> (P, Q + 2kP, *)
      h = hessian(f);
    }
    if (h.P > h.R) {
      f = transform(f, 0, -1, 1, 0);  // (P, Q, R) -> (R, -Q, P)
      continue;
    }
    if (std::llabs(h.Q) <= h.P) return f;
  }
  throw std::logic_error("hessian_reduce: did not terminate");
}

}  // namespace

CubicForm reduce(const CubicForm& f) {
  if (disc_i128(f) <= 0) throw std::invalid_argument("reduce: real forms only (disc > 0)");
  if (!is_irreducible(f)) throw std::invalid_argument("reduce: irreducible forms only");
  CubicForm g = hessian_reduce(f);

  // close the Hessian-reduced orbit under the sign flips and the boundary
  // moves, then pick the one representative passing the tie-breaks
  std::set<CubicForm> seen{g};
  std::vector<CubicForm> queue{g};
  while (!queue.empty()) {
    CubicForm cur = queue.back();
    queue.pop_back();
    HessianForm h = hessian(cur);
    std::vector<CubicForm> nexts;
    nexts.push_back({-cur.a, -cur.b, -cur.c, -cur.d});
    nexts.push_back({cur.a, -cur.b, cur.c, -cur.d});
    if (h.P == h.R) nexts.push_back(transform(cur, 0, -1, 1, 0));
    if (std::llabs(h.Q) == h.P) {
      nexts.push_back(transform(cur, 1, 0, 1, 1));
      nexts.push_back(transform(cur, 1, 0, -1, 1));
    }
    for (const CubicForm& nx : nexts) {
      if (!is_hessian_reduced(hessian(nx))) continue;
      if (seen.insert(nx).second) queue.push_back(nx);
    }
    if (seen.size() > 64) throw std::logic_error("reduce: boundary orbit did not close");
  }
  std::optional<CubicForm> found;
  for (const CubicForm& cand : seen) {
    if (is_reduced(cand)) {
      if (found) throw std::logic_error("reduce: two tie-break representatives");
      found = cand;
    }
  }
  if (!found) throw std::logic_error("reduce: no tie-break representative in the orbit");
  return *found;
}

bool is_irreducible(const CubicForm& f) {
  if (f.a == 0 && f.b == 0 && f.c == 0 && f.d == 0)
    throw std::invalid_argument("is_irreducible: zero form");
  if (f.a == 0 || f.d == 0) return false;  // y | f or x | f
  // rational roots p/q of f(x,1): p | d, q | a
  auto divisors = [](long long n) {
    n = std::llabs(n);
    std::vector<long long> out;
    for (long long i = 1; i * i <= n; ++i) {
      if (n % i == 0) {
        out.push_back(i);
        if (i != n / i) out.push_back(n / i);
      }
    }
    return out;
  };
  for (long long p : divisors(f.d)) {
    for (long long q : divisors(f.a)) {
      if (gcd_ll(p, q) != 1) continue;
      for (long long sp : {p, -p}) {
        i128 v = i128(f.a) * sp * sp * sp + i128(f.b) * sp * sp * q + i128(f.c) * sp * q * q +
                 i128(f.d) * q * q * q;
        if (v == 0) return false;
      }
    }
  }
  return true;
}

namespace {

bool is_prime_ll(long long p) {
  if (p < 2) return false;
  for (long long i = 2; i * i <= p; ++i)
    if (p % i == 0) return false;
  return true;
}

long long mod_ll(i128 v, long long p) {
  long long r = static_cast<long long>(v % p);
  return r < 0 ? r + p : r;
}

long long mulmod(long long x, long long y, long long m) {
  return static_cast<long long>((i128(x) * y) % m);
}

long long powmod(long long b, long long e, long long m) {
  long long r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

long long invmod(long long x, long long p) { return powmod(mod_ll(x, p), p - 2, p); }

// repeated roots of f mod p in P^1(F_p), as lifts (u, v)
std::vector<std::pair<long long, long long>> repeated_roots_mod_p(const CubicForm& f,
                                                                  long long p) {
  std::vector<std::pair<long long, long long>> out;
  long long a = mod_ll(f.a, p), b = mod_ll(f.b, p), c = mod_ll(f.c, p), d = mod_ll(f.d, p);
  // multiplicity of (1:0) is the power of y dividing f mod p
  if (a == 0 && b == 0) out.push_back({1, 0});

  // finite part g(x) = f(x, 1) mod p
  std::vector<long long> g;  // ascending: d, c, b, a
  g = {d, c, b, a};
  while (!g.empty() && g.back() == 0) g.pop_back();
  if (g.size() <= 1) return out;  // constant: no finite roots
  int deg = static_cast<int>(g.size()) - 1;

  if (p <= 3) {
    for (long long u = 0; u < p; ++u) {
      long long val = 0, der = 0;
      for (int i = deg; i >= 0; --i) val = mod_ll(i128(val) * u + g[static_cast<std::size_t>(i)], p);
      for (int i = deg; i >= 1; --i)
        der = mod_ll(i128(der) * u + mod_ll(i128(g[static_cast<std::size_t>(i)]) * i, p), p);
      if (val == 0 && der == 0) out.push_back({u, 1});
    }
    return out;
  }

  // h = gcd(g, g') over F_p; deg <= 3 < p so g' is not identically zero
  std::vector<long long> gp(static_cast<std::size_t>(deg));
  for (int i = 1; i <= deg; ++i)
    gp[static_cast<std::size_t>(i - 1)] = mod_ll(i128(g[static_cast<std::size_t>(i)]) * i, p);
  auto trim = [](std::vector<long long>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  };
  auto poly_mod = [&](std::vector<long long> num, const std::vector<long long>& den) {
    long long inv = invmod(den.back(), p);
    while (num.size() >= den.size()) {
      long long coef = mulmod(num.back(), inv, p);
      std::size_t shift = num.size() - den.size();
      for (std::size_t i = 0; i < den.size(); ++i) {
        num[shift + i] = mod_ll(num[shift + i] - i128(coef) * den[i], p);
      }
      trim(num);
      if (num.empty()) break;
    }
    return num;
  };
  std::vector<long long> x0 = g, x1 = gp;
  trim(x0);
  trim(x1);
  while (!x1.empty()) {
    std::vector<long long> r = poly_mod(x0, x1);
    x0 = x1;
    x1 = r;
  }
  // x0 = gcd, roots of x0 are the repeated roots of g
  if (x0.size() == 1) return out;  // constant gcd
  if (x0.size() == 2) {
    long long r = mod_ll(-i128(x0[0]) * invmod(x0[1], p), p);
    out.push_back({r, 1});
  } else if (x0.size() == 3) {
    // a degree-2 divisor of a cubic whose roots are repeated must be a
    // perfect square (x - r)^2
    long long r = mod_ll(-i128(x0[1]) * invmod(mod_ll(2 * i128(x0[2]), p), p), p);
    out.push_back({r, 1});
  }
  return out;
}

}  // namespace

bool is_maximal_at(const CubicForm& f, long long p) {
  if (!is_prime_ll(p)) throw std::invalid_argument("is_maximal_at: p must be prime");
  if (disc_i128(f) == 0) throw std::invalid_argument("is_maximal_at: disc must be nonzero");
  if (content(f) % p == 0) return false;
  long long p2 = p * p;
  for (auto [u, v] : repeated_roots_mod_p(f, p)) {
    i128 val = i128(f.a) * u * u * u + i128(f.b) * u * u * v + i128(f.c) * u * v * v +
               i128(f.d) * v * v * v;
    if (mod_ll(val, p2) == 0) return false;
  }
  return true;
}

namespace {

// all primes p with p^2 | n: trial division to cbrt(n), then a square test
// on the cofactor
std::vector<long long> squarefull_primes(long long n) {
  n = std::llabs(n);
  std::vector<long long> out;
  long long m = n;
  for (long long p = 2; p * p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (m % p == 0) {
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      if (e >= 2) out.push_back(p);
    }
  }
  if (m > 1) {
    long long s = std::llround(std::sqrt(static_cast<double>(m)));
    for (long long t = std::max(1LL, s - 2); t <= s + 2; ++t)
      if (t * t == m) {
        out.push_back(t);  // cofactor is p^2 with p prime (all factors <= cbrt removed)
        break;
      }
  }
  return out;
}

}  // namespace

bool is_maximal(const CubicForm& f) {
  long long disc = disc_cubic(f);
  if (disc == 0) throw std::invalid_argument("is_maximal: disc must be nonzero");
  for (long long p : squarefull_primes(disc))
    if (!is_maximal_at(f, p)) return false;
  return true;
}

std::optional<FormClassRecord> sample_form(long long height, Rng& rng) {
  if (height < 1) throw std::invalid_argument("sample_form: height >= 1 required");
  if (height > 20000)
    throw std::invalid_argument("sample_form: height above 20000 overflows the 64-bit discriminant");
  CubicForm f;
  f.a = rng.range(0, height);
  f.b = rng.range(0, height);
  f.c = rng.range(-height, height);
  f.d = rng.range(-height, height);
  i128 disc = disc_i128(f);
  if (disc <= 0) return std::nullopt;  // real forms only (and discards the zero form)
  if (!is_irreducible(f)) return std::nullopt;
  if (!is_reduced(f)) return std::nullopt;
  if (!is_maximal(f)) return std::nullopt;
  FormClassRecord rec;
  rec.reduced_form = f;
  rec.disc = checked_ll(disc, "sample_form");
  rec.maximal = true;
  rec.irreducible = true;
  rec.real = true;
  return rec;
}

std::vector<FormClassRecord> scan(long long bound) {
  if (bound < 1) throw std::invalid_argument("scan: bound >= 1 required");
  if (bound > 1000000) throw std::invalid_argument("scan: bound above 10^6 is not supported");
  std::vector<FormClassRecord> out;
  long long p_max = static_cast<long long>(std::sqrt(static_cast<double>(bound))) + 2;
  while (p_max * p_max > bound) --p_max;  // exact isqrt
  while ((p_max + 1) * (p_max + 1) <= bound) ++p_max;
  long long a_max = static_cast<long long>(2.0 * std::pow(static_cast<double>(bound), 0.25) /
                                           (3.0 * std::sqrt(3.0))) + 1;
  for (long long a = 1; a <= a_max; ++a) {  // reduced forms have a > 0
    long long b_max = (3 * a) / 2 +
                      static_cast<long long>(std::sqrt(static_cast<double>(p_max))) + 2;
    for (long long b = 0; b <= b_max; ++b) {  // and b >= 0
      // 1 <= P = b^2 - 3ac <= p_max pins c to an interval
      long long lo_num = b * b - p_max, hi_num = b * b - 1;
      long long c_lo, c_hi;
      if (a > 0) {
        c_lo = ceil_div(lo_num, 3 * a);
        c_hi = floor_div(hi_num, 3 * a);
      } else {
        c_lo = ceil_div(hi_num, 3 * a);
        c_hi = floor_div(lo_num, 3 * a);
      }
      for (long long c = c_lo; c <= c_hi; ++c) {
        long long P = b * b - 3 * a * c;
        if (P < 1 || P > p_max) continue;
        // |Q| = |bc - 9ad| <= P pins d to an interval
        long long q_lo = b * c - P, q_hi = b * c + P;
        long long d_lo, d_hi;
        if (a > 0) {
          d_lo = ceil_div(q_lo, 9 * a);
          d_hi = floor_div(q_hi, 9 * a);
        } else {
          d_lo = ceil_div(q_hi, 9 * a);
          d_hi = floor_div(q_lo, 9 * a);
        }
        for (long long d = d_lo; d <= d_hi; ++d) {
          CubicForm f{a, b, c, d};
          i128 disc = disc_i128(f);
          if (disc <= 0 || disc > bound) continue;
          if (!is_reduced(f)) continue;
          if (!is_irreducible(f)) continue;
          if (!is_maximal(f)) continue;
          FormClassRecord rec;
          rec.reduced_form = f;
          rec.disc = static_cast<long long>(disc);
          rec.maximal = rec.irreducible = rec.real = true;
          out.push_back(rec);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const FormClassRecord& x, const FormClassRecord& y) {
    if (x.disc != y.disc) return x.disc < y.disc;
    return x.reduced_form < y.reduced_form;
  });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].reduced_form == out[i - 1].reduced_form)
      throw std::logic_error("scan: duplicate reduced form");
  return out;
}

}  // namespace selsig
