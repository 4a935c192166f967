#include "selsig/heuristics.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

// gmpxx expression templates mis-evaluate some deeply nested
// compound-compound trees (stack temp reuse); every multi-factor product or
// quotient below is therefore built up with *= and /= on named values.

namespace selsig {

namespace {

Rational poch2(int m) { return pochhammer(2, m); }
Rational poch4(int m) { return pochhammer(4, m); }

Rational product(std::initializer_list<Rational> factors) {
  Rational r = 1;
  for (const Rational& f : factors) r *= f;
  return r;
}

// (2)_inf / (4)_inf with certified error
TruncatedReal inf_constant(double eps) {
  TruncatedReal a = pochhammer_inf(2, eps / 4);
  TruncatedReal b = pochhammer_inf(4, eps / 4);
  return a / b;
}

double poch2_inf_lower() {
  TruncatedReal t = pochhammer_inf(2, 1e-15);
  return t.value - t.err;
}

}  // namespace

Signature::Signature(int r1_, int r2_) : r1(r1_), r2(r2_) {
  if (r1 < 1) throw std::invalid_argument("Signature: r1 >= 1 required");
  if (r2 < 0) throw std::invalid_argument("Signature: r2 >= 0 required");
  if (r1 % 2 == 0)
    throw std::invalid_argument("Signature: only odd degree is supported (r1 must be odd)");
}

Rational pochhammer(const Rational& q, int m) {
  if (m < 0) throw std::invalid_argument("pochhammer: m >= 0 required");
  if (q == 0) throw std::invalid_argument("pochhammer: q must be nonzero");
  Rational r = 1;
  Rational qinv = Rational(1) / q;
  Rational p = 1;
  for (int i = 1; i <= m; ++i) {
    p *= qinv;
    Rational factor = 1 - p;
    r *= factor;
  }
  return r;
}

TruncatedReal pochhammer_inf(const Rational& q, double eps) {
  if (eps <= 0) throw std::invalid_argument("pochhammer_inf: eps must be positive");
  if (q.get_den() != 1 || q < 2)
    throw std::invalid_argument("pochhammer_inf: q must be an integer >= 2");
  // tail bound: |log of the omitted factor| <= 2 q^{-M}
  int m = 64;
  double qd = q.get_d();
  while (2.0 * std::pow(qd, -m) > eps / 2 && m < 4096) m += 32;
  Rational partial = pochhammer(q, m);
  TruncatedReal v = TruncatedReal::from_rational(partial);
  double tail = v.upper() * 2.0 * std::pow(qd, -static_cast<double>(m));
  return {v.value, v.err + tail};
}

Rational p_k(const Signature& sig, int k) {
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  if (k < 0 || k > r1 / 2) throw std::invalid_argument("p_k: k out of range [0, floor(r1/2)]");
  Rational num = product({poch2(u), poch4((r1 - 1) / 2), poch4((r1 - 1) / 2 + r2)});
  Rational den = product({pow2q(static_cast<long>(k) * (k + r2)), poch2(k), poch2(k + r2),
                          poch4(u), poch4((r1 - 1) / 2 - k)});
  return num / den;
}

Rational eta_rational_part(const Signature& sig, int rho) {
  if (rho < 0) throw std::invalid_argument("eta: rho >= 0 required");
  int u = sig.u();
  long e = static_cast<long>(rho) * u + static_cast<long>(rho) * (rho + 1) / 2;
  Rational den = product({pow2q(e), poch2(rho), poch2(u)});
  return poch4(u) / den;
}

TruncatedReal eta_malle(const Signature& sig, int rho, double eps) {
  return inf_constant(eps) * eta_rational_part(sig, rho);
}

TruncatedReal eta_plus(const Signature& sig, int rho_plus, double eps) {
  if (rho_plus < 0) throw std::invalid_argument("eta_plus: rho+ >= 0 required");
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  Rational pre = poch4((r1 - 1) / 2) * poch4((r1 - 1) / 2 + r2);
  pre /= pow2q(static_cast<long>(u) * rho_plus);
  Rational sum = 0;
  int kmax = std::min(rho_plus, r1 / 2);
  for (int k = 0; k <= kmax; ++k) {
    long e = static_cast<long>(k) * (r1 - 1 - k) -
             static_cast<long>(rho_plus - k) * (rho_plus - k + 1) / 2;
    Rational den = product(
        {poch2(k), poch2(k + r2), poch2(rho_plus - k), poch4((r1 - 1) / 2 - k)});
    sum += pow2q(e) / den;
  }
  Rational total = pre * sum;
  return inf_constant(eps) * total;
}

TruncatedReal eta_plus_limit(int r2, int rho_plus, double eps) {
  if (r2 < 0 || rho_plus < 0) throw std::invalid_argument("eta_plus_limit: negative argument");
  Rational den = product({pow2q(static_cast<long>(rho_plus) * (rho_plus + r2)),
                          poch2(rho_plus), poch2(r2 + rho_plus)});
  Rational r = Rational(1) / den;
  return pochhammer_inf(2, eps) * r;
}

Rational moment(const Signature& sig, int t) {
  if (t < 1) throw std::invalid_argument("moment: t >= 1 required");
  int r1 = sig.r1, r2 = sig.r2;
  Rational factor = 1;
  for (int s = 1; s <= t; ++s) {
    Rational term = 1 + pow2q(s - r1 - r2);
    factor *= term;
  }
  Rational sum = 0;
  for (int k = 0; k <= r1 / 2; ++k) {
    Rational term = pow2q(static_cast<long>(t) * k) * p_k(sig, k);
    sum += term;
  }
  return factor * sum;
}

WzTriple pksum_wz_check(const Rational& q, int m, int r2) {
  if (q <= 1) throw std::invalid_argument("pksum_wz_check: q > 1 required");
  if (m < 0 || r2 < 0) throw std::invalid_argument("pksum_wz_check: m, r2 >= 0 required");
  WzTriple wz;
  wz.q = q;
  wz.m = m;
  wz.r2 = r2;

  Rational q2 = q * q;
  auto p1 = [&](int j) { return pochhammer(q, j); };
  auto p2 = [&](int j) { return pochhammer(q2, j); };
  auto ptilde = [&](int mm, int k) {
    Rational num = product({p1(2 * mm + r2), p2(mm), p2(mm + r2)});
    Rational den = product({qpow(q, static_cast<long>(k) * (k + r2)), p1(k), p1(k + r2),
                            p2(2 * mm + r2), p2(mm - k)});
    return Rational(num / den);
  };
  auto f_of = [&](int mm, int k) {
    // f_{m,k} = q^k ptilde(k) (1 + q^{-2m-r2}) / (1 + q^{-r2})
    Rational r = qpow(q, k) * ptilde(mm, k);
    Rational ratio_num = 1 + qpow(q, -2L * mm - r2);
    Rational ratio_den = 1 + qpow(q, -r2);
    r *= ratio_num;
    r /= ratio_den;
    return r;
  };

  Rational sum = 0;
  for (int k = 0; k <= m; ++k) {
    wz.f.push_back(f_of(m, k));
    Rational term = qpow(q, k) * ptilde(m, k);
    sum += term;
  }
  Rational closed_num = 1 + qpow(q, -r2);
  Rational closed_den = 1 + qpow(q, -2L * m - r2);
  Rational closed = closed_num / closed_den;
  wz.sum_ok = (sum == closed);

  if (m == 0) {
    wz.recurrence_ok = (wz.f[0] == 1);
    return wz;
  }
  for (int k = 0; k <= m - 1; ++k) wz.f_prev.push_back(f_of(m - 1, k));
  for (int k = 0; k <= m; ++k) {
    Rational a = qpow(q, 2L * k) - qpow(q, 2L * m);
    Rational b = qpow(q, 3L + 2 * k) + qpow(q, 2L * m);
    b -= qpow(q, 1L + 2 * m);
    b += qpow(q, 1L + k + 2 * m);
    b += qpow(q, 1L + k + 2 * m + r2);
    b += qpow(q, 2L + 2 * k + 2 * m + r2);
    Rational den = qpow(q, 2L * k + 2 * m);
    Rational d1 = qpow(q, 2L * m) - 1;
    Rational d2 = qpow(q, 2L * (m + r2)) - 1;
    den *= d1;
    den *= d2;
    Rational cert = a * b;
    cert /= den;
    wz.cert.push_back(cert);
    wz.g.push_back(cert * wz.f[k]);
  }
  wz.recurrence_ok = (wz.cert[static_cast<std::size_t>(m)] == 0);
  for (int k = 0; k <= m; ++k) {
    Rational f_prev_k = (k <= m - 1) ? wz.f_prev[k] : Rational(0);  // f_{m-1,m} = 0
    Rational g_km1 = (k >= 1) ? wz.g[k - 1] : Rational(0);          // g_{m,-1} = 0
    Rational lhs = wz.f[k] - f_prev_k;
    Rational rhs = wz.g[k] - g_km1;
    if (lhs != rhs) wz.recurrence_ok = false;
  }
  return wz;
}

Rational cond_sigrank(const Signature& sig, int s, int k, int rho) {
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  if (k < 0 || k > r1 / 2) throw std::invalid_argument("cond_sigrank: k out of range");
  if (rho < 0) throw std::invalid_argument("cond_sigrank: rho >= 0 required");
  if (s < 1 || s > r1) throw std::invalid_argument("cond_sigrank: s out of range [1, r1]");
  int lo = r1 - std::min(rho + k, r1 - 1), hi = r1 - k;
  if (s < lo || s > hi)
    throw prob_zero_error(
        "cond_sigrank: probability zero (s outside the admissible window forced by the "
        "Armitage-Frohlich bound)");
  Rational num = product({poch2(rho + k + r2), poch2(u), poch2(r1 - k - 1), poch2(rho)});
  Rational den = product({poch2(rho + k - r1 + s), poch2(r1 + r2 - s), poch2(s - 1),
                          poch2(u + rho), poch2(r1 - s - k)});
  Rational r = pow2q(static_cast<long>(r1 + r2 - s) * (k - r1 + s));
  r *= num;
  r /= den;
  return r;
}

namespace {

// shared inner k-sum of the signature-rank formulas
Rational sigrank_inner(const Signature& sig, int s, int rho) {
  int r1 = sig.r1, r2 = sig.r2;
  Rational sum = 0;
  int klo = std::max(0, r1 - s - rho), khi = std::min(r1 - s, (r1 - 1) / 2);
  for (int k = klo; k <= khi; ++k) {
    Rational num = product({pow2q(static_cast<long>(k) * (r1 - s - k)), poch2(r1 - 1 - k),
                            poch2(rho + k + r2)});
    Rational den = product({poch2(r1 - s - k), poch4((r1 - 1) / 2 - k), poch2(k),
                            poch2(k + r2), poch2(rho + k - r1 + s)});
    sum += num / den;
  }
  return sum;
}

// uniform upper bound on sigrank_inner over all rho: (2)_{rho+k+r2} <= 1 and
// (2)_{rho+k-r1+s} >= (2)_inf
double sigrank_inner_bound(const Signature& sig, int s, double poch2_inf_lo) {
  int r1 = sig.r1, r2 = sig.r2;
  double sum = 0;
  int khi = std::min(r1 - s, (r1 - 1) / 2);
  for (int k = 0; k <= khi; ++k) {
    Rational num = pow2q(static_cast<long>(k) * (r1 - s - k)) * poch2(r1 - 1 - k);
    Rational den = product({poch2(r1 - s - k), poch4((r1 - 1) / 2 - k), poch2(k), poch2(k + r2)});
    Rational partial = num / den;
    sum += partial.get_d() / poch2_inf_lo;
  }
  return sum * 1.0000001;
}

double split_inner_bound(const Signature& sig) {
  int r1 = sig.r1, r2 = sig.r2;
  double sum = 0;
  for (int k = 0; k <= r1 / 2; ++k) {
    Rational den = product({pow2q(static_cast<long>(k) * (k + r2)), poch2(k + r2),
                            poch2(k + r2), poch2(k), poch4((r1 - 1) / 2 - k)});
    Rational partial = Rational(1) / den;
    sum += partial.get_d();
  }
  return sum * 1.0000001;
}

// Truncated sum over rho >= rho_min of `term`, with the rigorous geometric
// tail bound  sum_{rho > M} term(rho) <= 2 * 2^{-(M+1)u - (M+1)(M+2)/2} *
// term_bound_factor  added through *tail_out (in final units).
Rational rho_sum(const Signature& sig, int rho_min, double eps, double term_bound_factor,
                 const std::function<Rational(int)>& term, double* tail_out) {
  int u = sig.u();
  Rational sum = 0;
  double tail = 0;
  for (int rho = rho_min;; ++rho) {
    if (rho > 600) throw std::runtime_error("rho_sum: truncation failed to converge");
    sum += term(rho);
    double next_exp =
        static_cast<double>(rho + 1) * u + static_cast<double>(rho + 1) * (rho + 2) / 2;
    double apriori = std::pow(2.0, -next_exp);
    double bound = apriori * term_bound_factor;
    if (apriori < eps / 4 && 2.0 * bound < eps / 2) {
      tail = 2.0 * bound;  // successive bounds decay by at least 1/2
      break;
    }
  }
  *tail_out = tail;
  return sum;
}

}  // namespace

Rational sigrank_given_rho(const Signature& sig, int s, int rho) {
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  if (s < 1 || s > r1) throw std::invalid_argument("sigrank_given_rho: s out of range [1, r1]");
  if (rho < 0) throw std::invalid_argument("sigrank_given_rho: rho >= 0 required");
  if (rho < (r1 + 1) / 2 - s)
    throw prob_zero_error(
        "sigrank_given_rho: probability zero (the Armitage-Frohlich bound forces "
        "s >= (r1+1)/2 - rho)");
  Rational num = product({pow2q(static_cast<long>(r1 + r2 - s) * (s - r1)), poch2(u), poch2(u),
                          poch4((r1 - 1) / 2), poch4((r1 - 1) / 2 + r2), poch2(rho)});
  Rational den = product({poch2(r1 + r2 - s), poch2(s - 1), poch2(u + rho), poch4(u)});
  Rational pre = num / den;
  return pre * sigrank_inner(sig, s, rho);
}

TruncatedReal sigrank(const Signature& sig, int s, double eps) {
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  if (s < 1 || s > r1) throw std::invalid_argument("sigrank: s out of range [1, r1]");
  if (eps <= 0) throw std::invalid_argument("sigrank: eps must be positive");

  Rational num = product({pow2q(static_cast<long>(r1 + r2 - s) * (s - r1)), poch2(u),
                          poch4((r1 - 1) / 2), poch4((r1 - 1) / 2 + r2)});
  Rational den = poch2(r1 + r2 - s) * poch2(s - 1);
  Rational pre = num / den;
  TruncatedReal c = inf_constant(eps / 4);
  double pre_hi = TruncatedReal::from_rational(pre).upper() * c.upper();
  double p2lo = poch2_inf_lower();
  double bound_factor = sigrank_inner_bound(sig, s, p2lo) / p2lo * pre_hi;

  int rho_min = std::max(0, (r1 + 1) / 2 - s);
  double tail = 0;
  Rational sum = rho_sum(
      sig, rho_min, eps, bound_factor,
      [&](int rho) {
        long e = static_cast<long>(rho) * u + static_cast<long>(rho) * (rho + 1) / 2;
        Rational d = pow2q(e) * poch2(u + rho);
        return Rational(sigrank_inner(sig, s, rho) / d);
      },
      &tail);
  Rational total = pre * sum;
  TruncatedReal out = c * total;
  out.err += tail;
  return out;
}

TruncatedReal split_prob(const Signature& sig, double eps) {
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  if (eps <= 0) throw std::invalid_argument("split_prob: eps must be positive");

  Rational pre = product({poch2(u), poch4((r1 - 1) / 2), poch4((r1 - 1) / 2 + r2)});
  TruncatedReal c = inf_constant(eps / 4);
  double pre_hi = TruncatedReal::from_rational(pre).upper() * c.upper();
  double p2lo = poch2_inf_lower();
  double bound_factor = split_inner_bound(sig) / (p2lo * p2lo) * pre_hi;

  auto inner = [&](int rho) {
    Rational sum = 0;
    for (int k = 0; k <= r1 / 2; ++k) {
      Rational den = product({pow2q(static_cast<long>(k) * (k + r2)), poch2(k + r2),
                              poch2(k + r2), poch2(k), poch4((r1 - 1) / 2 - k)});
      sum += poch2(rho + k + r2) / den;
    }
    return sum;
  };
  double tail = 0;
  Rational sum = rho_sum(
      sig, 0, eps, bound_factor,
      [&](int rho) {
        long e = static_cast<long>(rho) * u + static_cast<long>(rho) * (rho + 1) / 2;
        Rational d = product({pow2q(e), poch2(u + rho), poch2(rho)});
        return Rational(inner(rho) / d);
      },
      &tail);
  Rational total = pre * sum;
  TruncatedReal out = c * total;
  out.err += tail;
  return out;
}

Rational split_prob_given_rho(const Signature& sig, int rho) {
  int r1 = sig.r1, r2 = sig.r2, u = sig.u();
  if (rho < 0) throw std::invalid_argument("split_prob_given_rho: rho >= 0 required");
  Rational num = product(
      {poch2(u), poch2(u), poch4((r1 - 1) / 2), poch4((r1 - 1) / 2 + r2)});
  Rational den = poch4(u) * poch2(u + rho);
  Rational pre = num / den;
  Rational sum = 0;
  for (int k = 0; k <= r1 / 2; ++k) {
    Rational d = product({pow2q(static_cast<long>(k) * (k + r2)), poch2(k + r2), poch2(k + r2),
                          poch2(k), poch4((r1 - 1) / 2 - k)});
    sum += poch2(rho + k + r2) / d;
  }
  return pre * sum;
}

Rational random_subspace_prob(const Rational& q, int m, int r, int t, int s_prime) {
  if (q <= 1) throw std::invalid_argument("random_subspace_prob: q > 1 required");
  if (m < 1 || t < 1 || t > m)
    throw std::invalid_argument("random_subspace_prob: need 1 <= t <= m");
  if (r < 0 || r > m - 1)
    throw std::invalid_argument("random_subspace_prob: need 0 <= r <= m-1 (e not in Y)");
  int lo = std::max(0, r + t - m), hi = std::min(r, t - 1);
  if (s_prime < 0) throw std::invalid_argument("random_subspace_prob: s' must be nonnegative");
  if (s_prime < lo || s_prime > hi)
    throw prob_zero_error(
        "random_subspace_prob: probability zero (s' outside [r+t-m, min(r, t-1)])");
  auto p = [&](int j) { return pochhammer(q, j); };
  Rational num = product({p(r), p(t - 1), p(m - 1 - r), p(m - t)});
  Rational den = product(
      {p(r - s_prime), p(s_prime), p(t - 1 - s_prime), p(m - 1), p(m + s_prime - r - t)});
  Rational out = qpow(q, static_cast<long>(s_prime) * (r + t - m - s_prime));
  out *= num;
  out /= den;
  return out;
}

}  // namespace selsig
