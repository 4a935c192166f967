#pragma once

#include <optional>
#include <vector>

#include "selsig/rational.hpp"

namespace selsig {

// Exact evaluation of the closed-form densities, identities and moments for
// odd-degree fields of signature (r1, r2), with certified truncation bounds
// for the values involving infinite products.

struct Signature {
  int r1 = 1, r2 = 0;
  Signature(int r1_, int r2_);
  int n() const { return r1 + 2 * r2; }
  int u() const { return r1 + r2 - 1; }
};

// thrown when a requested probability is zero because the index lies outside
// the admissible window (as opposed to malformed input)
class prob_zero_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// finite q-Pochhammer  (q)_m = prod_{i=1..m} (1 - q^{-i}); empty product = 1
Rational pochhammer(const Rational& q, int m);

// infinite product with certified tail: the omitted factor beyond M terms
// lies in [exp(-2 q^{-M}), 1]
TruncatedReal pochhammer_inf(const Rational& q, double eps);

// P(rho+ - rho = k) for 0 <= k <= floor(r1/2); exact
Rational p_k(const Signature& sig, int k);

// class-group 2-rank distribution (Malle shape), split into the exact
// rational part and the constant (2)_inf/(4)_inf
Rational eta_rational_part(const Signature& sig, int rho);
TruncatedReal eta_malle(const Signature& sig, int rho, double eps);

// narrow 2-rank distribution and its fixed-r2, large-r1 limit
TruncatedReal eta_plus(const Signature& sig, int rho_plus, double eps);
TruncatedReal eta_plus_limit(int r2, int rho_plus, double eps);

// t-th power moment of the narrow 2-rank distribution; exact
Rational moment(const Signature& sig, int t);

// q-binomial identity with its Wilf-Zeilberger certificate
struct WzTriple {
  Rational q;
  int m = 0, r2 = 0;
  std::vector<Rational> f;       // f_{m,0..m}
  std::vector<Rational> f_prev;  // f_{m-1,0..m-1}
  std::vector<Rational> cert;    // cert_{m,0..m}
  std::vector<Rational> g;       // g_{m,k} = cert_{m,k} f_{m,k}
  bool sum_ok = false;           // sum q^k p~(k) equals the closed form
  bool recurrence_ok = false;    // f_{m,k} - f_{m-1,k} = g_{m,k} - g_{m,k-1}
  bool ok() const { return sum_ok && recurrence_ok; }
};

WzTriple pksum_wz_check(const Rational& q, int m, int r2);

// conditional unit-signature-rank distributions; exact
Rational cond_sigrank(const Signature& sig, int s, int k, int rho);
Rational sigrank_given_rho(const Signature& sig, int s, int rho);

// unit-signature-rank density, truncating the rho-sum with a certified tail
TruncatedReal sigrank(const Signature& sig, int s, double eps);

// density of narrow class groups splitting off the class group
TruncatedReal split_prob(const Signature& sig, double eps);
Rational split_prob_given_rho(const Signature& sig, int rho);

// P(dim(E meet Y) = s') for a uniformly random t-dim subspace E of F_q^m
// containing a fixed e != 0, against a fixed r-dim Y with e not in Y
Rational random_subspace_prob(const Rational& q, int m, int r, int t, int s_prime);

}  // namespace selsig
