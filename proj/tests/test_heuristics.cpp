#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selsig/f2linalg.hpp"
#include "selsig/heuristics.hpp"
#include "selsig/isotropic.hpp"

using namespace selsig;

namespace {

Rational rq(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("finite q-Pochhammer") {
  CHECK(pochhammer(2, 0) == 1);
  CHECK(pochhammer(2, 2) == rq(3, 8));
  CHECK(pochhammer(4, 1) == rq(3, 4));
  CHECK_THROWS_AS(pochhammer(2, -1), std::invalid_argument);
}

TEST_CASE("infinite q-Pochhammer with certified tail") {
  TruncatedReal p2 = pochhammer_inf(2, 1e-12);
  CHECK(p2.err < 1e-12);
  // oracle: a much deeper partial product brackets the true value
  double deep = TruncatedReal::from_rational(pochhammer(2, 256)).value;
  CHECK(std::fabs(p2.value - deep) <= p2.err + 1e-15);
  CHECK(p2.to_string(6) == "0.288788");

  TruncatedReal p4 = pochhammer_inf(4, 1e-12);
  CHECK(std::fabs(p4.value - 0.6885375371) < 1e-9);

  CHECK_THROWS_AS(pochhammer_inf(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pochhammer_inf(rq(3, 2), 1e-6), std::invalid_argument);
}

TEST_CASE("p_k reproduces the printed fractions") {
  Signature s30(3, 0);
  CHECK(p_k(s30, 0) == rq(2, 5));
  CHECK(p_k(s30, 1) == rq(3, 5));
  CHECK(p_k(Signature(1, 1), 0) == 1);
  Signature s50(5, 0);
  CHECK(p_k(s50, 0) == rq(16, 51));
  CHECK(p_k(s50, 1) == rq(30, 51));
  CHECK(p_k(s50, 2) == rq(5, 51));
  CHECK(p_k(Signature(3, 1), 0) == rq(2, 3));
  CHECK(p_k(Signature(3, 1), 1) == rq(1, 3));
  Signature s70(7, 0);
  CHECK(p_k(s70, 0) == rq(3584, 12155));
  CHECK(p_k(s70, 1) == rq(7056, 12155));
  CHECK(p_k(s70, 2) == rq(1470, 12155));
  CHECK(p_k(s70, 3) == rq(45, 12155));
  CHECK(p_k(Signature(5, 1), 0) == rq(112, 187));
  CHECK(p_k(Signature(5, 1), 1) == rq(70, 187));
  CHECK(p_k(Signature(5, 1), 2) == rq(5, 187));
  CHECK(p_k(Signature(3, 2), 0) == rq(14, 17));
  CHECK(p_k(Signature(3, 2), 1) == rq(3, 17));
  CHECK(p_k(Signature(1, 3), 0) == 1);
  CHECK_THROWS_AS(p_k(s30, 2), std::invalid_argument);
}

TEST_CASE("p_k sums to one and rejects even degree") {
  for (int r1 : {1, 3, 5, 7, 9}) {
    for (int r2 : {0, 1, 2, 3}) {
      Signature sig(r1, r2);
      Rational sum = 0;
      for (int k = 0; k <= r1 / 2; ++k) sum += p_k(sig, k);
      CHECK(sum == 1);
    }
  }
  CHECK_THROWS_AS(Signature(2, 0), std::invalid_argument);
}

TEST_CASE("p_k agrees with the orbit-mass probabilities") {
  // the same distribution arises from the orbit sizes of maximal totally
  // isotropic subspaces of (nonalt r1) perp (nonalt r1+2r2)
  for (int r1 : {1, 3, 5}) {
    for (int r2 : {0, 1, 2}) {
      Signature sig(r1, r2);
      auto labels = class_labels(SpaceType::NonAltOdd, r1, SpaceType::NonAltOdd, r1 + 2 * r2);
      REQUIRE(static_cast<int>(labels.size()) == r1 / 2 + 1);
      Int total = 0;
      std::vector<Int> orbits;
      for (auto& lbl : labels) {
        OrbitStats st = orbit_stats(lbl, 2);
        orbits.push_back(st.orbit);
        total += st.orbit;
      }
      for (std::size_t k = 0; k < orbits.size(); ++k) {
        CHECK(p_k(sig, static_cast<int>(k)) == Rational(orbits[k]) / Rational(total));
      }
    }
  }
}

TEST_CASE("eta_malle values and normalization") {
  TruncatedReal v = eta_malle(Signature(1, 2), 0, 1e-9);
  CHECK(v.matches(0.786417, 1e-6));

  for (auto sig : {Signature(3, 0), Signature(1, 1), Signature(5, 0)}) {
    TruncatedReal sum{0.0, 0.0};
    for (int rho = 0; rho <= 40; ++rho) sum = sum + eta_malle(sig, rho, 1e-12);
    CHECK(std::fabs(sum.value - 1.0) < 1e-9);
  }

  // a-priori decay bound for large rho
  for (auto sig : {Signature(3, 0), Signature(1, 1), Signature(5, 2)}) {
    for (int rho : {5, 10, 20}) {
      double bound = std::pow(2.0, -static_cast<double>(rho) * sig.u());
      CHECK(eta_malle(sig, rho, 1e-12).value < bound);
    }
  }
}

TEST_CASE("eta_plus matches the printed densities") {
  struct Row {
    int r1, r2;
    double d0, d1, d2;
  };
  for (Row r : {Row{3, 0, 0.314567, 0.550492, 0.124516}, Row{1, 1, 0.629133, 0.314567, 0.052427},
                Row{5, 0, 0.294907, 0.571382, 0.127102}, Row{3, 1, 0.589813, 0.368633, 0.039935},
                Row{1, 2, 0.786417, 0.196604, 0.016384}, Row{7, 0, 0.290298, 0.576061, 0.128021},
                Row{5, 1, 0.580597, 0.381017, 0.037448}, Row{3, 2, 0.774129, 0.214268, 0.011376},
                Row{1, 3, 0.884719, 0.110590, 0.004608}}) {
    Signature sig(r.r1, r.r2);
    CHECK(eta_plus(sig, 0, 1e-9).matches(r.d0, 1e-6));
    CHECK(eta_plus(sig, 1, 1e-9).matches(r.d1, 1e-6));
    CHECK(eta_plus(sig, 2, 1e-9).matches(r.d2, 1e-6));
  }
}

TEST_CASE("eta_plus equals the convolution of eta and p term by term") {
  for (auto sig : {Signature(3, 0), Signature(5, 1), Signature(7, 0), Signature(1, 2)}) {
    for (int rp = 0; rp <= 6; ++rp) {
      TruncatedReal direct = eta_plus(sig, rp, 1e-12);
      TruncatedReal conv{0.0, 0.0};
      for (int k = 0; k <= std::min(rp, sig.r1 / 2); ++k)
        conv = conv + eta_malle(sig, rp - k, 1e-12) * p_k(sig, k);
      CHECK(std::fabs(direct.value - conv.value) <= direct.err + conv.err + 1e-12);
    }
  }
}

TEST_CASE("large-r1 limit of the narrow 2-rank distribution") {
  CHECK(eta_plus_limit(0, 0, 1e-9).matches(0.28879, 1e-4));
  CHECK(eta_plus_limit(0, 1, 1e-9).matches(0.57758, 1e-4));
  CHECK(eta_plus_limit(0, 2, 1e-9).matches(0.12835, 1e-4));
  CHECK(eta_plus_limit(0, 3, 1e-9).matches(0.00524, 1e-4));
}

TEST_CASE("moments are the printed exact rationals") {
  auto check_row = [](int r1, int r2, Rational m1, Rational m2, Rational m3, Rational m4) {
    Signature sig(r1, r2);
    CHECK(moment(sig, 1) == m1);
    CHECK(moment(sig, 2) == m2);
    CHECK(moment(sig, 3) == m3);
    CHECK(moment(sig, 4) == m4);
  };
  check_row(3, 0, 2, rq(21, 4), rq(39, 2), rq(225, 2));
  check_row(1, 1, rq(3, 2), 3, 9, 45);
  check_row(5, 0, 2, rq(81, 16), rq(135, 8), rq(4995, 64));
  check_row(3, 1, rq(3, 2), rq(45, 16), rq(225, 32), rq(405, 16));
  check_row(1, 2, rq(5, 4), rq(15, 8), rq(15, 4), rq(45, 4));
  check_row(7, 0, 2, rq(321, 64), rq(519, 32), rq(71415, 1024));
  check_row(5, 1, rq(3, 2), rq(177, 64), rq(837, 128), rq(21195, 1024));
  check_row(3, 2, rq(5, 4), rq(117, 64), rq(855, 256), rq(4185, 512));
  check_row(1, 3, rq(9, 8), rq(45, 32), rq(135, 64), rq(135, 32));
}

TEST_CASE("first moment identity 1 + 2^-r2") {
  for (int r1 : {1, 3, 5, 7, 9})
    for (int r2 = 0; r2 <= 4; ++r2)
      CHECK(moment(Signature(r1, r2), 1) == 1 + pow2q(-r2));
}

TEST_CASE("q-binomial identity and its certificate") {
  WzTriple w0 = pksum_wz_check(2, 0, 3);
  CHECK(w0.ok());
  WzTriple w1 = pksum_wz_check(2, 1, 0);
  CHECK(w1.ok());
  // the sum itself at q=2, m=1, r2=0 is 8/5
  Rational lhs = 0;
  {
    Rational q = 2;
    auto p1 = [&](int j) { return pochhammer(q, j); };
    auto p2 = [&](int j) { return pochhammer(q * q, j); };
    for (int k = 0; k <= 1; ++k) {
      Rational pt = p1(2) * p2(1) * p2(1) /
                    (qpow(q, static_cast<long>(k) * k) * p1(k) * p1(k) * p2(2) * p2(1 - k));
      lhs += qpow(q, k) * pt;
    }
  }
  CHECK(lhs == rq(8, 5));

  for (Rational q : {Rational(2), Rational(4)}) {
    for (int m = 0; m <= 8; ++m) {
      for (int r2 = 0; r2 <= 4; ++r2) {
        WzTriple w = pksum_wz_check(q, m, r2);
        CHECK(w.sum_ok);
        CHECK(w.recurrence_ok);
        if (m >= 1) CHECK(w.cert[static_cast<std::size_t>(m)] == 0);
      }
    }
  }
}

TEST_CASE("conditional signature rank: forced cell and error taxonomy") {
  Signature s30(3, 0);
  CHECK(cond_sigrank(s30, 2, 1, 0) == 1);  // the window is the single value s=2
  CHECK_THROWS_AS(cond_sigrank(s30, 3, 1, 0), prob_zero_error);
  CHECK_THROWS_AS(cond_sigrank(s30, 1, 1, 0), prob_zero_error);
  CHECK_THROWS_AS(cond_sigrank(s30, 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(cond_sigrank(s30, 4, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(cond_sigrank(s30, 2, 5, 0), std::invalid_argument);
}

TEST_CASE("conditional signature rank equals the random-subspace law") {
  // with m = r1+r2+rho, t = r1+r2, r = rho+k+r2 and s' = r1+r2-s the two
  // formulas describe the same count
  for (int r1 : {1, 3, 5}) {
    for (int r2 : {0, 1}) {
      Signature sig(r1, r2);
      for (int rho : {0, 1, 2}) {
        for (int k = 0; k <= r1 / 2; ++k) {
          int m = r1 + r2 + rho, t = r1 + r2, r = rho + k + r2;
          if (r > m - 1) continue;
          Rational sum = 0;
          for (int s = 1; s <= r1; ++s) {
            Rational lhs;
            try {
              lhs = cond_sigrank(sig, s, k, rho);
            } catch (const prob_zero_error&) {
              continue;
            }
            CHECK(lhs == random_subspace_prob(2, m, r, t, r1 + r2 - s));
            sum += lhs;
          }
          CHECK(sum == 1);
        }
      }
    }
  }
}

TEST_CASE("random_subspace_prob examples and enumeration oracle") {
  CHECK(random_subspace_prob(2, 2, 1, 1, 0) == 1);
  CHECK(random_subspace_prob(2, 3, 1, 2, 1) == rq(1, 3));
  CHECK(random_subspace_prob(2, 3, 1, 2, 0) == rq(2, 3));
  CHECK_THROWS_AS(random_subspace_prob(2, 3, 1, 2, 2), prob_zero_error);
  CHECK_THROWS_AS(random_subspace_prob(2, 3, 3, 2, 0), std::invalid_argument);

  // exhaustive check against subspace enumeration for q=2, m <= 5:
  // e = e_1, Y spanned by the last r coordinates
  for (int m = 1; m <= 5; ++m) {
    for (int r = 0; r <= m - 1; ++r) {
      for (int t = 1; t <= m; ++t) {
        BitVector e = BitVector::unit(m, 0);
        std::vector<BitVector> yrows;
        for (int i = 0; i < r; ++i) yrows.push_back(BitVector::unit(m, m - 1 - i));
        Subspace y = Subspace::span(yrows, m);
        std::map<int, long> counts;
        long total = 0;
        enumerate_subspaces(m, t, [&](const Subspace& sub) {
          if (!sub.contains(e)) return;
          ++total;
          ++counts[meet(sub, y).dim()];
        });
        REQUIRE(total > 0);
        for (int sp = 0; sp <= std::min(r, t - 1); ++sp) {
          Rational expect;
          try {
            expect = random_subspace_prob(2, m, r, t, sp);
          } catch (const prob_zero_error&) {
            expect = 0;
          }
          Rational emp(counts[sp], total);
          emp.canonicalize();
          CHECK(emp == expect);
        }
      }
    }
  }
}

TEST_CASE("signature rank densities match the printed table") {
  Signature s30(3, 0);
  CHECK(sigrank(s30, 1, 1e-9).matches(0.019097, 1e-6));
  CHECK(sigrank(s30, 2, 1e-9).matches(0.618304, 1e-6));
  CHECK(sigrank(s30, 3, 1e-9).matches(0.362599, 1e-6));

  Signature s50(5, 0);
  TruncatedReal tiny = sigrank(s50, 1, 1e-9);
  CHECK(std::fabs(tiny.value - 1.9e-7) <= 1e-8);
  CHECK(sigrank(s50, 2, 1e-9).matches(0.000582, 1e-6));
  CHECK(sigrank(s50, 3, 1e-9).matches(0.105508, 1e-6));
  CHECK(sigrank(s50, 4, 1e-9).matches(0.589338, 1e-6));
  CHECK(sigrank(s50, 5, 1e-9).matches(0.304572, 1e-6));

  Signature s31(3, 1);
  CHECK(sigrank(s31, 1, 1e-9).matches(0.002630, 1e-6));
  CHECK(sigrank(s31, 2, 1e-9).matches(0.346318, 1e-6));
  CHECK(sigrank(s31, 3, 1e-9).matches(0.651052, 1e-6));

  Signature s70(7, 0);
  CHECK(sigrank(s70, 1, 1e-9).value < 9e-16);
  CHECK(sigrank(s70, 2, 1e-9).value < 2e-10);
  CHECK(sigrank(s70, 3, 1e-9).matches(0.000003, 1e-6));
  CHECK(sigrank(s70, 4, 1e-9).matches(0.003921, 1e-6));
  CHECK(sigrank(s70, 5, 1e-9).matches(0.122913, 1e-6));
  CHECK(sigrank(s70, 6, 1e-9).matches(0.580570, 1e-6));
  CHECK(sigrank(s70, 7, 1e-9).matches(0.292593, 1e-6));

  Signature s51(5, 1);
  CHECK(sigrank(s51, 1, 1e-9).value < 4e-9);
  CHECK(sigrank(s51, 2, 1e-9).matches(0.000040, 1e-6));
  CHECK(sigrank(s51, 3, 1e-9).matches(0.027980, 1e-6));
  CHECK(sigrank(s51, 4, 1e-9).matches(0.377432, 1e-6));
  CHECK(sigrank(s51, 5, 1e-9).matches(0.594548, 1e-6));

  Signature s32(3, 2);
  CHECK(sigrank(s32, 1, 1e-9).matches(0.000346, 1e-6));
  CHECK(sigrank(s32, 2, 1e-9).matches(0.180949, 1e-6));
  CHECK(sigrank(s32, 3, 1e-9).matches(0.818705, 1e-6));

  // degree with r1 = 1: rank is forced
  for (int r2 : {1, 2, 3}) {
    TruncatedReal one = sigrank(Signature(1, r2), 1, 1e-9);
    CHECK(std::fabs(one.value - 1.0) <= one.err + 1e-9);
  }
}

TEST_CASE("signature rank distribution sums to one") {
  for (auto sig : {Signature(3, 0), Signature(5, 0), Signature(7, 0), Signature(5, 1)}) {
    TruncatedReal sum{0.0, 0.0};
    for (int s = 1; s <= sig.r1; ++s) sum = sum + sigrank(sig, s, 1e-10);
    CHECK(std::fabs(sum.value - 1.0) <= sum.err + 1e-9);
  }
}

TEST_CASE("sigrank decomposes through the fixed-rho distribution") {
  for (auto sig : {Signature(3, 0), Signature(5, 1)}) {
    for (int s = 1; s <= sig.r1; ++s) {
      double direct = sigrank(sig, s, 1e-12).value;
      double assembled = 0;
      for (int rho = 0; rho <= 45; ++rho) {
        try {
          assembled += eta_malle(sig, rho, 1e-13).value *
                       sigrank_given_rho(sig, s, rho).get_d();
        } catch (const prob_zero_error&) {
        }
      }
      CHECK(std::fabs(direct - assembled) < 1e-9);
    }
  }
}

TEST_CASE("fixed-rho signature rank normalizes") {
  Signature s50(5, 0);
  for (int rho : {0, 1, 2, 3}) {
    Rational sum = 0;
    for (int s = 1; s <= 5; ++s) {
      try {
        sum += sigrank_given_rho(s50, s, rho);
      } catch (const prob_zero_error&) {
      }
    }
    CHECK(sum == 1);
  }
  CHECK_THROWS_AS(sigrank_given_rho(s50, 1, 0), prob_zero_error);
  CHECK_THROWS_AS(sigrank_given_rho(s50, 6, 0), std::invalid_argument);
}

TEST_CASE("splitting densities match the printed table") {
  CHECK(split_prob(Signature(3, 0), 1e-9).matches(0.943700, 1e-6));
  CHECK(split_prob(Signature(5, 0), 1e-9).matches(0.982241, 1e-6));
  CHECK(split_prob(Signature(3, 1), 1e-9).matches(0.981776, 1e-6));
  CHECK(split_prob(Signature(7, 0), 1e-9).matches(0.995315, 1e-6));
  CHECK(split_prob(Signature(5, 1), 1e-9).matches(0.994300, 1e-6));
  CHECK(split_prob(Signature(3, 2), 1e-9).matches(0.994831, 1e-6));
  for (int r2 : {1, 2, 3}) {
    TruncatedReal one = split_prob(Signature(1, r2), 1e-9);
    CHECK(std::fabs(one.value - 1.0) <= one.err + 1e-9);
  }
}

TEST_CASE("split probability decomposes through fixed rho") {
  for (auto sig : {Signature(3, 0), Signature(5, 0), Signature(3, 1)}) {
    double direct = split_prob(sig, 1e-12).value;
    double assembled = 0;
    for (int rho = 0; rho <= 45; ++rho)
      assembled += eta_malle(sig, rho, 1e-13).value * split_prob_given_rho(sig, rho).get_d();
    CHECK(std::fabs(direct - assembled) < 1e-9);
  }
}

TEST_CASE("eta_plus is a probability distribution") {
  for (auto sig : {Signature(3, 0), Signature(5, 1), Signature(7, 0)}) {
    TruncatedReal sum{0.0, 0.0};
    for (int rp = 0; rp <= 45; ++rp) sum = sum + eta_plus(sig, rp, 1e-12);
    CHECK(std::fabs(sum.value - 1.0) < 1e-9);
  }
}
