#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "selsig/symspace.hpp"

using namespace selsig;

namespace {

// every invertible matrix with m^T g m = g, by brute force (n <= 4)
std::vector<BitMatrix> brute_isometries(const BitMatrix& g) {
  int n = g.rows();
  std::vector<BitMatrix> out;
  std::vector<std::uint64_t> rows(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      BitMatrix m = BitMatrix::from_row_bits(n, rows).transpose();
      auto [r, rank] = rref(m);
      if (rank != n) return;
      if (m.transpose() * g * m == g) out.push_back(m);
      return;
    }
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      rows[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

BitMatrix random_invertible(int n, Rng& rng) {
  while (true) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set_row(i, BitVector(n, rng.bits(n)));
    auto [r, rank] = rref(m);
    if (rank == n) return m;
  }
}

}  // namespace

TEST_CASE("classify the three standard examples") {
  SymSpace odd = SymSpace::classify(BitMatrix::identity(3));
  CHECK(odd.type() == SpaceType::NonAltOdd);
  REQUIRE(odd.vcan().has_value());
  CHECK(odd.vcan()->to_string() == "111");

  BitMatrix h(2, 2);
  h.set(0, 1, true);
  h.set(1, 0, true);
  SymSpace alt = SymSpace::classify(h);
  CHECK(alt.type() == SpaceType::Alternating);
  CHECK(!alt.vcan().has_value());

  SymSpace even = SymSpace::classify(BitMatrix::identity(4));
  CHECK(even.type() == SpaceType::NonAltEven);
  REQUIRE(even.vcan().has_value());
  CHECK(even.vcan()->to_string() == "1111");
  CHECK(!even.length(*even.vcan()));  // vcan is isotropic for even n
}

TEST_CASE("classify rejects bad grams") {
  BitMatrix asym(2, 2);
  asym.set(0, 1, true);
  CHECK_THROWS_AS(SymSpace::classify(asym), std::invalid_argument);
  BitMatrix sing(2, 2);
  sing.set(0, 0, true);
  CHECK_THROWS_AS(SymSpace::classify(sing), std::invalid_argument);
}

TEST_CASE("classify is isometry-invariant and vcan well defined") {
  Rng rng(101);
  for (SpaceType t : {SpaceType::Alternating, SpaceType::NonAltOdd, SpaceType::NonAltEven}) {
    for (int n = 1; n <= 7; ++n) {
      if ((t == SpaceType::NonAltOdd) != (n % 2 == 1)) continue;
      if (t == SpaceType::NonAltEven && n < 2) continue;
      SymSpace base = SymSpace::standard(t, n);
      for (int trial = 0; trial < 25; ++trial) {
        BitMatrix m = random_invertible(n, rng);
        BitMatrix g2 = m.transpose() * base.gram() * m;
        SymSpace s2 = SymSpace::classify(g2);
        CHECK(s2.type() == t);
        if (s2.vcan()) {
          // the defining property b(v, vcan) = b(v,v) pins vcan uniquely
          for (int i = 0; i < n; ++i) {
            BitVector e = BitVector::unit(n, i);
            CHECK(s2.bform(e, *s2.vcan()) == s2.length(e));
          }
        }
      }
    }
  }
}

TEST_CASE("standard basis realizes the standard gram") {
  for (int n : {2, 4, 6}) {
    SymSpace s = SymSpace::standard(SpaceType::Alternating, n);
    CHECK(s.std_basis() * s.gram() * s.std_basis().transpose() ==
          SymSpace::standard_gram(SpaceType::Alternating, n));
  }
  SymSpace s5 = SymSpace::classify(BitMatrix::identity(5));
  CHECK(s5.std_basis() * s5.gram() * s5.std_basis().transpose() ==
        SymSpace::standard_gram(SpaceType::NonAltOdd, 5));
  SymSpace s6 = SymSpace::classify(BitMatrix::identity(6));
  CHECK(s6.std_basis() * s6.gram() * s6.std_basis().transpose() ==
        SymSpace::standard_gram(SpaceType::NonAltEven, 6));
}

TEST_CASE("space utils on the identity gram") {
  SymSpace v = SymSpace::classify(BitMatrix::identity(3));
  Subspace valt = v.alternating_subspace();
  CHECK(valt.dim() == 2);
  for (auto& x : valt.elements()) CHECK(x.popcount() % 2 == 0);

  SymSpace a = SymSpace::standard(SpaceType::Alternating, 4);
  CHECK(a.alternating_subspace() == Subspace::full(4));

  CHECK(v.orth_complement(Subspace::full(3)).dim() == 0);
  CHECK(v.orth_complement(Subspace(3)) == Subspace::full(3));
  CHECK_THROWS_AS(v.orth_complement(Subspace::full(4)), std::invalid_argument);
}

TEST_CASE("K-type criterion: complement alternating iff vcan in U") {
  SymSpace v = SymSpace::classify(BitMatrix::identity(4));
  const BitVector& vc = *v.vcan();
  int checked = 0;
  for (int k : {1, 2}) {
    enumerate_subspaces(4, k, [&](const Subspace& u) {
      if (!v.is_totally_isotropic(u)) return;
      Subspace uperp = v.orth_complement(u);
      std::vector<BitVector> comp;
      Subspace cur = u;
      for (auto& x : uperp.elements()) {
        if (!cur.contains(x)) {
          comp.push_back(x);
          cur = join(cur, Subspace::span({x}, 4));
        }
      }
      Subspace kk = Subspace::span(comp, 4);
      bool alternating = true;
      for (auto& x : kk.elements())
        if (v.length(x)) alternating = false;
      CHECK(alternating == u.contains(vc));
      ++checked;
    });
  }
  CHECK(checked > 0);
}

TEST_CASE("aut_order equals brute-force isometry counts, n <= 4") {
  struct Case {
    SpaceType t;
    int n;
  };
  for (Case c : {Case{SpaceType::Alternating, 2}, Case{SpaceType::Alternating, 4},
                 Case{SpaceType::NonAltOdd, 1}, Case{SpaceType::NonAltOdd, 3},
                 Case{SpaceType::NonAltEven, 2}, Case{SpaceType::NonAltEven, 4}}) {
    SymSpace v = SymSpace::standard(c.t, c.n);
    auto isos = brute_isometries(v.gram());
    CHECK(Int(static_cast<unsigned long>(isos.size())) == aut_order(c.t, c.n, 2));

    for (bool flag : {false, true}) {
      auto range = isotropic_dim_range(c.t, c.n, flag);
      if (!range) continue;
      for (int k = range->first; k <= range->second; ++k) {
        std::optional<Subspace> u;
        enumerate_subspaces(c.n, k, [&](const Subspace& s) {
          if (u) return;
          if (!v.is_totally_isotropic(s)) return;
          if (v.vcan()) {
            if (s.contains(*v.vcan()) != flag) return;
          } else if (flag) {
            return;
          }
          u = s;
        });
        REQUIRE(u.has_value());
        std::size_t stab = 0;
        for (auto& m : isos) {
          bool fixes = true;
          for (int i = 0; i < u->dim() && fixes; ++i)
            if (!u->contains(m.apply(u->basis_vector(i)))) fixes = false;
          if (fixes) ++stab;
        }
        CHECK(Int(static_cast<unsigned long>(stab)) ==
              aut_order(c.t, c.n, 2, IsoShape{k, flag}));
      }
    }
  }
}

TEST_CASE("aut_order named values and errors") {
  CHECK(aut_order(SpaceType::Alternating, 4, 2) == 720);
  CHECK(aut_order(SpaceType::NonAltOdd, 3, 2) == 6);
  CHECK(aut_order(SpaceType::NonAltEven, 2, 2) == 2);
  CHECK_THROWS_AS(aut_order(SpaceType::Alternating, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(aut_order(SpaceType::NonAltOdd, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(aut_order(SpaceType::NonAltOdd, 3, 2, IsoShape{1, true}),
                  std::invalid_argument);
  CHECK_THROWS_AS(aut_order(SpaceType::NonAltEven, 4, 2, IsoShape{0, true}),
                  std::invalid_argument);
  CHECK(aut_order(SpaceType::Alternating, 2, 4) == 4 * 15);  // Sp_2(4)
}

TEST_CASE("witt_extend basic examples") {
  SymSpace v = SymSpace::classify(BitMatrix::identity(3));
  Subspace w0 = Subspace::span({BitVector(3, 0b011)}, 3);
  BitMatrix id_img(1, 3);
  id_img.set_row(0, BitVector(3, 0b011));
  BitMatrix m = witt_extend(v, w0, id_img);
  CHECK(v.is_isometry(m));
  CHECK(m.apply(BitVector(3, 0b011)) == BitVector(3, 0b011));

  SymSpace h = SymSpace::standard(SpaceType::Alternating, 2);
  Subspace e1 = Subspace::span({BitVector::unit(2, 0)}, 2);
  BitMatrix img(1, 2);
  img.set_row(0, BitVector::unit(2, 1));
  BitMatrix mh = witt_extend(h, e1, img);
  CHECK(h.is_isometry(mh));
  CHECK(mh.apply(BitVector::unit(2, 0)) == BitVector::unit(2, 1));

  // canonical-vector hypothesis: vcan -> (1,0) in F2^2 with identity gram
  SymSpace f2 = SymSpace::classify(BitMatrix::identity(2));
  Subspace wv = Subspace::span({*f2.vcan()}, 2);
  BitMatrix bad(1, 2);
  bad.set_row(0, BitVector::unit(2, 0));
  CHECK_THROWS_WITH_AS(witt_extend(f2, wv, bad), doctest::Contains("canonical-vector"),
                       std::invalid_argument);
}

TEST_CASE("witt_extend randomized suite (small)") {
  Rng rng(2024);
  for (SpaceType t : {SpaceType::Alternating, SpaceType::NonAltOdd, SpaceType::NonAltEven}) {
    int done = 0;
    while (done < 250) {
      int n;
      switch (t) {
        case SpaceType::Alternating: n = 2 * (1 + static_cast<int>(rng.below(4))); break;
        case SpaceType::NonAltOdd: n = 2 * static_cast<int>(rng.below(4)) + 1; break;
        default: n = 2 * (1 + static_cast<int>(rng.below(4))); break;
      }
      SymSpace v = SymSpace::standard(t, n);
      Subspace w0 = random_subspace(n, static_cast<int>(rng.below(n + 1)), rng);

      // images vector by vector: length and pairings against earlier
      // images are linear constraints, so sample-and-filter works
      std::vector<BitVector> to;
      bool ok = true;
      for (int i = 0; i < w0.dim() && ok; ++i) {
        BitVector w = w0.basis_vector(i);
        bool found = false;
        for (int attempt = 0; attempt < 600 && !found; ++attempt) {
          BitVector cand(n, rng.bits(n));
          if (v.length(cand) != v.length(w)) continue;
          bool good = true;
          for (int j = 0; j < static_cast<int>(to.size()) && good; ++j)
            if (v.bform(cand, to[j]) != v.bform(w, w0.basis_vector(j))) good = false;
          if (!good) continue;
          if (Subspace::span(to, n).contains(cand)) continue;
          to.push_back(cand);
          found = true;
        }
        if (!found) ok = false;
      }
      if (!ok) continue;

      BitMatrix images = to.empty() ? BitMatrix(0, n) : BitMatrix::from_rows(to);
      Subspace w0p = Subspace::span(to, n);
      bool precond = true;
      if (v.vcan()) {
        bool in_w = w0.contains(*v.vcan()), in_wp = w0p.contains(*v.vcan());
        if (in_w != in_wp) {
          precond = false;
        } else if (in_w) {
          auto c = w0.coordinates(*v.vcan());
          BitVector img = BitVector::zero(n);
          for (int i = 0; i < w0.dim(); ++i)
            if (c->get(i)) img = img + to[i];
          if (img != *v.vcan()) precond = false;
        }
      }
      if (!precond) {
        CHECK_THROWS_AS(witt_extend(v, w0, images), std::invalid_argument);
      } else {
        BitMatrix m = witt_extend(v, w0, images);
        CHECK(m.transpose() * v.gram() * m == v.gram());
        for (int i = 0; i < w0.dim(); ++i)
          CHECK(m.apply(w0.basis_vector(i)) == images.row(i));
      }
      ++done;
    }
  }
}

TEST_CASE("radical and isometry predicates") {
  SymSpace v = SymSpace::classify(BitMatrix::identity(4));
  // U totally isotropic: U = rad(U^perp)
  Subspace u = Subspace::span({*v.vcan()}, 4);
  REQUIRE(v.is_totally_isotropic(u));
  Subspace uperp = v.orth_complement(u);
  CHECK(v.radical(uperp) == u);
  CHECK(v.radical(Subspace::full(4)).dim() == 0);  // nondegeneracy

  CHECK(v.is_isometry(BitMatrix::identity(4)));
  BitMatrix swap01(4, 4);
  swap01.set(0, 1, true);
  swap01.set(1, 0, true);
  swap01.set(2, 2, true);
  swap01.set(3, 3, true);
  CHECK(v.is_isometry(swap01));  // coordinate permutations fix the dot product
  BitMatrix shear = BitMatrix::identity(4);
  shear.set(0, 1, true);
  CHECK(!v.is_isometry(shear));
  CHECK(!v.is_isometry(BitMatrix(4, 4)));  // singular
}
