#include "selsig/symspace.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

namespace selsig {

namespace {

BitVector diag_vector(const BitMatrix& gram) {
  BitVector d(gram.cols(), 0);
  for (int i = 0; i < gram.rows(); ++i) d.set(i, gram.get(i, i));
  return d;
}

// particular solution of the affine system {b(x, w_i) = rhs_i}; the i-th
// constraint row is (gram * w_i) as a functional
std::optional<BitVector> solve_pairing_system(const BitMatrix& gram,
                                              const std::vector<BitVector>& against,
                                              const std::vector<bool>& rhs) {
  int n = gram.cols();
  int m = static_cast<int>(against.size());
  std::vector<std::uint64_t> rows(m);
  std::vector<bool> b(rhs);
  for (int i = 0; i < m; ++i) rows[i] = gram.apply(against[i]).bits();
  // gaussian elimination with rhs
  std::vector<int> pivcol;
  int rank = 0;
  for (int col = 0; col < n && rank < m; ++col) {
    int piv = -1;
    for (int i = rank; i < m; ++i)
      if ((rows[i] >> col) & 1) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(b[piv], b[rank]);
    for (int i = 0; i < m; ++i)
      if (i != rank && ((rows[i] >> col) & 1)) {
        rows[i] ^= rows[rank];
        b[i] = b[i] ^ b[rank];
      }
    pivcol.push_back(col);
    ++rank;
  }
  for (int i = rank; i < m; ++i)
    if (b[i]) return std::nullopt;
  BitVector x(n, 0);
  for (int i = 0; i < rank; ++i)
    if (b[i]) x.set(pivcol[i], true);
  return x;
}

}  // namespace

std::string to_string(SpaceType t) {
  switch (t) {
    case SpaceType::Alternating: return "alternating";
    case SpaceType::NonAltOdd: return "nonalternating-odd";
    case SpaceType::NonAltEven: return "nonalternating-even";
  }
  return "?";
}

SpaceType space_type_of(bool alternating, int n) {
  if (alternating) {
    if (n % 2 != 0) throw std::invalid_argument("alternating spaces have even dimension");
    return SpaceType::Alternating;
  }
  return n % 2 ? SpaceType::NonAltOdd : SpaceType::NonAltEven;
}

BitMatrix SymSpace::standard_gram(SpaceType type, int n) {
  BitMatrix g(n, n);
  auto hyperbolic_block = [&](int at) {
    g.set(at, at + 1, true);
    g.set(at + 1, at, true);
  };
  switch (type) {
    case SpaceType::Alternating:
      if (n % 2 != 0 || n < 0) throw std::invalid_argument("alternating: even dimension required");
      for (int i = 0; i + 1 < n; i += 2) hyperbolic_block(i);
      break;
    case SpaceType::NonAltOdd:
      if (n % 2 != 1) throw std::invalid_argument("nonalternating-odd: odd dimension required");
      for (int i = 0; i + 2 < n; i += 2) hyperbolic_block(i);
      g.set(n - 1, n - 1, true);
      break;
    case SpaceType::NonAltEven:
      if (n % 2 != 0 || n < 2)
        throw std::invalid_argument("nonalternating-even: even dimension >= 2 required");
      for (int i = 0; i + 3 < n; i += 2) hyperbolic_block(i);
      // D block on the last two coordinates: b(v,v)=0, b(v,w)=1, b(w,w)=1
      g.set(n - 2, n - 1, true);
      g.set(n - 1, n - 2, true);
      g.set(n - 1, n - 1, true);
      break;
  }
  return g;
}

SymSpace SymSpace::standard(SpaceType type, int n) {
  return classify(standard_gram(type, n));
}

bool SymSpace::bform(const BitVector& x, const BitVector& y) const {
  return x.dot(gram_.apply(y));
}

bool SymSpace::length(const BitVector& x) const { return bform(x, x); }

Subspace SymSpace::alternating_subspace() const {
  BitMatrix row(1, n_);
  row.set_row(0, diag_vector(gram_));
  return nullspace(row);
}

Subspace SymSpace::orth_complement(const Subspace& u) const {
  if (u.ambient_dim() != n_) throw std::invalid_argument("orth_complement: dimension mismatch");
  BitMatrix rows(u.dim(), n_);
  for (int i = 0; i < u.dim(); ++i) rows.set_row(i, gram_.apply(u.basis_vector(i)));
  return nullspace(rows);
}

Subspace SymSpace::radical(const Subspace& u) const {
  return meet(u, orth_complement(u));
}

bool SymSpace::is_isometry(const BitMatrix& m) const {
  if (m.rows() != n_ || m.cols() != n_) return false;
  auto [r, rank] = rref(m);
  if (rank != n_) return false;
  return m.transpose() * gram_ * m == gram_;
}

bool SymSpace::is_totally_isotropic(const Subspace& u) const {
  if (u.ambient_dim() != n_) throw std::invalid_argument("is_totally_isotropic: dimension mismatch");
  const BitMatrix& b = u.basis();
  return (b * gram_ * b.transpose()).is_zero();
}

int SymSpace::hyperbolic_pairs() const {
  switch (type_) {
    case SpaceType::Alternating: return n_ / 2;
    case SpaceType::NonAltOdd: return (n_ - 1) / 2;
    case SpaceType::NonAltEven: return n_ / 2 - 1;
  }
  return 0;
}

namespace {

// Relative space: a list of ambient basis rows with the restricted Gram
// matrix; vectors inside are written in these coordinates.
struct RelSpace {
  BitMatrix rows;  // d x n ambient rows
  BitMatrix gram;  // d x d restricted form
};

RelSpace make_rel(const BitMatrix& ambient_gram, const BitMatrix& rows) {
  return {rows, rows * ambient_gram * rows.transpose()};
}

bool rel_length(const RelSpace& s, const BitVector& x) {
  return x.dot(s.gram.apply(x));
}

// smallest vector (in coordinate-integer order) passing pred
template <typename Pred>
std::optional<BitVector> first_vector(int dim, Pred pred) {
  for (std::uint64_t c = 1; c < (1ULL << dim); ++c) {
    BitVector v(dim, c);
    if (pred(v)) return v;
  }
  return std::nullopt;
}

BitVector to_ambient(const RelSpace& s, const BitVector& rel) {
  BitVector out(s.rows.cols(), 0);
  for (int i = 0; i < rel.dim(); ++i)
    if (rel.get(i)) out = out + s.rows.row(i);
  return out;
}

// orthonormal basis per the classification proof: repeatedly split off the
// smallest length-1 vector outside V_alt^perp
std::vector<BitVector> orthonormal_basis_rec(const RelSpace& s) {
  int d = s.gram.rows();
  if (d == 0) return {};
  if (d == 1) {
    if (!s.gram.get(0, 0)) throw std::logic_error("orthonormal basis: degenerate line");
    return {s.rows.row(0)};
  }
  // V_alt relative to s, and its perp inside s
  BitVector diag = diag_vector(s.gram);
  BitMatrix diag_row(1, d);
  diag_row.set_row(0, diag);
  Subspace valt = nullspace(diag_row);
  BitMatrix pair_rows(valt.dim(), d);
  for (int i = 0; i < valt.dim(); ++i) pair_rows.set_row(i, s.gram.apply(valt.basis_vector(i)));
  Subspace valt_perp = nullspace(pair_rows);
  auto v = first_vector(d, [&](const BitVector& x) {
    return rel_length(s, x) && !valt_perp.contains(x);
  });
  if (!v) throw std::logic_error("orthonormal basis: no admissible vector");
  // complement <v>^perp inside s
  BitMatrix vrow(1, d);
  vrow.set_row(0, s.gram.apply(*v));
  Subspace perp = nullspace(vrow);
  BitMatrix sub_rows(perp.dim(), s.rows.cols());
  for (int i = 0; i < perp.dim(); ++i) sub_rows.set_row(i, to_ambient(s, perp.basis_vector(i)));
  RelSpace sub{sub_rows, perp.basis() * s.gram * perp.basis().transpose()};
  std::vector<BitVector> rest = orthonormal_basis_rec(sub);
  std::vector<BitVector> out{to_ambient(s, *v)};
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// symplectic basis e_1,f_1,...,e_m,f_m of a nondegenerate alternating space
std::vector<BitVector> symplectic_basis_rec(const RelSpace& s) {
  int d = s.gram.rows();
  if (d == 0) return {};
  if (d % 2 != 0) throw std::logic_error("symplectic basis: odd dimension");
  auto x = first_vector(d, [](const BitVector&) { return true; });
  BitVector xr = *x;  // e_1 relative
  std::optional<BitVector> yr;
  for (std::uint64_t c = 1; c < (1ULL << d); ++c) {
    BitVector cand(d, c);
    if (xr.dot(s.gram.apply(cand))) {
      yr = cand;
      break;
    }
  }
  if (!yr) throw std::logic_error("symplectic basis: degenerate space");
  // project the rest onto <x,y>^perp
  BitMatrix prows(2, d);
  prows.set_row(0, s.gram.apply(xr));
  prows.set_row(1, s.gram.apply(*yr));
  Subspace perp = nullspace(prows);
  BitMatrix sub_rows(perp.dim(), s.rows.cols());
  for (int i = 0; i < perp.dim(); ++i) sub_rows.set_row(i, to_ambient(s, perp.basis_vector(i)));
  RelSpace sub{sub_rows, perp.basis() * s.gram * perp.basis().transpose()};
  std::vector<BitVector> rest = symplectic_basis_rec(sub);
  std::vector<BitVector> out{to_ambient(s, xr), to_ambient(s, *yr)};
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

SymSpace SymSpace::classify(const BitMatrix& gram) {
  int n = gram.rows();
  if (n < 1 || gram.cols() != n) throw std::invalid_argument("classify: gram must be square, n >= 1");
  if (gram.transpose() != gram) throw std::invalid_argument("classify: gram must be symmetric");
  if (!gram.inverse()) throw std::invalid_argument("classify: gram must be invertible over F2");

  SymSpace s;
  s.n_ = n;
  s.gram_ = gram;
  BitVector diag = diag_vector(gram);
  bool alternating = diag.is_zero();
  s.type_ = space_type_of(alternating, alternating ? n : n);
  if (alternating && n % 2 != 0) throw std::logic_error("classify: alternating odd-dimensional");
  if (!alternating) {
    s.type_ = n % 2 ? SpaceType::NonAltOdd : SpaceType::NonAltEven;
    // b(v, vcan) = b(v,v) for all v means gram * vcan = diag
    BitMatrix inv = *gram.inverse();
    s.vcan_ = inv.apply(diag);
  } else {
    s.type_ = SpaceType::Alternating;
  }

  RelSpace whole{BitMatrix::identity(n), gram};
  if (alternating) {
    auto basis = symplectic_basis_rec(whole);
    s.std_basis_ = BitMatrix::from_rows(basis);
  } else {
    auto onb = orthonormal_basis_rec(whole);
    assert(static_cast<int>(onb.size()) == n);
    // canonical vector = sum of the orthonormal basis
    BitVector sum = BitVector::zero(n);
    for (auto& v : onb) sum = sum + v;
    if (sum != *s.vcan_) throw std::logic_error("classify: canonical vector mismatch");
    // hyperbolic pairs from the orthonormal basis, then the D block
    std::vector<BitVector> rows;
    int m = n / 2;
    int pairs = n % 2 ? m : m - 1;
    for (int i = 1; i <= pairs; ++i) {
      BitVector e = onb[2 * i - 2] + onb[2 * i - 1];
      BitVector f = BitVector::zero(n);
      int top = n % 2 ? n : n - 1;
      for (int j = 2 * i; j <= top; ++j) f = f + onb[j - 1];
      rows.push_back(e);
      rows.push_back(f);
    }
    rows.push_back(*s.vcan_);
    if (n % 2 == 0) rows.push_back(onb[n - 1]);
    s.std_basis_ = BitMatrix::from_rows(rows);
  }
  // the standard basis must realize the standard Gram matrix
  if (s.std_basis_ * gram * s.std_basis_.transpose() != standard_gram(s.type_, n))
    throw std::logic_error("classify: standard basis does not match standard form");
  return s;
}

namespace {

// --- Witt extension, constructive ---------------------------------------
//
// All helpers work on an explicit Gram matrix with vectors in that space's
// coordinates, so the nonalternating cases can recurse into subspaces and
// drop back out through basis changes.

struct PartialIsometry {
  std::vector<BitVector> from, to;
};

BitMatrix full_matrix_from_basis_map(const std::vector<BitVector>& from,
                                     const std::vector<BitVector>& to) {
  BitMatrix b = BitMatrix::from_rows(from);
  BitMatrix bp = BitMatrix::from_rows(to);
  auto binv = b.inverse();
  if (!binv) throw std::logic_error("witt: basis map is singular");
  // A maps columns: A * b_i^T = bp_i^T, so A = (b^{-1} bp)^T
  return ((*binv) * bp).transpose();
}

// extend sigma (pairs of vectors in `p`) to an isometry of the alternating
// nondegenerate space with the given gram
BitMatrix witt_alternating(const BitMatrix& gram, const PartialIsometry& p) {
  int n = gram.rows();
  Subspace w = Subspace::span(p.from, n);
  int d = w.dim();
  // radical of W and a complement N inside W
  BitMatrix wg(d == 0 ? 0 : static_cast<int>(p.from.size()), n);
  Subspace rad(n);
  {
    BitMatrix rows(static_cast<int>(p.from.size()), n);
    for (std::size_t i = 0; i < p.from.size(); ++i) rows.set_row(static_cast<int>(i), gram.apply(p.from[i]));
    Subspace wperp = nullspace(rows);
    rad = meet(w, wperp);
  }
  std::vector<BitVector> ncomp;  // basis of a complement of rad in W
  {
    std::vector<BitVector> accum;
    for (int i = 0; i < rad.dim(); ++i) accum.push_back(rad.basis_vector(i));
    Subspace cur = rad;
    for (int i = 0; i < w.dim(); ++i) {
      BitVector cand = w.basis_vector(i);
      if (!cur.contains(cand)) {
        ncomp.push_back(cand);
        accum.push_back(cand);
        cur = Subspace::span(accum, n);
      }
    }
  }

  // sigma as a function on W
  BitMatrix wrows = BitMatrix::from_rows(p.from);
  auto sigma = [&](const BitVector& x) {
    auto c = express_in_rows(wrows, x);
    if (!c) throw std::logic_error("witt: vector outside partial domain");
    BitVector out = BitVector::zero(n);
    for (std::size_t i = 0; i < p.to.size(); ++i)
      if (c->get(static_cast<int>(i))) out = out + p.to[i];
    return out;
  };

  // symplectic basis of N (nondegenerate since N ~ W/rad W)
  std::vector<BitVector> n_basis;
  if (!ncomp.empty()) {
    RelSpace nrel = make_rel(gram, BitMatrix::from_rows(ncomp));
    n_basis = symplectic_basis_rec(nrel);
  }
  std::vector<BitVector> n_basis_img;
  for (auto& v : n_basis) n_basis_img.push_back(sigma(v));

  // hyperbolic closure of the radical: z_i with b(z_i, u_j) = delta_ij,
  // orthogonal to N and to earlier z's
  std::vector<BitVector> us, us_img;
  for (int i = 0; i < rad.dim(); ++i) {
    us.push_back(rad.basis_vector(i));
    us_img.push_back(sigma(us.back()));
  }
  auto close_hyperbolic = [&](const std::vector<BitVector>& u, const std::vector<BitVector>& nb) {
    std::vector<BitVector> zs;
    for (std::size_t i = 0; i < u.size(); ++i) {
      std::vector<BitVector> against;
      std::vector<bool> rhs;
      for (std::size_t j = 0; j < u.size(); ++j) {
        against.push_back(u[j]);
        rhs.push_back(i == j);
      }
      for (auto& v : nb) {
        against.push_back(v);
        rhs.push_back(false);
      }
      for (auto& z : zs) {
        against.push_back(z);
        rhs.push_back(false);
      }
      auto z = solve_pairing_system(gram, against, rhs);
      if (!z) throw std::logic_error("witt: hyperbolic closure failed");
      zs.push_back(*z);
    }
    return zs;
  };
  std::vector<BitVector> zs = close_hyperbolic(us, n_basis);
  std::vector<BitVector> zs_img = close_hyperbolic(us_img, n_basis_img);

  // W1 = N + rad + Z is nondegenerate; its perp is alternating nondegenerate
  std::vector<BitVector> w1 = n_basis, w1_img = n_basis_img;
  for (std::size_t i = 0; i < us.size(); ++i) {
    w1.push_back(us[i]);
    w1_img.push_back(us_img[i]);
    w1.push_back(zs[i]);
    w1_img.push_back(zs_img[i]);
  }
  auto perp_of = [&](const std::vector<BitVector>& vs) {
    BitMatrix rows(static_cast<int>(vs.size()), n);
    for (std::size_t i = 0; i < vs.size(); ++i) rows.set_row(static_cast<int>(i), gram.apply(vs[i]));
    return nullspace(rows);
  };
  Subspace c = perp_of(w1), cp = perp_of(w1_img);
  if (c.dim() != cp.dim()) throw std::logic_error("witt: complement dimension mismatch");
  std::vector<BitVector> cbasis, cpbasis;
  if (c.dim() > 0) {
    cbasis = symplectic_basis_rec(make_rel(gram, c.basis()));
    cpbasis = symplectic_basis_rec(make_rel(gram, cp.basis()));
  }

  std::vector<BitVector> from = w1, to = w1_img;
  from.insert(from.end(), cbasis.begin(), cbasis.end());
  to.insert(to.end(), cpbasis.begin(), cpbasis.end());
  if (static_cast<int>(from.size()) != n) throw std::logic_error("witt: basis incomplete");
  return full_matrix_from_basis_map(from, to);
}

// nonalternating odd case; vcan is the canonical vector of (gram)
BitMatrix witt_nonalt_odd(const BitMatrix& gram, const BitVector& vcan, PartialIsometry p) {
  int n = gram.rows();
  BitVector diag = diag_vector(gram);
  auto len = [&](const BitVector& x) { return x.dot(gram.apply(x)); };

  Subspace w = Subspace::span(p.from, n);
  bool vcan_in_w = w.contains(vcan);

  // choose a basis of W adapted to W_alt = W meet V_alt
  BitMatrix diag_row(1, n);
  diag_row.set_row(0, diag);
  Subspace valt = nullspace(diag_row);
  Subspace walt = meet(w, valt);

  BitMatrix wrows = BitMatrix::from_rows(p.from);
  auto sigma = [&](const BitVector& x) {
    auto c = express_in_rows(wrows, x);
    if (!c) throw std::logic_error("witt: vector outside partial domain");
    BitVector out = BitVector::zero(n);
    for (std::size_t i = 0; i < p.to.size(); ++i)
      if (c->get(static_cast<int>(i))) out = out + p.to[i];
    return out;
  };

  // restriction of sigma to W_alt, in V_alt coordinates
  PartialIsometry palt;
  for (int i = 0; i < walt.dim(); ++i) {
    BitVector v = walt.basis_vector(i);
    palt.from.push_back(v);
    palt.to.push_back(sigma(v));
  }
  if (walt.dim() < w.dim()) {
    // W is not inside V_alt: one extra length-1 basis vector w1
    std::optional<BitVector> w1;
    if (vcan_in_w) {
      w1 = vcan;  // sigma(vcan) = vcan was verified by the caller
    } else {
      for (int i = 0; i < w.dim(); ++i)
        if (len(w.basis_vector(i))) {
          w1 = w.basis_vector(i);
          break;
        }
    }
    if (!w1) throw std::logic_error("witt: missing length-1 basis vector");
    if (!vcan_in_w) {
      // shift w1 into V_alt by vcan on both sides
      palt.from.push_back(*w1 + vcan);
      palt.to.push_back(sigma(*w1) + vcan);
    }
  }

  // solve inside V_alt: translate to V_alt coordinates
  const BitMatrix& arows = valt.basis();
  BitMatrix agram = arows * gram * arows.transpose();
  PartialIsometry prel;
  for (std::size_t i = 0; i < palt.from.size(); ++i) {
    auto cf = express_in_rows(arows, palt.from[i]);
    auto ct = express_in_rows(arows, palt.to[i]);
    if (!cf || !ct) throw std::logic_error("witt: W_alt vector outside V_alt");
    prel.from.push_back(*cf);
    prel.to.push_back(*ct);
  }
  BitMatrix malt = witt_alternating(agram, prel);

  // assemble in the basis (vcan, V_alt rows): block diag(1, malt)
  int d = valt.dim();
  std::vector<BitVector> tb{vcan};
  for (int i = 0; i < d; ++i) tb.push_back(arows.row(i));
  BitMatrix t = BitMatrix::from_rows(tb);
  BitMatrix mt(n, n);
  mt.set(0, 0, true);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (malt.get(i, j)) mt.set(i + 1, j + 1, true);
  BitMatrix tt = t.transpose();
  auto tti = tt.inverse();
  if (!tti) throw std::logic_error("witt: singular basis");
  return tt * mt * (*tti);
}

BitMatrix witt_nonalt_even(const BitMatrix& gram, const BitVector& vcan, const PartialIsometry& p) {
  int n = gram.rows();
  // embed into the (n+1)-dimensional nonalternating odd space
  BitMatrix g1(n + 1, n + 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (gram.get(i, j)) g1.set(i, j, true);
  g1.set(n, n, true);
  auto lift = [&](const BitVector& v, bool top) {
    BitVector out(n + 1, v.bits());
    out.set(n, top);
    return out;
  };
  PartialIsometry p1;
  for (std::size_t i = 0; i < p.from.size(); ++i) {
    p1.from.push_back(lift(p.from[i], false));
    p1.to.push_back(lift(p.to[i], false));
  }
  p1.from.push_back(BitVector::unit(n + 1, n));
  p1.to.push_back(BitVector::unit(n + 1, n));
  BitVector vcan1 = lift(vcan, true);
  BitMatrix m1 = witt_nonalt_odd(g1, vcan1, p1);
  // m1 fixes e_{n+1}, hence preserves V = e_{n+1}^perp; take the n x n block
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (m1.get(n, i) != (i == n ? true : false))
      throw std::logic_error("witt: embedding did not fix the added line");
    for (int j = 0; j < n; ++j)
      if (m1.get(i, j)) m.set(i, j, true);
  }
  return m;
}

}  // namespace

BitMatrix witt_extend(const SymSpace& v, const Subspace& w0, const BitMatrix& images) {
  int n = v.dim();
  int d = w0.dim();
  if (w0.ambient_dim() != n)
    throw std::invalid_argument("witt_extend: subspace has wrong ambient dimension");
  if (images.rows() != d || (d > 0 && images.cols() != n))
    throw std::invalid_argument("witt_extend: sigma must map each basis vector of W0");
  auto [ir, irank] = rref(images);
  if (irank != d) throw std::invalid_argument("witt_extend: sigma is not injective");
  Subspace w0p(n, images);

  // canonical-vector hypotheses come first: they are the obstruction named
  // by the theorem
  if (v.vcan()) {
    const BitVector& vc = *v.vcan();
    bool in_w = w0.contains(vc), in_wp = w0p.contains(vc);
    if (in_w != in_wp)
      throw std::invalid_argument(
          "witt_extend: canonical-vector hypothesis fails (W0 and W0' must both contain vcan or neither)");
    if (in_w) {
      auto c = w0.coordinates(vc);
      BitVector img = BitVector::zero(n);
      for (int i = 0; i < d; ++i)
        if (c->get(i)) img = img + images.row(i);
      if (img != vc)
        throw std::invalid_argument("witt_extend: canonical-vector hypothesis fails (sigma must fix vcan)");
    }
  }

  // sigma must preserve the form on W0
  const BitMatrix& b = w0.basis();
  if (b * v.gram() * b.transpose() != images * v.gram() * images.transpose())
    throw std::invalid_argument("witt_extend: sigma is not an isometry (Gram mismatch)");

  PartialIsometry p;
  for (int i = 0; i < d; ++i) {
    p.from.push_back(w0.basis_vector(i));
    p.to.push_back(images.row(i));
  }

  BitMatrix m;
  switch (v.type()) {
    case SpaceType::Alternating:
      m = witt_alternating(v.gram(), p);
      break;
    case SpaceType::NonAltOdd:
      m = witt_nonalt_odd(v.gram(), *v.vcan(), p);
      break;
    case SpaceType::NonAltEven:
      m = witt_nonalt_even(v.gram(), *v.vcan(), p);
      break;
  }

  if (!v.is_isometry(m)) throw std::logic_error("witt_extend: constructed map is not an isometry");
  for (int i = 0; i < d; ++i)
    if (m.apply(w0.basis_vector(i)) != images.row(i))
      throw std::logic_error("witt_extend: constructed map does not restrict to sigma");
  return m;
}

std::optional<std::pair<int, int>> isotropic_dim_range(SpaceType type, int n, bool contains_vcan) {
  switch (type) {
    case SpaceType::Alternating:
      if (contains_vcan) return std::nullopt;  // no canonical vector
      return std::make_pair(0, n / 2);
    case SpaceType::NonAltOdd:
      if (contains_vcan) return std::nullopt;  // vcan has length 1
      return std::make_pair(0, (n - 1) / 2);
    case SpaceType::NonAltEven:
      if (contains_vcan) return std::make_pair(1, n / 2);
      return std::make_pair(0, n / 2 - 1);
  }
  return std::nullopt;
}

Int aut_order(SpaceType type, int n, const Int& q, std::optional<IsoShape> iso) {
  if (n < 0) throw std::invalid_argument("aut_order: negative dimension");
  if (q < 2 || mpz_popcount(q.get_mpz_t()) != 1)
    throw std::invalid_argument("aut_order: q must be a power of 2");
  if (n == 0) {
    if (type != SpaceType::Alternating || (iso && iso->k != 0))
      throw std::invalid_argument("aut_order: empty space is alternating with k = 0");
    return 1;
  }
  bool even = (n % 2 == 0);
  if ((type == SpaceType::NonAltOdd) == even)
    throw std::invalid_argument("aut_order: dimension parity inconsistent with type");
  if (type == SpaceType::Alternating && !even)
    throw std::invalid_argument("aut_order: alternating spaces have even dimension");

  int k = iso ? iso->k : ((type == SpaceType::NonAltEven) ? 0 : 0);
  bool flag = iso ? iso->contains_vcan : false;
  auto range = isotropic_dim_range(type, n, flag);
  if (!range || k < range->first || k > range->second)
    throw std::invalid_argument("aut_order: inadmissible (type, n, k, vcan-flag) combination");

  auto prod_qi = [&](int count) {  // prod_{i=1..count} (q^i - 1)
    Int r = 1, p = 1;
    for (int i = 1; i <= count; ++i) {
      p *= q;
      r *= p - 1;
    }
    return r;
  };
  auto prod_q2i = [&](int count) {  // prod_{i=1..count} (q^{2i} - 1)
    Int r = 1, p = 1, q2 = q * q;
    for (int i = 1; i <= count; ++i) {
      p *= q2;
      r *= p - 1;
    }
    return r;
  };
  auto qpow_int = [&](long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
  };

  int m = n / 2;  // for odd n this is (n-1)/2
  switch (type) {
    case SpaceType::Alternating:
    case SpaceType::NonAltOdd:
      return qpow_int(static_cast<long>(m) * m) * prod_qi(k) * prod_q2i(m - k);
    case SpaceType::NonAltEven:
      if (flag) return qpow_int(static_cast<long>(m) * m) * prod_qi(k - 1) * prod_q2i(m - k);
      return qpow_int(static_cast<long>(m) * m - k) * prod_qi(k) * prod_q2i(m - k - 1);
  }
  throw std::logic_error("aut_order: unreachable");
}

}  // namespace selsig
