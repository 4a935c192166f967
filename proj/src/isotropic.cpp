#include "selsig/isotropic.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace selsig {

namespace {

BitMatrix block_diag(const BitMatrix& a, const BitMatrix& b) {
  BitMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a.get(i, j)) out.set(i, j, true);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      if (b.get(i, j)) out.set(a.rows() + i, a.cols() + j, true);
  return out;
}

// rad(W_alt) contained in U is automatic unless W is nonalternating of even
// dimension, where it means wcan in U
bool rad_condition(SpaceType t, bool wcan_in_U) {
  return t == SpaceType::NonAltEven ? wcan_in_U : true;
}

}  // namespace

OrthoSum::OrthoSum(SymSpace w, SymSpace wp)
    : w_(std::move(w)),
      wp_(std::move(wp)),
      v_(SymSpace::classify(block_diag(w_.gram(), wp_.gram()))) {
  if ((w_.dim() % 2) != (wp_.dim() % 2))
    throw std::invalid_argument(
        "OrthoSum: dim W and dim W' must have the same parity "
        "(opposite-parity sums are not supported)");
}

BitVector OrthoSum::embed_W(const BitVector& x) const {
  if (x.dim() != n()) throw std::invalid_argument("embed_W: dimension mismatch");
  return BitVector(dim(), x.bits());
}

BitVector OrthoSum::embed_Wp(const BitVector& x) const {
  if (x.dim() != np()) throw std::invalid_argument("embed_Wp: dimension mismatch");
  return BitVector(dim(), x.bits() << n());
}

BitVector OrthoSum::project_W(const BitVector& x) const {
  if (x.dim() != dim()) throw std::invalid_argument("project_W: dimension mismatch");
  return BitVector(n(), x.bits() & ((n() == 64) ? ~0ULL : ((1ULL << n()) - 1)));
}

BitVector OrthoSum::project_Wp(const BitVector& x) const {
  if (x.dim() != dim()) throw std::invalid_argument("project_Wp: dimension mismatch");
  return BitVector(np(), x.bits() >> n());
}

Subspace OrthoSum::embed_W(const Subspace& u) const {
  std::vector<BitVector> rows;
  for (int i = 0; i < u.dim(); ++i) rows.push_back(embed_W(u.basis_vector(i)));
  return Subspace::span(rows, dim());
}

Subspace OrthoSum::embed_Wp(const Subspace& u) const {
  std::vector<BitVector> rows;
  for (int i = 0; i < u.dim(); ++i) rows.push_back(embed_Wp(u.basis_vector(i)));
  return Subspace::span(rows, dim());
}

std::string IsoClass::to_string() const {
  std::ostringstream os;
  os << selsig::to_string(wtype) << n << " | " << selsig::to_string(wptype) << np
     << " : k=" << k << " k'=" << kp;
  if (wtype == SpaceType::NonAltEven) os << (wcan_in_U ? " wcan in U" : " wcan not in U");
  if (wptype == SpaceType::NonAltEven) os << (wcan_in_Up ? " wcan' in U'" : " wcan' not in U'");
  return os.str();
}

bool label_valid(const IsoClass& c) {
  if ((c.n % 2) != (c.np % 2)) return false;
  if (c.kp != c.k + (c.np - c.n) / 2) return false;
  if (c.wtype != SpaceType::NonAltEven && c.wcan_in_U) return false;
  if (c.wptype != SpaceType::NonAltEven && c.wcan_in_Up) return false;
  auto rw = isotropic_dim_range(c.wtype, c.n, c.wcan_in_U);
  if (!rw || c.k < rw->first || c.k > rw->second) return false;
  auto rp = isotropic_dim_range(c.wptype, c.np, c.wcan_in_Up);
  if (!rp || c.kp < rp->first || c.kp > rp->second) return false;
  return rad_condition(c.wtype, c.wcan_in_U) == rad_condition(c.wptype, c.wcan_in_Up);
}

std::vector<IsoClass> class_labels(SpaceType wtype, int n, SpaceType wptype, int np) {
  if ((n % 2) != (np % 2))
    throw std::invalid_argument("class_labels: dimensions must have the same parity");
  std::vector<IsoClass> out;
  for (int k = 0; k <= (n + 1) / 2; ++k) {
    for (bool fw : {false, true}) {
      for (bool fp : {false, true}) {
        IsoClass c{wtype, wptype, n, np, k, k + (np - n) / 2, fw, fp};
        if (label_valid(c)) out.push_back(c);
      }
    }
  }
  return out;
}

SpaceType ktype_of(SpaceType wtype, int dim_k, bool wcan_in_U) {
  if (dim_k == 0) return SpaceType::Alternating;
  switch (wtype) {
    case SpaceType::Alternating: return SpaceType::Alternating;
    case SpaceType::NonAltOdd: return SpaceType::NonAltOdd;
    case SpaceType::NonAltEven:
      return wcan_in_U ? SpaceType::Alternating : SpaceType::NonAltEven;
  }
  throw std::logic_error("ktype_of: unreachable");
}

Subspace assemble(const OrthoSum& vs, const Subspace& u, const Subspace& k, const BitMatrix& tau,
                  const Subspace& up) {
  std::vector<BitVector> rows;
  for (int i = 0; i < u.dim(); ++i) rows.push_back(vs.embed_W(u.basis_vector(i)));
  for (int i = 0; i < k.dim(); ++i)
    rows.push_back(vs.embed_W(k.basis_vector(i)) + vs.embed_Wp(tau.row(i)));
  for (int i = 0; i < up.dim(); ++i) rows.push_back(vs.embed_Wp(up.basis_vector(i)));
  return Subspace::span(rows, vs.dim());
}

IsoClass label_of(const OrthoSum& vs, const Subspace& s) {
  Subspace w_emb = vs.embed_W(Subspace::full(vs.n()));
  Subspace wp_emb = vs.embed_Wp(Subspace::full(vs.np()));
  Subspace u_emb = meet(s, w_emb), up_emb = meet(s, wp_emb);
  IsoClass c;
  c.wtype = vs.W().type();
  c.wptype = vs.Wp().type();
  c.n = vs.n();
  c.np = vs.np();
  c.k = u_emb.dim();
  c.kp = up_emb.dim();
  if (vs.W().vcan()) c.wcan_in_U = u_emb.contains(vs.embed_W(*vs.W().vcan()));
  if (vs.Wp().vcan()) c.wcan_in_Up = up_emb.contains(vs.embed_Wp(*vs.Wp().vcan()));
  return c;
}

namespace {

// smallest-first complement of u inside container (u contained in container)
Subspace lex_complement(const Subspace& u, const Subspace& container) {
  int target = container.dim() - u.dim();
  std::vector<BitVector> chosen;
  Subspace cur = u;
  for (auto& x : container.elements()) {
    if (static_cast<int>(chosen.size()) == target) break;
    if (x.is_zero() || cur.contains(x)) continue;
    chosen.push_back(x);
    cur = join(cur, Subspace::span({x}, container.ambient_dim()));
  }
  if (static_cast<int>(chosen.size()) != target)
    throw std::logic_error("lex_complement: could not complete complement");
  return Subspace::span(chosen, container.ambient_dim());
}

}  // namespace

MaxIsotropic decompose(const OrthoSum& vs, const Subspace& s) {
  if (s.ambient_dim() != vs.dim())
    throw std::invalid_argument("decompose: S has wrong ambient dimension");
  if (!vs.V().is_totally_isotropic(s))
    throw std::invalid_argument("decompose: S is not totally isotropic");
  if (2 * s.dim() != vs.dim())
    throw std::invalid_argument("decompose: S is not maximal (dimension must be (n+n')/2)");

  MaxIsotropic out;
  out.S = s;
  Subspace w_emb = vs.embed_W(Subspace::full(vs.n()));
  Subspace wp_emb = vs.embed_Wp(Subspace::full(vs.np()));
  {
    Subspace ue = meet(s, w_emb);
    std::vector<BitVector> rows;
    for (int i = 0; i < ue.dim(); ++i) rows.push_back(vs.project_W(ue.basis_vector(i)));
    out.U = Subspace::span(rows, vs.n());
    Subspace upe = meet(s, wp_emb);
    rows.clear();
    for (int i = 0; i < upe.dim(); ++i) rows.push_back(vs.project_Wp(upe.basis_vector(i)));
    out.Up = Subspace::span(rows, vs.np());
  }
  int k = out.U.dim(), kp = out.Up.dim();
  if (vs.n() - vs.np() != 2 * (k - kp))
    throw std::logic_error("decompose: dimension relation n - n' = 2(k - k') failed");
  IsoClass lbl = label_of(vs, s);
  if (!label_valid(lbl)) throw std::logic_error("decompose: incompatible isotropy types");

  out.K = lex_complement(out.U, vs.W().orth_complement(out.U));
  out.Kp = lex_complement(out.Up, vs.Wp().orth_complement(out.Up));
  if (out.K.dim() != out.Kp.dim() || out.K.dim() != s.dim() - k - kp)
    throw std::logic_error("decompose: complement dimensions inconsistent");

  // recover tau from the projections of S meet (K perp K')
  Subspace kk = join(vs.embed_W(out.K), vs.embed_Wp(out.Kp));
  Subspace stilde = meet(s, kk);
  if (stilde.dim() != out.K.dim())
    throw std::logic_error("decompose: diagonal part has wrong dimension");
  std::vector<BitVector> proj_w, proj_wp;
  for (int i = 0; i < stilde.dim(); ++i) {
    proj_w.push_back(vs.project_W(stilde.basis_vector(i)));
    proj_wp.push_back(vs.project_Wp(stilde.basis_vector(i)));
  }
  BitMatrix pw = proj_w.empty() ? BitMatrix(0, vs.n()) : BitMatrix::from_rows(proj_w);
  out.tau = BitMatrix(out.K.dim(), vs.np());
  for (int i = 0; i < out.K.dim(); ++i) {
    auto coeff = express_in_rows(pw, out.K.basis_vector(i));
    if (!coeff) throw std::logic_error("decompose: projection to K is not onto");
    BitVector img = BitVector::zero(vs.np());
    for (int j = 0; j < coeff->dim(); ++j)
      if (coeff->get(j)) img = img + proj_wp[j];
    out.tau.set_row(i, img);
  }

  BitMatrix kg = out.K.basis() * vs.W().gram() * out.K.basis().transpose();
  BitMatrix kpg = out.tau * vs.Wp().gram() * out.tau.transpose();
  if (kg != kpg) throw std::logic_error("decompose: recovered tau is not an isometry");
  if (assemble(vs, out.U, out.K, out.tau, out.Up) != s)
    throw std::logic_error("decompose: reassembly mismatch");
  return out;
}

MaxIsotropic representative(const OrthoSum& vs, const IsoClass& label) {
  if (!label_valid(label) || label.wtype != vs.W().type() || label.wptype != vs.Wp().type() ||
      label.n != vs.n() || label.np != vs.np())
    throw std::invalid_argument("representative: invalid label for this orthogonal sum");

  // U from the standard basis: e_1..e_k, or e_1..e_{k-1} plus wcan; the
  // complement keeps the remaining standard rows in order
  auto build_side = [](const SymSpace& w, int k, bool flag) {
    int n = w.dim();
    const BitMatrix& sb = w.std_basis();
    std::vector<BitVector> u_rows, k_rows;
    if (flag) {
      for (int i = 1; i < k; ++i) u_rows.push_back(sb.row(2 * (i - 1)));
      u_rows.push_back(*w.vcan());
      for (int r = 2 * (k - 1); r < n - 2; ++r) k_rows.push_back(sb.row(r));
    } else {
      for (int i = 1; i <= k; ++i) u_rows.push_back(sb.row(2 * (i - 1)));
      for (int r = 2 * k; r < n; ++r) k_rows.push_back(sb.row(r));
    }
    return std::make_pair(u_rows, k_rows);
  };

  auto [u_rows, k_rows] = build_side(vs.W(), label.k, label.wcan_in_U);
  auto [up_rows, kp_rows] = build_side(vs.Wp(), label.kp, label.wcan_in_Up);
  if (k_rows.size() != kp_rows.size())
    throw std::logic_error("representative: complement sizes differ");

  MaxIsotropic out;
  out.U = Subspace::span(u_rows, vs.n());
  out.Up = Subspace::span(up_rows, vs.np());
  out.K = Subspace::span(k_rows, vs.n());
  out.Kp = Subspace::span(kp_rows, vs.np());

  BitMatrix ordered_k = k_rows.empty() ? BitMatrix(0, vs.n()) : BitMatrix::from_rows(k_rows);
  BitMatrix ordered_kp = kp_rows.empty() ? BitMatrix(0, vs.np()) : BitMatrix::from_rows(kp_rows);
  {
    BitMatrix ga = ordered_k * vs.W().gram() * ordered_k.transpose();
    BitMatrix gb = ordered_kp * vs.Wp().gram() * ordered_kp.transpose();
    if (ga != gb) throw std::logic_error("representative: leftover bases are not isometric");
  }
  out.tau = BitMatrix(out.K.dim(), vs.np());
  for (int i = 0; i < out.K.dim(); ++i) {
    auto coeff = express_in_rows(ordered_k, out.K.basis_vector(i));
    if (!coeff) throw std::logic_error("representative: K basis outside ordered rows");
    BitVector img = BitVector::zero(vs.np());
    for (int j = 0; j < coeff->dim(); ++j)
      if (coeff->get(j)) img = img + ordered_kp.row(j);
    out.tau.set_row(i, img);
  }

  out.S = assemble(vs, out.U, out.K, out.tau, out.Up);
  if (2 * out.S.dim() != vs.dim())
    throw std::logic_error("representative: S has wrong dimension");
  if (!vs.V().is_totally_isotropic(out.S))
    throw std::logic_error("representative: S is not totally isotropic");
  if (!(label_of(vs, out.S) == label)) throw std::logic_error("representative: label mismatch");
  return out;
}

OrbitStats orbit_stats(const IsoClass& label, const Int& q) {
  if (!label_valid(label)) throw std::invalid_argument("orbit_stats: invalid label");
  Int aw = aut_order(label.wtype, label.n, q);
  Int awp = aut_order(label.wptype, label.np, q);
  Int awu = aut_order(label.wtype, label.n, q, IsoShape{label.k, label.wcan_in_U});
  Int awpu = aut_order(label.wptype, label.np, q, IsoShape{label.kp, label.wcan_in_Up});
  int dim_k = label.n - 2 * label.k;
  Int ak = aut_order(ktype_of(label.wtype, dim_k, label.wcan_in_U), dim_k, q);

  OrbitStats st;
  Int num = awu * awpu;
  if (!mpz_divisible_p(num.get_mpz_t(), ak.get_mpz_t()))
    throw std::logic_error("orbit_stats: stabilizer quotient is not integral");
  st.stab = num / ak;

  if (auto closed = stab_closed_form(label, q); closed && *closed != st.stab)
    throw std::logic_error("orbit_stats: closed form disagrees with quotient formula");

  Int prod = aw * awp;
  if (!mpz_divisible_p(prod.get_mpz_t(), st.stab.get_mpz_t()))
    throw std::logic_error("orbit_stats: orbit size is not integral");
  st.orbit = prod / st.stab;

  int m = (label.n + label.np) / 2;
  bool v_alt = label.wtype == SpaceType::Alternating && label.wptype == SpaceType::Alternating;
  SpaceType vt = v_alt ? SpaceType::Alternating : SpaceType::NonAltEven;
  Int av = aut_order(vt, 2 * m, q);
  Int avs = aut_order(vt, 2 * m, q, IsoShape{m, !v_alt});
  if (!mpz_divisible_p(av.get_mpz_t(), avs.get_mpz_t()))
    throw std::logic_error("orbit_stats: total count is not integral");
  st.total = av / avs;
  return st;
}

namespace {

Int prod_qm(const Int& q, int m) {  // prod_{i=1..m} (q^i - 1)
  Int r = 1, p = 1;
  for (int i = 1; i <= m; ++i) {
    p *= q;
    r *= p - 1;
  }
  return r;
}

}  // namespace

std::optional<Int> stab_closed_form(const IsoClass& label, const Int& q) {
  // stated for the shape n <= np with W nonalternating; |Aut(S)| is
  // symmetric in the two sides, so swap if needed
  IsoClass c = label;
  if (c.n > c.np) {
    std::swap(c.wtype, c.wptype);
    std::swap(c.n, c.np);
    std::swap(c.k, c.kp);
    std::swap(c.wcan_in_U, c.wcan_in_Up);
  }
  if (c.wtype == SpaceType::Alternating) return std::nullopt;
  int r1 = c.n, r2 = (c.np - c.n) / 2, k = c.k;

  // (q)_j = prod_qm(q, j) / q^{j(j+1)/2} and (q^2)_j likewise; collect the
  // q-power so the result stays integral
  long qexp = 0;
  Int num = 1;
  auto mul_q1 = [&](int j) {
    num *= prod_qm(q, j);
    qexp -= static_cast<long>(j) * (j + 1) / 2;
  };
  auto mul_q2 = [&](int j) {
    num *= prod_qm(q * q, j);
    qexp -= static_cast<long>(j) * (j + 1);
  };
  long base = static_cast<long>(r1 + r2 - 1) * (r1 + r2) / 2 + static_cast<long>(r2) * r2 +
              static_cast<long>(r2) * k + static_cast<long>(k) * k;

  if (c.wtype == SpaceType::NonAltOdd && c.wptype == SpaceType::NonAltOdd) {
    qexp += base;
    mul_q1(k);
    mul_q1(k + r2);
    mul_q2((r1 - 1) / 2 - k);
  } else if (c.wtype == SpaceType::NonAltEven && c.wptype == SpaceType::NonAltEven) {
    if (!c.wcan_in_U) {
      qexp += base;
      mul_q1(k);
      mul_q1(k + r2);
      mul_q2(r1 / 2 - 1 - k);
    } else {
      qexp += base + r1 - 2 * k;
      mul_q1(k - 1);
      mul_q1(k + r2 - 1);
      mul_q2(r1 / 2 - k);
    }
  } else if (c.wtype == SpaceType::NonAltEven && c.wptype == SpaceType::Alternating) {
    // the printed closed form carries (q)_{k+r2-1} here, which contradicts
    // both the worked n = 4 examples and the stabilizer quotient; the
    // consistent factor is (q)_{k+r2}
    qexp += base + r1 + r2 - k;
    mul_q1(k - 1);
    mul_q1(k + r2);
    mul_q2(r1 / 2 - k);
  } else {
    return std::nullopt;
  }

  if (qexp < 0) return std::nullopt;
  Int qe;
  mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(qexp));
  return num * qe;
}

std::vector<Subspace> brute_enumerate_mts(const OrthoSum& vs) {
  return brute_enumerate_mts(vs.V());
}

std::vector<Subspace> brute_enumerate_mts(const SymSpace& v) {
  std::vector<Subspace> out;
  brute_enumerate_mts(v, [&](const Subspace& s) { out.push_back(s); });
  return out;
}

void brute_enumerate_mts(const SymSpace& v, const std::function<void(const Subspace&)>& fn) {
  int n = v.dim();
  if (n > 12) throw std::invalid_argument("brute_enumerate_mts: dim V must be <= 12");
  if (n % 2 != 0)
    throw std::invalid_argument("brute_enumerate_mts: odd-dimensional spaces have no maximal "
                                "totally isotropic subspace of dimension n/2");
  int target = n / 2;
  const BitMatrix& gram = v.gram();
  std::vector<std::uint64_t> gram_rows(n);
  for (int i = 0; i < n; ++i) gram_rows[i] = gram.row_bits(i);
  std::uint64_t diag = 0;
  for (int i = 0; i < n; ++i)
    if (gram.get(i, i)) diag |= 1ULL << i;

  auto pair_with = [&](std::uint64_t x) {  // functional y -> b(x,y)
    std::uint64_t out = 0;
    while (x) {
      int j = std::countr_zero(x);
      x &= x - 1;
      out ^= gram_rows[j];
    }
    return out;
  };

  std::vector<int> pivots(target);
  std::vector<std::uint64_t> rows, paired;

  std::function<void(std::size_t, std::uint64_t)> fill_rows = [&](std::size_t i,
                                                                  std::uint64_t pivot_mask) {
    if (i == pivots.size()) {
      fn(Subspace(n, BitMatrix::from_row_bits(n, rows)));
      return;
    }
    std::vector<int> free_cols;
    for (int c = pivots[i] + 1; c < n; ++c)
      if (!((pivot_mask >> c) & 1)) free_cols.push_back(c);
    std::uint64_t nfree = free_cols.size();
    for (std::uint64_t pat = 0; pat < (1ULL << nfree); ++pat) {
      std::uint64_t row = 1ULL << pivots[i];
      for (std::uint64_t b = 0; b < nfree; ++b)
        if ((pat >> b) & 1) row |= 1ULL << free_cols[b];
      if (std::popcount(row & diag) & 1) continue;  // rows must be isotropic
      bool orth = true;
      for (std::uint64_t p : paired)
        if (std::popcount(p & row) & 1) {
          orth = false;
          break;
        }
      if (!orth) continue;
      rows.push_back(row);
      paired.push_back(pair_with(row));
      fill_rows(i + 1, pivot_mask);
      rows.pop_back();
      paired.pop_back();
    }
  };

  for (int i = 0; i < target; ++i) pivots[i] = i;
  while (true) {
    std::uint64_t pivot_mask = 0;
    for (int p : pivots) pivot_mask |= 1ULL << p;
    rows.clear();
    paired.clear();
    fill_rows(0, pivot_mask);
    int i = target - 1;
    while (i >= 0 && pivots[i] == n - target + i) --i;
    if (i < 0) break;
    ++pivots[i];
    for (int j = i + 1; j < target; ++j) pivots[j] = pivots[j - 1] + 1;
  }
}

MassReport mass_check(SpaceType wtype, int n, SpaceType wptype, int np) {
  if (n + np > 12)
    throw std::invalid_argument("mass_check: n + n' must be <= 12 for the brute-force arm");
  MassReport rep;
  rep.labels = class_labels(wtype, n, wptype, np);
  if (rep.labels.empty()) throw std::logic_error("mass_check: no equivalence classes");
  rep.orbit_sum = 0;
  for (auto& lbl : rep.labels) {
    OrbitStats st = orbit_stats(lbl, 2);
    rep.orbit_sizes.push_back(st.orbit);
    rep.orbit_sum += st.orbit;
    rep.formula_total = st.total;
  }
  OrthoSum vs(SymSpace::standard(wtype, n), SymSpace::standard(wptype, np));
  unsigned long count = 0;
  brute_enumerate_mts(vs.V(), [&](const Subspace&) { ++count; });
  rep.brute_total = count;
  rep.ok = (rep.orbit_sum == rep.brute_total) && (rep.orbit_sum == rep.formula_total);
  return rep;
}

}  // namespace selsig
