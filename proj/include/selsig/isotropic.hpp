#pragma once

#include <string>
#include <vector>

#include "selsig/symspace.hpp"

namespace selsig {

// Orthogonal direct sum V = W perp W' with block-diagonal form. The two
// dimensions must have the same parity; the opposite-parity case is
// rejected.
class OrthoSum {
 public:
  OrthoSum(SymSpace w, SymSpace wp);

  const SymSpace& W() const { return w_; }
  const SymSpace& Wp() const { return wp_; }
  const SymSpace& V() const { return v_; }
  int n() const { return w_.dim(); }
  int np() const { return wp_.dim(); }
  int dim() const { return n() + np(); }

  BitVector embed_W(const BitVector& x) const;
  BitVector embed_Wp(const BitVector& x) const;
  BitVector project_W(const BitVector& x) const;
  BitVector project_Wp(const BitVector& x) const;
  Subspace embed_W(const Subspace& u) const;
  Subspace embed_Wp(const Subspace& u) const;

 private:
  SymSpace w_, wp_, v_;
};

// Equivalence-class label of a maximal totally isotropic subspace under
// Aut(W) x Aut(W'): the intersection dimensions plus, for nonalternating
// even factors, whether the canonical vectors lie in the intersections.
struct IsoClass {
  SpaceType wtype, wptype;
  int n = 0, np = 0;
  int k = 0, kp = 0;
  bool wcan_in_U = false, wcan_in_Up = false;

  bool operator==(const IsoClass&) const = default;
  std::string to_string() const;
};

// all labels of cases (i)-(v), ordered by (k, vcan flag)
std::vector<IsoClass> class_labels(SpaceType wtype, int n, SpaceType wptype, int np);

bool label_valid(const IsoClass& c);

// type of a complement of U in U^perp inside a space of the given type
SpaceType ktype_of(SpaceType wtype, int dim_k, bool wcan_in_U);

// Structure data of a maximal totally isotropic subspace S of W perp W':
// S = U perp {w + tau w} perp U' for the unique isometry tau between the
// chosen complements.
struct MaxIsotropic {
  Subspace S;        // in V coordinates
  Subspace U, Up;    // S meet W and S meet W', in W / W' coordinates
  Subspace K, Kp;    // chosen complements of U, U' in their perps
  BitMatrix tau;     // row i = image in W' coordinates of K.basis_vector(i)

  MaxIsotropic() : S(0), U(0), Up(0), K(0), Kp(0) {}
};

// rebuild S = U perp diag(tau) perp U'
Subspace assemble(const OrthoSum& vs, const Subspace& u, const Subspace& k, const BitMatrix& tau,
                  const Subspace& up);

IsoClass label_of(const OrthoSum& vs, const Subspace& s);

// Decompose a maximal totally isotropic subspace; complements are chosen
// deterministically (smallest vectors in coordinate order), tau is recovered
// from the projections of S meet (K perp K').
MaxIsotropic decompose(const OrthoSum& vs, const Subspace& s);

// explicit representative built from the standard bases
MaxIsotropic representative(const OrthoSum& vs, const IsoClass& label);

struct OrbitStats {
  Int stab;   // |Aut(S)| inside Aut(W) x Aut(W')
  Int orbit;  // |Aut(W)| |Aut(W')| / stab
  Int total;  // number of maximal totally isotropic subspaces of V
};

OrbitStats orbit_stats(const IsoClass& label, const Int& q);

// Closed-form |Aut(S)| in q-Pochhammer shape for the three type pairs it
// covers (both odd; even with W' nonalternating; even with W' alternating,
// wtype nonalternating, n <= np). Used as a cross-check on the quotient
// formula.
std::optional<Int> stab_closed_form(const IsoClass& label, const Int& q);

// every maximal totally isotropic subspace, dim V <= 12; the callback form
// streams them without materializing the list
void brute_enumerate_mts(const SymSpace& v, const std::function<void(const Subspace&)>& fn);
std::vector<Subspace> brute_enumerate_mts(const OrthoSum& vs);
std::vector<Subspace> brute_enumerate_mts(const SymSpace& v);

struct MassReport {
  std::vector<IsoClass> labels;
  std::vector<Int> orbit_sizes;
  Int orbit_sum;
  Int formula_total;
  Int brute_total;
  bool ok = false;
};

// verify:  sum of orbit sizes  ==  brute-force count  ==  |Aut V| / |Aut(V,S)|
MassReport mass_check(SpaceType wtype, int n, SpaceType wptype, int np);

}  // namespace selsig
