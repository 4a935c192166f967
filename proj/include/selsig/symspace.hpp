#pragma once

#include <optional>
#include <string>

#include "selsig/f2linalg.hpp"
#include "selsig/rational.hpp"

namespace selsig {

// Nondegenerate symmetric bilinear spaces over F2. Three isometry types:
// alternating (even dim), nonalternating odd, nonalternating even. A
// nonalternating space carries a canonical vector, the sum of any
// orthonormal basis.
enum class SpaceType { Alternating, NonAltOdd, NonAltEven };

std::string to_string(SpaceType t);

// type implied by (alternating?, parity); throws on alternating + odd
SpaceType space_type_of(bool alternating, int n);

class SymSpace {
 public:
  // classify a symmetric invertible Gram matrix; fills type, std_basis, vcan
  static SymSpace classify(const BitMatrix& gram);

  // standard space of the given type and dimension
  static SymSpace standard(SpaceType type, int n);
  static BitMatrix standard_gram(SpaceType type, int n);

  int dim() const { return n_; }
  const BitMatrix& gram() const { return gram_; }
  SpaceType type() const { return type_; }

  // rows are the standard-form basis: hyperbolic pairs e_1,f_1,...,then the
  // D block (vcan for odd; vcan,v_n for nonalternating even)
  const BitMatrix& std_basis() const { return std_basis_; }
  const std::optional<BitVector>& vcan() const { return vcan_; }

  bool bform(const BitVector& x, const BitVector& y) const;
  bool length(const BitVector& x) const;  // b(x,x)

  Subspace alternating_subspace() const;             // {v : b(v,v) = 0}
  Subspace orth_complement(const Subspace& u) const;
  Subspace radical(const Subspace& u) const;         // u meet u^perp
  bool is_isometry(const BitMatrix& m) const;
  bool is_totally_isotropic(const Subspace& u) const;

  // hyperbolic-pair count of the standard form
  int hyperbolic_pairs() const;

 private:
  SymSpace() = default;
  int n_ = 0;
  BitMatrix gram_;
  SpaceType type_ = SpaceType::Alternating;
  BitMatrix std_basis_;
  std::optional<BitVector> vcan_;
};

// Witt extension: extend the isometry sending the canonical basis row i of
// w0 to images.row(i) to an isometry of the whole space. Preconditions (a
// violation throws std::invalid_argument naming the failed hypothesis):
//   - images has shape dim(w0) x n with independent rows,
//   - if V is nonalternating, w0 and its image both contain vcan or neither
//     does, and sigma fixes vcan when vcan lies in w0,
//   - sigma preserves the form.
BitMatrix witt_extend(const SymSpace& v, const Subspace& w0, const BitMatrix& images);

// admissible dimension range [lo, hi] of totally isotropic subspaces of the
// given kind; empty optional when the (type, flag) combination cannot occur
std::optional<std::pair<int, int>> isotropic_dim_range(SpaceType type, int n, bool contains_vcan);

struct IsoShape {
  int k = 0;
  bool contains_vcan = false;
};

// |Aut(V)| and stabilizer orders |Aut(V,U)| over F_q, q = 2^e, for U totally
// isotropic of dimension iso->k (containing vcan or not per the flag).
Int aut_order(SpaceType type, int n, const Int& q, std::optional<IsoShape> iso = std::nullopt);

}  // namespace selsig
