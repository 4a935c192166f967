#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "selsig/rng.hpp"

namespace selsig {

// Bit-packed linear algebra over F2. Ambient dimensions are capped at 64 so
// a vector is a single machine word; the external contract is coordinate
// semantics only.

inline constexpr int kMaxDim = 64;

class BitVector {
 public:
  BitVector() : dim_(0), bits_(0) {}
  BitVector(int dim, std::uint64_t bits);
  static BitVector unit(int dim, int i);
  static BitVector zero(int dim) { return BitVector(dim, 0); }

  int dim() const { return dim_; }
  std::uint64_t bits() const { return bits_; }
  bool get(int i) const;
  void set(int i, bool v);
  bool is_zero() const { return bits_ == 0; }
  int popcount() const;

  BitVector operator+(const BitVector& o) const;  // xor
  bool operator==(const BitVector& o) const = default;

  // standard dot product, parity of AND
  bool dot(const BitVector& o) const;

  std::string to_string() const;

 private:
  int dim_;
  std::uint64_t bits_;
};

class BitMatrix {
 public:
  BitMatrix() : rows_(0), cols_(0) {}
  BitMatrix(int rows, int cols);
  static BitMatrix identity(int n);
  static BitMatrix from_rows(const std::vector<BitVector>& rows);
  static BitMatrix from_row_bits(int cols, const std::vector<std::uint64_t>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool get(int r, int c) const;
  void set(int r, int c, bool v);
  std::uint64_t row_bits(int r) const { return data_[r]; }
  void set_row(int r, const BitVector& v);
  BitVector row(int r) const { return BitVector(cols_, data_[r]); }
  void append_row(const BitVector& v);

  BitMatrix operator*(const BitMatrix& o) const;
  BitVector apply(const BitVector& x) const;  // y = M x, column convention
  BitMatrix transpose() const;
  bool operator==(const BitMatrix& o) const = default;
  bool is_zero() const;

  std::optional<BitMatrix> inverse() const;

  std::string to_string() const;

 private:
  int rows_, cols_;
  std::vector<std::uint64_t> data_;  // one word per row
};

// Reduced row echelon form and rank.
std::pair<BitMatrix, int> rref(const BitMatrix& m);

// Canonical subspace of F2^n: basis held in RREF with no zero rows, so
// equality is structural.
class Subspace {
 public:
  explicit Subspace(int ambient_dim);              // zero subspace
  Subspace(int ambient_dim, const BitMatrix& spanning_rows);
  static Subspace full(int ambient_dim);
  static Subspace span(const std::vector<BitVector>& vectors, int ambient_dim);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return basis_.rows(); }
  const BitMatrix& basis() const { return basis_; }
  BitVector basis_vector(int i) const { return basis_.row(i); }

  bool contains(const BitVector& v) const;
  bool contains(const Subspace& o) const;
  bool operator==(const Subspace& o) const = default;

  // coordinates of v in the canonical basis, if v lies in the subspace
  std::optional<BitVector> coordinates(const BitVector& v) const;

  // enumerate all 2^dim elements (ascending in coefficient order)
  std::vector<BitVector> elements() const;

  std::string to_string() const { return basis_.to_string(); }

 private:
  int ambient_dim_;
  BitMatrix basis_;
};

Subspace meet(const Subspace& a, const Subspace& b);
Subspace join(const Subspace& a, const Subspace& b);

// kernel {x : m x = 0}
Subspace nullspace(const BitMatrix& m);

// coefficients x with sum_i x_i * rows_i = target, if target lies in the
// row space
std::optional<BitVector> express_in_rows(const BitMatrix& rows, const BitVector& target);

// orthogonal complement for the standard dot product
Subspace std_complement(const Subspace& a);

// number of k-dim subspaces of F2^n (Gaussian binomial coefficient)
mpz_class gaussian_binomial(int n, int k);

// Visit every k-dim subspace of F2^n exactly once. Intended for n <= 12.
void enumerate_subspaces(int n, int k, const std::function<void(const Subspace&)>& fn);
std::vector<Subspace> enumerate_subspaces(int n, int k);

// Uniformly random k-dim subspace, optionally containing a fixed nonzero
// vector. Deterministic given the generator state.
Subspace random_subspace(int n, int k, Rng& rng);
Subspace random_subspace_containing(int n, int k, const BitVector& containing, Rng& rng);

}  // namespace selsig
