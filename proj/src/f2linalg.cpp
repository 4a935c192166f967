#include "selsig/f2linalg.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

namespace selsig {

namespace {

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw std::invalid_argument("f2linalg: dimension must be in [0, 64], got " +
                                std::to_string(dim));
  }
}

std::uint64_t mask(int dim) {
  return dim == 64 ? ~0ULL : ((1ULL << dim) - 1);
}

}  // namespace

BitVector::BitVector(int dim, std::uint64_t bits) : dim_(dim), bits_(bits) {
  check_dim(dim);
  if ((bits_ & ~mask(dim)) != 0) {
    throw std::invalid_argument("BitVector: coordinates beyond dim must be zero");
  }
}

BitVector BitVector::unit(int dim, int i) {
  BitVector v(dim, 0);
  v.set(i, true);
  return v;
}

bool BitVector::get(int i) const {
  assert(i >= 0 && i < dim_);
  return (bits_ >> i) & 1;
}

void BitVector::set(int i, bool v) {
  assert(i >= 0 && i < dim_);
  if (v)
    bits_ |= (1ULL << i);
  else
    bits_ &= ~(1ULL << i);
}

int BitVector::popcount() const { return std::popcount(bits_); }

BitVector BitVector::operator+(const BitVector& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("BitVector: dimension mismatch");
  return BitVector(dim_, bits_ ^ o.bits_);
}

bool BitVector::dot(const BitVector& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("BitVector: dimension mismatch");
  return std::popcount(bits_ & o.bits_) & 1;
}

std::string BitVector::to_string() const {
  std::string s;
  for (int i = 0; i < dim_; ++i) s += get(i) ? '1' : '0';
  return s;
}

BitMatrix::BitMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows, 0) {
  check_dim(cols);
  if (rows < 0) throw std::invalid_argument("BitMatrix: negative row count");
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rows) {
  if (rows.empty()) return BitMatrix(0, 0);
  BitMatrix m(static_cast<int>(rows.size()), rows[0].dim());
  for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(static_cast<int>(i), rows[i]);
  return m;
}

BitMatrix BitMatrix::from_row_bits(int cols, const std::vector<std::uint64_t>& rows) {
  BitMatrix m(static_cast<int>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.data_[i] = rows[i];
    if ((rows[i] & ~mask(cols)) != 0)
      throw std::invalid_argument("BitMatrix: row bits beyond cols");
  }
  return m;
}

bool BitMatrix::get(int r, int c) const {
  assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
  return (data_[r] >> c) & 1;
}

void BitMatrix::set(int r, int c, bool v) {
  assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
  if (v)
    data_[r] |= (1ULL << c);
  else
    data_[r] &= ~(1ULL << c);
}

void BitMatrix::set_row(int r, const BitVector& v) {
  if (v.dim() != cols_) throw std::invalid_argument("BitMatrix: row dimension mismatch");
  data_[r] = v.bits();
}

void BitMatrix::append_row(const BitVector& v) {
  if (rows_ == 0 && cols_ == 0) cols_ = v.dim();
  if (v.dim() != cols_) throw std::invalid_argument("BitMatrix: row dimension mismatch");
  data_.push_back(v.bits());
  ++rows_;
}

BitMatrix BitMatrix::operator*(const BitMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("BitMatrix: shape mismatch in product");
  BitMatrix out(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i) {
    std::uint64_t acc = 0;
    std::uint64_t row = data_[i];
    while (row) {
      int j = std::countr_zero(row);
      row &= row - 1;
      acc ^= o.data_[j];
    }
    out.data_[i] = acc;
  }
  return out;
}

BitVector BitMatrix::apply(const BitVector& x) const {
  if (x.dim() != cols_) throw std::invalid_argument("BitMatrix: apply dimension mismatch");
  std::uint64_t out = 0;
  for (int i = 0; i < rows_; ++i) {
    if (std::popcount(data_[i] & x.bits()) & 1) out |= (1ULL << i);
  }
  return BitVector(rows_, out);
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (get(i, j)) out.set(j, i, true);
  return out;
}

bool BitMatrix::is_zero() const {
  for (auto w : data_)
    if (w) return false;
  return true;
}

std::optional<BitMatrix> BitMatrix::inverse() const {
  if (rows_ != cols_) return std::nullopt;
  int n = rows_;
  std::vector<std::uint64_t> a(data_), inv(n);
  for (int i = 0; i < n; ++i) inv[i] = 1ULL << i;
  int row = 0;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = row; r < n; ++r)
      if ((a[r] >> col) & 1) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(a[piv], a[row]);
    std::swap(inv[piv], inv[row]);
    for (int r = 0; r < n; ++r)
      if (r != row && ((a[r] >> col) & 1)) {
        a[r] ^= a[row];
        inv[r] ^= inv[row];
      }
    ++row;
  }
  return BitMatrix::from_row_bits(n, inv);
}

std::string BitMatrix::to_string() const {
  std::string s;
  for (int i = 0; i < rows_; ++i) {
    s += row(i).to_string();
    if (i + 1 < rows_) s += '\n';
  }
  return s;
}

std::pair<BitMatrix, int> rref(const BitMatrix& m) {
  std::vector<std::uint64_t> a(m.rows());
  for (int i = 0; i < m.rows(); ++i) a[i] = m.row_bits(i);
  int rank = 0;
  for (int col = 0; col < m.cols() && rank < m.rows(); ++col) {
    int piv = -1;
    for (int r = rank; r < m.rows(); ++r)
      if ((a[r] >> col) & 1) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    for (int r = 0; r < m.rows(); ++r)
      if (r != rank && ((a[r] >> col) & 1)) a[r] ^= a[rank];
    ++rank;
  }
  return {BitMatrix::from_row_bits(m.cols(), a), rank};
}

Subspace::Subspace(int ambient_dim) : ambient_dim_(ambient_dim), basis_(0, ambient_dim) {
  check_dim(ambient_dim);
}

Subspace::Subspace(int ambient_dim, const BitMatrix& spanning_rows) : ambient_dim_(ambient_dim) {
  check_dim(ambient_dim);
  if (spanning_rows.rows() > 0 && spanning_rows.cols() != ambient_dim)
    throw std::invalid_argument("Subspace: spanning rows have wrong ambient dimension");
  auto [r, rank] = rref(spanning_rows);
  basis_ = BitMatrix(rank, ambient_dim);
  for (int i = 0; i < rank; ++i) basis_.set_row(i, r.row(i));
}

Subspace Subspace::full(int ambient_dim) {
  return Subspace(ambient_dim, BitMatrix::identity(ambient_dim));
}

Subspace Subspace::span(const std::vector<BitVector>& vectors, int ambient_dim) {
  BitMatrix m(static_cast<int>(vectors.size()), ambient_dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) m.set_row(static_cast<int>(i), vectors[i]);
  return Subspace(ambient_dim, m);
}

bool Subspace::contains(const BitVector& v) const {
  if (v.dim() != ambient_dim_) throw std::invalid_argument("Subspace: dimension mismatch");
  std::uint64_t x = v.bits();
  for (int i = 0; i < basis_.rows(); ++i) {
    std::uint64_t row = basis_.row_bits(i);
    int piv = std::countr_zero(row);
    if ((x >> piv) & 1) x ^= row;
  }
  return x == 0;
}

bool Subspace::contains(const Subspace& o) const {
  for (int i = 0; i < o.dim(); ++i)
    if (!contains(o.basis_vector(i))) return false;
  return true;
}

std::optional<BitVector> Subspace::coordinates(const BitVector& v) const {
  if (v.dim() != ambient_dim_) throw std::invalid_argument("Subspace: dimension mismatch");
  std::uint64_t x = v.bits(), coeff = 0;
  for (int i = 0; i < basis_.rows(); ++i) {
    std::uint64_t row = basis_.row_bits(i);
    int piv = std::countr_zero(row);
    if ((x >> piv) & 1) {
      x ^= row;
      coeff |= (1ULL << i);
    }
  }
  if (x != 0) return std::nullopt;
  return BitVector(basis_.rows(), coeff);
}

std::vector<BitVector> Subspace::elements() const {
  std::vector<BitVector> out;
  out.reserve(1ULL << dim());
  for (std::uint64_t c = 0; c < (1ULL << dim()); ++c) {
    std::uint64_t x = 0;
    std::uint64_t cc = c;
    while (cc) {
      int i = std::countr_zero(cc);
      cc &= cc - 1;
      x ^= basis_.row_bits(i);
    }
    out.emplace_back(ambient_dim_, x);
  }
  return out;
}

Subspace join(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("join: ambient dimension mismatch");
  BitMatrix m(a.dim() + b.dim(), a.ambient_dim());
  for (int i = 0; i < a.dim(); ++i) m.set_row(i, a.basis_vector(i));
  for (int i = 0; i < b.dim(); ++i) m.set_row(a.dim() + i, b.basis_vector(i));
  return Subspace(a.ambient_dim(), m);
}

Subspace nullspace(const BitMatrix& m) {
  auto [r, rank] = rref(m);
  int n = m.cols();
  std::vector<int> pivot_of_row(rank);
  std::vector<bool> is_pivot(n, false);
  for (int i = 0; i < rank; ++i) {
    int piv = std::countr_zero(r.row_bits(i));
    pivot_of_row[i] = piv;
    is_pivot[piv] = true;
  }
  BitMatrix basis(0, n);
  for (int j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    BitVector v(n, 0);
    v.set(j, true);
    for (int i = 0; i < rank; ++i)
      if (r.get(i, j)) v.set(pivot_of_row[i], true);
    basis.append_row(v);
  }
  return Subspace(n, basis);
}

Subspace std_complement(const Subspace& a) {
  return nullspace(a.basis());
}

std::optional<BitVector> express_in_rows(const BitMatrix& a, const BitVector& target) {
  int r = a.rows(), n = a.cols();
  if (target.dim() != n) throw std::invalid_argument("express_in_rows: dimension mismatch");
  std::vector<std::uint64_t> rows(r), comb(r);
  for (int i = 0; i < r; ++i) {
    rows[i] = a.row_bits(i);
    comb[i] = 1ULL << i;
  }
  std::uint64_t x = target.bits(), xc = 0;
  int rank = 0;
  for (int col = 0; col < n && rank < r; ++col) {
    int piv = -1;
    for (int i = rank; i < r; ++i)
      if ((rows[i] >> col) & 1) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(comb[piv], comb[rank]);
    for (int i = 0; i < r; ++i)
      if (i != rank && ((rows[i] >> col) & 1)) {
        rows[i] ^= rows[rank];
        comb[i] ^= comb[rank];
      }
    if ((x >> col) & 1) {
      x ^= rows[rank];
      xc ^= comb[rank];
    }
    ++rank;
  }
  if (x != 0) return std::nullopt;
  return BitVector(r, xc);
}

Subspace meet(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("meet: ambient dimension mismatch");
  // (A^perp + B^perp)^perp for the standard dot product
  Subspace na = std_complement(a);
  Subspace nb = std_complement(b);
  return std_complement(join(na, nb));
}

mpz_class gaussian_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  mpz_class num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), 2, n - i);
    num *= t - 1;
    mpz_ui_pow_ui(t.get_mpz_t(), 2, k - i);
    den *= t - 1;
  }
  return num / den;
}

namespace {

// An RREF basis is determined by its pivot columns plus arbitrary entries at
// non-pivot columns to the right of each pivot, so enumerating (pivot set,
// free entries) visits every subspace exactly once.
void enumerate_rows_rec(int n, const std::vector<int>& pivots, std::uint64_t pivot_mask,
                        std::size_t i, std::vector<std::uint64_t>& rows,
                        const std::function<void(const Subspace&)>& fn) {
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
    rows.push_back(row);
    enumerate_rows_rec(n, pivots, pivot_mask, i + 1, rows, fn);
    rows.pop_back();
  }
}

void enumerate_pivot_sets(int n, int k, const std::function<void(const Subspace&)>& fn) {
  std::vector<int> pivots(k);
  for (int i = 0; i < k; ++i) pivots[i] = i;
  while (true) {
    std::uint64_t pivot_mask = 0;
    for (int p : pivots) pivot_mask |= 1ULL << p;
    std::vector<std::uint64_t> rows;
    enumerate_rows_rec(n, pivots, pivot_mask, 0, rows, fn);
    // next k-combination of {0..n-1}
    int i = k - 1;
    while (i >= 0 && pivots[i] == n - k + i) --i;
    if (i < 0) break;
    ++pivots[i];
    for (int j = i + 1; j < k; ++j) pivots[j] = pivots[j - 1] + 1;
  }
}

}  // namespace

void enumerate_subspaces(int n, int k, const std::function<void(const Subspace&)>& fn) {
  check_dim(n);
  if (k < 0 || k > n) throw std::invalid_argument("enumerate_subspaces: need 0 <= k <= n");
  if (k == 0) {
    fn(Subspace(n));
    return;
  }
  enumerate_pivot_sets(n, k, fn);
}

std::vector<Subspace> enumerate_subspaces(int n, int k) {
  std::vector<Subspace> out;
  enumerate_subspaces(n, k, [&](const Subspace& s) { out.push_back(s); });
  return out;
}

Subspace random_subspace(int n, int k, Rng& rng) {
  check_dim(n);
  if (k < 0 || k > n) throw std::invalid_argument("random_subspace: need 0 <= k <= n");
  // rejection: draw vectors, keep those that increase the rank; every
  // ordered independent tuple is equally likely
  std::vector<std::uint64_t> rows;
  std::vector<std::uint64_t> reduced;  // row echelon copy for rank tests
  while (static_cast<int>(rows.size()) < k) {
    std::uint64_t v = rng.bits(n);
    std::uint64_t x = v;
    for (std::uint64_t r : reduced) {
      std::uint64_t piv = r & -r;
      if (x & piv) x ^= r;
    }
    if (x == 0) continue;
    rows.push_back(v);
    reduced.push_back(x);
  }
  return Subspace(n, BitMatrix::from_row_bits(n, rows));
}

Subspace random_subspace_containing(int n, int k, const BitVector& containing, Rng& rng) {
  check_dim(n);
  if (containing.dim() != n)
    throw std::invalid_argument("random_subspace: containing vector has wrong dimension");
  if (containing.is_zero())
    throw std::invalid_argument("random_subspace: containing vector must be nonzero");
  if (k < 1 || k > n) throw std::invalid_argument("random_subspace: need 1 <= k <= n");
  // Subspaces of dim k containing v correspond to (k-1)-dim subspaces of
  // X/<v>. Realize the quotient as the coordinate hyperplane x_j = 0 where
  // j is the lowest set bit of v; uniformity is preserved by the bijection.
  int j = std::countr_zero(containing.bits());
  std::vector<std::uint64_t> rows;
  std::vector<std::uint64_t> reduced;
  while (static_cast<int>(rows.size()) < k - 1) {
    std::uint64_t v = rng.bits(n) & ~(1ULL << j);
    std::uint64_t x = v;
    for (std::uint64_t r : reduced) {
      std::uint64_t piv = r & -r;
      if (x & piv) x ^= r;
    }
    if (x == 0) continue;
    rows.push_back(v);
    reduced.push_back(x);
  }
  rows.push_back(containing.bits());
  return Subspace(n, BitMatrix::from_row_bits(n, rows));
}

}  // namespace selsig
