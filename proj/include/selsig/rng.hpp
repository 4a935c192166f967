#pragma once

#include <cstdint>
#include <random>

namespace selsig {

// Deterministic RNG. mt19937_64 output is pinned by the C++ standard, so
// sequences are reproducible across platforms. All derived quantities
// (uniform doubles, bounded integers) are computed here from raw 64-bit
// words rather than through std distributions, whose output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, n), n >= 1, unbiased via rejection
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // uniform in [lo, hi] inclusive
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // uniform in [0, 1) with 53 bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bit() { return (next_u64() >> 63) != 0; }

  // n lowest bits uniform, n <= 64
  std::uint64_t bits(int n) {
    return n == 0 ? 0 : next_u64() >> (64 - n);
  }

  // independent child stream; deterministic in (seed, index)
  Rng fork(std::uint64_t index) const { return Rng(mix(seed_, index)); }

  // splitmix64 finalizer over seed ^ f(index)
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace selsig
