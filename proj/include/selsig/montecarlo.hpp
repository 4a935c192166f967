#pragma once

#include <string>
#include <vector>

#include "selsig/heuristics.hpp"
#include "selsig/rng.hpp"

namespace selsig {

// Simulation of the heuristic model: a random maximal-isotropic image class
// (k), an independent 2-rank (rho), and a uniformly random unit subspace,
// realized by explicit linear algebra over F2.

struct FieldSample {
  int k = 0;         // dim(im phi meet V_inf)
  int rho = 0;       // dim ker phi
  int rho_plus = 0;  // rho + k
  int s = 0;         // unit signature rank
  int rho_inf = 0;   // r1 - s
  bool split = false;  // rho_inf == k
};

// draw k with probability p_k(sig, k)
int sample_class(const Signature& sig, Rng& rng);

// draw rho from the 2-rank distribution truncated at rho = 40, with the
// residual mass folded into the last cell
int sample_rho(const Signature& sig, Rng& rng);

// H3 linear algebra at fixed (k, rho): X = F2^(r1+r2+rho), e = e_1, Y a
// coordinate subspace of dim rho+k+r2 avoiding e, E uniform of dim r1+r2
// containing e; returns s = r1+r2 - dim(E meet Y)
int sample_s_given(const Signature& sig, int k, int rho, Rng& rng);

FieldSample simulate_field(const Signature& sig, Rng& rng);

struct DistCheck {
  std::string name;
  std::vector<std::string> cells;
  std::vector<double> expected;   // probabilities, summing to ~1
  std::vector<double> empirical;  // frequencies
  std::vector<double> z;          // per-cell z-scores under binomial variance
  double max_abs_dev = 0.0;
  bool pass = false;
};

// z-scores of empirical counts against exact cell probabilities; fails when
// any |z| exceeds the threshold
DistCheck compare_distributions(const std::string& name, const std::vector<std::string>& cells,
                                const std::vector<long long>& counts,
                                const std::vector<double>& expected, long long trials,
                                double sigma_threshold = 4.0);

struct SimReport {
  Signature sig;
  long long trials = 0;
  std::uint64_t seed = 0;
  double sigma_threshold = 4.0;
  std::vector<DistCheck> checks;  // k, rho, rho+, s, split
  double max_abs_dev = 0.0;
  bool pass = false;
};

// run the full pipeline; trials are divided over fixed chunks with derived
// RNG streams, so the result is independent of the worker count
SimReport simulate_run(const Signature& sig, long long trials, std::uint64_t seed, int threads,
                       double sigma_threshold = 4.0, double eps = 1e-9);

std::string render(const SimReport& rep);

}  // namespace selsig
