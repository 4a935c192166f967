#include "selsig/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "selsig/f2linalg.hpp"

namespace selsig {

namespace {

constexpr int kRhoCut = 40;  // residual mass beyond this is < 1e-9

std::vector<double> class_cdf(const Signature& sig) {
  std::vector<double> cdf;
  double acc = 0;
  for (int k = 0; k <= sig.r1 / 2; ++k) {
    acc += p_k(sig, k).get_d();
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;
  return cdf;
}

std::vector<double> rho_cdf(const Signature& sig) {
  std::vector<double> cdf;
  double acc = 0;
  for (int rho = 0; rho < kRhoCut; ++rho) {
    acc += eta_malle(sig, rho, 1e-12).value;
    cdf.push_back(acc);
  }
  cdf.push_back(1.0);  // fold the residual into rho = 40
  return cdf;
}

int draw_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < cdf.size(); ++i)
    if (u < cdf[i]) return static_cast<int>(i);
  return static_cast<int>(cdf.size()) - 1;
}

// the exact tables are expensive to build; memoize per signature
const std::vector<double>& cached_cdf(const Signature& sig, bool class_table) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, bool>, std::unique_ptr<std::vector<double>>> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_tuple(sig.r1, sig.r2, class_table);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto table = std::make_unique<std::vector<double>>(class_table ? class_cdf(sig) : rho_cdf(sig));
    it = cache.emplace(key, std::move(table)).first;
  }
  return *it->second;
}

}  // namespace

int sample_class(const Signature& sig, Rng& rng) {
  return draw_from_cdf(cached_cdf(sig, true), rng);
}

int sample_rho(const Signature& sig, Rng& rng) {
  return draw_from_cdf(cached_cdf(sig, false), rng);
}

int sample_s_given(const Signature& sig, int k, int rho, Rng& rng) {
  int r1 = sig.r1, r2 = sig.r2;
  if (k < 0 || k > r1 / 2) throw std::invalid_argument("sample_s_given: k out of range");
  if (rho < 0) throw std::invalid_argument("sample_s_given: rho >= 0 required");
  int m = r1 + r2 + rho;
  int t = r1 + r2;
  int r = rho + k + r2;
  if (m > kMaxDim) throw std::invalid_argument("sample_s_given: ambient dimension exceeds 64");
  BitVector e = BitVector::unit(m, 0);
  std::vector<BitVector> yrows;
  for (int i = 0; i < r; ++i) yrows.push_back(BitVector::unit(m, m - 1 - i));
  Subspace y = Subspace::span(yrows, m);
  Subspace sub = random_subspace_containing(m, t, e, rng);
  return t - meet(sub, y).dim();
}

FieldSample simulate_field(const Signature& sig, Rng& rng) {
  FieldSample f;
  f.rho = sample_rho(sig, rng);
  f.k = sample_class(sig, rng);
  f.s = sample_s_given(sig, f.k, f.rho, rng);
  f.rho_plus = f.rho + f.k;
  f.rho_inf = sig.r1 - f.s;
  f.split = (f.rho_inf == f.k);
  return f;
}

DistCheck compare_distributions(const std::string& name, const std::vector<std::string>& cells,
                                const std::vector<long long>& counts,
                                const std::vector<double>& expected, long long trials,
                                double sigma_threshold) {
  if (counts.size() != expected.size() || cells.size() != expected.size())
    throw std::invalid_argument("compare_distributions: support mismatch");
  if (trials <= 0) throw std::invalid_argument("compare_distributions: trials must be positive");
  DistCheck out;
  out.name = name;
  out.cells = cells;
  out.expected = expected;
  out.pass = true;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double emp = static_cast<double>(counts[i]) / static_cast<double>(trials);
    out.empirical.push_back(emp);
    double dev = std::fabs(emp - expected[i]);
    out.max_abs_dev = std::max(out.max_abs_dev, dev);
    double var = expected[i] * (1.0 - expected[i]) / static_cast<double>(trials);
    double z;
    if (var <= 0) {
      z = (dev == 0) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      z = (emp - expected[i]) / std::sqrt(var);
    }
    out.z.push_back(z);
    if (std::fabs(z) > sigma_threshold) out.pass = false;
  }
  return out;
}

namespace {

struct Counters {
  std::vector<long long> k, rho, rho_plus, s, split;

  explicit Counters(const Signature& sig)
      : k(static_cast<std::size_t>(sig.r1 / 2 + 1), 0),
        rho(kRhoCut + 1, 0),
        rho_plus(static_cast<std::size_t>(kRhoCut + 1 + sig.r1 / 2), 0),
        s(static_cast<std::size_t>(sig.r1), 0),
        split(2, 0) {}

  void add(const FieldSample& f) {
    ++k[static_cast<std::size_t>(f.k)];
    ++rho[static_cast<std::size_t>(f.rho)];
    ++rho_plus[static_cast<std::size_t>(f.rho_plus)];
    ++s[static_cast<std::size_t>(f.s - 1)];
    ++split[f.split ? 1 : 0];
  }

  void merge(const Counters& o) {
    auto acc = [](std::vector<long long>& a, const std::vector<long long>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    acc(k, o.k);
    acc(rho, o.rho);
    acc(rho_plus, o.rho_plus);
    acc(s, o.s);
    acc(split, o.split);
  }
};

std::vector<std::string> index_cells(const std::string& prefix, int lo, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + "=" + std::to_string(lo + i));
  return out;
}

}  // namespace

SimReport simulate_run(const Signature& sig, long long trials, std::uint64_t seed, int threads,
                       double sigma_threshold, double eps) {
  if (trials <= 0) throw std::invalid_argument("simulate_run: trials must be positive");
  if (threads < 1) threads = 1;
  const int chunks = 64;

  Rng master(seed);
  std::vector<Counters> partial(static_cast<std::size_t>(chunks), Counters(sig));
  std::vector<long long> chunk_trials(static_cast<std::size_t>(chunks), trials / chunks);
  for (long long i = 0; i < trials % chunks; ++i) ++chunk_trials[static_cast<std::size_t>(i)];

  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int c = next.fetch_add(1);
      if (c >= chunks) break;
      Rng rng = master.fork(static_cast<std::uint64_t>(c));
      for (long long i = 0; i < chunk_trials[static_cast<std::size_t>(c)]; ++i)
        partial[static_cast<std::size_t>(c)].add(simulate_field(sig, rng));
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  Counters total(sig);
  for (auto& p : partial) total.merge(p);

  SimReport rep{sig, trials, seed, sigma_threshold, {}, 0.0, true};

  auto add_check = [&](const std::string& name, const std::vector<std::string>& cells,
                       const std::vector<long long>& counts, const std::vector<double>& expected) {
    DistCheck c = compare_distributions(name, cells, counts, expected, trials, sigma_threshold);
    rep.max_abs_dev = std::max(rep.max_abs_dev, c.max_abs_dev);
    if (!c.pass) rep.pass = false;
    rep.checks.push_back(std::move(c));
  };

  {
    std::vector<double> expect;
    for (int k = 0; k <= sig.r1 / 2; ++k) expect.push_back(p_k(sig, k).get_d());
    add_check("k", index_cells("k", 0, sig.r1 / 2 + 1), total.k, expect);
  }
  // rho and rho+ folded beyond 12 cells: deep cells carry too few hits to
  // compare individually
  auto folded = [&](const std::vector<long long>& src, int shown,
                    const std::function<double(int)>& exp_of, const std::string& prefix) {
    std::vector<long long> counts(src.begin(), src.begin() + shown);
    long long rest = 0;
    for (std::size_t i = static_cast<std::size_t>(shown); i < src.size(); ++i) rest += src[i];
    counts.push_back(rest);
    std::vector<double> expect;
    double acc = 0;
    for (int i = 0; i < shown; ++i) {
      double v = exp_of(i);
      expect.push_back(v);
      acc += v;
    }
    expect.push_back(std::max(0.0, 1.0 - acc));
    auto cells = index_cells(prefix, 0, shown);
    cells.push_back(prefix + ">=" + std::to_string(shown));
    add_check(prefix, cells, counts, expect);
  };
  folded(total.rho, 12, [&](int rho) { return eta_malle(sig, rho, eps).value; }, "rho");
  folded(total.rho_plus, 12, [&](int rp) { return eta_plus(sig, rp, eps).value; }, "rho+");
  {
    std::vector<double> expect;
    for (int s = 1; s <= sig.r1; ++s) expect.push_back(sigrank(sig, s, eps).value);
    add_check("s", index_cells("s", 1, sig.r1), total.s, expect);
  }
  {
    double p = split_prob(sig, eps).value;
    add_check("split", {"no", "yes"}, total.split, {1.0 - p, p});
  }
  return rep;
}

std::string render(const SimReport& rep) {
  std::ostringstream os;
  os << "simulate r1=" << rep.sig.r1 << " r2=" << rep.sig.r2 << " trials=" << rep.trials
     << " seed=" << rep.seed << " sigma=" << rep.sigma_threshold << "\n";
  os.setf(std::ios::fixed);
  for (const auto& c : rep.checks) {
    os << "[" << c.name << "]\n";
    for (std::size_t i = 0; i < c.expected.size(); ++i) {
      os.precision(6);
      os << "  " << c.cells[i] << " expected " << c.expected[i] << " empirical " << c.empirical[i];
      os.precision(2);
      os << " z " << c.z[i] << "\n";
    }
    os << "  max|dev| ";
    os.precision(6);
    os << c.max_abs_dev << (c.pass ? " : OK" : " : FAIL") << "\n";
  }
  os << (rep.pass ? "PASS" : "FAIL") << " max|dev| ";
  os.precision(6);
  os << rep.max_abs_dev << "\n";
  return os.str();
}

}  // namespace selsig
