#include "selsig/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "selsig/cubicforms.hpp"
#include "selsig/heuristics.hpp"
#include "selsig/isotropic.hpp"
#include "selsig/montecarlo.hpp"

namespace selsig {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct OutputSink {
  std::string format = "text";
  std::string path;

  void write(std::ostream& fallback, const std::string& payload) const {
    if (path.empty()) {
      fallback << payload;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << payload;
  }
};

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string csv_join(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += row[i];
  }
  out += '\n';
  return out;
}

std::string format_tr(const TruncatedReal& v) {
  std::ostringstream os;
  os << v.to_string(6) << "+-";
  os.setf(std::ios::scientific);
  os.precision(1);
  os << std::max(v.err, 1e-300);
  return os.str();
}

json tr_json(const TruncatedReal& v) { return json{{"err", v.err}, {"value", v.value}}; }

// fractions over the least common denominator, the way the k-table prints
std::vector<std::string> common_denominator_strings(const std::vector<Rational>& values) {
  Int lcm = 1;
  for (const Rational& v : values) {
    Int den = v.get_den();
    Int g;
    mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
    lcm = lcm / g * den;
  }
  std::vector<std::string> out;
  for (const Rational& v : values) {
    Int num = v.get_num() * (lcm / v.get_den());
    out.push_back(lcm == 1 ? num.get_str() : num.get_str() + "/" + lcm.get_str());
  }
  return out;
}

std::pair<SpaceType, int> parse_side(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("side must look like alt:4 or nonalt:3, got " + text);
  std::string kind = text.substr(0, colon);
  int n = std::stoi(text.substr(colon + 1));
  if (n < 1 || n > 32) throw std::invalid_argument("side dimension out of range: " + text);
  if (kind == "alt") {
    if (n % 2) throw std::invalid_argument("alternating spaces have even dimension");
    return {SpaceType::Alternating, n};
  }
  if (kind == "nonalt") return {n % 2 ? SpaceType::NonAltOdd : SpaceType::NonAltEven, n};
  throw std::invalid_argument("unknown space kind (use alt or nonalt): " + kind);
}

std::string label_flags(const IsoClass& c) {
  std::string s;
  if (c.wtype == SpaceType::NonAltEven) s += c.wcan_in_U ? " wcan-in-U" : " wcan-out";
  if (c.wptype == SpaceType::NonAltEven) s += c.wcan_in_Up ? " wcan'-in-U'" : " wcan'-out";
  return s;
}

// ---- tables ------------------------------------------------------------

int run_tables(const std::string& which, int r1, int r2, double eps, const OutputSink& sink,
               std::ostream& out) {
  Signature sig(r1, r2);
  json j{{"schema_version", kSchemaVersion}, {"command", "tables"}, {"r1", r1}, {"r2", r2},
         {"eps", eps}};
  std::ostringstream text;
  std::string csv = "table,index,value,err\n";

  bool all = which == "all";
  if (all || which == "k") {
    std::vector<Rational> values;
    for (int k = 0; k <= r1 / 2; ++k) values.push_back(p_k(sig, k));
    std::vector<std::string> cells = common_denominator_strings(values);
    json arr = json::array();
    for (auto& c : cells) arr.push_back(c);
    j["k"] = arr;
    if (all) text << "k: ";
    for (std::size_t i = 0; i < cells.size(); ++i) text << (i ? " " : "") << cells[i];
    text << "\n";
    for (std::size_t i = 0; i < cells.size(); ++i)
      csv += csv_join({"k", std::to_string(i), cells[i], "0"});
  }
  if (all || which == "density") {
    json arr = json::array();
    if (all) text << "density:";
    for (int rp = 0; rp <= 2; ++rp) {
      TruncatedReal v = eta_plus(sig, rp, eps);
      arr.push_back(tr_json(v));
      text << (rp || all ? " " : "") << format_tr(v);
      std::ostringstream ev;
      ev << v.err;
      csv += csv_join({"density", std::to_string(rp), v.to_string(9), ev.str()});
    }
    text << "\n";
    j["density"] = arr;
  }
  if (all || which == "moment") {
    json arr = json::array();
    if (all) text << "moment: ";
    for (int t = 1; t <= 4; ++t) {
      std::string m = rational_to_string(moment(sig, t));
      arr.push_back(m);
      text << (t > 1 ? " " : "") << m;
      csv += csv_join({"moment", std::to_string(t), m, "0"});
    }
    text << "\n";
    j["moment"] = arr;
  }
  if (all || which == "sigrank") {
    json arr = json::array();
    if (all) text << "sigrank:";
    for (int s = 1; s <= r1; ++s) {
      TruncatedReal v = sigrank(sig, s, eps);
      arr.push_back(tr_json(v));
      text << (s > 1 || all ? " " : "") << format_tr(v);
      std::ostringstream ev;
      ev << v.err;
      csv += csv_join({"sigrank", std::to_string(s), v.to_string(9), ev.str()});
    }
    text << "\n";
    j["sigrank"] = arr;
  }
  if (all || which == "split") {
    TruncatedReal v = split_prob(sig, eps);
    j["split"] = tr_json(v);
    if (all) text << "split: ";
    text << format_tr(v) << "\n";
    std::ostringstream ev;
    ev << v.err;
    csv += csv_join({"split", "0", v.to_string(9), ev.str()});
  }

  if (sink.format == "json")
    sink.write(out, dump_json(j));
  else if (sink.format == "csv")
    sink.write(out, csv);
  else
    sink.write(out, text.str());
  return kExitOk;
}

// ---- mass-check and class-list ------------------------------------------

int run_mass_check(const std::string& left, const std::string& right, const OutputSink& sink,
                   std::ostream& out) {
  auto [wt, n] = parse_side(left);
  auto [wpt, np] = parse_side(right);
  if (n + np > 12) {
    out << "mass-check: n + n' = " << n + np << " exceeds the brute-force limit 12\n";
    return kExitResourceLimit;
  }
  MassReport rep = mass_check(wt, n, wpt, np);
  std::ostringstream text;
  text << "orbits ";
  for (std::size_t i = 0; i < rep.orbit_sizes.size(); ++i)
    text << (i ? "+" : "") << rep.orbit_sizes[i].get_str();
  text << " = " << rep.orbit_sum.get_str() << " = brute " << rep.brute_total.get_str()
       << " = formula " << rep.formula_total.get_str() << " : " << (rep.ok ? "OK" : "FAIL")
       << "\n";
  if (sink.format == "json") {
    json orbits = json::array();
    for (auto& o : rep.orbit_sizes) orbits.push_back(o.get_str());
    json j{{"schema_version", kSchemaVersion}, {"command", "mass-check"},
           {"left", left},          {"right", right},
           {"orbits", orbits},      {"orbit_sum", rep.orbit_sum.get_str()},
           {"brute", rep.brute_total.get_str()}, {"formula", rep.formula_total.get_str()},
           {"ok", rep.ok}};
    sink.write(out, dump_json(j));
  } else {
    sink.write(out, text.str());
  }
  return rep.ok ? kExitOk : kExitCheckFailed;
}

int run_class_list(const std::string& left, const std::string& right, long long qv,
                   const OutputSink& sink, std::ostream& out) {
  auto [wt, n] = parse_side(left);
  auto [wpt, np] = parse_side(right);
  Int q = static_cast<long>(qv);
  OrthoSum vs(SymSpace::standard(wt, n), SymSpace::standard(wpt, np));
  auto labels = class_labels(wt, n, wpt, np);
  std::ostringstream text;
  json jl = json::array();
  for (auto& lbl : labels) {
    OrbitStats st = orbit_stats(lbl, q);
    MaxIsotropic rep = representative(vs, lbl);
    text << "k=" << lbl.k << " k'=" << lbl.kp << label_flags(lbl) << "  |Aut(S)|="
         << st.stab.get_str() << "  orbit=" << st.orbit.get_str() << "\n";
    json rows = json::array();
    for (int i = 0; i < rep.S.dim(); ++i) {
      std::string row = rep.S.basis_vector(i).to_string();
      std::string shown = row.substr(0, static_cast<std::size_t>(n)) + "|" +
                          row.substr(static_cast<std::size_t>(n));
      text << "  " << shown << "\n";
      rows.push_back(shown);
    }
    jl.push_back(json{{"k", lbl.k},
                      {"kp", lbl.kp},
                      {"orbit", st.orbit.get_str()},
                      {"representative", rows},
                      {"stab", st.stab.get_str()},
                      {"wcan_in_U", lbl.wcan_in_U},
                      {"wcan_in_Up", lbl.wcan_in_Up}});
  }
  text << "total " << (labels.empty() ? "0" : orbit_stats(labels[0], q).total.get_str()) << "\n";
  if (sink.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"command", "class-list"}, {"left", left},
           {"right", right}, {"q", qv}, {"classes", jl}};
    sink.write(out, dump_json(j));
  } else {
    sink.write(out, text.str());
  }
  return kExitOk;
}

// ---- witt-selftest -------------------------------------------------------

int run_witt_selftest(long long per_type, int max_dim, std::uint64_t seed, std::ostream& out) {
  Rng rng(seed);
  long long failures = 0;
  for (SpaceType t : {SpaceType::Alternating, SpaceType::NonAltOdd, SpaceType::NonAltEven}) {
    long long valid_done = 0, violations_seen = 0;
    while (valid_done < per_type) {
      int half = std::max(1, max_dim / 2);
      int n;
      switch (t) {
        case SpaceType::Alternating: n = 2 * (1 + static_cast<int>(rng.below(half))); break;
        case SpaceType::NonAltOdd: n = 2 * static_cast<int>(rng.below(half)) + 1; break;
        default: n = 2 * (1 + static_cast<int>(rng.below(half))); break;
      }
      SymSpace v = SymSpace::standard(t, n);
      Subspace w0 = random_subspace(n, static_cast<int>(rng.below(n + 1)), rng);
      std::vector<BitVector> to;
      bool ok = true;
      for (int i = 0; i < w0.dim() && ok; ++i) {
        BitVector w = w0.basis_vector(i);
        bool found = false;
        for (int attempt = 0; attempt < 600 && !found; ++attempt) {
          BitVector cand(n, rng.bits(n));
          if (v.length(cand) != v.length(w)) continue;
          bool good = true;
          for (int jj = 0; jj < static_cast<int>(to.size()) && good; ++jj)
            if (v.bform(cand, to[jj]) != v.bform(w, w0.basis_vector(jj))) good = false;
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
          auto cc = w0.coordinates(*v.vcan());
          BitVector img = BitVector::zero(n);
          for (int i = 0; i < w0.dim(); ++i)
            if (cc->get(i)) img = img + to[static_cast<std::size_t>(i)];
          if (img != *v.vcan()) precond = false;
        }
      }
      try {
        BitMatrix m = witt_extend(v, w0, images);
        if (!precond) {
          ++failures;  // should have been rejected
        } else {
          bool gram_ok = (m.transpose() * v.gram() * m == v.gram());
          bool restricts = true;
          for (int i = 0; i < w0.dim(); ++i)
            if (m.apply(w0.basis_vector(i)) != images.row(i)) restricts = false;
          if (!gram_ok || !restricts) ++failures;
          ++valid_done;
        }
      } catch (const std::invalid_argument&) {
        if (precond) {
          ++failures;
          ++valid_done;
        } else {
          ++violations_seen;
        }
      }
    }
    out << to_string(t) << ": " << valid_done << " extensions, " << violations_seen
        << " precondition rejections, " << failures << " failures\n";
  }
  out << (failures == 0 ? "witt-selftest OK" : "witt-selftest FAIL") << "\n";
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

// ---- simulate ------------------------------------------------------------

int run_simulate(int r1, int r2, long long trials, std::uint64_t seed, int threads, double sigma,
                 double eps, const OutputSink& sink, std::ostream& out) {
  SimReport rep = simulate_run(Signature(r1, r2), trials, seed, threads, sigma, eps);
  if (sink.format == "json") {
    json checks = json::array();
    for (auto& c : rep.checks) {
      json cells = json::array();
      for (std::size_t i = 0; i < c.cells.size(); ++i)
        cells.push_back(json{{"cell", c.cells[i]},
                             {"empirical", c.empirical[i]},
                             {"expected", c.expected[i]},
                             {"z", c.z[i]}});
      checks.push_back(json{{"cells", cells},
                            {"max_abs_dev", c.max_abs_dev},
                            {"name", c.name},
                            {"pass", c.pass}});
    }
    json j{{"schema_version", kSchemaVersion}, {"command", "simulate"}, {"r1", r1}, {"r2", r2},
           {"trials", trials}, {"seed", seed}, {"sigma", sigma},
           {"checks", checks}, {"max_abs_dev", rep.max_abs_dev}, {"pass", rep.pass}};
    sink.write(out, dump_json(j));
  } else {
    sink.write(out, render(rep));
  }
  return rep.pass ? kExitOk : kExitCheckFailed;
}

// ---- cubic commands -------------------------------------------------------

std::string records_csv(const std::vector<FormClassRecord>& recs) {
  std::string csv = "a,b,c,d,disc,maximal,irreducible\n";
  for (auto& r : recs) {
    csv += csv_join({std::to_string(r.reduced_form.a), std::to_string(r.reduced_form.b),
                     std::to_string(r.reduced_form.c), std::to_string(r.reduced_form.d),
                     std::to_string(r.disc), r.maximal ? "1" : "0", r.irreducible ? "1" : "0"});
  }
  return csv;
}

json records_json(const std::vector<FormClassRecord>& recs) {
  json arr = json::array();
  for (auto& r : recs)
    arr.push_back(json{{"a", r.reduced_form.a},
                       {"b", r.reduced_form.b},
                       {"c", r.reduced_form.c},
                       {"d", r.reduced_form.d},
                       {"disc", r.disc},
                       {"irreducible", r.irreducible},
                       {"maximal", r.maximal}});
  return arr;
}

std::string records_text(const std::vector<FormClassRecord>& recs) {
  std::ostringstream os;
  for (auto& r : recs)
    os << "(" << r.reduced_form.a << "," << r.reduced_form.b << "," << r.reduced_form.c << ","
       << r.reduced_form.d << ") disc " << r.disc << "\n";
  return os.str();
}

int run_cubic_sample(long long height, long long draws, std::uint64_t seed,
                     const OutputSink& sink, std::ostream& out) {
  if (height > 20000) {
    out << "cubic-sample: height above 20000 exceeds the 64-bit discriminant budget\n";
    return kExitResourceLimit;
  }
  Rng rng(seed);
  std::vector<FormClassRecord> recs;
  for (long long i = 0; i < draws; ++i) {
    auto rec = sample_form(height, rng);
    if (rec) recs.push_back(*rec);
  }
  if (sink.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"command", "cubic-sample"}, {"height", height},
           {"draws", draws}, {"seed", seed}, {"accepted", static_cast<long long>(recs.size())},
           {"records", records_json(recs)}};
    sink.write(out, dump_json(j));
  } else if (sink.format == "csv") {
    sink.write(out, records_csv(recs));
  } else {
    std::ostringstream os;
    os << "seed " << seed << " accepted " << recs.size() << "/" << draws << "\n"
       << records_text(recs);
    sink.write(out, os.str());
  }
  return kExitOk;
}

int run_cubic_scan(long long bound, const OutputSink& sink, std::ostream& out) {
  if (bound > 1000000) {
    out << "cubic-scan: bound above 10^6 is not supported\n";
    return kExitResourceLimit;
  }
  auto recs = scan(bound);
  if (sink.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"command", "cubic-scan"}, {"bound", bound},
           {"count", static_cast<long long>(recs.size())}, {"records", records_json(recs)}};
    sink.write(out, dump_json(j));
  } else if (sink.format == "csv") {
    sink.write(out, records_csv(recs));
  } else {
    std::ostringstream os;
    os << "forms with 0 < disc <= " << bound << ": " << recs.size() << "\n" << records_text(recs);
    sink.write(out, os.str());
  }
  return kExitOk;
}

// ---- identity-check --------------------------------------------------------

int run_identity_check(std::ostream& out) {
  bool ok = true;
  // q-binomial identity plus its certificate
  for (long q : {2L, 4L}) {
    for (int m = 0; m <= 8; ++m) {
      for (int r2 = 0; r2 <= 4; ++r2) {
        WzTriple wz = pksum_wz_check(q, m, r2);
        if (!wz.ok()) {
          out << "q-binomial identity FAIL at q=" << q << " m=" << m << " r2=" << r2 << "\n";
          ok = false;
        }
      }
    }
  }
  out << "q-binomial identity and certificate: q in {2,4}, m <= 8, r2 <= 4 "
      << (ok ? "OK" : "FAIL") << "\n";

  // random-subspace law against exhaustive enumeration
  bool sub_ok = true;
  for (int m = 1; m <= 5; ++m) {
    for (int r = 0; r <= m - 1; ++r) {
      for (int t = 1; t <= m; ++t) {
        BitVector e = BitVector::unit(m, 0);
        std::vector<BitVector> yrows;
        for (int i = 0; i < r; ++i) yrows.push_back(BitVector::unit(m, m - 1 - i));
        Subspace y = Subspace::span(yrows, m);
        std::map<int, long> counts;
        long total = 0;
        enumerate_subspaces(m, t, [&](const Subspace& sub) {
          if (!sub.contains(e)) return;
          ++total;
          ++counts[meet(sub, y).dim()];
        });
        for (int sp = 0; sp <= std::min(r, t - 1); ++sp) {
          Rational expect = 0;
          try {
            expect = random_subspace_prob(2, m, r, t, sp);
          } catch (const prob_zero_error&) {
          }
          Rational emp(counts[sp], total);
          emp.canonicalize();
          if (emp != expect) {
            out << "random-subspace law FAIL at m=" << m << " r=" << r << " t=" << t
                << " s'=" << sp << "\n";
            sub_ok = false;
          }
        }
      }
    }
  }
  out << "random-subspace law vs enumeration: m <= 5 " << (sub_ok ? "OK" : "FAIL") << "\n";
  ok = ok && sub_ok;
  out << (ok ? "identity-check OK" : "identity-check FAIL") << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"selsig: symmetric bilinear spaces over F2, maximal isotropic classes, "
               "narrow-class-group and unit-signature heuristics, binary cubic forms"};
  app.require_subcommand(1);

  // tables
  auto* tables = app.add_subcommand("tables", "exact and certified table values");
  std::string which = "all";
  int r1 = 3, r2 = 0;
  double eps = 1e-9;
  OutputSink sink;
  tables->add_option("--which", which)->check(CLI::IsMember({"k", "density", "moment", "sigrank", "split", "all"}));
  tables->add_option("--r1", r1)->required();
  tables->add_option("--r2", r2)->required();
  tables->add_option("--eps", eps);
  tables->add_option("--format", sink.format)->check(CLI::IsMember({"text", "csv", "json"}));
  tables->add_option("--out", sink.path);

  // mass-check
  auto* mass = app.add_subcommand("mass-check", "orbit sizes vs brute force vs the mass formula");
  std::string left, right;
  mass->add_option("--left", left)->required();
  mass->add_option("--right", right)->required();
  mass->add_option("--format", sink.format)->check(CLI::IsMember({"text", "json"}));
  mass->add_option("--out", sink.path);

  // class-list
  auto* cls = app.add_subcommand("class-list", "equivalence classes with representatives and stabilizer orders");
  long long qv = 2;
  cls->add_option("--left", left)->required();
  cls->add_option("--right", right)->required();
  cls->add_option("--q", qv)->check(CLI::IsMember({2, 4, 8, 16}));
  cls->add_option("--format", sink.format)->check(CLI::IsMember({"text", "json"}));
  cls->add_option("--out", sink.path);

  // witt-selftest
  auto* witt = app.add_subcommand("witt-selftest", "randomized isometry-extension suite");
  long long per_type = 10000;
  int max_dim = 8;
  std::uint64_t seed = 1;
  witt->add_option("--per-type", per_type);
  witt->add_option("--max-dim", max_dim)->check(CLI::Range(2, 16));
  witt->add_option("--seed", seed);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo pipeline vs closed forms");
  long long trials = 100000;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  double sigma = 4.0;
  sim->add_option("--r1", r1)->required();
  sim->add_option("--r2", r2)->required();
  sim->add_option("--trials", trials);
  sim->add_option("--seed", seed)->required();
  sim->add_option("--threads", threads);
  sim->add_option("--sigma", sigma);
  sim->add_option("--eps", eps);
  sim->add_option("--format", sink.format)->check(CLI::IsMember({"text", "json"}));
  sim->add_option("--out", sink.path);

  // cubic-sample
  auto* csample = app.add_subcommand("cubic-sample", "uniform cubic-form draws kept when reduced and maximal");
  long long height = 1000, draws = 1000;
  csample->add_option("--height", height)->required()->check(CLI::PositiveNumber);
  csample->add_option("--draws", draws)->check(CLI::PositiveNumber);
  csample->add_option("--seed", seed)->required();
  csample->add_option("--format", sink.format)->check(CLI::IsMember({"text", "csv", "json"}));
  csample->add_option("--out", sink.path);

  // cubic-scan
  auto* cscan = app.add_subcommand("cubic-scan", "complete reduced maximal forms up to a discriminant bound");
  long long bound = 250;
  cscan->add_option("--bound", bound)->required()->check(CLI::PositiveNumber);
  cscan->add_option("--format", sink.format)->check(CLI::IsMember({"text", "csv", "json"}));
  cscan->add_option("--out", sink.path);

  // identity-check
  app.add_subcommand("identity-check", "exact combinatorial identity suites");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (tables->parsed()) return run_tables(which, r1, r2, eps, sink, out);
    if (mass->parsed()) return run_mass_check(left, right, sink, out);
    if (cls->parsed()) return run_class_list(left, right, qv, sink, out);
    if (witt->parsed()) return run_witt_selftest(per_type, max_dim, seed, out);
    if (sim->parsed()) return run_simulate(r1, r2, trials, seed, threads, sigma, eps, sink, out);
    if (csample->parsed()) return run_cubic_sample(height, draws, seed, sink, out);
    if (cscan->parsed()) return run_cubic_scan(bound, sink, out);
    return run_identity_check(out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace selsig
