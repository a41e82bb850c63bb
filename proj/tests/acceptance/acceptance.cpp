// Acceptance suite: one PASS/FAIL line per criterion. Every criterion is run
// with 8 worker threads and again with 1; criterion 8 compares the digests of
// the two runs.

#include <chrono>
#include <limits>
#include <optional>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "primeorbits/cli.hpp"
#include "primeorbits/counting.hpp"
#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"
#include "primeorbits/probes.hpp"
#include "primeorbits/thermo.hpp"
#include "primeorbits/transfer.hpp"
#include "primeorbits/zeta.hpp"

using namespace primeorbits;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string digest_input;  // every number the criterion looked at

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += " [failed: " + what + "]";
    }
  }
  void note(const char* fmt, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, v);
    detail += buf;
  }
  void record(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a;", v);
    digest_input += buf;
  }
  void record(cplx v) {
    record(v.real());
    record(v.imag());
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CodingScheme coding_for(const std::string& name, const RationalMap& f) {
  if (auto c = builtin_coding(name, f)) return *c;
  return detect_full_shift(f);
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = *builtin_map("z2");
  const auto db = OrbitDatabase::build(f, 14, Backend::Roots);
  bool counts = true;
  for (int n = 1; n <= 14; ++n) counts = counts && db.raw_count(n) == (std::size_t{1} << n) - 1;
  o.check(counts, "raw counts 2^n - 1");
  double hol = 0.0;
  for (const auto& x : db.orbits()) {
    hol = std::max(hol, std::abs(x.holonomy - 1.0));
    o.record(x.multiplier);
  }
  o.check(hol <= 1e-9, "holonomies");
  const auto N10 = db.query_Nt(10.0);
  o.check(N10 == 4, "N_10 = 4");
  const auto est = estimate_delta(db, 8, 14);
  o.check(std::abs(est.delta - 1.0) <= 1e-3, "delta");
  double pgap = 0.0;
  for (int n = 1; n <= 14; ++n)
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const double closed = (std::log(std::ldexp(1.0, n) - 1.0) - n * s * std::log(2.0)) / n;
      if (n == 1) continue;  // one point: log 1 = 0, still compared below
      pgap = std::max(pgap, std::abs(pressure_n(db, s, n) - closed));
    }
  pgap = std::max(pgap, std::abs(pressure_n(db, 1.0, 1) - (-std::log(2.0))));
  o.check(pgap <= 1e-12, "pressure closed form");
  double zgap = 0.0;
  const cplx shift{0.0, 2.0 * M_PI / std::log(2.0)};
  for (cplx s : {cplx(1.2, 0.0), cplx(1.5, 0.7), cplx(2.0, -3.0), cplx(0.8, 1.1)}) {
    const auto a = log_zeta_truncated(db, s, 0, 14).log_zeta, b = log_zeta_truncated(db, s + shift, 0, 14).log_zeta;
    zgap = std::max(zgap, std::abs(a - b));
    o.record(a);
  }
  o.check(zgap <= 1e-9, "zeta periodicity");
  const double t = seconds_since(t0);
  o.check(t < 10.0, "runtime");
  o.record(est.delta);
  o.note("delta=%.8f", est.delta);
  o.note(" N_10=%.0f", static_cast<double>(N10));
  o.note(" max|hol-1|=%.2e", hol);
  o.note(" pressure_gap=%.2e", pgap);
  o.note(" zeta_period_gap=%.2e", zgap);
  o.note(" time=%.2fs", t);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = *builtin_map("z2p5");
  const auto roots = OrbitDatabase::build(f, 8, Backend::Roots);
  const auto sym = OrbitDatabase::build(f, 8, Backend::Symbolic, nullptr);
  o.check(roots.orbits().size() == sym.orbits().size(), "orbit counts");
  double gap = 0.0;
  // match every orbit by multiplier within its period
  for (int n = 1; n <= 8; ++n) {
    std::vector<cplx> a, b, pa, pb;
    for (const auto& x : roots.orbits())
      if (x.period == n) {
        a.push_back(x.multiplier / x.abs_multiplier * std::log(x.abs_multiplier));
        pa.push_back(x.point);
      }
    for (const auto& x : sym.orbits())
      if (x.period == n) {
        b.push_back(x.multiplier / x.abs_multiplier * std::log(x.abs_multiplier));
        pb.push_back(x.point);
      }
    o.check(oracle::same_sets(a, b, 1e-8), "multipliers at period " + std::to_string(n));
    o.check(oracle::same_sets(pa, pb, 1e-8), "points at period " + std::to_string(n));
    gap = std::max(gap, hausdorff_distance(pa, pb));
    const long long expect = oracle::primitive_necklaces(n, 2);
    o.check(static_cast<long long>(roots.primitive_count(n)) == expect, "roots necklace count");
    o.check(static_cast<long long>(sym.primitive_count(n)) == expect, "symbolic necklace count");
    o.check(necklace_count(n, 2) == expect, "necklace formula");
  }
  for (const auto& x : sym.orbits()) o.record(x.multiplier);
  const double t = seconds_since(t0);
  o.check(t < 30.0, "runtime");
  o.note("orbits=%.0f", static_cast<double>(sym.orbits().size()));
  o.note(" point_hausdorff=%.2e", gap);
  o.note(" time=%.2fs", t);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"z2p5", "z2m6"}) {
    const auto f = *builtin_map(name);
    const auto db = OrbitDatabase::build(f, 16, Backend::Symbolic);
    const auto est = estimate_delta(db, 9, 16);
    // |delta_n - delta_n-1| for n = 10..16. A difference counts as
    // decreasing when it is below the previous one or already at the
    // roundoff floor of delta itself (64 ulp).
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * est.delta;
    std::vector<double> diffs;
    for (std::size_t k = 1; k < est.per_level.size(); ++k)
      diffs.push_back(std::abs(est.per_level[k] - est.per_level[k - 1]));
    bool decreasing = true;
    for (std::size_t k = 1; k < diffs.size(); ++k) decreasing = decreasing && (diffs[k] < diffs[k - 1] || diffs[k] <= floor);
    o.check(decreasing, std::string("decreasing differences for ") + name);
    const TransferOperator op(f, detect_full_shift(f), 10);
    const auto eig = estimate_delta_eigen(op);
    const double gap = std::abs(eig.delta - est.delta);
    o.check(gap <= 2e-3, std::string("method agreement for ") + name);
    if (std::string(name) == "z2m6") o.check(est.delta > 0.0 && est.delta < 1.0, "delta(z^2-6) in (0,1)");
    o.detail += std::string(" ") + name + ":";
    o.note(" delta=%.12f", est.delta);
    o.note(" eigen=%.12f", eig.delta);
    o.detail += " diffs=";
    for (double d : diffs) o.note("%.1e,", d);
    o.record(est.delta);
    o.record(eig.delta);
  }
  const double t = seconds_since(t0);
  o.check(t < 120.0, "runtime");
  o.note(" time=%.2fs", t);
  return o;
}

// Shared by criteria 4 and 5.
struct SkewRun {
  std::optional<OrbitDatabase> db;
  double delta = 0.0;
  double build_seconds = 0.0;
};

SkewRun& skew_run() {
  static SkewRun run;
  return run;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto& run = skew_run();
  run.db = OrbitDatabase::build(*builtin_map("z2p2p2i"), 16, Backend::Symbolic);
  run.delta = estimate_delta(*run.db, 10, 16).delta;
  const auto grid = parse_t_grid("log:10:h:50", run.db->horizon());
  const auto r = count_report(*run.db, run.delta, grid);
  run.build_seconds = seconds_since(t0);
  o.check(r.max_rel_error_top <= 0.15, "top-decade relative error");
  o.check(r.beta_hat < run.delta, "error exponent");
  for (std::size_t k = 0; k < r.t.size(); ++k) o.record(static_cast<double>(r.N_t[k]));
  o.record(run.delta);
  const double t = seconds_since(t0);
  o.check(t < 300.0, "runtime");
  o.note("delta=%.10f", run.delta);
  o.note(" horizon=%.4g", run.db->horizon());
  o.note(" N_t=%.0f", static_cast<double>(r.N_t.back()));
  o.note(" max_rel_err=%.4f", r.max_rel_error_top);
  o.note(" beta=%.4f", r.beta_hat);
  o.note(" time=%.2fs", t);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& db = *skew_run().db;
  const auto w = weyl_report(db, 4, {db.horizon()});
  double worst = 0.0;
  for (int ell = 1; ell <= 4; ++ell) {
    worst = std::max(worst, w.normalized(ell, 0));
    o.check(w.at(-ell)[0] == std::conj(w.at(ell)[0]), "conjugation");
    o.record(w.at(ell)[0]);
  }
  o.check(worst <= 0.1, "|pi_l|/N_t");
  o.check(w.at(0)[0] == cplx(static_cast<double>(w.N_t[0])), "pi_0 = N_t");

  const auto real = OrbitDatabase::build(*builtin_map("z2m6"), 16, Backend::Symbolic);
  const auto wr = weyl_report(real, 8, {real.horizon()});
  bool is_real = true, period2 = true;
  for (int ell = -8; ell <= 8; ++ell) {
    is_real = is_real && wr.at(ell)[0].imag() == 0.0;
    if (ell + 2 <= 8) period2 = period2 && wr.at(ell)[0] == wr.at(ell + 2)[0];
    o.record(wr.at(ell)[0]);
  }
  o.check(is_real, "z^2-6 sums real");
  o.check(period2, "z^2-6 period two in l");
  o.note("max|pi_l|/N_t=%.4f", worst);
  o.note(" N_t=%.0f", static_cast<double>(w.N_t[0]));
  o.note(" z2m6_pi1=%.0f", wr.at(1)[0].real());
  o.note(" z2m6_pi2=%.0f", wr.at(2)[0].real());
  o.note(" time=%.2fs", seconds_since(t0));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = *builtin_map("z2p5");
  const auto db = OrbitDatabase::build(f, 16, Backend::Symbolic);
  const double delta = estimate_delta(db, 10, 16).delta;
  const auto real = scan_for_zeros_poles(db, 0, {delta - 0.3, delta + 0.5, 0.0, 0.0}, 0.001);
  o.check(real.real_pole.has_value(), "real-axis minimum found");
  const double pole = real.real_pole.value_or(NAN);
  o.check(std::abs(pole - delta) <= 1e-2, "minimum near delta");
  o.record(pole);
  double min_abs = INFINITY;
  std::size_t trusted = 0, total = 0;
  for (int ell = 1; ell <= 3; ++ell) {
    const auto r = scan_for_zeros_poles(db, ell, {delta - 0.02, delta + 0.05, -10.0, 10.0}, 0.01);
    min_abs = std::min(min_abs, r.min_abs_zeta);
    trusted += r.trusted_count;
    total += r.grid.size();
    for (const auto& p : r.grid) o.record(p.log_zeta);
  }
  o.check(trusted > 0, "trusted grid points");
  o.check(min_abs >= 1e-3, "no small |zeta|");
  o.note("delta=%.10f", delta);
  o.note(" real_min_at=%.10f", pole);
  o.note(" |1/zeta|=%.2e", real.real_min_abs_inverse);
  o.note(" min|zeta|(l=1..3)=%.4f", min_abs);
  o.note(" trusted=%.0f", static_cast<double>(trusted));
  o.note("/%.0f", static_cast<double>(total));
  o.note(" time=%.2fs", seconds_since(t0));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  {
    const auto f = *builtin_map("z2p2p2i");
    const TransferOperator op(f, detect_full_shift(f), 10);
    const double delta = estimate_delta(*skew_run().db, 10, 16).delta;
    const NormalizedOperator L(op, delta);
    const auto one = L.apply(delta, 0, std::vector<cplx>(op.size(), 1.0));
    double err = 0.0;
    for (cplx v : one) err = std::max(err, std::abs(v - 1.0));
    o.check(err <= 1e-6, "normalisation");
    o.note("|L1-1|=%.2e", err);
    const auto db = OrbitDatabase::build(f, 12, Backend::Symbolic);
    const auto mu = equilibrium_weights(db, 12, delta);
    for (auto [b, ell] : std::vector<std::pair<double, int>>{{5.0, 0}, {0.0, 3}, {5.0, 3}}) {
      const auto r = decay_probe(op, {delta, b}, ell, 40, mu);
      o.check(r.rho < 0.999, "decay for z^2+2+2i");
      o.note(" rho=%.4f", r.rho);
      o.record(r.rho);
    }
  }
  {
    const auto f = *builtin_map("z2");
    const auto sc = coding_for("z2", f);
    const TransferOperator op(f, sc, 10);
    const auto db = OrbitDatabase::build(f, 12, Backend::Roots);
    const auto r = decay_probe(op, {1.0, 5.0}, 0, 40, equilibrium_weights(db, 12, 1.0));
    o.check(r.rho >= 0.999, "no decay for z^2");
    o.note(" rho(z2)=%.6f", r.rho);
    o.record(r.rho);
    const auto d = doubling_probe(equilibrium_weights(db, 12, 1.0), {});
    o.check(d.max_ratio >= 1.8 && d.max_ratio <= 2.5, "doubling ratio for z^2");
    o.note(" doubling=%.4f", d.max_ratio);
    o.record(d.max_ratio);
  }
  const SymbolWord w1{{0, 0, 0}}, w2{{0, 1, 1}};
  for (const char* name : {"z2", "z2p5"}) {
    const auto f = *builtin_map(name);
    const auto sc = coding_for(name, f);
    const auto r = nli_probe(f, sc, w1, w2, default_nli_grid(f, sc));
    if (std::string(name) == "z2")
      o.check(r.min_singular_value <= 1e-8, "nli degenerate for z^2");
    else
      o.check(r.min_singular_value >= 1e-3, "nli for z^2+5");
    o.detail += std::string(" nli_") + name;
    o.note("=%.2e", r.min_singular_value);
    o.record(r.min_singular_value);
  }
  {
    const auto f = *builtin_map("z2m6");
    const auto r = ncp_probe(cylinder_points(f, detect_full_shift(f), SymbolWord{{0}}, 10), 8, {});
    o.check(r.per_direction[4] <= 1e-9, "vertical ncp for z^2-6");
    o.note(" ncp_vertical(z2m6)=%.2e", r.per_direction[4]);
    o.record(r.per_direction[4]);
  }
  {
    const auto f = *builtin_map("z2p2p2i");
    const auto r = ncp_probe(cylinder_points(f, detect_full_shift(f), SymbolWord{{0}}, 10), 8, {});
    o.check(r.global_min > 0.0, "ncp for z^2+2+2i");
    o.note(" ncp_min(z2p2p2i)=%.4f", r.global_min);
    o.record(r.global_min);
  }
  o.note(" time=%.2fs", seconds_since(t0));
  return o;
}

// CLI runs whose output digests are compared across thread counts.
std::map<std::string, std::string> cli_digests(unsigned threads) {
  const std::vector<std::vector<std::string>> commands = {
      {"orbits", "--map", "z2p5", "--nmax", "8", "--backend", "both"},
      {"dimension", "--map", "z2m6", "--nmax", "12"},
      {"count", "--map", "z2p2p2i", "--nmax", "12"},
      {"equidist", "--map", "z2p2p2i", "--nmax", "12", "--lmax", "4"},
      {"zeta", "--map", "z2p5", "--nmax", "12", "--ell", "1", "--step", "0.05"},
      {"probe", "decay", "--map", "z2p2p2i", "--b", "5", "--nmax", "10"},
      {"probe", "nli", "--map", "z2p5"},
      {"probe", "ncp", "--map", "z2m6"},
      {"probe", "doubling", "--map", "z2", "--nmax", "11"},
  };
  std::map<std::string, std::string> out;
  for (auto cmd : commands) {
    std::string key;
    for (const auto& a : cmd) key += a + " ";
    cmd.insert(cmd.end(), {"--threads", std::to_string(threads)});
    std::ostringstream sout, serr;
    const auto r = run_cli(cmd, sout, serr, false);
    std::string joined = "exit=" + std::to_string(r.exit_code) + ";";
    for (const auto& [name, digest] : r.digests) joined += name + "=" + digest + ";";
    out[key] = joined;
  }
  return out;
}

}  // namespace

int main() {
  using Fn = std::function<Outcome()>;
  const std::vector<std::pair<int, Fn>> criteria = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                    {4, criterion4}, {5, criterion5}, {6, criterion6},
                                                    {7, criterion7}};
  std::map<int, std::string> digest8;
  bool all = true;
  auto run_one = [](const Fn& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      Outcome o;
      o.check(false, std::string("exception: ") + e.what());
      return o;
    }
  };

  set_thread_count(8);
  for (const auto& [id, fn] : criteria) {
    const auto o = run_one(fn);
    all = all && o.pass;
    digest8[id] = sha256_hex(o.digest_input);
    std::printf("criterion %d: %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }

  const auto t0 = std::chrono::steady_clock::now();
  set_thread_count(1);
  bool same = true;
  std::string mismatched;
  for (const auto& [id, fn] : criteria) {
    const auto o = run_one(fn);
    if (sha256_hex(o.digest_input) != digest8[id]) {
      same = false;
      mismatched += " " + std::to_string(id);
    }
  }
  const auto cli1 = cli_digests(1);
  const auto cli8 = cli_digests(8);
  std::size_t cli_ok = 0;
  for (const auto& [key, d] : cli1) {
    if (cli8.at(key) == d && d.rfind("exit=0;", 0) == 0)
      ++cli_ok;
    else {
      same = false;
      mismatched += " cli:" + key;
    }
  }
  all = all && same;
  std::printf("criterion 8: %s criteria 1-7 and %zu/%zu CLI runs identical at --threads 1 and 8%s time=%.2fs\n",
              same ? "PASS" : "FAIL", cli_ok, cli1.size(), mismatched.empty() ? "" : (" mismatch:" + mismatched).c_str(),
              seconds_since(t0));
  return all ? 0 : 1;
}
