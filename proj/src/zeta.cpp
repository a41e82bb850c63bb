#include "primeorbits/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"

namespace primeorbits {

namespace {

// Per-orbit log|lambda| and chi_l(hol), shared by every s of a scan.
struct OrbitCache {
  std::vector<double> log_abs;
  std::vector<cplx> chi;
  std::vector<int> period;

  OrbitCache(const OrbitDatabase& db, int ell, int n_max) {
    for (const auto& o : db.orbits()) {
      if (o.period > n_max) continue;
      log_abs.push_back(std::log(o.abs_multiplier));
      chi.push_back(unit_power(o.holonomy, ell));
      period.push_back(o.period);
    }
  }
};

// Z_1..Z_n_max in one pass over the orbits.
std::vector<cplx> all_Z(const OrbitCache& c, cplx s, int n_max) {
  std::vector<cplx> Z(n_max + 1, 0.0);
  for (std::size_t i = 0; i < c.log_abs.size(); ++i) {
    const cplx base = std::exp(-s * c.log_abs[i]) * c.chi[i];
    const int m = c.period[i];
    cplx term = base;
    for (int n = m; n <= n_max; n += m) {
      Z[n] += static_cast<double>(m) * term;
      term *= base;
    }
  }
  return Z;
}

std::vector<cplx> all_Z(const OrbitDatabase& db, cplx s, int ell, int n_max) {
  return all_Z(OrbitCache(db, ell, n_max), s, n_max);
}

// Geometric extrapolation of sum_{n > N} |Z_n| / n from the last levels.
double empirical_tail(const std::vector<cplx>& Z) {
  const int N = static_cast<int>(Z.size()) - 1;
  const int from = std::max(1, N / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (int n = from; n <= N; ++n) {
    const double a = std::abs(Z[n]);
    if (!(a > 0.0)) return 0.0;
    const double y = std::log(a);
    sx += n;
    sy += y;
    sxx += double(n) * n;
    sxy += n * y;
    ++k;
  }
  if (k < 2) return INFINITY;
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double r = std::exp(slope);
  if (!(r < 1.0)) return INFINITY;
  // anchor at the fitted value so a single cancelling level does not hide growth
  const double fit_N = std::exp((sy - slope * sx) / k + slope * N);
  const double last = std::max(std::abs(Z[N]), fit_N);
  return last * r / ((N + 1) * (1.0 - r));
}

}  // namespace

cplx Z_n(const OrbitDatabase& db, cplx s, int ell, int n) {
  cplx z = 0.0;
  for (const auto& t : db.level_terms(n))
    z += static_cast<double>(t.multiplicity) * std::exp(-s * (t.power * t.log_abs_multiplier)) *
         unit_power(t.holonomy, static_cast<long long>(t.power) * ell);
  return z;
}

namespace {

ZetaSample log_zeta_from(const OrbitDatabase& db, const std::vector<cplx>& Z, cplx s, int ell, int n_max) {
  ZetaSample out;
  out.s = s;
  out.ell = ell;
  out.n_max = n_max;
  for (int n = 1; n <= n_max; ++n) out.log_zeta += Z[n] / static_cast<double>(n);

  // every raw point has |(f^n)'| >= c0 kappa^n and there are at most d^n
  const double sigma = s.real();
  const double q = db.map().degree() * std::pow(db.kappa(), -sigma);
  if (q < 1.0)
    out.tail_bound = std::pow(db.c0(), -sigma) * std::pow(q, n_max + 1) / ((n_max + 1) * (1.0 - q));
  else
    out.tail_bound = INFINITY;
  out.valid = out.tail_bound < 1e-6;
  out.tail_estimate = empirical_tail(Z);
  return out;
}

}  // namespace

ZetaSample log_zeta_truncated(const OrbitDatabase& db, cplx s, int ell, int n_max) {
  if (n_max < 1 || n_max > db.n_max()) fail(ErrorKind::EmptyLevel, "truncation level outside the database");
  return log_zeta_from(db, all_Z(db, s, ell, n_max), s, ell, n_max);
}

cplx euler_product(const OrbitDatabase& db, cplx s, int ell, double t_cutoff) {
  if (t_cutoff > db.horizon())
    fail(ErrorKind::HorizonExceeded, "t_cutoff is above the reliability horizon");
  cplx log_sum = 0.0;
  for (const auto& o : db.slice_below(t_cutoff)) {
    const cplx term = std::exp(-s * std::log(o.abs_multiplier)) * unit_power(o.holonomy, ell);
    if (std::abs(1.0 - term) < 1e-12) fail(ErrorKind::FactorSingular, "an Euler factor is singular at this s");
    log_sum -= std::log(1.0 - term);
  }
  return std::exp(log_sum);
}

std::vector<cplx> cycle_coefficients(const OrbitDatabase& db, cplx s, int ell, int n_max) {
  if (n_max < 1 || n_max > db.n_max()) fail(ErrorKind::EmptyLevel, "truncation level outside the database");
  const auto Z = all_Z(db, s, ell, n_max);
  std::vector<cplx> c(n_max + 1, 0.0);
  c[0] = 1.0;
  for (int k = 1; k <= n_max; ++k) {
    cplx acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += Z[j] * c[k - j];
    c[k] = -acc / static_cast<double>(k);
  }
  return c;
}

cplx inverse_zeta_cycle(const OrbitDatabase& db, cplx s, int ell, int n_max) {
  const auto c = cycle_coefficients(db, s, ell, n_max);
  cplx total = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) total += *it;
  return total;
}

ScanReport scan_for_zeros_poles(const OrbitDatabase& db, int ell, const ScanRect& rect, double step,
                                double trust_tolerance) {
  if (!(step > 0.0) || rect.a1 < rect.a0 || rect.b1 < rect.b0)
    fail(ErrorKind::InvalidArgument, "scan needs a0 <= a1, b0 <= b1 and a positive step");
  auto count = [step](double lo, double hi) {
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  };
  const std::size_t na = count(rect.a0, rect.a1), nb = count(rect.b0, rect.b1);
  if (na * nb > 50'000'000) fail(ErrorKind::InvalidArgument, "scan grid is too large");

  ScanReport r;
  r.ell = ell;
  r.rect = rect;
  r.step = step;
  r.trust_tolerance = trust_tolerance;
  r.grid.resize(na * nb);
  const int N = db.n_max();
  const OrbitCache cache(db, ell, N);
  parallel_for(na * nb, [&](std::size_t k) {
    const double a = rect.a0 + step * static_cast<double>(k / nb);
    const double b = rect.b0 + step * static_cast<double>(k % nb);
    const auto z = log_zeta_from(db, all_Z(cache, {a, b}, N), {a, b}, ell, N);
    r.grid[k] = {a, b, z.log_zeta, std::exp(z.log_zeta.real()), z.valid,
                 z.valid || z.tail_estimate < trust_tolerance};
  });

  if (ell == 0 && rect.b0 <= 0.0 && rect.b1 >= 0.0) {
    // 1/zeta is real on the real axis; find its sign change, else its minimum.
    // The cycle expansion is trusted where its last coefficients are small.
    auto F = [&](double a) { return inverse_zeta_cycle(db, a, 0, N).real(); };
    std::vector<double> vals(na);
    std::vector<char> ok(na);
    parallel_for(na, [&](std::size_t i) {
      const auto c = cycle_coefficients(db, rect.a0 + step * static_cast<double>(i), 0, N);
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v += it->real();
      vals[i] = v;
      ok[i] = N >= 2 && std::abs(c[N]) + std::abs(c[N - 1]) < 1e-6 * trust_tolerance;
    });
    r.real_trusted_count = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    if (r.real_trusted_count > 0) {
      std::size_t best = na;
      for (std::size_t i = 0; i < na; ++i)
        if (ok[i] && (best == na || std::abs(vals[i]) < std::abs(vals[best]))) best = i;
      r.real_min_abs_inverse = std::abs(vals[best]);
      r.real_pole = rect.a0 + step * static_cast<double>(best);
      for (std::size_t i = 0; i + 1 < na; ++i) {
        if (!ok[i] || !ok[i + 1] || (vals[i] <= 0.0) == (vals[i + 1] <= 0.0)) continue;
        double lo = rect.a0 + step * static_cast<double>(i), hi = lo + step;
        double flo = vals[i];
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
          const double mid = 0.5 * (lo + hi), fm = F(mid);
          if ((fm <= 0.0) == (flo <= 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        r.real_pole = 0.5 * (lo + hi);
        r.real_min_abs_inverse = std::abs(F(*r.real_pole));
        break;
      }
    }
  }

  r.min_abs_zeta = INFINITY;
  for (const auto& p : r.grid) {
    if (!p.trusted) continue;
    ++r.trusted_count;
    if (p.abs_zeta < r.min_abs_zeta) {
      r.min_abs_zeta = p.abs_zeta;
      r.min_a = p.a;
      r.min_b = p.b;
    }
  }
  if (r.trusted_count == 0 && r.real_trusted_count == 0)
    fail(ErrorKind::UntrustworthyRegion, "no grid point has a trustworthy truncation");
  return r;
}

std::string scan_csv(const ScanReport& r) {
  std::string out = "a,b,ell,re_logzeta,im_logzeta,abs_zeta,valid\n";
  char buf[256];
  for (const auto& p : r.grid) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%d\n", p.a, p.b, r.ell, p.log_zeta.real(),
                  p.log_zeta.imag(), p.abs_zeta, p.valid ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace primeorbits
