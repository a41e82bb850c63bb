#include "primeorbits/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"

namespace primeorbits {

namespace {

double scale_of(cplx z) { return std::max(1.0, std::abs(z)); }

bool lex_less(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

// Newton correction F/F' for F(z) = f^n(z) - z, f polynomial. Once the
// orbit gets large the iterate and derivative are carried as logarithms so
// seeds far from the Julia set do not overflow.
class FixedPointNewton {
 public:
  FixedPointNewton(const Polynomial& f, int n) : f_(f), n_(n), d_(f.degree()) {
    const cplx lead = f.leading();
    log_lead_ = std::log(lead);
    log_dlead_ = std::log(static_cast<double>(d_) * lead);
    ratio_.resize(d_);
    dratio_.resize(d_);
    for (int k = 0; k < d_; ++k) {
      ratio_[k] = f[k] / lead;
      dratio_[k] = static_cast<double>(k) * f[k] / (static_cast<double>(d_) * lead);
    }
    threshold_ = std::min(1e100, std::pow(1e290 / std::max(1.0, f.max_abs_coefficient()), 1.0 / d_));
  }

  cplx correction(cplx z) const {
    cplx w = z, D = 1.0, Lw, LD;
    bool wlog = false, dlog = false;
    for (int j = 0; j < n_; ++j) {
      if (!wlog) {
        cplx v, dv;
        f_.evaluate(w, v, dv);
        if (dv == cplx{}) {
          D = 0.0;
          dlog = false;
        } else if (dlog) {
          LD += std::log(dv);
        } else {
          D *= dv;
          if (std::abs(D) > 1e250) {
            LD = std::log(D);
            dlog = true;
          }
        }
        w = v;
        if (std::abs(w) > threshold_) {
          Lw = std::log(w);
          wlog = true;
          if (!dlog) {
            LD = std::log(D);
            dlog = true;
          }
        }
      } else {
        const cplx inv = std::exp(-Lw);
        cplx sum = 1.0, dsum = 1.0, p = 1.0;
        for (int k = d_ - 1; k >= 0; --k) {
          p *= inv;
          sum += ratio_[k] * p;
          dsum += dratio_[k] * p;
        }
        LD += log_dlead_ + static_cast<double>(d_ - 1) * Lw + std::log(dsum);
        Lw = log_lead_ + static_cast<double>(d_) * Lw + std::log(sum);
      }
    }
    if (!wlog) {
      if (!dlog) return (w - z) / (D - 1.0);
      const cplx e = std::exp(-LD);
      return (w - z) * e / (1.0 - e);
    }
    return std::exp(Lw - LD) * (1.0 - z * std::exp(-Lw)) / (1.0 - std::exp(-LD));
  }

 private:
  const Polynomial& f_;
  int n_;
  int d_;
  cplx log_lead_, log_dlead_;
  std::vector<cplx> ratio_, dratio_;
  double threshold_;
};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Indices whose point duplicates an earlier one (in sorted order) within tol.
std::vector<char> duplicate_mask(const std::vector<cplx>& pts, const std::vector<char>& usable, double tol) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (usable[i]) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].real() < pts[b].real() || (pts[a].real() == pts[b].real() && a < b);
  });
  std::vector<char> dup(pts.size(), 0);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const std::size_t i = order[p];
    if (dup[i]) continue;
    const double r = tol * scale_of(pts[i]);
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const std::size_t j = order[q];
      if (pts[j].real() - pts[i].real() > r) break;
      if (!dup[j] && std::abs(pts[j] - pts[i]) <= r) dup[j] = 1;
    }
  }
  return dup;
}

// Newton on f^n(z) - z for any rational map.
cplx newton_polish(const RationalMap& map, cplx z, int n, int steps) {
  for (int k = 0; k < steps; ++k) {
    const auto it = iterate_with_derivative(map, z, n);
    const cplx den = it.derivative - 1.0;
    if (den == cplx{}) break;
    const cplx step = (it.value - z) / den;
    if (!finite(step)) break;
    z -= step;
    if (std::abs(step) <= 1e-15 * scale_of(z)) break;
  }
  return z;
}

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int moebius(int n) {
  int m = 0;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    ++m;
  }
  if (n > 1) ++m;
  return m % 2 ? -1 : 1;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::Roots ? "roots" : "symbolic"; }

Backend backend_from_string(std::string_view s) {
  if (s == "roots") return Backend::Roots;
  if (s == "symbolic") return Backend::Symbolic;
  fail(ErrorKind::InvalidArgument, "unknown backend '" + std::string(s) + "'");
}

RootEnumeration enumerate_roots(const RationalMap& map, int n, const Tolerances& tol) {
  if (!map.is_polynomial()) fail(ErrorKind::InvalidArgument, "root backend needs a polynomial map");
  if (n < 1) fail(ErrorKind::InvalidArgument, "period must be positive");
  const int d = map.degree();
  if (std::pow(static_cast<double>(d), n) > static_cast<double>(tol.degree_cap))
    fail(ErrorKind::DegreeCapExceeded, "d^n = " + std::to_string(d) + "^" + std::to_string(n) +
                                           " exceeds the degree cap " + std::to_string(tol.degree_cap));
  const std::size_t N = static_cast<std::size_t>(ipow(d, n));
  const Polynomial& f = map.numerator();
  const FixedPointNewton newton(f, n);

  // seeds: the depth-n preimage tree of a point outside J
  std::vector<cplx> seeds{std::polar(default_escape_radius(map), 0.7)};
  for (int level = 0; level < n; ++level) {
    std::vector<cplx> next(seeds.size() * d);
    parallel_for(seeds.size(), [&](std::size_t i) {
      const auto pre = preimage_roots(map, seeds[i]);
      for (int k = 0; k < d; ++k) next[i * d + k] = pre[k];
    });
    seeds = std::move(next);
  }

  std::vector<cplx> z(seeds);
  std::vector<char> ok(N, 0);
  parallel_for(N, [&](std::size_t i) {
    cplx x = z[i];
    for (int it = 0; it < 100; ++it) {
      const cplx step = newton.correction(x);
      if (!finite(step)) break;
      x -= step;
      if (std::abs(step) <= 1e-12 * scale_of(x)) {
        ok[i] = 1;
        break;
      }
    }
    z[i] = x;
  });

  // Aberth on whatever Newton lost or duplicated, repelled by every root found
  for (int round = 0; round < 5; ++round) {
    const auto dup = duplicate_mask(z, ok, tol.merge);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < N; ++i) {
      if (ok[i] && dup[i]) ok[i] = 0;
      if (!ok[i]) active.push_back(i);
    }
    if (active.empty()) break;
    for (std::size_t i : active) z[i] = seeds[i] * cplx(1.0 + 1e-3 * round, 1e-3 * round);
    std::vector<char> done(active.size(), 0);
    for (int it = 0; it < 1000; ++it) {
      std::vector<cplx> next(active.size());
      parallel_for(active.size(), [&](std::size_t a) {
        const std::size_t k = active[a];
        if (done[a]) {
          next[a] = z[k];
          return;
        }
        const cplx r = newton.correction(z[k]);
        cplx s = 0.0;
        for (std::size_t j = 0; j < N; ++j)
          if (j != k) s += 1.0 / (z[k] - z[j]);
        const cplx w = r / (1.0 - r * s);
        next[a] = finite(w) ? z[k] - w : z[k];
        if (finite(w) && std::abs(w) <= 1e-12 * scale_of(next[a])) done[a] = 1;
      });
      for (std::size_t a = 0; a < active.size(); ++a) z[active[a]] = next[a];
      if (std::all_of(done.begin(), done.end(), [](char c) { return c != 0; })) break;
    }
    for (std::size_t a = 0; a < active.size(); ++a) ok[active[a]] = done[a];
  }
  const auto dup = duplicate_mask(z, ok, tol.merge);

  const bool real_map = map.has_real_coefficients();
  std::vector<double> abs_lambda(N, 0.0);
  std::vector<char> good(N, 0);
  parallel_for(N, [&](std::size_t i) {
    if (!ok[i] || dup[i]) return;
    cplx x = z[i];
    try {
      x -= newton.correction(x);
      if (real_map && std::abs(x.imag()) <= tol.merge * scale_of(x)) {
        x = cplx(x.real(), 0.0);
        x = newton_polish(map, x, n, 2);
        x = cplx(x.real(), 0.0);
      }
      const auto it = iterate_with_derivative(map, x, n);
      const double lam = std::abs(it.derivative);
      if (std::abs(it.value - x) <= tol.point * std::max(1.0, lam) * scale_of(x)) {
        good[i] = 1;
        abs_lambda[i] = lam;
      }
    } catch (const Error&) {
    }
    z[i] = x;
  });

  RootEnumeration out;
  for (std::size_t i = 0; i < N; ++i) {
    if (!good[i]) {
      out.polish_failures.push_back(z[i]);
    } else if (abs_lambda[i] <= 1.0) {
      ++out.attracting_removed;
    } else {
      out.points.push_back(z[i]);
    }
  }
  std::sort(out.points.begin(), out.points.end(), lex_less);
  return out;
}

std::vector<cplx> enumerate_symbolic(const RationalMap& map, const CodingScheme& scheme, int n,
                                     const Tolerances& tol) {
  if (scheme.contraction() >= 1.0) fail(ErrorKind::InvalidArgument, "coding is not contracting");
  const auto words = scheme.periodic_words(n);
  std::vector<cplx> out(words.size());
  std::vector<int> failed(words.size(), 0);
  parallel_for(words.size(), [&](std::size_t w) {
    const SymbolWord& word = words[w];
    const int start = scheme.kind() == CodingKind::FullShift ? 0 : word.symbols.front();
    cplx z = scheme.anchor(start);
    for (int sweep = 0; sweep < tol.max_sweeps; ++sweep) {
      cplx next = z;
      for (auto it = word.symbols.rbegin(); it != word.symbols.rend(); ++it)
        next = branch_preimage(map, scheme, *it, next, tol.point);
      const double step = std::abs(next - z);
      z = next;
      if (step < tol.point * scale_of(z) * 1e-3) {
        out[w] = z;
        return;
      }
    }
    out[w] = z;
    failed[w] = 1;
  });
  for (std::size_t w = 0; w < words.size(); ++w)
    if (failed[w]) fail(ErrorKind::NonConvergence, "branch composition did not converge for a period-" +
                                                       std::to_string(n) + " word");
  return out;
}

std::vector<PrimitiveOrbit> decompose_primitive(std::span<const cplx> points, int n, const RationalMap& map,
                                                const Tolerances& tol, Backend backend) {
  std::vector<cplx> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  const std::size_t N = pts.size();

  auto lookup = [&](cplx y) -> std::ptrdiff_t {
    const double r = tol.merge * scale_of(y) * 10.0;
    auto it = std::lower_bound(pts.begin(), pts.end(), y.real() - r,
                               [](cplx a, double v) { return a.real() < v; });
    std::ptrdiff_t best = -1;
    double best_d = r;
    for (; it != pts.end() && it->real() <= y.real() + r; ++it) {
      const double dist = std::abs(*it - y);
      if (dist <= best_d) {
        best_d = dist;
        best = it - pts.begin();
      }
    }
    return best;
  };

  std::vector<std::ptrdiff_t> image(N);
  parallel_for(N, [&](std::size_t i) { image[i] = lookup(map(pts[i])); });

  std::vector<char> seen(N, 0);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < N; ++i) {
    if (seen[i]) continue;
    int m = 0;
    std::size_t cur = i;
    do {
      if (image[cur] < 0)
        fail(ErrorKind::OrbitGroupingConflict, "forward image of a period-" + std::to_string(n) +
                                                   " point matches no listed point");
      seen[cur] = 1;
      cur = static_cast<std::size_t>(image[cur]);
      ++m;
    } while (cur != i && m <= n);
    if (cur != i || n % m != 0)
      fail(ErrorKind::OrbitGroupingConflict, "period-" + std::to_string(n) + " points do not close into a cycle");
    if (m == n) reps.push_back(i);
  }

  std::vector<PrimitiveOrbit> out(reps.size());
  parallel_for(reps.size(), [&](std::size_t k) {
    PrimitiveOrbit& o = out[k];
    o.period = n;
    o.point = pts[reps[k]];
    // chain rule over the listed cycle points; forward iterates of the
    // representative drift like |lambda| * eps
    cplx lambda = 1.0;
    std::size_t cur = reps[k];
    for (int j = 0; j < n; ++j) {
      lambda *= map.derivative(pts[cur]);
      cur = static_cast<std::size_t>(image[cur]);
    }
    o.multiplier = lambda;
    o.abs_multiplier = std::abs(o.multiplier);
    o.holonomy = o.multiplier / o.abs_multiplier;
    o.holonomy_angle = std::atan2(o.multiplier.imag(), o.multiplier.real());
    if (o.holonomy_angle <= -M_PI) o.holonomy_angle = M_PI;
    o.backend = backend;
  });
  return out;
}

double hausdorff_distance(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : INFINITY;
  auto directed = [](std::span<const cplx> from, std::span<const cplx> to) {
    std::vector<cplx> sorted(to.begin(), to.end());
    std::sort(sorted.begin(), sorted.end(), lex_less);
    std::vector<double> nearest(from.size());
    parallel_for(from.size(), [&](std::size_t i) {
      const cplx x = from[i];
      const auto mid = std::lower_bound(sorted.begin(), sorted.end(), x.real(),
                                        [](cplx p, double v) { return p.real() < v; });
      double best = INFINITY;
      for (auto it = mid; it != sorted.end() && it->real() - x.real() < best; ++it)
        best = std::min(best, std::abs(*it - x));
      for (auto it = mid; it != sorted.begin();) {
        --it;
        if (x.real() - it->real() >= best) break;
        best = std::min(best, std::abs(*it - x));
      }
      nearest[i] = best;
    });
    return *std::max_element(nearest.begin(), nearest.end());
  };
  return std::max(directed(a, b), directed(b, a));
}

long long necklace_count(int n, int d) {
  long long sum = 0;
  for (int k = 1; k <= n; ++k)
    if (n % k == 0) sum += moebius(n / k) * ipow(d, k);
  return sum / n;
}

namespace {

struct LevelResult {
  std::vector<cplx> raw;
  std::vector<PrimitiveOrbit> primitive;
};

LevelResult build_level(const RationalMap& map, int n, Backend backend, const CodingScheme* scheme,
                        const Tolerances& tol) {
  LevelResult r;
  if (backend == Backend::Roots) {
    auto roots = enumerate_roots(map, n, tol);
    if (!roots.polish_failures.empty())
      fail(ErrorKind::RootPolishFailure, std::to_string(roots.polish_failures.size()) + " period-" +
                                             std::to_string(n) + " roots failed to polish");
    r.raw = std::move(roots.points);
  } else {
    r.raw = enumerate_symbolic(map, *scheme, n, tol);
  }
  r.primitive = decompose_primitive(r.raw, n, map, tol, backend);
  return r;
}

}  // namespace

OrbitDatabase OrbitDatabase::build(const RationalMap& map, int n_max, Backend backend, const CodingScheme* scheme,
                                   const Tolerances& tol) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "n_max must be positive");
  std::optional<CodingScheme> detected;
  if (backend == Backend::Symbolic && scheme == nullptr) {
    detected = detect_full_shift(map);
    scheme = &*detected;
  }
  if (backend == Backend::Roots) {
    if (!map.is_polynomial()) fail(ErrorKind::InvalidArgument, "root backend needs a polynomial map");
    if (std::pow(static_cast<double>(map.degree()), n_max) > static_cast<double>(tol.degree_cap))
      fail(ErrorKind::DegreeCapExceeded, "d^n_max exceeds the degree cap; use the symbolic backend");
  }
  OrbitDatabase db(map);
  db.n_max_ = n_max;
  db.backend_ = backend;
  db.tol_ = tol;
  for (int n = 1; n <= n_max; ++n) {
    auto level = build_level(map, n, backend, scheme, tol);
    db.raw_counts_.push_back(level.raw.size());
    db.orbits_.insert(db.orbits_.end(), level.primitive.begin(), level.primitive.end());
  }
  db.finalize();
  return db;
}

OrbitDatabase OrbitDatabase::build_both(const RationalMap& map, int n_max, const CodingScheme& scheme,
                                        const Tolerances& tol) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "n_max must be positive");
  OrbitDatabase db(map);
  db.n_max_ = n_max;
  db.backend_ = Backend::Symbolic;
  db.tol_ = tol;
  for (int n = 1; n <= n_max; ++n) {
    auto sym = build_level(map, n, Backend::Symbolic, &scheme, tol);
    auto roots = build_level(map, n, Backend::Roots, nullptr, tol);
    db.agreement_.push_back({n, roots.raw.size(), sym.raw.size(), hausdorff_distance(roots.raw, sym.raw)});
    db.raw_counts_.push_back(sym.raw.size());
    db.orbits_.insert(db.orbits_.end(), sym.primitive.begin(), sym.primitive.end());
  }
  db.finalize();
  return db;
}

void OrbitDatabase::finalize() {
  map_hash_ = map_.hash();
  std::sort(orbits_.begin(), orbits_.end(), [](const PrimitiveOrbit& a, const PrimitiveOrbit& b) {
    if (a.abs_multiplier != b.abs_multiplier) return a.abs_multiplier < b.abs_multiplier;
    if (a.holonomy_angle != b.holonomy_angle) return a.holonomy_angle < b.holonomy_angle;
    if (a.period != b.period) return a.period < b.period;
    return lex_less(a.point, b.point);
  });

  // log of the smallest raw multiplier per level
  std::vector<double> log_min(n_max_, INFINITY);
  for (const auto& o : orbits_) {
    const double l = std::log(o.abs_multiplier);
    for (int n = o.period; n <= n_max_; n += o.period)
      log_min[n - 1] = std::min(log_min[n - 1], (n / o.period) * l);
  }
  std::vector<double> xs, ys;
  for (int n = std::max(1, n_max_ / 2); n <= n_max_; ++n)
    if (std::isfinite(log_min[n - 1])) {
      xs.push_back(n);
      ys.push_back(log_min[n - 1]);
    }
  double slope = 0.0;
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    slope = sxy / sxx;
  } else if (xs.size() == 1) {
    slope = ys[0] / xs[0];
  }
  if (!(slope > 0.0)) slope = 1e-12;
  kappa_ = std::exp(slope);
  double log_c0 = INFINITY;
  for (int n = 1; n <= n_max_; ++n)
    if (std::isfinite(log_min[n - 1])) log_c0 = std::min(log_c0, log_min[n - 1] - n * slope);
  c0_ = std::isfinite(log_c0) ? std::exp(log_c0) : 1.0;
}

std::size_t OrbitDatabase::primitive_count(int n) const {
  return static_cast<std::size_t>(
      std::count_if(orbits_.begin(), orbits_.end(), [n](const PrimitiveOrbit& o) { return o.period == n; }));
}

std::vector<OrbitDatabase::LevelTerm> OrbitDatabase::level_terms(int n) const {
  if (n < 1 || n > n_max_) fail(ErrorKind::EmptyLevel, "level " + std::to_string(n) + " is not in the database");
  std::vector<LevelTerm> out;
  for (const auto& o : orbits_)
    if (n % o.period == 0) out.push_back({std::log(o.abs_multiplier), o.holonomy, o.period, n / o.period});
  if (out.empty()) fail(ErrorKind::EmptyLevel, "no periodic points at level " + std::to_string(n));
  return out;
}

std::vector<cplx> OrbitDatabase::level_points(int n) const {
  if (n < 1 || n > n_max_) fail(ErrorKind::EmptyLevel, "level " + std::to_string(n) + " is not in the database");
  std::vector<const PrimitiveOrbit*> sel;
  std::vector<std::size_t> offset{0};
  for (const auto& o : orbits_)
    if (n % o.period == 0) {
      sel.push_back(&o);
      offset.push_back(offset.back() + o.period);
    }
  std::vector<cplx> out(offset.back());
  // forward images lose accuracy like |(f^k)'|, so each is re-polished
  parallel_for(sel.size(), [&](std::size_t k) {
    const PrimitiveOrbit& o = *sel[k];
    cplx x = o.point;
    for (int j = 0; j < o.period; ++j) {
      if (j > 0) x = newton_polish(map_, map_(x), o.period, 3);
      out[offset[k] + j] = x;
    }
  });
  return out;
}

std::span<const PrimitiveOrbit> OrbitDatabase::slice_below(double t) const {
  const auto it = std::partition_point(orbits_.begin(), orbits_.end(),
                                       [t](const PrimitiveOrbit& o) { return o.abs_multiplier < t; });
  return {orbits_.data(), static_cast<std::size_t>(it - orbits_.begin())};
}

std::size_t OrbitDatabase::query_Nt(double t) const {
  if (t > horizon())
    fail(ErrorKind::HorizonExceeded, "t exceeds the reliability horizon " + std::to_string(horizon()) +
                                         "; the count may miss orbits of period above n_max");
  return slice_below(t).size();
}

std::string OrbitDatabase::csv() const {
  std::string out = "period,re,im,lambda_re,lambda_im,abs_lambda,hol_angle,backend\n";
  char buf[512];
  for (const auto& o : orbits_) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", o.period, o.point.real(),
                  o.point.imag(), o.multiplier.real(), o.multiplier.imag(), o.abs_multiplier, o.holonomy_angle,
                  std::string(to_string(o.backend)).c_str());
    out += buf;
  }
  return out;
}

std::string OrbitDatabase::sidecar_json() const {
  nlohmann::json j;
  j["map"] = nlohmann::json::parse(map_.to_json());
  j["map_hash"] = map_hash_;
  j["n_max"] = n_max_;
  j["backend"] = std::string(to_string(backend_));
  j["tolerances"] = {{"point", tol_.point},
                     {"merge", tol_.merge},
                     {"degree_cap", tol_.degree_cap},
                     {"max_sweeps", tol_.max_sweeps}};
  j["raw_counts"] = raw_counts_;
  j["kappa"] = kappa_;
  j["c0"] = c0_;
  j["horizon"] = horizon();
  auto agr = nlohmann::json::array();
  for (const auto& a : agreement_)
    agr.push_back({{"period", a.period},
                   {"roots_count", a.roots_count},
                   {"symbolic_count", a.symbolic_count},
                   {"hausdorff", a.hausdorff}});
  j["agreement"] = agr;
  return j.dump(2) + "\n";
}

void OrbitDatabase::save(const std::string& prefix) const {
  for (const auto& [path, body] : {std::pair{prefix + ".csv", csv()}, std::pair{prefix + ".json", sidecar_json()}}) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::IoError, "cannot write " + path);
    os << body;
    if (!os) fail(ErrorKind::IoError, "write failed for " + path);
  }
}

OrbitDatabase OrbitDatabase::load(const std::string& prefix) {
  auto slurp = [](const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(prefix + ".json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("bad database sidecar: ") + e.what());
  }
  try {
    OrbitDatabase db(RationalMap::from_json(j.at("map").dump()));
    db.n_max_ = j.at("n_max").get<int>();
    db.backend_ = backend_from_string(j.at("backend").get<std::string>());
    const auto& t = j.at("tolerances");
    db.tol_.point = t.at("point").get<double>();
    db.tol_.merge = t.at("merge").get<double>();
    db.tol_.degree_cap = t.at("degree_cap").get<std::size_t>();
    db.tol_.max_sweeps = t.at("max_sweeps").get<int>();
    db.raw_counts_ = j.at("raw_counts").get<std::vector<std::size_t>>();
    for (const auto& a : j.at("agreement"))
      db.agreement_.push_back({a.at("period").get<int>(), a.at("roots_count").get<std::size_t>(),
                               a.at("symbolic_count").get<std::size_t>(), a.at("hausdorff").get<double>()});

    std::istringstream in(slurp(prefix + ".csv"));
    std::string line;
    std::getline(in, line);
    if (line != "period,re,im,lambda_re,lambda_im,abs_lambda,hol_angle,backend")
      fail(ErrorKind::ParseError, "unexpected database CSV header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      PrimitiveOrbit o;
      double re, im, lre, lim;
      char backend[32];
      if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf,%31s", &o.period, &re, &im, &lre, &lim,
                      &o.abs_multiplier, &o.holonomy_angle, backend) != 8)
        fail(ErrorKind::ParseError, "bad database CSV row: " + line);
      o.point = {re, im};
      o.multiplier = {lre, lim};
      o.holonomy = o.multiplier / o.abs_multiplier;
      o.backend = backend_from_string(backend);
      db.orbits_.push_back(o);
    }
    db.finalize();
    if (db.map_hash_ != j.at("map_hash").get<std::string>())
      fail(ErrorKind::ParseError, "database map hash does not match its map");
    return db;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("bad database sidecar: ") + e.what());
  }
}

}  // namespace primeorbits
