#include "primeorbits/counting.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"
#include "primeorbits/thermo.hpp"

namespace primeorbits {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double parse_number(const std::string& s, double horizon) {
  if (s == "h") return horizon;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, "bad number in t grid: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) fail(ErrorKind::ParseError, "bad number in t grid: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

void check_grid(const std::vector<double>& t, double horizon) {
  if (t.empty()) fail(ErrorKind::InvalidArgument, "empty t grid");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0)) fail(ErrorKind::InvalidArgument, "t values must be positive");
    if (k > 0 && t[k] < t[k - 1]) fail(ErrorKind::InvalidArgument, "t grid must be nondecreasing");
  }
  if (t.back() > horizon * (1.0 + 1e-12))
    fail(ErrorKind::HorizonExceeded, "t = " + std::to_string(t.back()) + " is above the reliability horizon " +
                                         std::to_string(horizon) + "; N_t may undercount");
}

}  // namespace

std::vector<double> parse_t_grid(const std::string& text, double horizon) {
  std::vector<double> t;
  const auto parts = split(text, ':');
  if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
    const double a = parse_number(parts[1], horizon), b = parse_number(parts[2], horizon);
    const double k = parse_number(parts[3], horizon);
    if (k < 1 || k != std::floor(k) || k > 1e6) fail(ErrorKind::ParseError, "t grid count must be a positive integer");
    if (!(a > 0.0) || b < a) fail(ErrorKind::InvalidArgument, "t grid needs 0 < a <= b");
    const int n = static_cast<int>(k);
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 1.0 : static_cast<double>(i) / (n - 1);
      t.push_back(parts[0] == "log" ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    if (n > 1) t.back() = b;
  } else {
    for (const auto& p : split(text, ',')) t.push_back(parse_number(p, horizon));
  }
  return t;
}

CountReport count_report(const OrbitDatabase& db, double delta, std::vector<double> t_grid) {
  check_grid(t_grid, db.horizon());
  if (!(delta > 0.0)) fail(ErrorKind::InvalidArgument, "delta must be positive");
  CountReport r;
  r.delta = delta;
  r.t = std::move(t_grid);
  const std::size_t K = r.t.size();
  r.N_t.resize(K);
  r.li.resize(K);
  r.rel_error.resize(K);
  r.small_t.resize(K);
  const double min_abs = db.orbits().empty() ? INFINITY : db.orbits().front().abs_multiplier;
  for (std::size_t k = 0; k < K; ++k) {
    const double t = r.t[k];
    r.N_t[k] = db.slice_below(t).size();
    const double x = std::pow(t, delta);
    r.li[k] = x > 2.0 ? li(x) : 0.0;
    r.small_t[k] = t <= min_abs || x <= 2.0;
    r.rel_error[k] = r.li[k] > 0.0 ? static_cast<double>(r.N_t[k]) / r.li[k] - 1.0 : NAN;
  }

  const double top = r.t.back() / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (r.t[k] < top || r.small_t[k]) continue;
    if (std::isfinite(r.rel_error[k]))
      r.max_rel_error_top = std::isnan(r.max_rel_error_top) ? std::abs(r.rel_error[k])
                                                            : std::max(r.max_rel_error_top, std::abs(r.rel_error[k]));
    const double gap = std::abs(static_cast<double>(r.N_t[k]) - r.li[k]);
    if (!(gap > 0.0)) continue;
    const double x = std::log(r.t[k]), y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++r.beta_points;
  }
  const double n = static_cast<double>(r.beta_points);
  if (r.beta_points >= 2 && n * sxx - sx * sx > 0.0) r.beta_hat = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

std::string CountReport::csv() const {
  std::string out = "t,N_t,li_t_delta,rel_error,small_t\n";
  char buf[256];
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%d\n", t[k], N_t[k], li[k], rel_error[k],
                  small_t[k] ? 1 : 0);
    out += buf;
  }
  return out;
}

WeylReport weyl_report(const OrbitDatabase& db, int ell_max, std::vector<double> t_grid) {
  check_grid(t_grid, db.horizon());
  if (ell_max < 0 || ell_max > 10000) fail(ErrorKind::InvalidArgument, "ell_max must be in [0, 10000]");
  WeylReport r;
  r.ell_max = ell_max;
  r.t = std::move(t_grid);
  const std::size_t K = r.t.size();
  r.N_t.resize(K);
  for (std::size_t k = 0; k < K; ++k) r.N_t[k] = db.slice_below(r.t[k]).size();
  r.pi.assign(2 * ell_max + 1, std::vector<cplx>(K));
  const auto& orbits = db.orbits();
  parallel_for(r.pi.size(), [&](std::size_t row) {
    const int ell = static_cast<int>(row) - ell_max;
    // running sum over the sorted orbits; each t takes a prefix
    cplx acc = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 0; k < K; ++k) {
      for (; i < r.N_t[k]; ++i) acc += unit_power(orbits[i].holonomy, ell);
      r.pi[row][k] = acc;
    }
  });
  return r;
}

double WeylReport::normalized(int ell, std::size_t k) const {
  return N_t[k] == 0 ? 0.0 : std::abs(at(ell)[k]) / static_cast<double>(N_t[k]);
}

std::string WeylReport::csv() const {
  std::string out = "t,ell,re_pi,im_pi,N_t,normalized\n";
  char buf[256];
  for (std::size_t k = 0; k < t.size(); ++k)
    for (int ell = -ell_max; ell <= ell_max; ++ell) {
      const cplx p = at(ell)[k];
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%zu,%.17g\n", t[k], ell, p.real(), p.imag(), N_t[k],
                    normalized(ell, k));
      out += buf;
    }
  return out;
}

std::vector<cplx> fourier_coefficients(const std::function<cplx(double)>& psi, int L, int samples) {
  if (L < 0) fail(ErrorKind::InvalidArgument, "Fourier degree must be nonnegative");
  const int M = samples > 0 ? samples : 4 * L + 8;
  if (M <= 2 * L) fail(ErrorKind::InvalidArgument, "need more than 2L samples");
  std::vector<cplx> vals(M);
  for (int j = 0; j < M; ++j) vals[j] = psi(2.0 * kPi * j / M);
  std::vector<cplx> a(2 * L + 1);
  for (int ell = -L; ell <= L; ++ell) {
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) acc += vals[j] * std::polar(1.0, -2.0 * kPi * ell * (static_cast<double>(j) / M));
    a[ell + L] = acc / static_cast<double>(M);
  }
  return a;
}

double circle_residual(const std::vector<cplx>& points) {
  if (points.size() < 4) return 0.0;
  // centre and scale first so the fit is well conditioned
  cplx mean = 0.0;
  for (cplx z : points) mean += z;
  mean /= static_cast<double>(points.size());
  double scale = 0.0;
  for (cplx z : points) scale = std::max(scale, std::abs(z - mean));
  if (!(scale > 0.0)) return 0.0;
  Eigen::MatrixXd A(points.size(), 4);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const cplx w = (points[i] - mean) / scale;
    A(i, 0) = std::norm(w);
    A(i, 1) = w.real();
    A(i, 2) = w.imag();
    A(i, 3) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  return sv(3) / sv(0);
}

PsiSum psi_sum(const OrbitDatabase& db, const std::function<cplx(double)>& psi, const std::vector<cplx>& coeffs,
               double t, double delta) {
  if (coeffs.size() % 2 == 0) fail(ErrorKind::InvalidArgument, "coefficients must run from -L to L");
  check_grid({t}, db.horizon());
  std::vector<cplx> pts;
  for (const auto& o : db.orbits()) {
    pts.push_back(o.point);
    if (pts.size() >= 4096) break;
  }
  if (circle_residual(pts) < 1e-8)
    fail(ErrorKind::CircleCase,
         "the periodic points lie on a circle or line; only the counting statement applies, not equidistribution");
  const int L = static_cast<int>(coeffs.size() / 2);
  PsiSum r;
  r.t = t;
  const auto slice = db.slice_below(t);
  r.N_t = slice.size();
  for (const auto& o : slice) {
    const double theta = o.holonomy_angle < 0.0 ? o.holonomy_angle + 2.0 * kPi : o.holonomy_angle;
    r.direct += psi(theta);
  }
  const auto w = weyl_report(db, L, {t});
  for (int ell = -L; ell <= L; ++ell) r.fourier += coeffs[ell + L] * w.at(ell)[0];
  const double x = std::pow(t, delta);
  r.main_term = coeffs[L] * (x > 2.0 ? li(x) : 0.0);
  r.route_gap = std::abs(r.direct - r.fourier);
  return r;
}

}  // namespace primeorbits
