#include "primeorbits/thermo.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"

namespace primeorbits {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// log sum_k m_k exp(-s * p_k * l_k) and the weighted mean of p_k * l_k
struct LogSum {
  double log_sum;
  double mean_tau;
};

LogSum level_log_sum(const std::vector<OrbitDatabase::LevelTerm>& terms, double s) {
  double top = -INFINITY;
  for (const auto& t : terms) top = std::max(top, -s * t.power * t.log_abs_multiplier);
  double sum = 0.0, tau = 0.0;
  for (const auto& t : terms) {
    const double tn = t.power * t.log_abs_multiplier;
    const double w = t.multiplicity * std::exp(-s * tn - top);
    sum += w;
    tau += w * tn;
  }
  return {top + std::log(sum), tau / sum};
}

}  // namespace

TauTheta tau_theta_n(const RationalMap& map, cplx x, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "n must be positive");
  double tau = 0.0, theta = 0.0;
  cplx z = x;
  for (int j = 0; j < n; ++j) {
    cplx v, dv;
    map.evaluate(z, v, dv);
    if (std::abs(dv) <= 1e-12 * std::max(1.0, std::abs(z)))
      fail(ErrorKind::CriticalProximity, "orbit passes within tolerance of a critical point at step " +
                                             std::to_string(j));
    tau += std::log(std::abs(dv));
    theta += std::arg(dv);
    z = v;
  }
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return {tau, theta};
}

double pressure_n(const OrbitDatabase& db, double s, int n) {
  return level_log_sum(db.level_terms(n), s).log_sum / n;
}

double pressure_derivative_n(const OrbitDatabase& db, double s, int n) {
  return -level_log_sum(db.level_terms(n), s).mean_tau / n;
}

std::string_view to_string(DeltaMethod m) {
  return m == DeltaMethod::PeriodicOrbit ? "PeriodicOrbit" : "LeadingEigenvalue";
}

double delta_n(const OrbitDatabase& db, int n) {
  const auto terms = db.level_terms(n);
  auto P = [&](double s) { return level_log_sum(terms, s).log_sum / n; };
  double lo = 0.0, hi = 2.0;
  if (P(lo) <= 0.0) fail(ErrorKind::BracketFailure, "P_" + std::to_string(n) + "(0) <= 0");
  if (P(hi) >= 0.0) fail(ErrorKind::BracketFailure, "P_" + std::to_string(n) + "(2) >= 0");
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (P(mid) > 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int k = 0; k < 5; ++k) {
    const auto ls = level_log_sum(terms, s);
    const double step = (ls.log_sum / n) / (-ls.mean_tau / n);
    if (!std::isfinite(step)) break;
    s -= step;
  }
  return s;
}

double aitken_last(const std::vector<double>& xs) {
  if (xs.empty()) fail(ErrorKind::InvalidArgument, "empty sequence");
  const std::size_t k = xs.size();
  if (k < 3) return xs.back();
  const double a = xs[k - 3], b = xs[k - 2], c = xs[k - 1];
  const double d1 = c - b, d0 = b - a, dd = d1 - d0;
  if (dd == 0.0) return c;
  const double r = d1 / d0;
  // only accelerate a convergent, roughly geometric tail
  if (!(std::abs(r) < 0.95)) return c;
  const double acc = c - d1 * d1 / dd;
  return std::isfinite(acc) ? acc : c;
}

PressureEstimate estimate_delta(const OrbitDatabase& db, int n_min, int n_max) {
  if (n_min < 1 || n_max > db.n_max() || n_min > n_max)
    fail(ErrorKind::InvalidArgument, "level range outside the database");
  PressureEstimate est;
  est.n_min = n_min;
  est.n_max = n_max;
  est.per_level.resize(n_max - n_min + 1);
  for (int n = n_min; n <= n_max; ++n) est.per_level[n - n_min] = delta_n(db, n);
  est.delta = aitken_last(est.per_level);
  const std::size_t k = est.per_level.size();
  est.uncertainty = k >= 2 ? std::abs(est.per_level[k - 1] - est.per_level[k - 2]) : 0.0;
  est.method = DeltaMethod::PeriodicOrbit;
  return est;
}

EmpiricalMeasure equilibrium_weights_on(const RationalMap& map, std::vector<cplx> points, int n, double delta) {
  if (points.empty()) fail(ErrorKind::EmptyLevel, "no points to weight");
  std::vector<double> logw(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    logw[i] = -delta * std::log(std::abs(iterate_with_derivative(map, points[i], n).derivative));
  });
  const double top = *std::max_element(logw.begin(), logw.end());
  EmpiricalMeasure m;
  m.weights.resize(points.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sum += (m.weights[i] = std::exp(logw[i] - top));
  for (double& w : m.weights) w /= sum;
  m.points = std::move(points);
  m.level = n;
  m.exponent = delta;
  return m;
}

EmpiricalMeasure equilibrium_weights(const OrbitDatabase& db, int n, double delta) {
  std::vector<cplx> pts;
  std::vector<double> logw;
  for (const auto& o : db.orbits())
    if (n % o.period == 0) {
      const double l = -delta * (n / o.period) * std::log(o.abs_multiplier);
      for (int k = 0; k < o.period; ++k) logw.push_back(l);
    }
  if (logw.empty()) fail(ErrorKind::EmptyLevel, "no periodic points at level " + std::to_string(n));
  pts = db.level_points(n);
  const double top = *std::max_element(logw.begin(), logw.end());
  EmpiricalMeasure m;
  m.weights.resize(logw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) sum += (m.weights[i] = std::exp(logw[i] - top));
  for (double& w : m.weights) w /= sum;
  m.points = std::move(pts);
  m.level = n;
  m.exponent = delta;
  return m;
}

double li(double t) {
  if (!(t >= 2.0)) fail(ErrorKind::DomainError, "Li(t) needs t >= 2");
  if (t == 2.0) return 0.0;
  // in u = log s the integrand e^u / u is smooth on [log 2, log t]
  auto g = [](double u) { return std::exp(u) / u; };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, std::log(2.0), std::log(t), 20,
                                                                                  1e-15, &err);
  return v;
}

}  // namespace primeorbits
