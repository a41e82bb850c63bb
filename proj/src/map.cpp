#include "primeorbits/map.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "primeorbits/errors.hpp"

namespace primeorbits {

namespace {

constexpr double kOverflowMagnitude = 1e150;

nlohmann::json coeffs_to_json(const Polynomial& p) {
  auto arr = nlohmann::json::array();
  for (auto c : p.coefficients()) arr.push_back({c.real(), c.imag()});
  return arr;
}

Polynomial coeffs_from_json(const nlohmann::json& arr, const char* field) {
  if (!arr.is_array() || arr.empty())
    fail(ErrorKind::ParseError, std::string("map field '") + field + "' must be a non-empty array");
  std::vector<cplx> coeffs;
  for (const auto& entry : arr) {
    if (entry.is_number()) {
      coeffs.emplace_back(entry.get<double>(), 0.0);
    } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() && entry[1].is_number()) {
      coeffs.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    } else {
      fail(ErrorKind::ParseError, std::string("map field '") + field + "' entries must be [re, im]");
    }
  }
  return Polynomial(std::move(coeffs));
}

// |D(z)| relative to the size of its terms
bool near_pole(const Polynomial& den, cplx z, cplx dz) {
  double scale = 0.0, r = 1.0;
  const double az = std::abs(z);
  for (auto c : den.coefficients()) {
    scale += std::abs(c) * r;
    r *= az;
  }
  return std::abs(dz) <= 1e-14 * scale || std::abs(dz) < 1e-300;
}

}  // namespace

RationalMap::RationalMap(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero()) fail(ErrorKind::InvalidMap, "denominator is identically zero");
  if (num_.is_zero()) fail(ErrorKind::InvalidMap, "numerator is identically zero");
  const cplx scale = den_.degree() == 0 ? den_[0] : den_.leading();
  num_ = (1.0 / scale) * num_;
  den_ = (1.0 / scale) * den_;
  if (den_.degree() == 0) den_ = Polynomial::constant(1.0);
  degree_ = std::max(num_.degree(), den_.degree());
  if (degree_ < 2) fail(ErrorKind::InvalidMap, "map degree must be at least 2");
  if (den_.degree() >= 1) {
    const double nscale = num_.max_abs_coefficient();
    for (cplx r : polynomial_roots(den_)) {
      double rpow = 1.0, bound = 0.0;
      for (int k = 0; k <= num_.degree(); ++k, rpow *= std::abs(r)) bound += std::abs(num_[k]) * rpow;
      if (std::abs(num_(r)) <= 1e-10 * std::max(bound, nscale))
        fail(ErrorKind::InvalidMap, "numerator and denominator share a root");
    }
  }
}

RationalMap RationalMap::polynomial(std::vector<cplx> coeffs) {
  return RationalMap(Polynomial(std::move(coeffs)), Polynomial::constant(1.0));
}

RationalMap RationalMap::quadratic(cplx c) { return polynomial({c, 0.0, 1.0}); }

bool RationalMap::has_real_coefficients() const {
  for (auto c : num_.coefficients())
    if (c.imag() != 0.0) return false;
  for (auto c : den_.coefficients())
    if (c.imag() != 0.0) return false;
  return true;
}

std::optional<cplx> RationalMap::quadratic_parameter() const {
  if (is_polynomial() && num_.degree() == 2 && num_[2] == cplx{1.0} && num_[1] == cplx{0.0})
    return num_[0];
  return std::nullopt;
}

cplx RationalMap::operator()(cplx z) const {
  if (is_polynomial()) return num_(z);
  const cplx d = den_(z);
  if (near_pole(den_, z, d)) fail(ErrorKind::PoleHit, "denominator vanishes at the evaluation point");
  return num_(z) / d;
}

void RationalMap::evaluate(cplx z, cplx& value, cplx& deriv) const {
  if (is_polynomial()) {
    num_.evaluate(z, value, deriv);
    return;
  }
  cplx n, dn, d, dd;
  num_.evaluate(z, n, dn);
  den_.evaluate(z, d, dd);
  if (near_pole(den_, z, d)) fail(ErrorKind::PoleHit, "denominator vanishes at the evaluation point");
  value = n / d;
  deriv = (dn * d - n * dd) / (d * d);
}

cplx RationalMap::derivative(cplx z) const {
  cplx v, dv;
  evaluate(z, v, dv);
  return dv;
}

std::vector<cplx> RationalMap::critical_points() const {
  const Polynomial p = num_.derivative() * den_ - num_ * den_.derivative();
  return polynomial_roots(p.trimmed(1e-14));
}

std::string RationalMap::to_json() const {
  nlohmann::json j;
  j["numerator"] = coeffs_to_json(num_);
  j["denominator"] = coeffs_to_json(den_);
  return j.dump();
}

RationalMap RationalMap::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("map JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("numerator"))
    fail(ErrorKind::ParseError, "map JSON needs a 'numerator' field");
  Polynomial num = coeffs_from_json(j["numerator"], "numerator");
  Polynomial den = j.contains("denominator") ? coeffs_from_json(j["denominator"], "denominator")
                                             : Polynomial::constant(1.0);
  return RationalMap(std::move(num), std::move(den));
}

RationalMap RationalMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open map file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string RationalMap::hash() const {
  const std::string text = to_json();
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 15]);
  }
  return out;
}

cplx evaluate(const RationalMap& map, cplx z) { return map(z); }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Hyperbolic: return "Hyperbolic";
    case Verdict::NotHyperbolic: return "NotHyperbolic";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

IterateResult iterate_with_derivative(const RationalMap& map, cplx z, int n) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "iteration count must be non-negative");
  cplx deriv{1.0, 0.0};
  for (int k = 0; k < n; ++k) {
    cplx v, dv;
    map.evaluate(z, v, dv);
    deriv *= dv;
    z = v;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowMagnitude ||
        !std::isfinite(std::abs(deriv)))
      fail(ErrorKind::Overflow, "orbit escaped representable range at step " + std::to_string(k + 1));
  }
  return {z, deriv};
}

double default_escape_radius(const RationalMap& map) {
  if (auto c = map.quadratic_parameter()) return std::max(std::abs(*c), 2.0) + 1.0;
  const Polynomial& num = map.numerator();
  const Polynomial& den = map.denominator();
  if (map.is_polynomial()) {
    double s = 0.0;
    for (int k = 0; k < num.degree(); ++k) s += std::abs(num[k]);
    return std::max(1.0, (s + 2.0) / std::abs(num.leading())) + 1.0;
  }
  if (num.degree() >= den.degree() + 1) {
    double sn = 0.0, sd = 0.0;
    for (int k = 0; k < num.degree(); ++k) sn += std::abs(num[k]);
    for (auto c : den.coefficients()) sd += std::abs(c);
    return std::max(1.0, 2.0 * (sn + 2.0 * sd) / std::abs(num.leading())) + 1.0;
  }
  return 1e6;
}

namespace {

bool infinity_attracting(const RationalMap& map) {
  const int dn = map.numerator().degree(), dd = map.denominator().degree();
  if (dn >= dd + 2) return true;
  if (dn == dd + 1) return std::abs(map.numerator().leading() / map.denominator().leading()) > 1.0 + 1e-6;
  return false;
}

// Newton on f^p(x) - x.
std::optional<cplx> refine_cycle(const RationalMap& map, cplx x, int p) {
  for (int it = 0; it < 60; ++it) {
    IterateResult r;
    try {
      r = iterate_with_derivative(map, x, p);
    } catch (const Error&) {
      return std::nullopt;
    }
    const cplx g = r.value - x;
    const cplx dg = r.derivative - 1.0;
    if (dg == cplx{0.0}) return std::nullopt;
    const cplx step = g / dg;
    x -= step;
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return std::nullopt;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(x))) return x;
  }
  return std::nullopt;
}

int minimal_period(const RationalMap& map, cplx x, int p, double tol) {
  cplx z = x;
  for (int q = 1; q <= p; ++q) {
    z = map(z);
    if (p % q == 0 && std::abs(z - x) <= tol * (1.0 + std::abs(x))) return q;
  }
  return p;
}

int find_cycle(const std::vector<AttractingCycle>& cycles, const RationalMap& map, cplx x) {
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    cplx z = cycles[i].point;
    for (int k = 0; k < cycles[i].period; ++k) {
      if (std::abs(z - x) <= 1e-8 * (1.0 + std::abs(x))) return static_cast<int>(i);
      z = map(z);
    }
  }
  return -1;
}

// Repelling periodic points near J: Newton on f^n(z) - z seeded from a
// deterministic random backward orbit.
std::vector<HyperbolicityCertificate::Sample> sample_repelling_points(const RationalMap& map,
                                                                      int max_period) {
  std::mt19937_64 rng(0x5eed1234ULL);
  std::vector<cplx> seeds;
  cplx z{0.3183, 0.2718};
  for (int step = 0; step < 40 + 24; ++step) {
    std::vector<cplx> pre;
    try {
      pre = preimage_roots(map, z);
    } catch (const Error&) {
      break;
    }
    if (pre.empty()) break;
    z = pre[rng() % pre.size()];
    if (step >= 40) seeds.push_back(z);
  }
  std::vector<HyperbolicityCertificate::Sample> out;
  for (int n = 1; n <= max_period; ++n) {
    for (cplx seed : seeds) {
      auto x = refine_cycle(map, seed, n);
      if (!x) continue;
      IterateResult r;
      try {
        r = iterate_with_derivative(map, *x, n);
      } catch (const Error&) {
        continue;
      }
      const double lam = std::abs(r.derivative);
      if (lam <= 1.0 + 1e-6 || std::abs(r.value - *x) > 1e-8 * (1.0 + std::abs(*x))) continue;
      bool dup = false;
      for (const auto& s : out)
        if (s.period == n && std::abs(s.point - *x) <= 1e-9 * (1.0 + std::abs(*x))) dup = true;
      if (!dup) out.push_back({*x, n, lam});
    }
  }
  return out;
}

}  // namespace

std::vector<cplx> preimage_roots(const RationalMap& map, cplx z) {
  const Polynomial p = map.numerator() - z * map.denominator();
  return polynomial_roots(p.trimmed(1e-15));
}

bool HyperbolicityCertificate::all_critical_orbits_escape() const {
  if (fates.empty()) return false;
  return std::all_of(fates.begin(), fates.end(),
                     [](const CriticalFate& f) { return f.kind == CriticalFate::Kind::Escaped; });
}

HyperbolicityCertificate classify_hyperbolic(const RationalMap& map, int max_iter,
                                             std::optional<double> escape_radius) {
  HyperbolicityCertificate cert;
  const double radius = escape_radius.value_or(default_escape_radius(map));
  const bool inf_attracts = infinity_attracting(map);
  bool landed_on_nonattracting = false;

  for (cplx c : map.critical_points()) {
    CriticalFate fate;
    fate.critical_point = c;
    std::vector<cplx> orbit{c};
    cplx z = c;
    for (int k = 1; k <= max_iter; ++k) {
      try {
        z = map(z);
      } catch (const Error&) {
        // critical point mapped onto a pole, i.e. to infinity
        if (inf_attracts) {
          fate.kind = CriticalFate::Kind::Escaped;
          fate.escape_iteration = k;
        }
        break;
      }
      orbit.push_back(z);
      if (inf_attracts && std::abs(z) > radius) {
        fate.kind = CriticalFate::Kind::Escaped;
        fate.escape_iteration = k;
        break;
      }
      if (k % 8 != 0 && k != max_iter) continue;
      bool decided = false;
      for (int p = 1; p <= std::min(32, k) && !decided; ++p) {
        const cplx prev = orbit[orbit.size() - 1 - p];
        if (std::abs(z - prev) > 1e-6 * (1.0 + std::abs(z))) continue;
        auto x = refine_cycle(map, z, p);
        if (!x) continue;
        const int q = minimal_period(map, *x, p, 1e-10);
        const cplx lam = iterate_with_derivative(map, *x, q).derivative;
        if (std::abs(lam) < 1.0 - 1e-6) {
          int id = find_cycle(cert.attracting_cycles, map, *x);
          if (id < 0) {
            cert.attracting_cycles.push_back({*x, q, lam});
            id = static_cast<int>(cert.attracting_cycles.size()) - 1;
          }
          fate.kind = CriticalFate::Kind::EscapesToAttractor;
          fate.cycle_id = id;
          decided = true;
        } else if (std::abs(z - *x) <= 1e-10 * (1.0 + std::abs(z))) {
          // sitting on a repelling or indifferent cycle
          landed_on_nonattracting = true;
          decided = true;
        }
      }
      if (decided) break;
    }
    cert.fates.push_back(fate);
  }

  const bool all_decided =
      std::none_of(cert.fates.begin(), cert.fates.end(),
                   [](const CriticalFate& f) { return f.kind == CriticalFate::Kind::Undecided; });
  if (landed_on_nonattracting)
    cert.verdict = Verdict::NotHyperbolic;
  else
    cert.verdict = all_decided && !cert.fates.empty() ? Verdict::Hyperbolic : Verdict::Inconclusive;

  cert.samples = sample_repelling_points(map, 6);
  std::vector<double> ns, logs;
  for (int n = 1; n <= 6; ++n) {
    double m = INFINITY;
    for (const auto& s : cert.samples)
      if (s.period == n) m = std::min(m, s.abs_multiplier);
    if (std::isfinite(m)) {
      ns.push_back(n);
      logs.push_back(std::log(m));
    }
  }
  if (ns.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) mx += ns[i], my += logs[i];
    mx /= ns.size();
    my /= ns.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      sxy += (ns[i] - mx) * (logs[i] - my);
      sxx += (ns[i] - mx) * (ns[i] - mx);
    }
    cert.kappa = std::exp(sxy / sxx);
    double c0 = INFINITY;
    for (const auto& s : cert.samples) c0 = std::min(c0, s.abs_multiplier / std::pow(cert.kappa, s.period));
    cert.c0 = c0;
  }
  return cert;
}

MoebiusTransform::MoebiusTransform(cplx a, cplx b, cplx c, cplx d) : m_{a, b, c, d} {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (scale == 0.0 || std::abs(a * d - b * c) <= 1e-12 * scale * scale)
    fail(ErrorKind::DegenerateTransform, "Moebius transform has vanishing determinant");
}

cplx MoebiusTransform::operator()(cplx z) const { return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]); }

MoebiusTransform MoebiusTransform::inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

RationalMap conjugate(const RationalMap& map, const MoebiusTransform& m) {
  const auto& [a, b, c, d] = m.matrix();
  // w = M^{-1}(z) = U(z) / V(z)
  const Polynomial u({-b, d});
  const Polynomial v({a, -c});
  const int deg = map.degree();
  auto homogenize = [&](const Polynomial& p) {
    std::vector<Polynomial> upow{Polynomial::constant(1.0)}, vpow{Polynomial::constant(1.0)};
    for (int k = 1; k <= deg; ++k) {
      upow.push_back(upow.back() * u);
      vpow.push_back(vpow.back() * v);
    }
    Polynomial acc;
    for (int k = 0; k <= p.degree(); ++k) acc = acc + p[k] * (upow[k] * vpow[deg - k]);
    return acc;
  };
  const Polynomial nh = homogenize(map.numerator());
  const Polynomial dh = homogenize(map.denominator());
  const Polynomial num = a * nh + b * dh;
  const Polynomial den = c * nh + d * dh;
  const double rel = 1e-13;
  const double scale = std::max(num.max_abs_coefficient(), den.max_abs_coefficient());
  auto trim = [&](const Polynomial& p) {
    std::vector<cplx> cs(p.coefficients().begin(), p.coefficients().end());
    for (auto& x : cs)
      if (std::abs(x) <= rel * scale) x = 0.0;
    return Polynomial(std::move(cs));
  };
  return RationalMap(trim(num), trim(den));
}

std::optional<RationalMap> builtin_map(const std::string& name) {
  if (name == "z2") return RationalMap::quadratic(0.0);
  if (name == "z2m6") return RationalMap::quadratic(-6.0);
  if (name == "z2p5") return RationalMap::quadratic(5.0);
  if (name == "z2p2p2i") return RationalMap::quadratic({2.0, 2.0});
  return std::nullopt;
}

std::vector<std::string> builtin_map_names() { return {"z2", "z2m6", "z2p5", "z2p2p2i"}; }

}  // namespace primeorbits
