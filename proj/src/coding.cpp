#include "primeorbits/coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "primeorbits/errors.hpp"

namespace primeorbits {

namespace {

constexpr int kBoundarySamples = 256;

double arg_0_2pi(cplx z) {
  double a = std::arg(z);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a;
}

// Winding number of a closed polygon around p.
int winding_number(const std::vector<cplx>& curve, cplx p) {
  double total = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const cplx a = curve[k] - p;
    const cplx b = curve[(k + 1) % curve.size()] - p;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

bool strictly_positive_power(const std::vector<std::vector<int>>& m) {
  const std::size_t k = m.size();
  std::vector<std::vector<int>> p = m;
  const std::size_t max_power = (k - 1) * (k - 1) + 1;
  for (std::size_t power = 1; power <= max_power; ++power) {
    bool positive = true;
    for (auto& row : p)
      for (int v : row) positive = positive && v > 0;
    if (positive) return true;
    std::vector<std::vector<int>> next(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l)
        if (p[i][l])
          for (std::size_t j = 0; j < k; ++j)
            if (m[l][j]) next[i][j] = 1;
    p = std::move(next);
  }
  return false;
}

}  // namespace

SymbolWord word_from_index(std::uint64_t index, int n, int alphabet) {
  SymbolWord w;
  w.symbols.assign(n, 0);
  for (int k = n - 1; k >= 0; --k) {
    w.symbols[k] = static_cast<int>(index % alphabet);
    index /= alphabet;
  }
  return w;
}

CodingScheme CodingScheme::full_shift(FullShiftData data, double contraction) {
  CodingScheme s;
  s.kind_ = CodingKind::FullShift;
  const int d = static_cast<int>(data.component_centers.size());
  s.matrix_.assign(d, std::vector<int>(d, 1));
  for (cplx c : data.component_centers) s.pieces_.push_back({c});
  s.anchors_ = {data.center};
  s.neighborhood_ = data.radius;
  s.contraction_ = contraction;
  s.full_ = std::move(data);
  return s;
}

CodingScheme CodingScheme::user_markov(const RationalMap& map, std::vector<std::vector<int>> transition,
                                       std::vector<std::vector<cplx>> pieces, std::vector<cplx> anchors,
                                       std::optional<double> neighborhood) {
  const std::size_t k = pieces.size();
  if (k < 2) fail(ErrorKind::InvalidArgument, "user coding needs at least two pieces");
  if (transition.size() != k) fail(ErrorKind::InvalidArgument, "transition matrix size does not match pieces");
  for (const auto& row : transition) {
    if (row.size() != k) fail(ErrorKind::InvalidArgument, "transition matrix must be square");
    for (int v : row)
      if (v != 0 && v != 1) fail(ErrorKind::InvalidArgument, "transition matrix must be 0/1");
  }
  if (!strictly_positive_power(transition))
    fail(ErrorKind::InvalidArgument, "transition matrix is not topologically mixing");
  for (const auto& cloud : pieces)
    if (cloud.empty()) fail(ErrorKind::InvalidArgument, "empty piece sample set");

  CodingScheme s;
  s.kind_ = CodingKind::UserMarkov;
  s.matrix_ = std::move(transition);
  s.pieces_ = std::move(pieces);
  if (anchors.empty()) {
    for (const auto& cloud : s.pieces_) {
      cplx mean{0.0};
      for (cplx z : cloud) mean += z;
      mean /= static_cast<double>(cloud.size());
      auto best = std::min_element(cloud.begin(), cloud.end(),
                                   [&](cplx a, cplx b) { return std::abs(a - mean) < std::abs(b - mean); });
      anchors.push_back(*best);
    }
  }
  if (anchors.size() != k) fail(ErrorKind::InvalidArgument, "need one anchor per piece");
  s.anchors_ = std::move(anchors);

  double lo_re = INFINITY, hi_re = -INFINITY, lo_im = INFINITY, hi_im = -INFINITY;
  double contraction = 0.0;
  for (const auto& cloud : s.pieces_)
    for (cplx z : cloud) {
      lo_re = std::min(lo_re, z.real());
      hi_re = std::max(hi_re, z.real());
      lo_im = std::min(lo_im, z.imag());
      hi_im = std::max(hi_im, z.imag());
      contraction = std::max(contraction, 1.0 / std::abs(map.derivative(z)));
    }
  s.neighborhood_ = neighborhood.value_or(0.1 * std::hypot(hi_re - lo_re, hi_im - lo_im));
  s.contraction_ = contraction;
  for (std::size_t j = 0; j < k; ++j)
    if (s.nearest_piece(s.anchors_[j]) != static_cast<int>(j))
      fail(ErrorKind::InvalidArgument, "anchor " + std::to_string(j) + " is not closest to its own piece");
  return s;
}

CodingScheme CodingScheme::user_markov_from_json(const RationalMap& map, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("coding JSON: ") + e.what());
  }
  auto point = [](const nlohmann::json& p) {
    if (!p.is_array() || p.size() != 2) fail(ErrorKind::ParseError, "coding points must be [re, im]");
    return cplx{p[0].get<double>(), p[1].get<double>()};
  };
  if (!j.contains("transition") || !j.contains("pieces"))
    fail(ErrorKind::ParseError, "coding JSON needs 'transition' and 'pieces'");
  std::vector<std::vector<int>> matrix;
  std::vector<std::vector<cplx>> pieces;
  std::vector<cplx> anchors;
  try {
    const auto& t = j["transition"];
    const std::size_t k = j["pieces"].size();
    if (t.is_array() && !t.empty() && t[0].is_number()) {
      // row-major flat array
      if (t.size() != k * k) fail(ErrorKind::ParseError, "flat transition array has wrong length");
      matrix.assign(k, std::vector<int>(k));
      for (std::size_t a = 0; a < k * k; ++a) matrix[a / k][a % k] = t[a].get<int>();
    } else {
      matrix = t.get<std::vector<std::vector<int>>>();
    }
    for (const auto& cloud : j["pieces"]) {
      pieces.emplace_back();
      for (const auto& p : cloud) pieces.back().push_back(point(p));
    }
    if (j.contains("anchors"))
      for (const auto& p : j["anchors"]) anchors.push_back(point(p));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("coding JSON: ") + e.what());
  }
  std::optional<double> nb;
  if (j.contains("neighborhood")) nb = j["neighborhood"].get<double>();
  return user_markov(map, std::move(matrix), std::move(pieces), std::move(anchors), nb);
}

int CodingScheme::target_of(cplx z) const { return kind_ == CodingKind::FullShift ? 0 : nearest_piece(z); }

bool CodingScheme::branch_allowed(int symbol, int target) const {
  if (kind_ == CodingKind::FullShift) return true;
  return transition(symbol, target);
}

double CodingScheme::distance_to_piece(int i, cplx z) const {
  double best = INFINITY;
  for (cplx p : pieces_[i]) best = std::min(best, std::abs(z - p));
  return best;
}

int CodingScheme::nearest_piece(cplx z) const {
  int best = 0;
  double dist = INFINITY;
  for (int i = 0; i < alphabet_size(); ++i) {
    const double d = distance_to_piece(i, z);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

bool CodingScheme::in_base_region(cplx z) const {
  if (kind_ == CodingKind::FullShift) return std::abs(z - full_->center) < full_->radius;
  return distance_to_piece(nearest_piece(z), z) <= neighborhood_;
}

bool CodingScheme::admissible(const SymbolWord& word, int start_target, bool cyclic) const {
  if (word.symbols.empty()) return false;
  for (int s : word.symbols)
    if (s < 0 || s >= alphabet_size()) return false;
  for (std::size_t k = 0; k + 1 < word.symbols.size(); ++k)
    if (!transition(word.symbols[k], word.symbols[k + 1])) return false;
  if (cyclic && !transition(word.symbols.back(), word.symbols.front())) return false;
  if (start_target >= 0 && !branch_allowed(word.symbols.back(), start_target)) return false;
  return true;
}

std::vector<SymbolWord> CodingScheme::periodic_words(int n) const {
  const int d = alphabet_size();
  const double total = std::pow(static_cast<double>(d), n);
  if (total > 1 << 24) fail(ErrorKind::DegreeCapExceeded, "too many words at this length");
  std::vector<SymbolWord> out;
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(total); ++idx) {
    SymbolWord w = word_from_index(idx, n, d);
    if (kind_ == CodingKind::FullShift || admissible(w, -1, true)) out.push_back(std::move(w));
  }
  return out;
}

std::string CodingScheme::describe() const {
  std::ostringstream os;
  if (kind_ == CodingKind::FullShift)
    os << "FullShift(" << alphabet_size() << " symbols, base disk |z - " << full_->center.real() << "| < "
       << full_->radius << ", contraction " << contraction_ << ")";
  else
    os << "UserMarkov(" << alphabet_size() << " pieces, contraction " << contraction_ << ")";
  return os.str();
}

std::vector<cplx> preimages(const RationalMap& map, cplx z, double merge_tol) {
  const double zscale = std::max(1.0, std::abs(z));
  for (cplx c : map.critical_points()) {
    cplx v;
    try {
      v = map(c);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(v - z) <= 1e-12 * zscale)
      fail(ErrorKind::CriticalValueCollision, "point is a critical value");
  }
  std::vector<cplx> pre = preimage_roots(map, z);
  for (std::size_t a = 0; a < pre.size(); ++a)
    for (std::size_t b = a + 1; b < pre.size(); ++b)
      if (std::abs(pre[a] - pre[b]) <= merge_tol * std::max(1.0, std::abs(pre[a])))
        fail(ErrorKind::CriticalValueCollision, "two preimages merge");
  return pre;
}

cplx branch_preimage(const RationalMap& map, const CodingScheme& scheme, int symbol, cplx z, double tol) {
  std::vector<cplx> pre;
  if (auto c = map.quadratic_parameter()) {
    // closed form, skips the critical value scan
    const cplx w = std::sqrt(z - *c);
    if (std::abs(w) <= 0.5 * tol * std::max(1.0, std::abs(w)))
      fail(ErrorKind::CriticalValueCollision, "point is a critical value");
    pre = {w, -w};
  } else {
    pre = preimages(map, z, tol);
  }
  double best = INFINITY, second = INFINITY;
  cplx choice{};
  for (cplx w : pre) {
    const double d = scheme.distance_to_piece(symbol, w);
    if (d < best) {
      second = best;
      best = d;
      choice = w;
    } else if (d < second) {
      second = d;
    }
  }
  if (second - best < 10.0 * tol * std::max(1.0, std::abs(choice)))
    fail(ErrorKind::BranchAmbiguity, "preimage cannot be assigned to piece " + std::to_string(symbol));
  return choice;
}

cplx backward_point(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& word, cplx z,
                    double tol) {
  if (!scheme.admissible(word, scheme.target_of(z)))
    fail(ErrorKind::InvalidArgument, "word is not admissible from this point");
  for (auto it = word.symbols.rbegin(); it != word.symbols.rend(); ++it)
    z = branch_preimage(map, scheme, *it, z, tol);
  return z;
}

CodingScheme detect_full_shift(const RationalMap& map) {
  if (!map.is_polynomial()) fail(ErrorKind::NotCantor, "full-shift detection needs a polynomial map");
  const auto cert = classify_hyperbolic(map);
  if (cert.verdict != Verdict::Hyperbolic || !cert.all_critical_orbits_escape())
    fail(ErrorKind::NotCantor, "not every critical orbit escapes; J is not a Cantor set");

  const int d = map.degree();
  std::vector<cplx> critical_values;
  for (cplx c : map.critical_points()) critical_values.push_back(map(c));

  auto boundary_preimage_radius = [&](double r) {
    double m = 0.0;
    for (int k = 0; k < kBoundarySamples; ++k) {
      const cplx b = std::polar(r, 2.0 * std::numbers::pi * k / kBoundarySamples);
      for (cplx w : preimage_roots(map, b)) m = std::max(m, std::abs(w));
    }
    return m;
  };

  // Shrink the escape disk towards J: f^{-1}(D_r) lies in D_{r'} with r'
  // the largest preimage modulus of the boundary circle.
  double r = default_escape_radius(map);
  for (int step = 0; step < 200; ++step) {
    const double next = boundary_preimage_radius(r);
    if (next >= r) break;
    if (r - next < 1e-2 * r) break;
    r = next;
  }

  for (cplx v : critical_values)
    if (std::abs(v) <= r) fail(ErrorKind::NotCantor, "a critical value lies in every candidate base disk");

  // Trace the d boundary curves of f^{-1}(D_r) by continuity.
  std::vector<std::vector<cplx>> curves(d);
  {
    auto first = preimage_roots(map, cplx{r, 0.0});
    for (int j = 0; j < d; ++j) curves[j].push_back(first[j]);
  }
  for (int k = 1; k <= kBoundarySamples; ++k) {
    const cplx b = std::polar(r, 2.0 * std::numbers::pi * k / kBoundarySamples);
    auto pre = preimage_roots(map, b);
    std::vector<bool> used(pre.size(), false);
    for (int j = 0; j < d; ++j) {
      int best = -1;
      double dist = INFINITY;
      for (std::size_t a = 0; a < pre.size(); ++a)
        if (!used[a] && std::abs(pre[a] - curves[j].back()) < dist) {
          dist = std::abs(pre[a] - curves[j].back());
          best = static_cast<int>(a);
        }
      used[best] = true;
      if (k < kBoundarySamples) {
        curves[j].push_back(pre[best]);
      } else if (std::abs(pre[best] - curves[j].front()) > 1e-9 * r) {
        fail(ErrorKind::NotCantor, "preimage of the base circle is not a union of d closed curves");
      }
    }
  }

  std::vector<cplx> centers = preimage_roots(map, cplx{0.0});
  std::sort(centers.begin(), centers.end(), [](cplx a, cplx b) { return arg_0_2pi(a) < arg_0_2pi(b); });

  std::vector<std::vector<cplx>> boundaries(d);
  std::vector<bool> taken(d, false);
  for (int i = 0; i < d; ++i) {
    int owner = -1;
    for (int j = 0; j < d; ++j) {
      const int w = winding_number(curves[j], centers[i]);
      if (w == 1 || w == -1) {
        if (owner >= 0 || taken[j]) fail(ErrorKind::NotCantor, "preimage components overlap");
        owner = j;
      } else if (w != 0) {
        fail(ErrorKind::NotCantor, "preimage components overlap");
      }
    }
    if (owner < 0) fail(ErrorKind::NotCantor, "component centre not enclosed by a boundary curve");
    taken[owner] = true;
    boundaries[i] = curves[owner];
  }

  double contraction = 0.0;
  for (int i = 0; i < d; ++i) {
    for (cplx w : boundaries[i]) {
      if (std::abs(w) >= r) fail(ErrorKind::NotCantor, "preimage component not inside the base disk");
      contraction = std::max(contraction, 1.0 / std::abs(map.derivative(w)));
    }
    for (int j = i + 1; j < d; ++j) {
      double gap = INFINITY;
      for (cplx a : boundaries[i])
        for (cplx b : boundaries[j]) gap = std::min(gap, std::abs(a - b));
      if (gap <= 1e-9 * r) fail(ErrorKind::NotCantor, "preimage components touch");
    }
  }
  if (!(contraction < 1.0)) fail(ErrorKind::NotCantor, "inverse branches are not uniformly contracting");

  CodingScheme::FullShiftData data{cplx{0.0}, r, centers, boundaries};
  return CodingScheme::full_shift(std::move(data), contraction);
}

std::optional<CodingScheme> builtin_coding(const std::string& name, const RationalMap& map) {
  if (name != "z2") return std::nullopt;
  // Right and left half circles; both map onto the whole circle.
  constexpr int kSamples = 256;
  std::vector<std::vector<cplx>> pieces(2);
  for (int k = 0; k < kSamples; ++k) {
    const double t = -0.5 * std::numbers::pi + std::numbers::pi * (k + 0.5) / kSamples;
    pieces[0].push_back(std::polar(1.0, t));
    pieces[1].push_back(std::polar(1.0, t + std::numbers::pi));
  }
  const double a = 2.0 * std::numbers::pi / 7.0;
  return CodingScheme::user_markov(map, {{1, 1}, {1, 1}}, std::move(pieces),
                                   {std::polar(1.0, a), std::polar(1.0, a + std::numbers::pi)}, 0.1);
}

}  // namespace primeorbits
