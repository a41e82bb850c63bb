#include "primeorbits/probes.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"

namespace primeorbits {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Points sorted by real part for ball queries.
class SortedPoints {
 public:
  explicit SortedPoints(const std::vector<cplx>& pts) : order_(pts.size()), pts_(pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return pts[a].real() < pts[b].real() || (pts[a].real() == pts[b].real() && a < b);
    });
    re_.resize(pts.size());
    for (std::size_t k = 0; k < order_.size(); ++k) re_[k] = pts[order_[k]].real();
  }

  // calls fn(index) for every point with |p - x| <= r
  template <class Fn>
  void ball(cplx x, double r, Fn&& fn) const {
    auto it = std::lower_bound(re_.begin(), re_.end(), x.real() - r);
    for (std::size_t k = it - re_.begin(); k < re_.size() && re_[k] <= x.real() + r; ++k)
      if (std::abs(pts_[order_[k]] - x) <= r) fn(order_[k]);
  }

  double nearest_other(std::size_t i) const {
    const cplx x = pts_[i];
    const std::size_t mid = std::lower_bound(re_.begin(), re_.end(), x.real()) - re_.begin();
    double best = INFINITY;
    for (std::size_t k = mid; k < re_.size() && re_[k] - x.real() < best; ++k)
      if (order_[k] != i) best = std::min(best, std::abs(pts_[order_[k]] - x));
    for (std::size_t k = mid; k-- > 0;) {
      if (x.real() - re_[k] >= best) break;
      if (order_[k] != i) best = std::min(best, std::abs(pts_[order_[k]] - x));
    }
    return best;
  }

 private:
  std::vector<std::size_t> order_;
  const std::vector<cplx>& pts_;
  std::vector<double> re_;
};

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t max_count, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (n <= max_count) return idx;
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates with an explicit modulus so the draw does not depend
  // on the library's distribution implementation
  for (std::size_t i = 0; i < max_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(max_count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double diameter_estimate(const std::vector<cplx>& pts) {
  double lo_re = INFINITY, hi_re = -INFINITY, lo_im = INFINITY, hi_im = -INFINITY;
  for (cplx z : pts) {
    lo_re = std::min(lo_re, z.real());
    hi_re = std::max(hi_re, z.real());
    lo_im = std::min(lo_im, z.imag());
    hi_im = std::max(hi_im, z.imag());
  }
  return std::hypot(hi_re - lo_re, hi_im - lo_im);
}

std::vector<double> geometric(double lo, double hi, int count) {
  std::vector<double> r;
  if (count == 1 || hi <= lo) return {hi};
  for (int k = 0; k < count; ++k) r.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
  return r;
}

// Q(z) = (f^N)'(g_xi z) / (f^N)'(g_xi^ z)
cplx nli_ratio(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& w1, const SymbolWord& w2,
               cplx z) {
  const int N = static_cast<int>(w1.length());
  const cplx a = backward_point(map, scheme, w1, z);
  const cplx b = backward_point(map, scheme, w2, z);
  return iterate_with_derivative(map, a, N).derivative / iterate_with_derivative(map, b, N).derivative;
}

// d log Q along direction u by a central difference of step h
cplx dlogQ(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& w1, const SymbolWord& w2, cplx z,
           cplx u, double h) {
  const cplx qp = nli_ratio(map, scheme, w1, w2, z + h * u);
  const cplx qm = nli_ratio(map, scheme, w1, w2, z - h * u);
  return std::log(qp / qm) / (2.0 * h);
}

}  // namespace

DecayReport decay_probe(const TransferOperator& op, cplx s, int ell, int n_steps, const EmpiricalMeasure& measure) {
  if (n_steps < 4) fail(ErrorKind::InvalidArgument, "decay probe needs at least 4 steps");
  if (measure.points.empty()) fail(ErrorKind::EmptyLevel, "empty measure");
  std::vector<double> nu(op.size(), 0.0);
  for (std::size_t i = 0; i < measure.points.size(); ++i) nu[op.nearest_state(measure.points[i])] += measure.weights[i];

  auto l2 = [&](const std::vector<cplx>& h) {
    double acc = 0.0;
    for (std::size_t q = 0; q < h.size(); ++q) acc += nu[q] * std::norm(h[q]);
    return std::sqrt(acc);
  };

  const NormalizedOperator L(op, s.real());
  DecayReport rep;
  rep.s = s;
  rep.ell = ell;
  rep.steps = n_steps;
  rep.measure_points = measure.points.size();
  std::vector<cplx> h(op.size(), 1.0);
  double log_norm = std::log(l2(h));
  rep.log_norms.push_back(log_norm);
  for (int k = 1; k <= n_steps; ++k) {
    h = L.apply(s, ell, h);
    const double norm = l2(h);
    if (!(norm > 1e-290) || !std::isfinite(norm)) fail(ErrorKind::FitDegenerate, "operator norms underflowed");
    for (auto& v : h) v /= norm;
    log_norm += std::log(norm);
    rep.log_norms.push_back(log_norm);
  }
  rep.fit_from = n_steps / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int k = rep.fit_from; k <= n_steps; ++k) {
    sx += k;
    sy += rep.log_norms[k];
    sxx += double(k) * k;
    sxy += k * rep.log_norms[k];
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  if (!std::isfinite(slope)) fail(ErrorKind::FitDegenerate, "decay fit is degenerate");
  rep.rho = std::exp(slope);
  return rep;
}

cplx branch_fixed_point(const RationalMap& map, const CodingScheme& scheme, int symbol) {
  const int start = scheme.kind() == CodingKind::FullShift ? 0 : symbol;
  cplx z = scheme.anchor(start);
  for (int it = 0; it < 2000; ++it) {
    const cplx next = branch_preimage(map, scheme, symbol, z);
    const double step = std::abs(next - z);
    z = next;
    if (step <= 1e-15 * std::max(1.0, std::abs(z))) return z;
  }
  return z;
}

NliGrid default_nli_grid(const RationalMap& map, const CodingScheme& scheme) {
  NliGrid g;
  const cplx anchor = scheme.anchor(0);
  const cplx target = scheme.kind() == CodingKind::FullShift ? branch_fixed_point(map, scheme, 0) : anchor;
  const double reach = g.half_width * std::sqrt(2.0) + 2e-5;
  for (int k = 0; k <= 20; ++k) {
    g.center = anchor + (1.0 - 0.05 * k) * (target - anchor);
    bool inside = true;
    for (int q = 0; q < 16 && inside; ++q) inside = scheme.in_base_region(g.center + std::polar(reach, kPi * q / 8));
    if (inside) return g;
  }
  fail(ErrorKind::GridOutsideBase, "no default NLI grid fits in the base region");
}

NliReport nli_probe(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& word1,
                    const SymbolWord& word2, const NliGrid& grid) {
  if (word1 == word2) fail(ErrorKind::InvalidArgument, "NLI words must differ");
  if (word1.length() != word2.length() || word1.length() < 3)
    fail(ErrorKind::InvalidArgument, "NLI words need equal length N >= 3");
  if (grid.count < 1 || !(grid.half_width >= 0.0)) fail(ErrorKind::InvalidArgument, "bad NLI grid");

  std::vector<cplx> pts;
  for (int a = 0; a < grid.count; ++a)
    for (int b = 0; b < grid.count; ++b) {
      const double u = grid.count == 1 ? 0.0 : -1.0 + 2.0 * a / (grid.count - 1);
      const double v = grid.count == 1 ? 0.0 : -1.0 + 2.0 * b / (grid.count - 1);
      pts.push_back(grid.center + grid.half_width * cplx(u, v));
    }
  const double h = 1e-5;
  for (cplx z : pts) {
    // every stencil point must be in the base region too
    for (cplx e : {cplx(2 * h, 0), cplx(-2 * h, 0), cplx(0, 2 * h), cplx(0, -2 * h)})
      if (!scheme.in_base_region(z + e)) fail(ErrorKind::GridOutsideBase, "NLI grid leaves the base region");
    if (!scheme.admissible(word1, scheme.target_of(z)) || !scheme.admissible(word2, scheme.target_of(z)))
      fail(ErrorKind::GridOutsideBase, "NLI words cannot act on a grid point");
  }

  NliReport rep;
  rep.grid_points = pts.size();
  rep.step = h;
  std::vector<double> smin(pts.size()), smax(pts.size()), gap(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    const cplx z = pts[k];
    Eigen::Matrix2d J, J2;
    const cplx dx = dlogQ(map, scheme, word1, word2, z, 1.0, h);
    const cplx dy = dlogQ(map, scheme, word1, word2, z, cplx(0, 1), h);
    J << dx.real(), dy.real(), dx.imag(), dy.imag();
    const cplx dx2 = dlogQ(map, scheme, word1, word2, z, 1.0, 2 * h);
    const cplx dy2 = dlogQ(map, scheme, word1, word2, z, cplx(0, 1), 2 * h);
    J2 << dx2.real(), dy2.real(), dx2.imag(), dy2.imag();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
    smin[k] = svd.singularValues()(1);
    smax[k] = svd.singularValues()(0);
    gap[k] = (J - J2).cwiseAbs().maxCoeff();
  });
  rep.min_singular_value = *std::min_element(smin.begin(), smin.end());
  rep.max_singular_value = *std::max_element(smax.begin(), smax.end());
  rep.richardson_gap = *std::max_element(gap.begin(), gap.end());

  if (map.has_real_coefficients() && grid.center.imag() == 0.0) {
    rep.real_variant = true;
    for (int a = 0; a < std::max(grid.count, 2); ++a) {
      const double u = -1.0 + 2.0 * a / (std::max(grid.count, 2) - 1);
      const cplx z(grid.center.real() + grid.half_width * u, 0.0);
      const double tp = std::log(std::abs(nli_ratio(map, scheme, word1, word2, z + h)));
      const double tm = std::log(std::abs(nli_ratio(map, scheme, word1, word2, z - h)));
      rep.max_real_derivative = std::max(rep.max_real_derivative, std::abs(tp - tm) / (2 * h));
    }
  }
  return rep;
}

std::vector<cplx> cylinder_points(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& prefix,
                                  int depth) {
  if (depth < 0 || depth > 24) fail(ErrorKind::InvalidArgument, "cylinder depth must be in [0, 24]");
  const int d = scheme.alphabet_size();
  const bool full = scheme.kind() == CodingKind::FullShift;
  // words J grown from the inside out, each with the target it acts on
  struct Node {
    std::vector<int> word;
    int target;
  };
  std::vector<Node> layer;
  for (int j = 0; j < scheme.target_count(); ++j) layer.push_back({{}, j});
  for (int k = 0; k < depth; ++k) {
    std::vector<Node> next;
    for (const auto& n : layer)
      for (int i = 0; i < d; ++i) {
        const int here = n.word.empty() ? n.target : n.word.front();
        if (!full && !scheme.transition(i, here)) continue;
        Node m{{i}, n.target};
        m.word.insert(m.word.end(), n.word.begin(), n.word.end());
        next.push_back(std::move(m));
      }
    layer = std::move(next);
  }
  std::vector<Node> keep;
  for (auto& n : layer) {
    SymbolWord w = prefix;
    w.symbols.insert(w.symbols.end(), n.word.begin(), n.word.end());
    if (w.symbols.empty() || scheme.admissible(w, n.target)) keep.push_back({std::move(w.symbols), n.target});
  }
  std::vector<cplx> out(keep.size());
  parallel_for(keep.size(), [&](std::size_t q) {
    cplx z = scheme.anchor(keep[q].target);
    for (auto it = keep[q].word.rbegin(); it != keep[q].word.rend(); ++it) z = branch_preimage(map, scheme, *it, z);
    out[q] = z;
  });
  return out;
}

NcpReport ncp_probe(const std::vector<cplx>& points, int directions, std::vector<double> radii,
                    std::size_t max_centers, std::uint64_t seed) {
  if (points.size() < 1000)
    fail(ErrorKind::InsufficientPoints, "NCP probe needs at least 1000 cylinder points, got " +
                                            std::to_string(points.size()));
  if (directions < 1) fail(ErrorKind::InvalidArgument, "need at least one direction");
  const SortedPoints sp(points);
  if (radii.empty()) {
    double gap = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) gap = std::max(gap, sp.nearest_other(i));
    const double hi = diameter_estimate(points) / 4.0;
    radii = geometric(std::min(hi, 2.0 * gap), hi, 5);
  }
  for (double r : radii)
    if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "radii must be positive");

  NcpReport rep;
  rep.points = points.size();
  rep.radii = radii;
  for (int k = 0; k < directions; ++k) rep.directions.push_back(kPi * k / directions);
  const auto centers = sample_indices(points.size(), max_centers, seed);
  rep.centers = centers.size();

  // per (centre, radius): max projection per direction, and max modulus
  const std::size_t S = centers.size() * radii.size();
  std::vector<std::vector<double>> proj(S, std::vector<double>(directions, 0.0));
  std::vector<double> modulus(S, 0.0);
  std::vector<cplx> dirs;
  for (double a : rep.directions) dirs.push_back(std::polar(1.0, a));
  parallel_for(S, [&](std::size_t k) {
    const cplx x = points[centers[k / radii.size()]];
    const double eps = radii[k % radii.size()];
    sp.ball(x, eps, [&](std::size_t j) {
      const cplx v = points[j] - x;
      modulus[k] = std::max(modulus[k], std::abs(v) / eps);
      for (int q = 0; q < directions; ++q)
        proj[k][q] = std::max(proj[k][q], std::abs(v.real() * dirs[q].real() + v.imag() * dirs[q].imag()) / eps);
    });
  });
  rep.per_direction.assign(directions, INFINITY);
  rep.modulus_min = INFINITY;
  for (std::size_t k = 0; k < S; ++k) {
    rep.modulus_min = std::min(rep.modulus_min, modulus[k]);
    for (int q = 0; q < directions; ++q) rep.per_direction[q] = std::min(rep.per_direction[q], proj[k][q]);
  }
  rep.global_min = *std::min_element(rep.per_direction.begin(), rep.per_direction.end());
  return rep;
}

DoublingReport doubling_probe(const EmpiricalMeasure& measure, std::vector<double> radii, std::size_t max_centers,
                              std::uint64_t seed) {
  const auto& pts = measure.points;
  if (pts.size() < 2) fail(ErrorKind::InsufficientPoints, "doubling probe needs at least two points");
  const SortedPoints sp(pts);
  std::vector<double> nn(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { nn[i] = sp.nearest_other(i); });
  std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
  const double resolution = nn[nn.size() / 2];
  if (radii.empty()) {
    const double lo = 10.0 * resolution * 1.01, hi = diameter_estimate(pts) / 4.0;
    if (lo > hi) fail(ErrorKind::ResolutionTooFine, "measure is too coarse for any admissible radius");
    radii = geometric(lo, hi, 6);
  }
  for (double r : radii)
    if (!(r >= 10.0 * resolution))
      fail(ErrorKind::ResolutionTooFine, "radius " + std::to_string(r) + " is below 10x the point spacing " +
                                             std::to_string(resolution));

  DoublingReport rep;
  rep.radii = radii;
  rep.resolution = resolution;
  const auto centers = sample_indices(pts.size(), max_centers, seed);
  const std::size_t S = centers.size() * radii.size();
  std::vector<double> ratio(S);
  parallel_for(S, [&](std::size_t k) {
    const cplx x = pts[centers[k / radii.size()]];
    const double eps = radii[k % radii.size()];
    double small = 0.0, big = 0.0;
    sp.ball(x, 2.0 * eps, [&](std::size_t j) {
      big += measure.weights[j];
      if (std::abs(pts[j] - x) <= eps) small += measure.weights[j];
    });
    ratio[k] = big / small;
  });
  rep.samples = S;
  rep.max_ratio = *std::max_element(ratio.begin(), ratio.end());
  rep.min_ratio = *std::min_element(ratio.begin(), ratio.end());
  const int bins = 10;
  const double lo = 1.0, hi = std::max(rep.max_ratio, 1.0) * (1.0 + 1e-12);
  for (int b = 0; b <= bins; ++b) rep.bin_edges.push_back(lo + (hi - lo) * b / bins);
  rep.histogram.assign(bins, 0);
  for (double r : ratio) {
    int b = static_cast<int>((r - lo) / (hi - lo) * bins);
    rep.histogram[std::clamp(b, 0, bins - 1)]++;
  }
  return rep;
}

EmpiricalMeasure restrict_to_piece(const EmpiricalMeasure& m, const CodingScheme& scheme, int piece) {
  EmpiricalMeasure out;
  out.level = m.level;
  out.exponent = m.exponent;
  double total = 0.0;
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    const int p = scheme.kind() == CodingKind::FullShift ? scheme.nearest_piece(m.points[i])
                                                          : scheme.target_of(m.points[i]);
    if (p != piece) continue;
    out.points.push_back(m.points[i]);
    out.weights.push_back(m.weights[i]);
    total += m.weights[i];
  }
  if (out.points.empty()) fail(ErrorKind::EmptyLevel, "no measure points in piece " + std::to_string(piece));
  for (double& w : out.weights) w /= total;
  return out;
}

}  // namespace primeorbits
