#include "primeorbits/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"

namespace primeorbits {

TransferOperator::TransferOperator(const RationalMap& map, const CodingScheme& scheme, int depth) : depth_(depth) {
  if (depth < 1 || depth > 20) fail(ErrorKind::InvalidArgument, "transfer depth must be in [1, 20]");
  const int d = scheme.alphabet_size();
  const int T = scheme.target_count();
  const bool full = scheme.kind() == CodingKind::FullShift;
  if (std::pow(static_cast<double>(d), depth) * T > 4e6)
    fail(ErrorKind::InvalidArgument, "too many transfer states at this depth");

  // breadth-first: states of length k + 1 prepend a symbol to states of length k
  struct Node {
    std::vector<int> word;  // outermost first
    int target;
    cplx point;
  };
  std::vector<Node> layer;
  for (int j = 0; j < T; ++j) layer.push_back({{}, j, scheme.anchor(j)});
  for (int k = 0; k < depth; ++k) {
    std::vector<Node> next;
    for (const auto& node : layer) {
      const int here = node.word.empty() ? node.target : node.word.front();
      for (int i = 0; i < d; ++i) {
        if (!full && !scheme.transition(i, here)) continue;
        Node n;
        n.word.reserve(k + 1);
        n.word.push_back(i);
        n.word.insert(n.word.end(), node.word.begin(), node.word.end());
        n.target = node.target;
        next.push_back(std::move(n));
      }
    }
    std::vector<cplx> pts(next.size());
    parallel_for(next.size(), [&](std::size_t q) {
      const Node& n = next[q];
      cplx z = scheme.anchor(n.target);
      for (auto it = n.word.rbegin(); it != n.word.rend(); ++it) z = branch_preimage(map, scheme, *it, z);
      pts[q] = z;
    });
    for (std::size_t q = 0; q < next.size(); ++q) next[q].point = pts[q];
    layer = std::move(next);
  }
  std::sort(layer.begin(), layer.end(), [](const Node& a, const Node& b) {
    return a.word != b.word ? a.word < b.word : a.target < b.target;
  });

  const std::size_t N = layer.size();
  auto key = [&](const std::vector<int>& w, int target) {
    std::size_t k = 0;
    for (int s : w) k = k * d + s;
    return k * T + target;
  };
  std::vector<std::int64_t> index(static_cast<std::size_t>(std::pow(d, depth)) * T, -1);
  points_.resize(N);
  words_.resize(N);
  for (std::size_t q = 0; q < N; ++q) {
    index[key(layer[q].word, layer[q].target)] = static_cast<std::int64_t>(q);
    points_[q] = layer[q].point;
    words_[q].symbols = layer[q].word;
  }

  std::vector<std::vector<Edge>> out(N);
  parallel_for(N, [&](std::size_t q) {
    const Node& n = layer[q];
    for (int i = 0; i < d; ++i) {
      if (!full && !scheme.transition(i, n.word.front())) continue;
      const cplx y = branch_preimage(map, scheme, i, n.point);
      const cplx dy = map.derivative(y);
      std::vector<int> w;
      w.reserve(depth);
      w.push_back(i);
      w.insert(w.end(), n.word.begin(), n.word.end() - 1);
      const int target = full ? 0 : n.word.back();
      const auto to = index[key(w, target)];
      if (to < 0) fail(ErrorKind::ClosureViolation, "branch image has no state");
      out[q].push_back({static_cast<std::uint32_t>(to), std::log(std::abs(dy)), dy / std::abs(dy)});
    }
  });
  offsets_.assign(1, 0);
  for (auto& e : out) {
    edges_.insert(edges_.end(), e.begin(), e.end());
    offsets_.push_back(edges_.size());
  }

  by_real_.resize(N);
  for (std::size_t q = 0; q < N; ++q) by_real_[q] = q;
  std::sort(by_real_.begin(), by_real_.end(), [&](std::size_t a, std::size_t b) {
    return points_[a].real() < points_[b].real() || (points_[a].real() == points_[b].real() && a < b);
  });
}

std::vector<cplx> TransferOperator::apply(cplx s, int ell, std::span<const cplx> h) const {
  if (h.size() != size()) fail(ErrorKind::ClosureViolation, "function is not given on every sample state");
  std::vector<cplx> out(size());
  parallel_for(size(), [&](std::size_t q) {
    cplx acc = 0.0;
    for (const auto& e : edges(q)) acc += std::exp(-s * e.tau) * unit_power(e.phase, ell) * h[e.to];
    out[q] = acc;
  });
  return out;
}

std::vector<double> TransferOperator::apply_real(double s, std::span<const double> h) const {
  if (h.size() != size()) fail(ErrorKind::ClosureViolation, "function is not given on every sample state");
  std::vector<double> out(size());
  parallel_for(size(), [&](std::size_t q) {
    double acc = 0.0;
    for (const auto& e : edges(q)) acc += std::exp(-s * e.tau) * h[e.to];
    out[q] = acc;
  });
  return out;
}

std::size_t TransferOperator::nearest_state(cplx z) const {
  const auto mid = std::lower_bound(by_real_.begin(), by_real_.end(), z.real(),
                                    [&](std::size_t q, double v) { return points_[q].real() < v; });
  double best = INFINITY;
  std::size_t arg = by_real_.front();
  for (auto it = mid; it != by_real_.end() && points_[*it].real() - z.real() < best; ++it) {
    const double dist = std::abs(points_[*it] - z);
    if (dist < best || (dist == best && *it < arg)) {
      best = dist;
      arg = *it;
    }
  }
  for (auto it = mid; it != by_real_.begin();) {
    --it;
    if (z.real() - points_[*it].real() > best) break;
    const double dist = std::abs(points_[*it] - z);
    if (dist < best || (dist == best && *it < arg)) {
      best = dist;
      arg = *it;
    }
  }
  return arg;
}

EigenData eigen_data(const TransferOperator& op, double s, int max_iter) {
  EigenData out;
  std::vector<double> h(op.size(), 1.0);
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    auto next = op.apply_real(s, h);
    const double norm = *std::max_element(next.begin(), next.end());
    if (!(norm > 0.0) || !std::isfinite(norm)) fail(ErrorKind::NonConvergence, "power iteration degenerated");
    for (double& v : next) v /= norm;
    h = std::move(next);
    if (it > 1 && std::abs(norm - prev) < 1e-10 * std::max(1.0, norm)) {
      out.eigenvalue = norm;
      out.eigenvector = std::move(h);
      out.iterations = it;
      return out;
    }
    prev = norm;
  }
  fail(ErrorKind::NonConvergence, "power iteration did not settle");
}

PressureEstimate estimate_delta_eigen(const TransferOperator& op) {
  auto g = [&](double s) { return std::log(eigen_data(op, s).eigenvalue); };
  double lo = 0.0, hi = 2.0;
  double glo = g(lo), ghi = g(hi);
  if (glo <= 0.0 || ghi >= 0.0) fail(ErrorKind::BracketFailure, "log leading eigenvalue does not change sign on [0, 2]");
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi), gm = g(mid);
    if (gm > 0.0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }
  // secant polish inside the bracket
  double s = lo - glo * (hi - lo) / (ghi - glo);
  for (int k = 0; k < 4; ++k) {
    const double gs = g(s);
    if (gs == 0.0) break;
    if (gs > 0.0) {
      lo = s;
      glo = gs;
    } else {
      hi = s;
      ghi = gs;
    }
    if (ghi == glo) break;
    s = lo - glo * (hi - lo) / (ghi - glo);
  }
  PressureEstimate est;
  est.n_min = est.n_max = op.depth();
  est.per_level = {s};
  est.delta = s;
  est.uncertainty = hi - lo;
  est.method = DeltaMethod::LeadingEigenvalue;
  return est;
}

NormalizedOperator::NormalizedOperator(const TransferOperator& op, double a) : op_(op), eig_(eigen_data(op, a)) {}

std::vector<cplx> NormalizedOperator::apply(cplx s, int ell, std::span<const cplx> h) const {
  if (h.size() != op_.size()) fail(ErrorKind::ClosureViolation, "function is not given on every sample state");
  std::vector<cplx> g(h.size());
  for (std::size_t q = 0; q < h.size(); ++q) g[q] = h[q] * eig_.eigenvector[q];
  auto out = op_.apply(s, ell, g);
  for (std::size_t q = 0; q < out.size(); ++q) out[q] /= eig_.eigenvalue * eig_.eigenvector[q];
  return out;
}

}  // namespace primeorbits
