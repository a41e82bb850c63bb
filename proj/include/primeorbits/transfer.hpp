#pragma once

#include <span>
#include <vector>

#include "primeorbits/coding.hpp"
#include "primeorbits/thermo.hpp"

namespace primeorbits {

/// Transfer operators L_{s,l} discretised on depth-m cylinder points.
///
/// A state is an admissible word I of length m together with a target j the
/// word may act on; its point is g_I(anchor_j). Applying branch i to that
/// point lands in the cylinder of the word i I (truncated to length m), so
/// the sample set is closed under one more branch up to the cylinder
/// diameter, which shrinks like the contraction to the power m.
class TransferOperator {
 public:
  struct Edge {
    std::uint32_t to;
    double tau;    // log|f'(y)| at the exact preimage y
    cplx phase;    // f'(y) / |f'(y)|
  };

  TransferOperator(const RationalMap& map, const CodingScheme& scheme, int depth = 10);

  std::size_t size() const { return points_.size(); }
  int depth() const { return depth_; }
  const std::vector<cplx>& points() const { return points_; }
  const std::vector<SymbolWord>& words() const { return words_; }
  std::span<const Edge> edges(std::size_t state) const {
    return {edges_.data() + offsets_[state], offsets_[state + 1] - offsets_[state]};
  }

  /// (L_{s,l} h)(x) = sum over allowed branches of e^{-s tau(y)} chi_l(y) h(y).
  /// Throws ClosureViolation when h is not given on every state.
  std::vector<cplx> apply(cplx s, int ell, std::span<const cplx> h) const;
  std::vector<double> apply_real(double s, std::span<const double> h) const;

  /// Index of the state whose point is nearest to z.
  std::size_t nearest_state(cplx z) const;

 private:
  int depth_;
  std::vector<cplx> points_;
  std::vector<SymbolWord> words_;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> by_real_;
};

struct EigenData {
  double eigenvalue = 0.0;
  std::vector<double> eigenvector;  // positive, sup norm 1
  int iterations = 0;
};

/// Power iteration of L_{s,0} with sup-norm normalisation until the
/// eigenvalue drifts by less than 1e-10. Throws NonConvergence.
EigenData eigen_data(const TransferOperator& op, double s, int max_iter = 20000);

/// s with leading eigenvalue 1, by bisection on [0, 2] then secant steps.
PressureEstimate estimate_delta_eigen(const TransferOperator& op);

/// L^_{s,l} h = L_{s,l}(h h_a) / (lambda_a h_a), a = Re s, with (lambda_a, h_a)
/// from eigen_data.
class NormalizedOperator {
 public:
  NormalizedOperator(const TransferOperator& op, double a);
  std::vector<cplx> apply(cplx s, int ell, std::span<const cplx> h) const;
  const EigenData& eigen() const { return eig_; }

 private:
  const TransferOperator& op_;
  EigenData eig_;
};

}  // namespace primeorbits
