#pragma once

#include <cstdint>
#include <vector>

#include "primeorbits/coding.hpp"
#include "primeorbits/thermo.hpp"
#include "primeorbits/transfer.hpp"

namespace primeorbits {

struct DecayReport {
  cplx s;
  int ell = 0;
  int steps = 0;
  std::vector<double> log_norms;  // log ||L^k 1||, k = 0..steps
  int fit_from = 0;
  double rho = 0.0;               // exp(slope) of the fit over the final half
  std::size_t measure_points = 0;
};

/// Iterates the normalised operator on h = 1 and fits the decay of the
/// L^2(nu) norms, nu being the measure transported to the sample states.
DecayReport decay_probe(const TransferOperator& op, cplx s, int ell, int n_steps, const EmpiricalMeasure& measure);

struct NliGrid {
  cplx center;
  double half_width = 0.02;
  int count = 5;  // count x count points
};

struct NliReport {
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  double richardson_gap = 0.0;  // max |J_h - J_2h| entry over the grid
  std::size_t grid_points = 0;
  double step = 1e-5;
  // real maps only: max |d tau~/dx| along the real axis through the centre
  bool real_variant = false;
  double max_real_derivative = 0.0;
};

/// Fixed point of the constant word of symbol i.
cplx branch_fixed_point(const RationalMap& map, const CodingScheme& scheme, int symbol);

/// 5x5 grid of half-width 0.02 around the g_0 fixed point (full shift) or
/// the piece-0 anchor (user codings), pulled toward the anchor until every
/// stencil point lies in the base region.
NliGrid default_nli_grid(const RationalMap& map, const CodingScheme& scheme);

/// Jacobian of (tau~, theta~) = (tau_N o g_xi - tau_N o g_xi^, theta_N o g_xi - theta_N o g_xi^)
/// on a grid by central differences. Throws GridOutsideBase.
NliReport nli_probe(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& word1,
                    const SymbolWord& word2, const NliGrid& grid);

/// g_{prefix J}(anchor) for every admissible J of the given length.
std::vector<cplx> cylinder_points(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& prefix,
                                  int depth);

struct NcpReport {
  std::vector<double> directions;      // angles pi k / K
  std::vector<double> per_direction;   // min delta_1 over (x, eps)
  double global_min = 0.0;
  double modulus_min = 0.0;            // min over (x, eps) of max |y - x| / eps
  std::vector<double> radii;
  std::size_t centers = 0;
  std::size_t points = 0;
};

/// Needs at least 1000 points (InsufficientPoints). Empty radii pick a
/// geometric range above the largest nearest-neighbour gap.
NcpReport ncp_probe(const std::vector<cplx>& points, int directions, std::vector<double> radii,
                    std::size_t max_centers = 256, std::uint64_t seed = 1);

struct DoublingReport {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::vector<double> radii;
  std::vector<double> bin_edges;
  std::vector<std::size_t> histogram;
  std::size_t samples = 0;
  double resolution = 0.0;  // median nearest-neighbour spacing
};

/// nu(B_2e(x)) / nu(B_e(x)) over sampled centres and radii. Throws
/// ResolutionTooFine when a radius is below 10x the point spacing.
DoublingReport doubling_probe(const EmpiricalMeasure& measure, std::vector<double> radii,
                              std::size_t max_centers = 256, std::uint64_t seed = 1);

/// The measure restricted to one piece of the coding and renormalised.
EmpiricalMeasure restrict_to_piece(const EmpiricalMeasure& m, const CodingScheme& scheme, int piece);

}  // namespace primeorbits
