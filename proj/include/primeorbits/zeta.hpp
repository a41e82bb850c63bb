#pragma once

#include <optional>
#include <string>
#include <vector>

#include "primeorbits/orbits.hpp"

namespace primeorbits {

/// Z_n(s, l): sum over f^n x = x of chi_l(hol_n(x)) |(f^n)'(x)|^-s.
cplx Z_n(const OrbitDatabase& db, cplx s, int ell, int n);

struct ZetaSample {
  cplx s;
  int ell = 0;
  cplx log_zeta;            // sum_{n <= n_max} Z_n / n
  int n_max = 0;
  double tail_bound = 0.0;  // from c0 and kappa; infinite when the bound diverges
  bool valid = false;       // tail_bound < 1e-6
  double tail_estimate = 0.0;  // geometric extrapolation of the observed |Z_n|
};

ZetaSample log_zeta_truncated(const OrbitDatabase& db, cplx s, int ell, int n_max);

/// prod over primitive orbits with |lambda| < t_cutoff of
/// (1 - chi_l(hol) |lambda|^-s)^-1.
cplx euler_product(const OrbitDatabase& db, cplx s, int ell, double t_cutoff);

/// Cycle expansion of 1/zeta(s, l) truncated at order n_max.
cplx inverse_zeta_cycle(const OrbitDatabase& db, cplx s, int ell, int n_max);
/// The coefficients c_0..c_n_max of that expansion (c_0 = 1).
std::vector<cplx> cycle_coefficients(const OrbitDatabase& db, cplx s, int ell, int n_max);

struct ScanRect {
  double a0, a1, b0, b1;
};

struct ScanPoint {
  double a, b;
  cplx log_zeta;
  double abs_zeta;
  bool valid;    // rigorous tail bound below 1e-6
  bool trusted;  // valid, or the empirical tail is below the trust tolerance
};

struct ScanReport {
  int ell = 0;
  ScanRect rect{};
  double step = 0.0;
  double trust_tolerance = 0.0;
  std::vector<ScanPoint> grid;  // a-major
  std::size_t trusted_count = 0;
  // minimum of |zeta| over trusted grid points
  double min_abs_zeta = 0.0;
  double min_a = 0.0, min_b = 0.0;
  // l = 0 with b = 0 inside the rectangle: real-axis pole from the cycle
  // expanded 1/zeta
  std::optional<double> real_pole;
  double real_min_abs_inverse = 0.0;
  std::size_t real_trusted_count = 0;
};

/// Grid scan of the truncated zeta over the rectangle. Throws
/// UntrustworthyRegion when neither the grid nor the real-axis cycle
/// expansion has a trusted point.
ScanReport scan_for_zeros_poles(const OrbitDatabase& db, int ell, const ScanRect& rect, double step,
                                double trust_tolerance = 0.05);

/// "a,b,ell,re_logzeta,im_logzeta,abs_zeta,valid" rows.
std::string scan_csv(const ScanReport& r);

}  // namespace primeorbits
