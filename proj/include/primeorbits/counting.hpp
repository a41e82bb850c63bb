#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "primeorbits/orbits.hpp"

namespace primeorbits {

/// Parses "log:a:b:k" (k geometric points), "lin:a:b:k" or a comma list.
/// The literal "h" stands for the horizon in any position.
std::vector<double> parse_t_grid(const std::string& text, double horizon);

struct CountReport {
  double delta = 0.0;
  std::vector<double> t;
  std::vector<std::size_t> N_t;
  std::vector<double> li;          // Li(t^delta), 0 when t^delta <= 2
  std::vector<double> rel_error;   // N_t / Li - 1, NaN when Li = 0
  std::vector<bool> small_t;       // t below min |lambda| or t^delta <= 2
  double beta_hat = NAN;           // slope of log|N_t - Li| vs log t, top decade
  std::size_t beta_points = 0;
  double max_rel_error_top = NAN;  // max |rel_error| over the top decade
  std::string csv() const;
};

/// Throws HorizonExceeded when a t is above the horizon.
CountReport count_report(const OrbitDatabase& db, double delta, std::vector<double> t_grid);

struct WeylReport {
  int ell_max = 0;
  std::vector<double> t;
  std::vector<std::size_t> N_t;
  // pi[ell + ell_max][k] = pi_ell(t_k)
  std::vector<std::vector<cplx>> pi;
  const std::vector<cplx>& at(int ell) const { return pi[ell + ell_max]; }
  double normalized(int ell, std::size_t k) const;
  std::string csv() const;
};

WeylReport weyl_report(const OrbitDatabase& db, int ell_max, std::vector<double> t_grid);

/// Fourier coefficients a_-L..a_L of psi from M equispaced samples.
std::vector<cplx> fourier_coefficients(const std::function<cplx(double)>& psi, int L, int samples = 0);

struct PsiSum {
  double t = 0.0;
  std::size_t N_t = 0;
  cplx direct;       // sum of psi(theta) over P_t
  cplx fourier;      // sum a_l pi_l(t)
  cplx main_term;    // a_0 Li(t^delta)
  double route_gap = 0.0;
};

/// Refuses (CircleCase) when the periodic points lie on a circle or line.
/// coeffs holds a_-L..a_L.
PsiSum psi_sum(const OrbitDatabase& db, const std::function<cplx(double)>& psi, const std::vector<cplx>& coeffs,
               double t, double delta);

/// Relative residual of the best generalised circle a|z|^2 + b x + c y + d = 0
/// through the points; ~0 means they lie on a circle or line.
double circle_residual(const std::vector<cplx>& points);

}  // namespace primeorbits
