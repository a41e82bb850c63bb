#pragma once

#include <string_view>
#include <vector>

#include "primeorbits/orbits.hpp"

namespace primeorbits {

struct TauTheta {
  double tau;    // log|(f^n)'(x)|
  double theta;  // arg (f^n)'(x), reduced to [0, 2pi)
};

/// Birkhoff sums of log|f'| and arg f' along n steps, summed as logs.
/// Throws CriticalProximity when the orbit passes too close to a critical
/// point.
TauTheta tau_theta_n(const RationalMap& map, cplx x, int n);

/// P_n(s) = (1/n) log sum over f^n x = x of |(f^n)'(x)|^-s.
double pressure_n(const OrbitDatabase& db, double s, int n);
/// dP_n/ds = -(1/n) times the |.|^-s weighted mean of tau_n.
double pressure_derivative_n(const OrbitDatabase& db, double s, int n);

enum class DeltaMethod { PeriodicOrbit, LeadingEigenvalue };
std::string_view to_string(DeltaMethod m);

struct PressureEstimate {
  int n_min = 0;
  int n_max = 0;
  std::vector<double> per_level;  // delta_n for n = n_min..n_max
  double delta = 0.0;             // extrapolated
  double uncertainty = 0.0;       // |delta_nmax - delta_nmax-1|
  DeltaMethod method = DeltaMethod::PeriodicOrbit;
};

/// Root of P_n on [0, 2]: bisection to width 1e-4, then Newton. Throws
/// BracketFailure when P_n(0) <= 0 or P_n(2) >= 0.
double delta_n(const OrbitDatabase& db, int n);

/// delta_n over [n_min, n_max] and the Aitken extrapolation of the last three.
PressureEstimate estimate_delta(const OrbitDatabase& db, int n_min, int n_max);

/// Aitken delta-squared from the last three entries; falls back to the last
/// entry when the sequence is not close to geometric.
double aitken_last(const std::vector<double>& xs);

/// Weighted point set standing in for the equilibrium state.
struct EmpiricalMeasure {
  std::vector<cplx> points;
  std::vector<double> weights;  // positive, summing to 1
  int level = 0;
  double exponent = 0.0;
};

/// Period-n points weighted by |(f^n)'(x)|^-delta.
EmpiricalMeasure equilibrium_weights(const OrbitDatabase& db, int n, double delta);

/// Same weighting on an arbitrary set of period-n points.
EmpiricalMeasure equilibrium_weights_on(const RationalMap& map, std::vector<cplx> points, int n, double delta);

/// Li(t) = integral from 2 to t of ds / log s. Li(2) = 0; t < 2 throws
/// DomainError.
double li(double t);

}  // namespace primeorbits
