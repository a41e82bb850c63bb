#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "primeorbits/coding.hpp"
#include "primeorbits/map.hpp"

namespace primeorbits {

enum class Backend { Roots, Symbolic };
std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

/// Tolerances are relative to the local scale max(1, |z|).
struct Tolerances {
  double point = 1e-9;  // |f^n(x) - x| <= point * max(1, |lambda|) * scale
  double merge = 1e-9;  // two points are the same point
  std::size_t degree_cap = std::size_t{1} << 16;
  int max_sweeps = 500;
};

struct PrimitiveOrbit {
  int period = 0;
  cplx point;  // lexicographically smallest (re, im) point of the cycle
  cplx multiplier;
  double abs_multiplier = 0.0;
  cplx holonomy;               // multiplier / |multiplier|
  double holonomy_angle = 0.0;  // in (-pi, pi]
  Backend backend = Backend::Roots;
};

struct RootEnumeration {
  std::vector<cplx> points;  // repelling periodic points
  std::vector<cplx> polish_failures;
  std::size_t attracting_removed = 0;
};

/// All roots of f^n(z) - z on J for a polynomial map, by Newton from a
/// preimage-tree seed set followed by Aberth iteration for the roots Newton
/// missed. Throws DegreeCapExceeded when d^n exceeds the cap.
RootEnumeration enumerate_roots(const RationalMap& map, int n, const Tolerances& tol = {});

/// One periodic point per admissible periodic word of length n, as the
/// fixed point of the branch composition g_I.
std::vector<cplx> enumerate_symbolic(const RationalMap& map, const CodingScheme& scheme, int n,
                                     const Tolerances& tol = {});

/// Groups fixed points of f^n into cycles and keeps those of minimal
/// period n.
std::vector<PrimitiveOrbit> decompose_primitive(std::span<const cplx> points, int n, const RationalMap& map,
                                                const Tolerances& tol = {}, Backend backend = Backend::Roots);

/// Symmetric Hausdorff distance between two finite point sets.
double hausdorff_distance(std::span<const cplx> a, std::span<const cplx> b);

/// Necklace count (1/n) sum_{k|n} mu(n/k) d^k.
long long necklace_count(int n, int d);

/// All primitive orbits up to period n_max. Immutable once built.
class OrbitDatabase {
 public:
  /// One raw period-n point class: `multiplicity` points (the cycle length
  /// m) each with tau_n = power * log|lambda| and holonomy^power.
  struct LevelTerm {
    double log_abs_multiplier;  // log|lambda| of the primitive orbit
    cplx holonomy;
    int multiplicity;
    int power;
  };

  struct Agreement {
    int period;
    std::size_t roots_count;
    std::size_t symbolic_count;
    double hausdorff;
  };

  static OrbitDatabase build(const RationalMap& map, int n_max, Backend backend,
                             const CodingScheme* scheme = nullptr, const Tolerances& tol = {});
  /// Builds with both backends, keeps the symbolic database and records the
  /// per-level agreement.
  static OrbitDatabase build_both(const RationalMap& map, int n_max, const CodingScheme& scheme,
                                  const Tolerances& tol = {});

  const RationalMap& map() const { return map_; }
  const std::string& map_hash() const { return map_hash_; }
  int n_max() const { return n_max_; }
  Backend backend() const { return backend_; }
  const Tolerances& tolerances() const { return tol_; }
  /// Sorted by (|lambda|, angle, period).
  const std::vector<PrimitiveOrbit>& orbits() const { return orbits_; }
  std::size_t raw_count(int n) const { return raw_counts_.at(n - 1); }
  std::size_t primitive_count(int n) const;
  const std::vector<Agreement>& agreement() const { return agreement_; }

  double kappa() const { return kappa_; }
  double c0() const { return c0_; }
  /// c0 * kappa^n_max: every orbit with |lambda| below this has period <= n_max.
  double horizon() const { return c0_ * std::pow(kappa_, n_max_); }

  /// Raw period-n points grouped by primitive orbit (periods dividing n).
  std::vector<LevelTerm> level_terms(int n) const;
  /// The cycle points of every primitive orbit of period dividing n.
  std::vector<cplx> level_points(int n) const;

  /// Orbits with |lambda| < t: a prefix of orbits().
  std::span<const PrimitiveOrbit> slice_below(double t) const;
  /// N_t; throws HorizonExceeded for t above horizon().
  std::size_t query_Nt(double t) const;

  /// Writes <prefix>.csv and <prefix>.json.
  void save(const std::string& prefix) const;
  static OrbitDatabase load(const std::string& prefix);
  std::string csv() const;
  std::string sidecar_json() const;

 private:
  OrbitDatabase(RationalMap map) : map_(std::move(map)) {}
  void finalize();

  RationalMap map_;
  std::string map_hash_;
  int n_max_ = 0;
  Backend backend_ = Backend::Roots;
  Tolerances tol_;
  std::vector<PrimitiveOrbit> orbits_;
  std::vector<std::size_t> raw_counts_;
  std::vector<Agreement> agreement_;
  double kappa_ = 1.0;
  double c0_ = 1.0;
};

}  // namespace primeorbits
