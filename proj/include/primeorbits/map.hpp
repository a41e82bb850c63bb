#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "primeorbits/polynomial.hpp"

namespace primeorbits {

/// A rational map f = N / D of degree max(deg N, deg D) >= 2. Polynomials
/// carry the constant denominator 1. Immutable after construction.
class RationalMap {
 public:
  RationalMap(Polynomial numerator, Polynomial denominator);
  static RationalMap polynomial(std::vector<cplx> coeffs);
  /// z^2 + c
  static RationalMap quadratic(cplx c);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  int degree() const { return degree_; }
  bool is_polynomial() const { return den_.degree() == 0; }
  /// Coefficients are all real, so the map commutes with conjugation.
  bool has_real_coefficients() const;
  /// Matches z^2 + c exactly; returns c.
  std::optional<cplx> quadratic_parameter() const;

  /// f(z); throws PoleHit when the denominator vanishes to tolerance.
  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  void evaluate(cplx z, cplx& value, cplx& derivative) const;

  /// Finite critical points: roots of N'D - ND'.
  std::vector<cplx> critical_points() const;

  /// {"numerator": [[re,im],...], "denominator": [[re,im],...]}
  std::string to_json() const;
  static RationalMap from_json(const std::string& text);
  static RationalMap load(const std::string& path);
  /// SHA-256 of the canonical JSON form, hex encoded.
  std::string hash() const;

  bool operator==(const RationalMap&) const = default;

 private:
  Polynomial num_;
  Polynomial den_;
  int degree_ = 0;
};

struct IterateResult {
  cplx value;
  cplx derivative;
};

cplx evaluate(const RationalMap& map, cplx z);

/// All d solutions w of f(w) = z, unchecked. See coding.hpp for the
/// collision-checked version.
std::vector<cplx> preimage_roots(const RationalMap& map, cplx z);

/// (f^n(z), (f^n)'(z)) with the derivative accumulated by the chain rule.
/// Throws PoleHit, or Overflow naming the step where the orbit escaped.
IterateResult iterate_with_derivative(const RationalMap& map, cplx z, int n);

/// Default escape radius: max(|c|, 2) + 1 for z^2 + c, otherwise a bound
/// beyond which |f(z)| >= 2|z| for polynomials.
double default_escape_radius(const RationalMap& map);

enum class Verdict { Hyperbolic, NotHyperbolic, Inconclusive };

struct CriticalFate {
  enum class Kind { EscapesToAttractor, Escaped, Undecided };
  cplx critical_point;
  Kind kind = Kind::Undecided;
  int cycle_id = -1;       // EscapesToAttractor
  int escape_iteration = -1;  // Escaped
};

std::string_view to_string(Verdict v);

struct AttractingCycle {
  cplx point;
  int period = 0;
  cplx multiplier;
};

struct HyperbolicityCertificate {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<CriticalFate> fates;
  std::vector<AttractingCycle> attracting_cycles;
  double kappa = 0.0;  // expansion rate estimate
  double c0 = 0.0;
  struct Sample {
    cplx point;
    int period;
    double abs_multiplier;
  };
  std::vector<Sample> samples;

  bool all_critical_orbits_escape() const;
};

/// Tracks every finite critical orbit; Inconclusive is a normal outcome.
HyperbolicityCertificate classify_hyperbolic(const RationalMap& map, int max_iter = 500,
                                             std::optional<double> escape_radius = std::nullopt);

/// z -> (a z + b) / (c z + d)
class MoebiusTransform {
 public:
  MoebiusTransform(cplx a, cplx b, cplx c, cplx d);
  static MoebiusTransform identity() { return {1.0, 0.0, 0.0, 1.0}; }

  cplx operator()(cplx z) const;
  MoebiusTransform inverse() const;
  const std::array<cplx, 4>& matrix() const { return m_; }

 private:
  std::array<cplx, 4> m_;
};

/// M o f o M^{-1}
RationalMap conjugate(const RationalMap& map, const MoebiusTransform& m);

/// Named example maps: z2, z2m6, z2p5, z2p2p2i.
std::optional<RationalMap> builtin_map(const std::string& name);
std::vector<std::string> builtin_map_names();

}  // namespace primeorbits
