#pragma once

#include <complex>
#include <span>
#include <vector>

namespace primeorbits {

using cplx = std::complex<double>;

/// Dense polynomial in one complex variable, coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() : coeffs_{cplx{0.0}} {}
  explicit Polynomial(std::vector<cplx> coeffs);

  static Polynomial constant(cplx c) { return Polynomial({c}); }
  static Polynomial identity() { return Polynomial({cplx{0.0}, cplx{1.0}}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const cplx> coefficients() const { return coeffs_; }
  cplx operator[](int k) const { return k <= degree() ? coeffs_[k] : cplx{0.0}; }
  cplx leading() const { return coeffs_.back(); }
  bool is_zero() const { return degree() == 0 && coeffs_[0] == cplx{0.0}; }

  cplx operator()(cplx z) const;
  /// Horner evaluation of p and p' together.
  void evaluate(cplx z, cplx& value, cplx& derivative) const;

  Polynomial derivative() const;
  /// Drops leading coefficients below rel_tol * max|coeff|.
  Polynomial trimmed(double rel_tol) const;
  double max_abs_coefficient() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(cplx s, const Polynomial& a);

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<cplx> coeffs_;
};

/// All roots of p (with multiplicity) from the companion matrix, each
/// polished by a few Newton steps. Intended for small degrees.
std::vector<cplx> polynomial_roots(const Polynomial& p);

/// Integer power of a complex number by repeated squaring; negative
/// exponents use the conjugate, which is the inverse on the unit circle.
cplx unit_power(cplx u, long long k);

}  // namespace primeorbits
