#include "primeorbits/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "primeorbits/errors.hpp"

namespace primeorbits {

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(cplx{0.0});
  while (coeffs_.size() > 1 && coeffs_.back() == cplx{0.0}) coeffs_.pop_back();
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = coeffs_.back();
  for (int k = degree() - 1; k >= 0; --k) acc = acc * z + coeffs_[k];
  return acc;
}

void Polynomial::evaluate(cplx z, cplx& value, cplx& derivative) const {
  cplx p = coeffs_.back();
  cplx dp{0.0};
  for (int k = degree() - 1; k >= 0; --k) {
    dp = dp * z + p;
    p = p * z + coeffs_[k];
  }
  value = p;
  derivative = dp;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return Polynomial{};
  std::vector<cplx> out(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Polynomial(std::move(out));
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (auto c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const double cutoff = rel_tol * max_abs_coefficient();
  std::vector<cplx> out = coeffs_;
  for (auto& c : out)
    if (std::abs(c) <= cutoff) c = cplx{0.0};
  return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<cplx> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[static_cast<int>(k)] + b[static_cast<int>(k)];
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + cplx{-1.0} * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<cplx> out(a.coeffs_.size() + b.coeffs_.size() - 1, cplx{0.0});
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(cplx s, const Polynomial& a) {
  std::vector<cplx> out = a.coeffs_;
  for (auto& c : out) c *= s;
  return Polynomial(std::move(out));
}

std::vector<cplx> polynomial_roots(const Polynomial& p) {
  const int n = p.degree();
  if (n <= 0) return {};
  if (n == 1) return {-p[0] / p[1]};
  if (n == 2) {
    const cplx a = p[2], b = p[1], c = p[0];
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    // pick the sign that avoids cancellation
    const cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cplx{0.0}) return {cplx{0.0}, cplx{0.0}};
    return {q / a, c / q};
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  const cplx lead = p.leading();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NonConvergence, "companion eigenvalue solver failed");
  std::vector<cplx> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = solver.eigenvalues()[i];
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      cplx v, dv;
      p.evaluate(r, v, dv);
      if (dv == cplx{0.0}) break;
      const cplx step = v / dv;
      if (!std::isfinite(step.real()) || std::abs(step) > 1e-3 * (1.0 + std::abs(r))) break;
      r -= step;
    }
  }
  return roots;
}

cplx unit_power(cplx u, long long k) {
  if (k < 0) {
    u = std::conj(u);
    k = -k;
  }
  cplx result{1.0, 0.0};
  while (k > 0) {
    if (k & 1) result *= u;
    u *= u;
    k >>= 1;
  }
  return result;
}

}  // namespace primeorbits
