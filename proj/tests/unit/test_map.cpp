#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primeorbits/errors.hpp"
#include "primeorbits/map.hpp"

using namespace primeorbits;

TEST_CASE("evaluation and derivative of z^2 + c") {
  const auto f = RationalMap::quadratic({0.3, -0.2});
  const cplx z{1.1, 0.7};
  CHECK(std::abs(f(z) - (z * z + cplx(0.3, -0.2))) < 1e-15);
  // central difference oracle
  const double h = 1e-6;
  const cplx fd = (f(z + h) - f(z - h)) / (2 * h);
  CHECK(std::abs(f.derivative(z) - fd) < 1e-8);
  CHECK(f.degree() == 2);
  CHECK(f.is_polynomial());
  CHECK(f.quadratic_parameter().has_value());
}

TEST_CASE("iterate_with_derivative follows the chain rule") {
  const auto f = RationalMap::quadratic(0.0);
  const cplx z = std::polar(1.0, 0.4);
  const auto r = iterate_with_derivative(f, z, 3);
  // f^3(z) = z^8, (f^3)' = 8 z^7
  CHECK(std::abs(r.value - std::pow(z, 8)) < 1e-14);
  CHECK(std::abs(r.derivative - 8.0 * std::pow(z, 7)) < 1e-13);
}

TEST_CASE("preimages solve f(w) = z") {
  const auto f = RationalMap::quadratic(5.0);
  const cplx z{1.0, 2.0};
  const auto w = preimage_roots(f, z);
  REQUIRE(w.size() == 2);
  // quadratic formula: w = +-sqrt(z - 5)
  const cplx r = std::sqrt(z - 5.0);
  for (cplx x : w) CHECK(std::min(std::abs(x - r), std::abs(x + r)) < 1e-13);
}

TEST_CASE("json round trip and hash") {
  for (const auto& name : builtin_map_names()) {
    const auto f = *builtin_map(name);
    const auto g = RationalMap::from_json(f.to_json());
    CHECK(f == g);
    CHECK(f.hash() == g.hash());
    CHECK(f.hash().size() == 64);
  }
  CHECK(builtin_map("z2")->hash() != builtin_map("z2p5")->hash());
  CHECK_THROWS_AS(RationalMap::from_json("{not json"), Error);
  CHECK_FALSE(builtin_map("nope").has_value());
}

TEST_CASE("rational maps reject degree below two") {
  CHECK_THROWS_AS(RationalMap::polynomial({1.0, 2.0}), Error);
}

TEST_CASE("hyperbolicity verdicts") {
  CHECK(classify_hyperbolic(*builtin_map("z2p5")).verdict == Verdict::Hyperbolic);
  CHECK(classify_hyperbolic(*builtin_map("z2")).verdict == Verdict::Hyperbolic);
  // c = -2: the critical orbit lands on the repelling fixed point 2
  CHECK(classify_hyperbolic(RationalMap::quadratic(-2.0)).verdict != Verdict::Hyperbolic);
}

TEST_CASE("moebius conjugation") {
  const auto f = *builtin_map("z2p5");
  const MoebiusTransform m(2.0, 1.0, 0.0, 1.0);
  const auto g = conjugate(f, m);
  const cplx z{0.3, 0.1};
  CHECK(std::abs(g(m(z)) - m(f(z))) < 1e-12);
}

TEST_CASE("error kinds classify exit codes") {
  CHECK(is_validation_error(ErrorKind::ParseError));
  CHECK(is_validation_error(ErrorKind::HorizonExceeded));
  CHECK_FALSE(is_validation_error(ErrorKind::NonConvergence));
  CHECK_FALSE(is_validation_error(ErrorKind::RootPolishFailure));
}
