#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>

#include "primeorbits/errors.hpp"
#include "primeorbits/thermo.hpp"

using namespace primeorbits;

namespace {
// Li(t) = Ei(log t) - Ei(log 2)
double li_oracle(double t) { return boost::math::expint(std::log(t)) - boost::math::expint(std::log(2.0)); }
}  // namespace

TEST_CASE("li against the exponential integral") {
  for (double t : {2.5, 10.0, 100.0, 1e4, 1e8, 1e12}) CHECK(li(t) == doctest::Approx(li_oracle(t)).epsilon(1e-12));
  CHECK(li(2.0) == 0.0);
  CHECK(std::abs(li(1e6) * std::log(1e6) / 1e6 - 1.0) < 0.1);
  CHECK_THROWS_AS(li(1.5), Error);
}

TEST_CASE("tau and theta along circle cycles") {
  const auto f = *builtin_map("z2");
  const cplx x = std::polar(1.0, 2.0 * M_PI / 7.0);  // period 3
  const auto tt = tau_theta_n(f, x, 3);
  CHECK(tt.tau == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-13));
  CHECK(std::abs(std::polar(1.0, tt.theta) - 1.0) < 1e-12);
}

TEST_CASE("pressure of z^2 in closed form") {
  const auto db = OrbitDatabase::build(*builtin_map("z2"), 12, Backend::Roots);
  for (int n = 2; n <= 12; ++n)
    for (double s : {0.0, 0.5, 1.0, 1.7}) {
      const double expect = (std::log(std::ldexp(1.0, n) - 1.0) - n * s * std::log(2.0)) / n;
      CHECK(std::abs(pressure_n(db, s, n) - expect) < 1e-12);
    }
  // derivative by central differences
  const double h = 1e-5;
  CHECK(pressure_derivative_n(db, 0.7, 9) ==
        doctest::Approx((pressure_n(db, 0.7 + h, 9) - pressure_n(db, 0.7 - h, 9)) / (2 * h)).epsilon(1e-8));
  // delta_n = log(2^n - 1) / (n log 2)
  CHECK(delta_n(db, 8) == doctest::Approx(std::log(255.0) / (8 * std::log(2.0))).epsilon(1e-12));
  CHECK(std::abs(delta_n(db, 8) - 0.999293) < 5e-6);
  const auto est = estimate_delta(db, 6, 12);
  CHECK(std::abs(est.delta - 1.0) < 1e-3);
  CHECK(est.per_level.size() == 7);
}

TEST_CASE("one level cannot bracket") {
  const auto db = OrbitDatabase::build(*builtin_map("z2"), 3, Backend::Roots);
  CHECK_THROWS_AS(delta_n(db, 1), Error);
}

TEST_CASE("aitken on a geometric sequence") {
  std::vector<double> xs;
  for (int k = 0; k < 6; ++k) xs.push_back(2.0 + std::pow(0.5, k));
  CHECK(aitken_last(xs) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("equilibrium weights") {
  const auto db = OrbitDatabase::build(*builtin_map("z2p5"), 8, Backend::Symbolic);
  const double d = estimate_delta(db, 4, 8).delta;
  const auto mu = equilibrium_weights(db, 8, d);
  CHECK(mu.points.size() == 256);
  double total = 0.0;
  for (double w : mu.weights) {
    CHECK(w > 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}
