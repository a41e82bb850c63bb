#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>

#include "primeorbits/counting.hpp"
#include "primeorbits/errors.hpp"
#include "primeorbits/thermo.hpp"

using namespace primeorbits;

TEST_CASE("t grid parser") {
  const auto g = parse_t_grid("log:10:1000:3", 1e6);
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(100.0));
  CHECK(g[2] == 1000.0);
  CHECK(parse_t_grid("lin:1:h:2", 7.0).back() == 7.0);
  CHECK(parse_t_grid("5,6,h", 9.0) == std::vector<double>{5.0, 6.0, 9.0});
  CHECK_THROWS_AS(parse_t_grid("log:1:x:3", 1.0), Error);
}

TEST_CASE("count report for z^2") {
  const auto db = OrbitDatabase::build(*builtin_map("z2"), 10, Backend::Roots);
  const auto r = count_report(db, 1.0, {1.5, 10.0, 1000.0});
  CHECK(r.N_t == std::vector<std::size_t>{0, 4, 0 + 1 + 1 + 2 + 3 + 6 + 9 + 18 + 30 + 56});
  CHECK(r.small_t[0]);
  CHECK(r.li[0] == 0.0);
  const double li10 = boost::math::expint(std::log(10.0)) - boost::math::expint(std::log(2.0));
  CHECK(r.li[1] == doctest::Approx(li10).epsilon(1e-12));
  CHECK(r.rel_error[1] == doctest::Approx(4.0 / li10 - 1.0));
  CHECK_THROWS_AS(count_report(db, 1.0, {1e9}), Error);
}

TEST_CASE("weyl sums: conjugation, pi_0 and the real case") {
  const auto db = OrbitDatabase::build(*builtin_map("z2p2p2i"), 10, Backend::Symbolic);
  const auto w = weyl_report(db, 3, {100.0, db.horizon()});
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(w.at(0)[k] == cplx(static_cast<double>(w.N_t[k])));
    for (int ell = 1; ell <= 3; ++ell) CHECK(w.at(-ell)[k] == std::conj(w.at(ell)[k]));
  }
  // brute force pi_2
  cplx expect = 0.0;
  for (const auto& o : db.slice_below(100.0)) expect += std::polar(1.0, 2.0 * o.holonomy_angle);
  CHECK(std::abs(w.at(2)[0] - expect) < 1e-10);

  const auto real = OrbitDatabase::build(*builtin_map("z2m6"), 10, Backend::Symbolic);
  const auto wr = weyl_report(real, 4, {real.horizon()});
  for (int ell = -4; ell <= 4; ++ell) CHECK(wr.at(ell)[0].imag() == 0.0);
  CHECK(wr.at(1)[0] == wr.at(3)[0]);
  CHECK(wr.at(2)[0] == wr.at(4)[0]);
}

TEST_CASE("psi sums two ways") {
  const auto db = OrbitDatabase::build(*builtin_map("z2p2p2i"), 10, Backend::Symbolic);
  auto psi = [](double th) { return cplx(0.3 + std::cos(th) - 0.2 * std::sin(3 * th), 0.0); };
  const auto a = fourier_coefficients(psi, 4);
  CHECK(std::abs(a[4] - 0.3) < 1e-14);
  CHECK(std::abs(a[5] - 0.5) < 1e-14);
  const auto p = psi_sum(db, psi, a, db.horizon(), 0.5475);
  CHECK(p.route_gap < 1e-9);
  const auto one = psi_sum(db, [](double) { return cplx(1.0); }, {1.0}, db.horizon(), 0.5475);
  CHECK(one.direct == cplx(static_cast<double>(one.N_t)));

  const auto circle = OrbitDatabase::build(*builtin_map("z2"), 8, Backend::Roots);
  CHECK_THROWS_AS(psi_sum(circle, psi, a, 100.0, 1.0), Error);
  const auto line = OrbitDatabase::build(*builtin_map("z2m6"), 8, Backend::Symbolic);
  CHECK(circle_residual(line.level_points(8)) < 1e-8);
}

TEST_CASE("z^2 + 5 counts at the horizon") {
  const auto db = OrbitDatabase::build(*builtin_map("z2p5"), 16, Backend::Symbolic);
  const double d = estimate_delta(db, 10, 16).delta;
  const auto r = count_report(db, d, {db.horizon()});
  CHECK(std::abs(r.rel_error[0]) <= 0.15);
}
