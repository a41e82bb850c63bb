#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primeorbits/errors.hpp"
#include "primeorbits/probes.hpp"

using namespace primeorbits;

TEST_CASE("decay on the circle does not decay") {
  const auto f = *builtin_map("z2");
  const TransferOperator op(f, *builtin_coding("z2", f), 8);
  const auto db = OrbitDatabase::build(f, 9, Backend::Roots);
  const auto mu = equilibrium_weights(db, 9, 1.0);
  const auto r = decay_probe(op, {1.0, 5.0}, 0, 20, mu);
  CHECK(r.rho >= 0.999);
  CHECK(r.log_norms.size() == 21);
  CHECK_THROWS_AS(decay_probe(op, {1.0, 5.0}, 0, 2, mu), Error);
}

TEST_CASE("decay for a Cantor map") {
  const auto f = *builtin_map("z2p2p2i");
  const TransferOperator op(f, detect_full_shift(f), 8);
  const double d = estimate_delta_eigen(op).delta;
  const auto db = OrbitDatabase::build(f, 9, Backend::Symbolic);
  CHECK(decay_probe(op, {d, 5.0}, 0, 30, equilibrium_weights(db, 9, d)).rho < 0.999);
}

TEST_CASE("nli degenerates for z^2 only") {
  const SymbolWord w1{{0, 0, 0}}, w2{{0, 1, 1}};
  const auto z2 = *builtin_map("z2");
  const auto sc2 = *builtin_coding("z2", z2);
  CHECK(nli_probe(z2, sc2, w1, w2, default_nli_grid(z2, sc2)).min_singular_value <= 1e-8);
  const auto f = *builtin_map("z2p5");
  const auto sc = detect_full_shift(f);
  const auto r = nli_probe(f, sc, w1, w2, default_nli_grid(f, sc));
  CHECK(r.min_singular_value >= 1e-3);
  CHECK(r.grid_points == 25);
  CHECK(r.richardson_gap < 1e-6);

  NliGrid far;
  far.center = 100.0;
  CHECK_THROWS_AS(nli_probe(f, sc, w1, w2, far), Error);
  CHECK_THROWS_AS(nli_probe(f, sc, w1, w1, default_nli_grid(f, sc)), Error);
}

TEST_CASE("ncp for a real Julia set") {
  const auto f = *builtin_map("z2m6");
  const auto pts = cylinder_points(f, detect_full_shift(f), SymbolWord{{0}}, 10);
  CHECK(pts.size() == 1024);
  const auto r = ncp_probe(pts, 8, {});
  // direction 4 of 8 is vertical
  CHECK(r.per_direction[4] <= 1e-9);
  CHECK(r.modulus_min > 0.0);
  CHECK_THROWS_AS(ncp_probe(std::vector<cplx>(10, 0.0), 8, {}), Error);
}

TEST_CASE("doubling on the circle") {
  const auto db = OrbitDatabase::build(*builtin_map("z2"), 11, Backend::Roots);
  const auto mu = equilibrium_weights(db, 11, 1.0);
  const auto r = doubling_probe(mu, {});
  CHECK(r.max_ratio >= 1.8);
  CHECK(r.max_ratio <= 2.5);
  CHECK_THROWS_AS(doubling_probe(mu, {1e-7}), Error);
  // determinism of the sampling
  CHECK(doubling_probe(mu, {}, 64, 7).max_ratio == doubling_probe(mu, {}, 64, 7).max_ratio);
}
