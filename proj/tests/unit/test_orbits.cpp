#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "primeorbits/errors.hpp"
#include "primeorbits/orbits.hpp"

using namespace primeorbits;

TEST_CASE("z^2 period two points are the circle roots of z^4 - z") {
  const auto f = *builtin_map("z2");
  const auto r = enumerate_roots(f, 2);
  const double a = 2.0 * M_PI / 3.0;
  CHECK(oracle::same_sets(r.points, {1.0, std::polar(1.0, a), std::polar(1.0, -a)}, 1e-10));
  CHECK(r.attracting_removed == 1);

  const auto prim = decompose_primitive(r.points, 2, f);
  REQUIRE(prim.size() == 1);
  CHECK(std::abs(prim[0].multiplier - 4.0) < 1e-10);
  CHECK(std::abs(prim[0].holonomy - 1.0) < 1e-10);
}

TEST_CASE("z^2 + 5 period three roots match the companion matrix") {
  const auto f = *builtin_map("z2p5");
  const auto r = enumerate_roots(f, 3);
  const auto expect = oracle::companion_roots(oracle::quadratic_iterate_minus_z(5.0, 3));
  CHECK(r.points.size() == 8);
  CHECK(oracle::same_sets(r.points, expect, 1e-8));
  const auto sc = detect_full_shift(f);
  CHECK(oracle::same_sets(enumerate_symbolic(f, sc, 3), expect, 1e-8));
}

TEST_CASE("z^2 + 2 + 2i period five roots match the companion matrix") {
  const auto f = *builtin_map("z2p2p2i");
  const auto expect = oracle::polish_quadratic_cycle_points(
      {2.0, 2.0}, 5, oracle::companion_roots(oracle::quadratic_iterate_minus_z({2.0, 2.0}, 5)));
  CHECK(oracle::same_sets(enumerate_roots(f, 5).points, expect, 1e-9));
}

TEST_CASE("primitive counts follow the necklace count") {
  for (int n = 1; n <= 12; ++n) CHECK(necklace_count(n, 2) == oracle::primitive_necklaces(n, 2));
  CHECK(necklace_count(6, 3) == oracle::primitive_necklaces(6, 3));
  const auto db = OrbitDatabase::build(*builtin_map("z2p5"), 10, Backend::Symbolic);
  for (int n = 1; n <= 10; ++n) {
    CHECK(db.raw_count(n) == (std::size_t{1} << n));
    CHECK(static_cast<long long>(db.primitive_count(n)) == oracle::primitive_necklaces(n, 2));
  }
}

TEST_CASE("database for z^2") {
  const auto db = OrbitDatabase::build(*builtin_map("z2"), 10, Backend::Roots);
  for (int n = 1; n <= 10; ++n) CHECK(db.raw_count(n) == (std::size_t{1} << n) - 1);
  for (const auto& o : db.orbits()) {
    CHECK(std::abs(o.abs_multiplier - std::ldexp(1.0, o.period)) < 1e-9 * o.abs_multiplier);
    CHECK(std::abs(o.holonomy - 1.0) < 1e-9);
  }
  // periods 1, 2, 3 have |lambda| = 2, 4, 8 and 1, 1, 2 orbits
  CHECK(db.query_Nt(10.0) == 4);
  CHECK_THROWS_AS(db.query_Nt(1e9), Error);
  CHECK(db.slice_below(2.0).empty());
}

TEST_CASE("orbits are sorted and angles are principal") {
  const auto db = OrbitDatabase::build(*builtin_map("z2p2p2i"), 9, Backend::Symbolic);
  const auto& o = db.orbits();
  for (std::size_t i = 1; i < o.size(); ++i) CHECK(o[i - 1].abs_multiplier <= o[i].abs_multiplier);
  for (const auto& x : o) {
    CHECK(x.holonomy_angle > -M_PI);
    CHECK(x.holonomy_angle <= M_PI);
    CHECK(std::abs(std::abs(x.holonomy) - 1.0) < 1e-12);
  }
  CHECK(db.kappa() > 1.0);
  CHECK(db.c0() > 0.0);
}

TEST_CASE("both backends agree") {
  const auto f = *builtin_map("z2p5");
  const auto db = OrbitDatabase::build_both(f, 7, detect_full_shift(f));
  REQUIRE(db.agreement().size() == 7);
  for (const auto& a : db.agreement()) {
    CHECK(a.roots_count == a.symbolic_count);
    CHECK(a.hausdorff < 1e-8);
  }
}

TEST_CASE("save and load round trip") {
  const auto db = OrbitDatabase::build(*builtin_map("z2m6"), 8, Backend::Symbolic);
  const auto prefix = (std::filesystem::temp_directory_path() / "primeorbits_unit_db").string();
  db.save(prefix);
  const auto back = OrbitDatabase::load(prefix);
  CHECK(back.map_hash() == db.map_hash());
  REQUIRE(back.orbits().size() == db.orbits().size());
  for (std::size_t i = 0; i < db.orbits().size(); ++i)
    CHECK(back.orbits()[i].multiplier == db.orbits()[i].multiplier);
  CHECK(back.csv() == db.csv());
  std::remove((prefix + ".csv").c_str());
  std::remove((prefix + ".json").c_str());
}

TEST_CASE("degree cap and backend names") {
  Tolerances tol;
  tol.degree_cap = 64;
  CHECK_THROWS_AS(enumerate_roots(*builtin_map("z2p5"), 8, tol), Error);
  CHECK(backend_from_string("roots") == Backend::Roots);
  CHECK(to_string(Backend::Symbolic) == "symbolic");
}

TEST_CASE("hausdorff distance") {
  CHECK(hausdorff_distance(std::vector<cplx>{0.0, 1.0}, std::vector<cplx>{0.0, cplx(1.0, 0.5)}) ==
        doctest::Approx(0.5));
}
