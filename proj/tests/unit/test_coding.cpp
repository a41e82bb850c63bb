#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primeorbits/coding.hpp"
#include "primeorbits/errors.hpp"

using namespace primeorbits;

TEST_CASE("full shift for Cantor quadratics") {
  for (const char* name : {"z2p5", "z2m6", "z2p2p2i"}) {
    const auto f = *builtin_map(name);
    const auto sc = detect_full_shift(f);
    CHECK(sc.kind() == CodingKind::FullShift);
    CHECK(sc.alphabet_size() == 2);
    CHECK(sc.contraction() < 1.0);
    CHECK(sc.periodic_words(5).size() == 32);
  }
}

TEST_CASE("connected Julia set is not Cantor") {
  CHECK_THROWS_AS(detect_full_shift(*builtin_map("z2")), Error);
}

TEST_CASE("branches are the two square roots") {
  const auto f = *builtin_map("z2p5");
  const auto sc = detect_full_shift(f);
  const cplx z = sc.anchor(0);
  const cplx r = std::sqrt(z - 5.0);
  const cplx a = branch_preimage(f, sc, 0, z), b = branch_preimage(f, sc, 1, z);
  CHECK(std::abs(a - b) > 1.0);
  CHECK(std::min(std::abs(a - r), std::abs(a + r)) < 1e-12);
  CHECK(std::min(std::abs(b - r), std::abs(b + r)) < 1e-12);
  CHECK(std::abs(f(a) - z) < 1e-12);
}

TEST_CASE("backward_point applies the innermost symbol first") {
  const auto f = *builtin_map("z2m6");
  const auto sc = detect_full_shift(f);
  const SymbolWord w{{1, 0, 0}};
  const cplx z = sc.anchor(0);
  const cplx expect = branch_preimage(f, sc, 1, branch_preimage(f, sc, 0, branch_preimage(f, sc, 0, z)));
  CHECK(std::abs(backward_point(f, sc, w, z) - expect) < 1e-15);
}

TEST_CASE("user coding for the circle") {
  const auto f = *builtin_map("z2");
  const auto sc = *builtin_coding("z2", f);
  CHECK(sc.kind() == CodingKind::UserMarkov);
  CHECK(sc.target_count() == 2);
  CHECK(sc.nearest_piece(cplx(1.0, 0.1)) == 0);
  CHECK(sc.nearest_piece(cplx(-1.0, 0.1)) == 1);
  CHECK(sc.admissible(SymbolWord{{0, 1, 1, 0}}, -1, true));
}

TEST_CASE("user coding validation") {
  const auto f = *builtin_map("z2");
  // not mixing
  CHECK_THROWS_AS(CodingScheme::user_markov(f, {{1, 0}, {0, 1}}, {{cplx(1, 0)}, {cplx(-1, 0)}}), Error);
  CHECK_THROWS_AS(CodingScheme::user_markov_from_json(f, "{\"transition\": 3}"), Error);
}

TEST_CASE("word_from_index") {
  CHECK(word_from_index(5, 4, 2).symbols == std::vector<int>{0, 1, 0, 1});
}
