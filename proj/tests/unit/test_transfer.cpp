#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primeorbits/errors.hpp"
#include "primeorbits/transfer.hpp"

using namespace primeorbits;

TEST_CASE("L_{1,0} fixes constants for z^2") {
  // two preimages, each with |f'| = 2 on the circle
  const auto f = *builtin_map("z2");
  const TransferOperator op(f, *builtin_coding("z2", f), 6);
  CHECK(op.size() == 128);
  const auto out = op.apply_real(1.0, std::vector<double>(op.size(), 1.0));
  for (double v : out) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate_delta_eigen(op).delta == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("leading eigenvalue and normalisation") {
  const auto f = *builtin_map("z2p2p2i");
  const TransferOperator op(f, detect_full_shift(f), 8);
  CHECK(op.size() == 256);
  const auto e = eigen_data(op, 0.5);
  // eigen equation checked directly
  const auto Lh = op.apply_real(0.5, e.eigenvector);
  for (std::size_t q = 0; q < op.size(); ++q) CHECK(std::abs(Lh[q] - e.eigenvalue * e.eigenvector[q]) < 1e-8);
  const NormalizedOperator L(op, 0.5);
  const auto one = L.apply(0.5, 0, std::vector<cplx>(op.size(), 1.0));
  for (cplx v : one) CHECK(std::abs(v - 1.0) < 1e-8);
}

TEST_CASE("edge targets are states and nearest_state finds its own point") {
  const auto f = *builtin_map("z2m6");
  const TransferOperator op(f, detect_full_shift(f), 5);
  for (std::size_t q = 0; q < op.size(); ++q) {
    CHECK(op.edges(q).size() == 2);
    CHECK(op.nearest_state(op.points()[q]) == q);
  }
  CHECK_THROWS_AS(op.apply(1.0, 0, std::vector<cplx>(3, 1.0)), Error);
  CHECK_THROWS_AS(TransferOperator(f, detect_full_shift(f), 0), Error);
}
