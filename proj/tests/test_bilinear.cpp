#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "torusnf/bilinear.hpp"
#include "torusnf/initial_data.hpp"

using namespace torusnf;

TEST_CASE("bilinear term matches collocation quadrature") {
  auto u = random_field(3, 10, 101, 0.8);
  auto v = random_field(3, 10, 102, 1.3);
  auto fast = bilinear_b(u, v);
  auto ref = oracles::collocation_bilinear(u, v);
  CHECK(h_norm(fast - ref) < 1e-12 * std::max(1.0, h_norm(ref)));

  auto u2 = random_field(2, 8, 103, 0.9);
  auto v2 = random_field(2, 8, 104, 0.5);
  auto fast2 = bilinear_b(u2, v2);
  auto ref2 = oracles::collocation_bilinear(u2, v2);
  CHECK(h_norm(fast2 - ref2) < 1e-12 * std::max(1.0, h_norm(ref2)));
}

TEST_CASE("bilinear term is bilinear and divergence-free") {
  auto u = random_field(3, 10, 7, 0.4);
  auto w = random_field(3, 10, 8, 0.4);
  auto v = random_field(3, 10, 9, 0.4);
  auto lhs = bilinear_b(lin_comb(2.0, u, -0.5, w), v);
  auto rhs = lin_comb(2.0, bilinear_b(u, v), -0.5, bilinear_b(w, v));
  CHECK(h_norm(lhs - rhs) < 1e-14);
  bilinear_b(u, v).validate();
}

TEST_CASE("energy flux orthogonality <B(u,v),v> = 0 is exact in the truncation") {
  for (int rep = 0; rep < 100; ++rep) {
    auto u = random_field(3, 10, 1000 + rep, 0.1);
    auto v = random_field(3, 10, 2000 + rep, 0.1);
    CHECK(std::abs(inner_h(bilinear_b(u, v), v)) < 1e-12);
    CHECK(std::abs(inner_h(bilinear_b(u, u), u)) < 1e-12);
  }
}

TEST_CASE("2d enstrophy orthogonality <B(u,u),Au> = 0") {
  for (int rep = 0; rep < 100; ++rep) {
    auto u = random_field(2, 8, 3000 + rep, 0.1);
    CHECK(std::abs(inner_h(bilinear_b(u, u), stokes_apply(u))) < 1e-12);
  }
}

TEST_CASE("translation-invariant family annihilates the nonlinearity") {
  auto u = invariant_family(3, 10, {1, -1, 0}, {cplx(0.4, 0.2), cplx(-0.1, 0.3)});
  CHECK(h_norm(bilinear_b(u, u)) < 1e-15);
  auto u2 = invariant_family(2, 8, {1, -1, 0}, {cplx(0.5, -0.2), cplx(0.1, 0.1)});
  CHECK(h_norm(bilinear_b(u2, u2)) < 1e-15);
}

TEST_CASE("directional fields annihilate the nonlinearity") {
  auto u = directional_field(3, 10, {1, 1, 0}, {}, 55, 0.7);
  CHECK(h_norm(bilinear_b(u, u)) < 1e-15);
}

TEST_CASE("curl eigenfields annihilate the nonlinearity") {
  for (int m : {1, 2, 5}) {
    auto b = beltrami(3, 10, m, +1, 0.9);
    CHECK(h_norm(bilinear_b(b, b)) < 5e-15);
    // collocation confirms independently
    CHECK(h_norm(oracles::collocation_bilinear(b, b)) < 5e-14);
  }
  // mixture of both polarizations on a single wave pair
  auto mix = single_pair_mixture(3, 10, {1, 1, 0}, cplx(0.4, 0.1), cplx(-0.2, 0.3));
  CHECK(h_norm(bilinear_b(mix, mix)) < 5e-15);
}
