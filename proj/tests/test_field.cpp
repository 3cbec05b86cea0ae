#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "torusnf/field.hpp"
#include "torusnf/initial_data.hpp"

using namespace torusnf;

namespace {
SpectralField single(int dim, int lmax, Wave k, Cvec a) {
  return SpectralField::make(dim, lmax, {Mode{k, a}});
}
}  // namespace

TEST_CASE("stokes_apply scales modes by |k|^{2 alpha}") {
  auto u = single(3, 10, {1, 1, 0}, {cplx(1, 0), cplx(-1, 0), cplx(0, 2)});
  auto au = stokes_apply(u);
  CHECK(au.modes()[0].a[0] == cplx(2, 0));
  CHECK(au.modes()[0].a[2] == cplx(0, 4));

  auto v = single(3, 10, {2, 0, 0}, {cplx(0, 0), cplx(1, 0), cplx(0, 0)});
  CHECK(std::abs(stokes_apply(v, 0.5).modes()[0].a[1] - cplx(2, 0)) < 1e-15);  // shell 4, sqrt
  CHECK(std::abs(stokes_apply(v, 0.0).modes()[0].a[1] - cplx(1, 0)) < 1e-15);
}

TEST_CASE("leray_project removes the longitudinal part") {
  auto p = leray_project(3, 10, {Mode{{1, 0, 0}, {cplx(1, 0), cplx(1, 0), cplx(0, 0)}}});
  CHECK(p.modes()[0].a[0] == cplx(0, 0));
  CHECK(p.modes()[0].a[1] == cplx(1, 0));

  // already divergence-free input is fixed
  auto u = single(3, 10, {0, 1, 1}, {cplx(1, 1), cplx(2, 0), cplx(-2, 0)});
  auto pu = leray_project(3, 10, u.modes());
  for (int c = 0; c < 3; ++c) CHECK(std::abs(pu.modes()[0].a[c] - u.modes()[0].a[c]) < 1e-15);
}

TEST_CASE("leray projection is idempotent and self-adjoint") {
  GaussianSource g(411);
  const Lattice& lat = Lattice::get(3, 10);
  auto raw = [&] {
    std::vector<Mode> m(lat.size());
    for (int i = 0; i < lat.size(); ++i) {
      m[i].k = lat.modes[i];
      for (int c = 0; c < 3; ++c) m[i].a[c] = cplx(g(), g());
    }
    return m;
  };
  for (int rep = 0; rep < 20; ++rep) {
    auto v = raw();
    auto w = raw();
    SpectralField vr = SpectralField::unchecked(3, 10, v);
    SpectralField wr = SpectralField::unchecked(3, 10, w);
    SpectralField pv = leray_project(3, 10, v);
    SpectralField pw = leray_project(3, 10, w);
    CHECK(h_norm(leray_project(3, 10, pv.modes()) - pv) < 1e-13 * h_norm(pv));
    CHECK(inner_h(pv, wr) == Catch::Approx(inner_h(vr, pw)).margin(1e-11));
    pv.validate();  // output satisfies the divergence-free invariant
  }
}

TEST_CASE("shell projections partition the field") {
  auto u = random_field(3, 10, 2024, 1.0);
  const Lattice& lat = Lattice::get(3, 10);
  SpectralField acc = SpectralField::zero(3, 10);
  double sq = 0.0;
  for (int m : lat.shells) {
    auto um = shell_project(u, m);
    acc = acc + um;
    sq += inner_h(um, um);
  }
  CHECK(h_norm(acc - u) < 1e-14);
  CHECK(sq == Catch::Approx(inner_h(u, u)).epsilon(1e-13));
  CHECK(shell_project(u, 7).empty());  // 7 is not a sum of three squares
  CHECK(h_norm(shell_project(u, 7)) == 0.0);

  // commutes with the Stokes operator
  auto lhs = stokes_apply(shell_project(u, 5), 0.7);
  auto rhs = shell_project(stokes_apply(u, 0.7), 5);
  CHECK(h_norm(lhs - rhs) < 1e-13);
}

TEST_CASE("norm examples and Gevrey monotonicity") {
  auto u = single(3, 10, {1, 0, 0}, {cplx(0, 0), cplx(1, 0), cplx(0, 0)});
  CHECK(norm(u) == Catch::Approx(1.0));
  CHECK(norm(u, {1.0, 0.0}) == Catch::Approx(1.0));
  CHECK(norm(u, {0.0, std::log(2.0)}) == Catch::Approx(2.0));
  CHECK(v_norm(u) == Catch::Approx(1.0));

  auto w = random_field(3, 10, 7, 1.0);
  double prev = norm(w, {0.0, 0.0});
  for (double al : {0.25, 0.5, 1.0}) {
    double cur = norm(w, {al, 0.0});
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
  prev = norm(w, {0.5, 0.0});
  for (double sg : {0.05, 0.2, 0.5}) {
    double cur = norm(w, {0.5, sg});
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("curl matches the cross-product formula and finite differences") {
  // h+ polarization at k = (0,0,1): fixed point of curl
  auto u = single(3, 10, {0, 0, 1},
                  {cplx(1.0 / std::sqrt(2), 0), cplx(0, 1.0 / std::sqrt(2)), cplx(0, 0)});
  auto cu = curl(u);
  CHECK(h_norm(cu - u) < 1e-14);

  auto b = beltrami(3, 10, 5, -1, 0.8);
  CHECK(h_norm(curl(b) - scale(b, -std::sqrt(5.0))) < 1e-13);

  auto w = random_field(3, 10, 99, 1.0);
  auto cw = curl(w);
  GaussianSource g(5);
  for (int rep = 0; rep < 8; ++rep) {
    std::array<double, 3> x{g(), g(), g()};
    auto exact = oracles::eval_field(cw, x);
    auto fd = oracles::fd_curl(w, x, 1e-5 * 2.0 * M_PI);
    for (int c = 0; c < 3; ++c) CHECK(exact[c] == Catch::Approx(fd[c]).margin(2e-6));
  }

  // 2d: curl of a velocity field is carried by the vorticity axis
  auto v2 = random_field(2, 8, 3, 1.0);
  auto cv = curl(v2);
  for (const auto& md : cv.modes()) {
    CHECK(std::abs(md.a[0]) == 0.0);
    CHECK(std::abs(md.a[1]) == 0.0);
  }
  CHECK(helicity(v2) == 0.0);
}

TEST_CASE("field validation rejects invariant violations") {
  CHECK_THROWS(SpectralField::make(3, 10, {Mode{{-1, 0, 0}, {}}}));          // not canonical
  CHECK_THROWS(SpectralField::make(3, 10, {Mode{{4, 0, 0}, {}}}));           // |k|^2 > 10
  CHECK_THROWS(SpectralField::make(3, 10, {Mode{{1, 0, 0}, {cplx(1, 0), cplx(0, 0), cplx(0, 0)}}}));
  CHECK_THROWS(SpectralField::make(2, 8, {Mode{{1, 0, 1}, {}}}));            // 2d with k3
  CHECK_NOTHROW(SpectralField::make(3, 10, {Mode{{1, 0, 0}, {cplx(0, 0), cplx(2, 1), cplx(0.5, 0)}}}));
}

TEST_CASE("pack/unpack round-trip on the lattice layout") {
  const Lattice& lat = Lattice::get(3, 10);
  auto u = random_field(3, 10, 31, 0.7);
  auto x = pack(u, lat);
  auto v = unpack(lat, x);
  CHECK(h_norm(u - v) == 0.0);
}

TEST_CASE("seeded constructors are deterministic") {
  auto a = random_field(3, 10, 1234, 0.1);
  auto b = random_field(3, 10, 1234, 0.1);
  CHECK(h_norm(a - b) == 0.0);
  CHECK(h_norm(a) == Catch::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("special families satisfy their defining constraints") {
  auto bel = beltrami(3, 10, 1, +1, 1.0);
  CHECK(bel.modes().size() == 3);
  CHECK(h_norm(curl(bel) - bel) < 1e-13);
  CHECK(helicity(bel) == Catch::Approx(1.0).epsilon(1e-12));  // alpha0 = +1 at unit norm

  auto fam = invariant_family(3, 10, {1, -1, 0}, {cplx(0.3, 0.1), cplx(0.0, -0.2)});
  fam.validate();
  CHECK(fam.modes().size() == 2);
  for (const auto& md : fam.modes()) CHECK(md.k[0] + md.k[1] + md.k[2] == 0);

  auto dir = directional_field(3, 10, {1, 1, 0}, {}, 88, 0.5);
  dir.validate();
  for (const auto& md : dir.modes()) {
    CHECK(md.k[0] + md.k[1] == 0);
    // amplitude collinear with (1,1,0)
    CHECK(std::abs(md.a[0] - md.a[1]) < 1e-14);
    CHECK(std::abs(md.a[2]) == 0.0);
  }
  CHECK(std::abs(helicity(dir)) < 1e-15);
}
