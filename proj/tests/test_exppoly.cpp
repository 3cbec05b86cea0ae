#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "torusnf/exppoly.hpp"
#include "torusnf/initial_data.hpp"

using namespace torusnf;

namespace {

PolyField random_poly(int deg, std::uint64_t seed, double amp = 1.0) {
  PolyField p{3, 10, {}};
  for (int i = 0; i <= deg; ++i) p.c.push_back(random_field(3, 10, seed + i, amp));
  return p;
}

double max_coeff_norm(const PolyField& p) {
  double m = 0.0;
  for (const auto& f : p.c) m = std::max(m, h_norm(f));
  return m;
}

}  // namespace

TEST_CASE("polynomial evaluation agrees with extended precision") {
  auto p = random_poly(6, 500);
  for (double t : {0.0, 0.3, 1.7, 4.0, 11.0}) {
    auto v = poly_eval(p, t);
    const Lattice& lat = Lattice::get(3, 10);
    double scale_at_t = 0.0;
    for (size_t i = 0; i < p.c.size(); ++i) scale_at_t += h_norm(p.c[i]) * std::pow(t, double(i));
    for (int i = 0; i < std::min(lat.size(), 12); ++i) {
      const Wave& k = lat.modes[4 * i % lat.size()];
      for (int c = 0; c < 3; ++c) {
        std::vector<cplx> coef;
        for (const auto& f : p.c) {
          const Cvec* a = f.find(k);
          coef.push_back(a ? (*a)[c] : cplx(0, 0));
        }
        cplx ref = oracles::horner_ld(coef, t);
        const Cvec* got = v.find(k);
        REQUIRE(got != nullptr);
        CHECK(std::abs((*got)[c] - ref) < 1e-13 * std::max(1.0, scale_at_t));
      }
    }
  }
}

TEST_CASE("exponential-polynomial evaluation") {
  auto xi = random_field(3, 10, 41, 0.6);
  ExpPolyField f{3, 10, {}};
  ep_insert(f, 0, poly_const(xi));
  CHECK(h_norm(ep_eval(f, 2.7) - xi) < 1e-15);

  ExpPolyField g{3, 10, {}};
  ep_insert(g, 1, poly_const(xi));
  CHECK(h_norm(ep_eval(g, 1.0) - scale(xi, std::exp(-1.0))) < 1e-15);

  // several decay indices at once against a direct sum
  ExpPolyField h{3, 10, {}};
  auto p1 = random_poly(2, 600, 0.4);
  auto p3 = random_poly(4, 700, 0.4);
  ep_insert(h, 1, p1);
  ep_insert(h, 3, p3);
  for (double t : {0.0, 0.5, 2.0}) {
    auto direct = lin_comb(std::exp(-t), poly_eval(p1, t), std::exp(-3.0 * t), poly_eval(p3, t));
    CHECK(h_norm(ep_eval(h, t) - direct) < 1e-14);
  }
}

TEST_CASE("bilinear products add decay indices and degrees") {
  ExpPolyField f{3, 10, {}}, g{3, 10, {}};
  auto pf = random_poly(2, 801, 0.5);
  auto pg = random_poly(3, 802, 0.5);
  ep_insert(f, 1, pf);
  ep_insert(g, 2, pg);
  auto fg = ep_bilinear(f, g);
  REQUIRE(fg.terms.size() == 1);
  REQUIRE(fg.terms.count(3) == 1);
  CHECK(fg.terms.at(3).degree() == 5);

  // consistency with pointwise evaluation
  for (double t : {0.0, 0.4, 1.1, 2.5, 6.0}) {
    auto lhs = ep_eval(fg, t);
    auto rhs = bilinear_b(ep_eval(f, t), ep_eval(g, t));
    CHECK(h_norm(lhs - rhs) < 1e-11 * std::max(1.0, h_norm(rhs)));
  }
}

TEST_CASE("time derivative of exponential-polynomial sums") {
  auto c = random_field(3, 10, 90, 0.8);
  ExpPolyField f{3, 10, {}};
  ep_insert(f, 1, poly_const(c));
  auto df = ep_derivative(f);
  REQUIRE(df.terms.size() == 1);
  CHECK(h_norm(poly_eval(df.terms.at(1), 0.0) + c) < 1e-15);  // (P' - P) = -c

  // t e^{0 t} differentiates to 1
  ExpPolyField g{3, 10, {}};
  PolyField tp{3, 10, {SpectralField::zero(3, 10), c}};
  ep_insert(g, 0, tp);
  auto dg = ep_derivative(g);
  CHECK(h_norm(ep_eval(dg, 1.9) - c) < 1e-15);

  // finite differences on a generic sum
  ExpPolyField h{3, 10, {}};
  ep_insert(h, 1, random_poly(3, 910, 0.5));
  ep_insert(h, 4, random_poly(2, 920, 0.5));
  for (double t : {0.2, 1.0, 3.0}) {
    double step = 1e-6;
    auto fd = scale(ep_eval(h, t + step) - ep_eval(h, t - step), 1.0 / (2.0 * step));
    CHECK(h_norm(fd - ep_eval(ep_derivative(h), t)) < 1e-8);
  }
}

TEST_CASE("level solver: constant data at the bottom level") {
  auto xi1 = scale(shell_project(random_field(3, 10, 11, 1.0), 1), 0.05);
  auto q1 = solve_level(1, xi1, poly_zero(3, 10));
  CHECK(q1.degree() == 0);
  CHECK(h_norm(q1.c[0] - xi1) == 0.0);
}

TEST_CASE("level solver: constant quadratic forcing at level 2") {
  auto xi1 = scale(shell_project(random_field(3, 10, 21, 1.0), 1), 0.3);
  auto xi2 = scale(shell_project(random_field(3, 10, 22, 1.0), 2), 0.2);
  auto b = bilinear_b(xi1, xi1);
  auto q2 = solve_level(2, xi2, poly_const(b));
  // q2 = xi2 - t R_2 b - (A-2)^{-1} (I - R_2) b
  CHECK(q2.degree() == 1);
  auto c0 = xi2 - resolvent_off_shell(b, 2, 1);
  auto c1 = scale(shell_project(b, 2), -1.0);
  CHECK(h_norm(q2.c[0] - c0) < 1e-15);
  CHECK(h_norm(q2.c[1] - c1) < 1e-15);
}

TEST_CASE("level solver satisfies the level equation identically") {
  for (int j : {1, 2, 5, 7, 9}) {
    auto beta = random_poly(3, 3000 + 10 * j, 0.5);
    SpectralField xi = SpectralField::zero(3, 10);
    const Lattice& lat = Lattice::get(3, 10);
    if (lat.representable(j))
      xi = scale(shell_project(random_field(3, 10, 4000 + j, 1.0), j), 0.4);
    auto q = solve_level(j, xi, beta);
    CHECK(q.degree() <= beta.degree() + 1);

    // residual polynomial q' + (A - j) q + beta
    auto r = poly_add(poly_derivative(q),
                      poly_add(poly_apply(q, [](const SpectralField& f) { return stokes_apply(f); }),
                               poly_add(poly_scale(q, -static_cast<double>(j)), beta)));
    double qs = max_coeff_norm(q) + max_coeff_norm(beta);
    CHECK(max_coeff_norm(r) < 1e-12 * std::max(1.0, qs));

    // initial shell data is met exactly
    CHECK(h_norm(shell_project(poly_eval(q, 0.0), j) - xi) < 1e-13 * std::max(1.0, h_norm(xi)));
  }
}

TEST_CASE("level solver rejects off-shell data") {
  auto xi_off = scale(shell_project(random_field(3, 10, 51, 1.0), 2), 0.1);
  CHECK_THROWS_AS(solve_level(3, xi_off, poly_zero(3, 10)), std::invalid_argument);
  CHECK_THROWS_AS(solve_level(7, xi_off, poly_zero(3, 10)), std::invalid_argument);
  // empty shells admit only zero data, and then the resolvent part survives
  auto q7 = solve_level(7, SpectralField::zero(3, 10), poly_const(random_field(3, 10, 52, 0.3)));
  CHECK(q7.degree() == 0);
}
