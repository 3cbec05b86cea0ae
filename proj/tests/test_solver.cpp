#include <catch2/catch_amalgamated.hpp>

#include "torusnf/initial_data.hpp"
#include "torusnf/solver.hpp"

using namespace torusnf;

namespace {

SpectralField heat_flow(const SpectralField& u, double t) {
  std::vector<Mode> out;
  for (const Mode& md : u.modes()) {
    Mode m2 = md;
    double f = std::exp(-t * norm2(md.k));
    for (int c = 0; c < 3; ++c) m2.a[c] *= f;
    out.push_back(m2);
  }
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

}  // namespace

TEST_CASE("integrator reproduces the exact linear flow on nonlinearity-free data") {
  // translation-invariant family: the advective term cancels identically, so
  // each mode must decay by its own heat factor
  auto u0 = invariant_family(3, 10, {1, -1, 0}, {cplx(0.3, 0.1), cplx(-0.2, 0.05)});
  auto traj = evolve(u0, 1e-2, 1.0, 20);
  REQUIRE(traj.states.size() == 6);
  REQUIRE(traj.times.back() == Catch::Approx(1.0));

  auto expect = heat_flow(u0, 1.0);
  CHECK(h_norm(traj.states.back() - expect) < 1e-12);

  // intermediate snapshot too
  auto expect_mid = heat_flow(u0, 0.6);
  CHECK(h_norm(traj.states[3] - expect_mid) < 1e-12);
}

TEST_CASE("integrator is exact on a curl eigenfield") {
  auto u0 = beltrami(3, 10, 5, -1, 0.7);
  auto traj = evolve(u0, 5e-3, 1.0, 200);
  auto expect = heat_flow(u0, 1.0);  // every mode sits on shell 5
  CHECK(h_norm(traj.states.back() - expect) < 1e-12);
}

TEST_CASE("step halving gains a factor of sixteen") {
  auto u0 = random_field(3, 6, 11, 0.8);
  const double T = 0.4;
  auto t1 = evolve(u0, 4e-3, T, 100);
  auto t2 = evolve(u0, 2e-3, T, 200);
  auto t3 = evolve(u0, 1e-3, T, 400);
  double r1 = h_norm(t1.states.back() - t2.states.back());
  double r2 = h_norm(t2.states.back() - t3.states.back());
  REQUIRE(r2 > 0.0);
  double ratio = r1 / r2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("energy and helicity balances hold on the integration grid") {
  auto u0 = random_field(3, 10, 7, 0.6);
  auto traj = evolve(u0, 1e-3, 2.0, 100);

  auto rep = energy_checks(traj);
  CHECK(rep.max_balance_residual < 1e-8);
  CHECK(rep.max_decay_drift < 1e-12);  // |u|^2 e^{2t} can only go down
  CHECK(helicity_balance_residual(traj) < 1e-8);

  // raw energy is strictly decreasing for nontrivial data
  for (size_t i = 0; i + 1 < traj.fine.size(); ++i)
    CHECK(traj.fine[i + 1].e2 < traj.fine[i].e2);
}

TEST_CASE("directional flows stay directional") {
  Wave a{1, 1, 0};
  auto u0 = directional_field(3, 10, a, {}, 3, 0.5);
  auto traj = evolve(u0, 2e-3, 1.0, 100);
  const double ua = 1.0 / std::sqrt(2.0);
  for (const auto& snap : traj.states) {
    for (const Mode& md : snap.modes()) {
      long ka = (long)md.k[0] * a[0] + (long)md.k[1] * a[1] + (long)md.k[2] * a[2];
      double amp = std::sqrt(std::norm(md.a[0]) + std::norm(md.a[1]) + std::norm(md.a[2]));
      if (ka != 0) {
        CHECK(amp == 0.0);  // nothing ever leaks off the invariant set
        continue;
      }
      // amplitude stays collinear with the fixed direction
      cplx along = md.a[0] * ua + md.a[1] * ua;
      Cvec residual{md.a[0] - along * ua, md.a[1] - along * ua, md.a[2]};
      double res = std::sqrt(std::norm(residual[0]) + std::norm(residual[1]) + std::norm(residual[2]));
      CHECK(res <= 1e-15 * std::max(1.0, amp));
    }
  }
}

TEST_CASE("two-dimensional runs keep zero helicity and a monotone quotient") {
  auto u0 = random_field(2, 8, 5, 0.7);
  auto traj = evolve(u0, 1e-3, 1.5, 150);
  for (const auto& s : traj.fine) {
    CHECK(std::abs(s.hel) <= 1e-14 * s.e2);
    CHECK(s.e2 > 0.0);
  }
  for (size_t i = 0; i + 1 < traj.fine.size(); ++i) {
    double l0 = traj.fine[i].f2 / traj.fine[i].e2;
    double l1 = traj.fine[i + 1].f2 / traj.fine[i + 1].e2;
    CHECK(l1 <= l0 * (1.0 + 1e-10));
  }
}

TEST_CASE("evolve rejects malformed requests and diverging states") {
  auto u0 = random_field(3, 6, 1, 0.5);
  CHECK_THROWS_AS(evolve(u0, -1e-3, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(evolve(u0, 1e-3, 1.0005, 10), std::invalid_argument);
  CHECK_THROWS_AS(evolve(u0, 1e-3, 1.0, 7), std::invalid_argument);  // 1000 % 7 != 0
  CHECK_THROWS_AS(evolve(scale(u0, 1e40), 1e-2, 0.1, 10), std::runtime_error);
}

TEST_CASE("scalar series matches field functionals at snapshots") {
  auto u0 = random_field(3, 10, 19, 0.4);
  auto traj = evolve(u0, 2e-3, 0.5, 50);
  REQUIRE(traj.fine.size() == 251);
  for (size_t s = 0; s < traj.states.size(); ++s) {
    const auto& fs = traj.fine[s * traj.stride];
    const auto& u = traj.states[s];
    CHECK(fs.t == Catch::Approx(traj.times[s]));
    CHECK(fs.e2 == Catch::Approx(h_norm(u) * h_norm(u)).margin(1e-14));
    CHECK(fs.f2 == Catch::Approx(v_norm(u) * v_norm(u)).margin(1e-13));
    CHECK(fs.hel == Catch::Approx(helicity(u)).margin(1e-13));
  }
}
