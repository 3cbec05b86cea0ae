#include <catch2/catch_amalgamated.hpp>

#include "torusnf/asymptotics.hpp"
#include "torusnf/initial_data.hpp"
#include "torusnf/normal_form.hpp"

using namespace torusnf;

namespace {

Trajectory run(const SpectralField& u0, double T, double dt = 1e-2, int stride = 10) {
  return evolve(u0, dt, T, stride);
}

NormalState state_on_shells(int dim, int lmax, std::uint64_t seed, double amp,
                            std::initializer_list<int> keep) {
  NormalState full = decompose(random_field(dim, lmax, seed, amp));
  NormalState out = NormalState::zero(dim, lmax);
  for (int m : keep)
    if (const SpectralField* c = full.find(m)) out.set(m, *c);
  return out;
}

}  // namespace

TEST_CASE("dirichlet quotient on a curl eigenfield sits at the eigenvalue") {
  auto traj = run(beltrami(3, 10, 1, 1, 0.3), 6.0);
  auto q = dirichlet_limit(traj);
  REQUIRE(q.matched_shell == 1);
  REQUIRE(std::abs(q.limit_hat - 1.0) < 1e-6);
  REQUIRE(q.monotone_tail);
  for (double l : q.lambda) REQUIRE(std::abs(l - 1.0) < 1e-10);
}

TEST_CASE("dirichlet quotient settles on the lowest occupied shell") {
  auto u0 = directional_field(3, 10, {1, 1, 0}, {2, 4}, 5, 0.4);
  auto traj = run(u0, 6.0);
  auto q = dirichlet_limit(traj);
  REQUIRE(q.matched_shell == 2);
  REQUIRE(std::abs(q.limit_hat - 2.0) < 1e-6);
  REQUIRE(q.monotone_tail);
}

TEST_CASE("generic data relaxes to the ground shell") {
  auto traj = run(random_field(3, 10, 77, 0.1), 10.0);
  auto q = dirichlet_limit(traj);
  REQUIRE(q.matched_shell == 1);
  REQUIRE(std::abs(q.limit_hat - 1.0) < 1e-4);
  // the quotient never dips below the bottom of the spectrum
  for (const auto& s : traj.fine) {
    REQUIRE(s.e2 > 0.0);
    REQUIRE(s.f2 / s.e2 >= 1.0 - 1e-12);
  }
}

TEST_CASE("2d quotient is monotone and lands on the ground shell") {
  auto traj = run(random_field(2, 8, 12, 0.2), 8.0);
  auto q = dirichlet_limit(traj);
  REQUIRE(q.matched_shell == 1);
  REQUIRE(q.monotone_tail);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.fine) {
    double l = s.f2 / s.e2;
    REQUIRE(l <= prev * (1.0 + 1e-10));
    prev = l;
  }
}

TEST_CASE("dirichlet quotient rejects decayed and short windows") {
  Trajectory traj;
  traj.dim = 3;
  traj.lambda_max = 10;
  for (int i = 0; i <= 20; ++i) {
    ScalarSample s;
    s.t = 0.5 * i;
    s.e2 = 0.0;
    s.f2 = 0.0;
    traj.fine.push_back(s);
    traj.times.push_back(s.t);
  }
  REQUIRE_THROWS_AS(dirichlet_limit(traj), std::runtime_error);

  Trajectory narrow;
  narrow.dim = 3;
  narrow.lambda_max = 10;
  for (int i = 0; i <= 3; ++i) {
    ScalarSample s;
    s.t = 0.1 * i;
    s.e2 = 1.0;
    s.f2 = 1.0;
    narrow.fine.push_back(s);
    narrow.times.push_back(s.t);
  }
  REQUIRE_THROWS_AS(dirichlet_limit(narrow), std::invalid_argument);
}

TEST_CASE("membership: a shell-2 curl eigenfield never touches shell 1") {
  auto traj = run(beltrami(3, 10, 2, 1, 0.2), 8.0);
  auto ev = manifold_membership(traj, 2);
  REQUIRE(ev.member);
  REQUIRE(ev.rates.size() == 1);
  REQUIRE(ev.rates[0].identically_zero);
  REQUIRE(ev.rates[0].amplitude == 0.0);
}

TEST_CASE("membership: generic data is rejected at the first level") {
  auto traj = run(random_field(3, 10, 21, 0.1), 8.0);
  auto ev = manifold_membership(traj, 2);
  REQUIRE_FALSE(ev.member);
  REQUIRE(ev.rates[0].rate > -0.05);  // amplified component tends to a nonzero limit
}

TEST_CASE("membership: single-direction data skips every lower level") {
  auto u0 = invariant_family(3, 10, {1, -2, 1}, {cplx(0.25, 0.1)});
  auto traj = run(u0, 6.0);
  auto ev = manifold_membership(traj, 6);
  REQUIRE(ev.member);
  REQUIRE(ev.rates.size() == 5);
  for (const auto& r : ev.rates) {
    REQUIRE(r.identically_zero);
    REQUIRE(r.amplitude == 0.0);
  }
}

TEST_CASE("membership: decaying but nonzero amplified component") {
  // levels 2 and 3 feed shell 1 only through the expansion tail, so the
  // amplified shell-1 component decays instead of settling on a limit
  auto xi = state_on_shells(3, 10, 9, 0.05, {2, 3});
  ExpansionEngine eng(xi);
  Trajectory traj;
  traj.dim = 3;
  traj.lambda_max = 10;
  for (int i = 5; i <= 40; ++i) {
    double t = 0.1 * i;
    traj.times.push_back(t);
    traj.states.push_back(eng.eval_sum(t, 8));
  }
  auto ev = manifold_membership(traj, 2);
  REQUIRE(ev.member);
  REQUIRE_FALSE(ev.rates[0].identically_zero);
  REQUIRE(ev.rates[0].amplitude > 0.0);
  REQUIRE(ev.rates[0].rate < -1.0);

  REQUIRE_THROWS_AS(manifold_membership(traj, 1), std::invalid_argument);
}

TEST_CASE("phi functional reduces to the projection when the nonlinearity vanishes") {
  auto u0 = invariant_family(3, 10, {1, -2, 1}, {cplx(0.2, 0.0)});
  auto r = phi_functional(u0, 6, 10.0);
  REQUIRE(h_norm(r.value - u0) < 1e-15);
  REQUIRE(r.tail_estimate == 0.0);

  auto b1 = beltrami(3, 10, 1, 1, 0.3);
  auto r1 = phi_functional(b1, 1, 10.0);
  REQUIRE(h_norm(r1.value - b1) < 1e-15);

  // data supported on shell 2 only: the level-1 functional vanishes
  auto b2 = beltrami(3, 10, 2, 1, 0.3);
  auto r2 = phi_functional(b2, 1, 10.0);
  REQUIRE(h_norm(r2.value) < 1e-15);
}

TEST_CASE("phi functional agrees with the fitted first level") {
  auto u0 = random_field(3, 10, 31, 0.05);
  auto traj = run(u0, 12.0, 1e-2, 10);
  auto ex = extract_normalization(traj, 3);
  const SpectralField* xi1 = ex.xi.find(1);
  REQUIRE(xi1 != nullptr);
  auto r = phi_functional(u0, 1, 15.0);
  REQUIRE(r.tail_estimate < 1e-6);
  REQUIRE(h_norm(r.value - *xi1) < 1e-6);
}

TEST_CASE("phi functional recovers the second level on first-level-free data") {
  auto xi = state_on_shells(3, 10, 40, 0.04, {2, 3});
  ExpansionEngine eng(xi);
  auto u0 = eng.eval_sum(0.0, 8);
  auto traj = run(u0, 12.0, 1e-2, 10);
  auto ex = extract_normalization(traj, 3);
  const SpectralField* xi2 = ex.xi.find(2);
  REQUIRE(xi2 != nullptr);
  auto r = phi_functional(u0, 2, 15.0);
  REQUIRE(r.tail_estimate < 1e-6);
  REQUIRE(h_norm(r.value - *xi2) < 1e-6);
}

TEST_CASE("phi functional validates its arguments") {
  auto u0 = random_field(3, 10, 4, 0.1);
  REQUIRE_THROWS_AS(phi_functional(u0, 7, 10.0), std::invalid_argument);   // empty shell
  REQUIRE_THROWS_AS(phi_functional(u0, 11, 10.0), std::invalid_argument);  // outside truncation
  REQUIRE_THROWS_AS(phi_functional(u0, 1, 10.03), std::invalid_argument);  // off the node grid
  REQUIRE_THROWS_AS(phi_functional(u0, 1, 10.0, 3e-3, 0.05), std::invalid_argument);
}

TEST_CASE("helicity report flags mirror-symmetric data as zero") {
  auto u0 = directional_field(3, 10, {1, 1, 0}, {}, 8, 0.4);
  auto traj = run(u0, 4.0);
  auto rep = helicity_report(traj);
  REQUIRE(rep.zero);
  REQUIRE(rep.balance_residual < 1e-10);
  double max_h = 0.0;
  for (double h : rep.hel) max_h = std::max(max_h, std::abs(h));
  REQUIRE(max_h < 1e-13);
}

TEST_CASE("helicity report on a positive curl eigenfield") {
  auto traj = run(beltrami(3, 10, 1, 1, 0.3), 6.0);
  auto rep = helicity_report(traj);
  REQUIRE_FALSE(rep.zero);
  REQUIRE(std::abs(rep.alpha0 - 1.0) < 1e-8);
  REQUIRE(std::abs(rep.h0_ratio - 1.0) < 1e-8);
  REQUIRE(rep.degree == 0);
  REQUIRE(std::abs(rep.h0_log - 1.0) < 1e-6);
  REQUIRE(std::abs(rep.logc - std::log(rep.e2.front())) < 1e-5);
}

TEST_CASE("helicity report resolves a polarization mixture") {
  auto u0 = single_pair_mixture(3, 10, {1, 1, 0}, cplx(0.2, 0.0), cplx(0.1, 0.0));
  auto traj = run(u0, 6.0);
  auto rep = helicity_report(traj);
  const double want = std::sqrt(2.0) * (0.04 - 0.01) / 0.05;
  REQUIRE_FALSE(rep.zero);
  REQUIRE(std::abs(rep.alpha0 - want) < 1e-10);
  REQUIRE(std::abs(rep.h0_ratio - 2.0) < 1e-8);
  REQUIRE(rep.degree == 0);
  REQUIRE(std::abs(rep.h0_log - 2.0) < 1e-6);
}

TEST_CASE("helicity ratio saturates its bound on a negative eigenfield") {
  auto traj = run(beltrami(3, 10, 2, -1, 0.25), 6.0);
  auto rep = helicity_report(traj);
  auto q = dirichlet_limit(traj);
  REQUIRE(q.matched_shell == 2);
  REQUIRE(std::abs(rep.alpha0 + std::sqrt(2.0)) < 1e-8);
  REQUIRE(std::abs(rep.alpha0) <= std::sqrt(double(q.matched_shell)) + 1e-9);
}

TEST_CASE("helicity obeys its pointwise and asymptotic bounds on generic data") {
  auto traj = run(random_field(3, 10, 64, 0.12), 10.0);
  auto rep = helicity_report(traj);
  auto q = dirichlet_limit(traj);
  REQUIRE(rep.balance_residual < 1e-6);
  for (size_t i = 0; i < rep.times.size(); ++i)
    REQUIRE(std::abs(rep.hel[i]) <= std::sqrt(rep.e2[i] * rep.f2[i]) * (1.0 + 1e-12));
  if (!rep.zero) REQUIRE(std::abs(rep.alpha0) <= std::sqrt(double(q.matched_shell)) + 1e-6);
}

TEST_CASE("helicity report rejects a window with too few samples") {
  Trajectory traj;
  traj.dim = 3;
  traj.lambda_max = 10;
  for (int i = 0; i <= 4; ++i) {
    ScalarSample s;
    s.t = 0.1 * i;
    s.e2 = 1.0;
    s.f2 = 1.0;
    s.hel = 0.5;
    s.icr = 0.5;
    traj.fine.push_back(s);
    traj.times.push_back(s.t);
  }
  REQUIRE_THROWS_AS(helicity_report(traj), std::invalid_argument);
}
