#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "torusnf/lattice.hpp"

using namespace torusnf;

TEST_CASE("canonical half-space representatives") {
  CHECK(is_canonical({1, 0, 0}));
  CHECK(is_canonical({0, 1, -2}));
  CHECK_FALSE(is_canonical({0, -1, 2}));
  CHECK_FALSE(is_canonical({-1, 2, 0}));
  CHECK_FALSE(is_canonical({0, 0, 0}));
  bool flipped = false;
  CHECK(canonicalize({0, -1, 2}, flipped) == Wave{0, 1, -2});
  CHECK(flipped);
}

TEST_CASE("3d desk lattice shells") {
  const Lattice& lat = Lattice::get(3, 10);
  CHECK(lat.size() == 73);  // half of 146 full-lattice modes

  // full-lattice mode counts per shell are twice the canonical counts
  std::map<int, int> expected{{1, 6}, {2, 12}, {3, 8}, {4, 6}, {5, 24},
                              {6, 24}, {8, 12}, {9, 30}, {10, 24}};
  for (const auto& [m, cnt] : expected) {
    REQUIRE(lat.by_shell.count(m) == 1);
    CHECK(2 * static_cast<int>(lat.by_shell.at(m).size()) == cnt);
  }
  CHECK(lat.by_shell.count(7) == 0);  // 7 = 8*0+7 is not a sum of three squares
  CHECK(lat.shells == std::vector<int>{1, 2, 3, 4, 5, 6, 8, 9, 10});

  for (int i = 0; i < lat.size(); ++i) {
    CHECK(is_canonical(lat.modes[i]));
    CHECK(lat.shell_of[i] == norm2(lat.modes[i]));
    CHECK(lat.index_of(lat.modes[i]) == i);
  }
}

TEST_CASE("2d desk lattice shells") {
  const Lattice& lat = Lattice::get(2, 8);
  CHECK(lat.shells == std::vector<int>{1, 2, 4, 5, 8});
  for (const Wave& k : lat.modes) CHECK(k[2] == 0);
  CHECK(lat.by_shell.at(1).size() == 2);  // (0,1), (1,0)
  CHECK(lat.by_shell.at(2).size() == 2);  // (1,1), (1,-1)
}

TEST_CASE("representable shells match sum-of-squares arithmetic") {
  const Lattice& lat3 = Lattice::get(3, 60);
  for (int m = 1; m <= 60; ++m)
    CHECK(lat3.representable(m) == oracles::representable_three_squares(m));
  const Lattice& lat2 = Lattice::get(2, 60);
  for (int m = 1; m <= 60; ++m)
    CHECK(lat2.representable(m) == oracles::representable_two_squares(m));
}

TEST_CASE("ShellIndex validates membership in the spectrum") {
  const Lattice& lat = Lattice::get(3, 10);
  CHECK(ShellIndex(lat, 5).value == 5);
  CHECK_THROWS_AS(ShellIndex(lat, 7), std::invalid_argument);
  CHECK_THROWS_AS(ShellIndex(lat, 11), std::invalid_argument);
}

TEST_CASE("perpendicular frames") {
  const Lattice& lat = Lattice::get(3, 10);
  for (const Wave& k : lat.modes) {
    auto [e1, e2] = perp_frame(k);
    double kn = std::sqrt(static_cast<double>(norm2(k)));
    auto dot = [](const Rvec& a, const Rvec& b) {
      return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    CHECK(std::abs(dot(e1, e1) - 1.0) < 1e-14);
    CHECK(std::abs(dot(e2, e2) - 1.0) < 1e-14);
    CHECK(std::abs(dot(e1, e2)) < 1e-14);
    Rvec kd{k[0] / kn, k[1] / kn, k[2] / kn};
    CHECK(std::abs(dot(e1, kd)) < 1e-14);
    CHECK(std::abs(dot(e2, kd)) < 1e-14);
    // right-handed: e1 x e2 = k/|k|
    Rvec cr{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0]};
    for (int c = 0; c < 3; ++c) CHECK(cr[c] == Catch::Approx(kd[c]).margin(1e-14));
  }
  for (const Wave& k : Lattice::get(2, 8).modes) {
    Rvec e = perp_frame_2d(k);
    CHECK(std::abs(e[0] * k[0] + e[1] * k[1]) < 1e-14);
    CHECK(std::abs(e[0] * e[0] + e[1] * e[1] - 1.0) < 1e-14);
  }
}
