#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "torusnf/multiindex.hpp"
#include "torusnf/weights.hpp"

using namespace torusnf;

TEST_CASE("standard weight schedule satisfies its recursion") {
  auto w = WeightSchedule::standard(10);
  REQUIRE_NOTHROW(w.validate());
  CHECK(w.levels() == 10);
  CHECK(w.rho(1) == 1.0);
  // rho_2 = kappa_2 gamma_2 = e^{-8} 2^{-4}
  CHECK(w.rho(2) == Catch::Approx(std::exp(-8.0) / 16.0).epsilon(1e-12));
  // rho_3 = kappa_3 gamma_3 rho_2^2
  CHECK(w.log_rho_at(3) ==
        Catch::Approx(-24.0 - 6.0 * std::log(3.0) + 2.0 * w.log_rho_at(2)).epsilon(1e-12));
  // deep levels underflow as doubles but stay finite in log form
  CHECK(w.rho(10) == 0.0);
  CHECK(std::isfinite(w.log_rho_at(10)));
  CHECK(w.log_rho_at(10) < -5e4);
}

TEST_CASE("weight validation rejects corrupted schedules") {
  auto w = WeightSchedule::standard(6);
  w.log_rho[3] += 1e-3;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);

  auto w2 = WeightSchedule::standard(6);
  w2.log_kappa[2] = 0.1;  // kappa > 1
  CHECK_THROWS_AS(w2.validate(), std::invalid_argument);

  auto w3 = WeightSchedule::standard(6);
  w3.log_rho[0] = 0.5;  // rho_1 != 1
  CHECK_THROWS_AS(w3.validate(), std::invalid_argument);

  WeightSchedule w4;
  CHECK_THROWS_AS(w4.validate(), std::invalid_argument);

  auto w5 = WeightSchedule::standard(6);
  w5.log_gamma.pop_back();
  CHECK_THROWS_AS(w5.validate(), std::invalid_argument);
}

TEST_CASE("multi-index enumeration matches hand counts") {
  auto sh3 = representable_shells(3, 10);
  CHECK(sh3 == std::vector<int>{1, 2, 3, 4, 5, 6, 8, 9, 10});

  // degree 1: the single index e_n, when the shell exists
  auto one = multi_indices(sh3, 1, 5);
  REQUIRE(one.size() == 1);
  CHECK(one[0].terms == std::vector<std::pair<int, int>>{{5, 1}});
  CHECK(multi_indices(sh3, 1, 7).empty());  // no shell 7 in three dimensions

  // degree 2, weight 2: only 2 e_1
  auto two = multi_indices(sh3, 2, 2);
  REQUIRE(two.size() == 1);
  CHECK(two[0].exponent(1) == 2);

  // degree 3 weight 6 over shells {1,2,3}: (0,3,0) and (1,1,1)
  auto mix = multi_indices({1, 2, 3}, 3, 6);
  CHECK(mix.size() == 2);

  // every enumerated index has the requested degree and weight
  for (int d = 1; d <= 4; ++d)
    for (int n = d; n <= 12; ++n)
      for (const auto& a : multi_indices(sh3, d, n)) {
        CHECK(a.degree() == d);
        CHECK(a.weight() == n);
      }

  // exhaustive cross-count against a brute-force composition scan
  auto brute = [&](int d, int n) {
    int count = 0;
    // compositions over shells {1,2,3,4,5,6,8,9,10} as nested loops via odometer
    std::vector<int> e(sh3.size(), 0);
    std::function<void(size_t, int, int)> rec = [&](size_t i, int dl, int wl) {
      if (dl == 0) {
        if (wl == 0) ++count;
        return;
      }
      if (i == sh3.size()) return;
      for (int a = 0; a * sh3[i] <= wl && a <= dl; ++a) rec(i + 1, dl - a, wl - a * sh3[i]);
    };
    rec(0, d, n);
    return count;
  };
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= 14; ++n)
      CHECK(static_cast<int>(multi_indices(sh3, d, n).size()) == brute(d, n));
}
