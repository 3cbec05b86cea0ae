#include <catch2/catch_amalgamated.hpp>

#include "torusnf/fitting.hpp"

using namespace torusnf;

TEST_CASE("least squares reproduces an exactly representable polynomial") {
  std::vector<double> t, y;
  for (int i = 0; i <= 20; ++i) {
    double x = 0.1 * i;
    t.push_back(x);
    y.push_back(2.5 - 1.25 * x + 0.75 * x * x);
  }
  std::vector<double> t2(t.size());
  for (size_t i = 0; i < t.size(); ++i) t2[i] = t[i] * t[i];
  std::vector<std::vector<double>> cols{std::vector<double>(t.size(), 1.0), t, t2};
  auto coef = lsq_solve(cols, y);
  CHECK(coef[0] == Catch::Approx(2.5).margin(1e-12));
  CHECK(coef[1] == Catch::Approx(-1.25).margin(1e-12));
  CHECK(coef[2] == Catch::Approx(0.75).margin(1e-12));
  CHECK(lsq_rms(cols, coef, y) < 1e-12);

  CHECK_THROWS_AS(lsq_solve({}, y), std::invalid_argument);
  CHECK_THROWS_AS(lsq_solve({{1.0, 2.0}}, y), std::invalid_argument);
}

TEST_CASE("shared-rate exponential fit recovers clean model parameters") {
  std::vector<double> t;
  for (int i = 0; i <= 60; ++i) t.push_back(0.05 * i);

  std::vector<double> y0(t.size()), y1(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    y0[i] = 0.7 + 0.3 * std::exp(-1.7 * t[i]);
    y1[i] = -0.2 - 0.05 * std::exp(-1.7 * t[i]);
  }
  auto fit = fit_const_plus_decay(t, {y0, y1}, 0.05, 20.0);
  CHECK(fit.delta == Catch::Approx(1.7).epsilon(1e-6));
  CHECK(fit.offset[0] == Catch::Approx(0.7).margin(1e-8));
  CHECK(fit.offset[1] == Catch::Approx(-0.2).margin(1e-8));
  CHECK(fit.amp[0] == Catch::Approx(0.3).margin(1e-7));
  CHECK(fit.amp[1] == Catch::Approx(-0.05).margin(1e-7));
  CHECK(fit.rms < 1e-9);
  CHECK(fit.drift.empty());
}

TEST_CASE("drift column absorbs growing contamination") {
  std::vector<double> t;
  for (int i = 0; i <= 80; ++i) t.push_back(0.04 * i);
  std::vector<double> y(t.size());
  for (size_t i = 0; i < t.size(); ++i)
    y[i] = 0.4 + 0.2 * std::exp(-2.3 * t[i]) + 1e-4 * std::exp(0.8 * t[i]);

  auto plain = fit_const_plus_decay(t, {y}, 0.1, 20.0);
  auto guarded = fit_const_plus_decay(t, {y}, 0.1, 20.0, 0.8);
  CHECK(guarded.rms < 1e-10);
  CHECK(guarded.rms < plain.rms);
  CHECK(guarded.delta == Catch::Approx(2.3).epsilon(1e-5));
  CHECK(guarded.offset[0] == Catch::Approx(0.4).margin(1e-8));
  CHECK(guarded.drift.size() == 1);
  CHECK(guarded.drift[0] == Catch::Approx(1e-4).epsilon(1e-4));
}

TEST_CASE("degree sweep identifies polynomial-times-exponential decay") {
  std::vector<double> t;
  for (int i = 1; i <= 50; ++i) t.push_back(0.1 * i);

  auto make = [&](int d, double h, double c) {
    std::vector<double> y(t.size());
    for (size_t i = 0; i < t.size(); ++i)
      y[i] = c * std::pow(t[i], d) * std::exp(-2.0 * h * t[i]);
    return y;
  };

  auto f0 = fit_log_poly_decay(t, make(0, 1.0, 5.0));
  CHECK(f0.degree == 0);
  CHECK(f0.rate == Catch::Approx(1.0).margin(1e-9));

  auto f2 = fit_log_poly_decay(t, make(2, 1.5, 5.0));
  CHECK(f2.degree == 2);
  CHECK(f2.rate == Catch::Approx(1.5).margin(1e-9));
  CHECK(f2.logc == Catch::Approx(std::log(5.0)).margin(1e-8));

  CHECK_THROWS_AS(fit_log_poly_decay({0.0, 0.1, 0.2, 0.3}, {1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
}
