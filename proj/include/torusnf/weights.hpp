#pragma once
// Fast-decaying weight schedule for the weighted level-sum norm:
//
//   rho_1 = 1,   rho_n = kappa_n * gamma_n * rho_{n-1}^2   (n >= 2)
//
// with kappa_n = e^{-n 2^n} and gamma_n = n^{-2n}.  The magnitudes drop below
// the smallest positive double within a handful of levels, so the schedule is
// carried in logarithms throughout; rho(n) itself may round to zero, which is
// harmless where it is consumed (as a multiplicative weight on a norm).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusnf {

struct WeightSchedule {
  // index 0 corresponds to level n = 1
  std::vector<double> log_kappa;
  std::vector<double> log_gamma;
  std::vector<double> log_rho;

  int levels() const { return static_cast<int>(log_rho.size()); }

  double log_rho_at(int n) const {
    if (n < 1 || n > levels()) throw std::out_of_range("WeightSchedule: level out of range");
    return log_rho[n - 1];
  }
  double rho(int n) const { return std::exp(log_rho_at(n)); }
  double kappa(int n) const { return std::exp(log_kappa.at(n - 1)); }
  double gamma(int n) const { return std::exp(log_gamma.at(n - 1)); }

  void validate() const {
    const size_t m = log_rho.size();
    if (m == 0) throw std::invalid_argument("WeightSchedule: empty");
    if (log_kappa.size() != m || log_gamma.size() != m)
      throw std::invalid_argument("WeightSchedule: mismatched sequence lengths");
    for (size_t i = 0; i < m; ++i) {
      if (!std::isfinite(log_kappa[i]) || log_kappa[i] > 0.0)
        throw std::invalid_argument("WeightSchedule: kappa_" + std::to_string(i + 1) +
                                    " must lie in (0, 1]");
      if (!std::isfinite(log_gamma[i]) || log_gamma[i] > 0.0)
        throw std::invalid_argument("WeightSchedule: gamma_" + std::to_string(i + 1) +
                                    " must lie in (0, 1]");
      if (!std::isfinite(log_rho[i]))
        throw std::invalid_argument("WeightSchedule: rho_" + std::to_string(i + 1) +
                                    " must be positive");
    }
    if (std::abs(log_rho[0]) > 1e-12)
      throw std::invalid_argument("WeightSchedule: rho_1 must equal 1");
    for (size_t i = 1; i < m; ++i) {
      double expected = log_kappa[i] + log_gamma[i] + 2.0 * log_rho[i - 1];
      if (std::abs(log_rho[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
        throw std::invalid_argument("WeightSchedule: rho_" + std::to_string(i + 1) +
                                    " violates the recursion");
    }
  }

  static WeightSchedule standard(int n_max) {
    if (n_max < 1) throw std::invalid_argument("WeightSchedule: need at least one level");
    WeightSchedule w;
    w.log_kappa.resize(n_max);
    w.log_gamma.resize(n_max);
    w.log_rho.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
      w.log_kappa[n - 1] = -double(n) * std::ldexp(1.0, n);  // log e^{-n 2^n}
      w.log_gamma[n - 1] = -2.0 * n * std::log(double(n));
      w.log_rho[n - 1] = (n == 1) ? 0.0
                                  : w.log_kappa[n - 1] + w.log_gamma[n - 1] + 2.0 * w.log_rho[n - 2];
    }
    return w;
  }
};

}  // namespace torusnf
