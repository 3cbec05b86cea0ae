#pragma once
// Small dense least-squares helpers used by the asymptotic diagnostics and by
// the coefficient recovery: a generic linear solve (normal equations in
// extended precision; the designs here have at most a handful of columns), a
// shared-rate exponential fit  y_q(t) = a_q + c_q e^{-d t} [+ b_q e^{+g t}]
// with the rate found by grid + golden-section search, and a discrete sweep
// for the polynomial degree in  |H(t)| ~ C t^d e^{-2 h t}.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace torusnf {

inline std::vector<double> lsq_solve(const std::vector<std::vector<double>>& cols,
                                     const std::vector<double>& y) {
  const size_t p = cols.size();
  if (p == 0) throw std::invalid_argument("lsq_solve: no columns");
  const size_t n = y.size();
  for (const auto& c : cols)
    if (c.size() != n) throw std::invalid_argument("lsq_solve: ragged design");
  if (n < p) throw std::invalid_argument("lsq_solve: underdetermined");

  std::vector<std::vector<long double>> g(p, std::vector<long double>(p + 1, 0.0L));
  for (size_t a = 0; a < p; ++a) {
    for (size_t b = 0; b < p; ++b) {
      long double s = 0.0L;
      for (size_t i = 0; i < n; ++i) s += (long double)cols[a][i] * cols[b][i];
      g[a][b] = s;
    }
    long double s = 0.0L;
    for (size_t i = 0; i < n; ++i) s += (long double)cols[a][i] * y[i];
    g[a][p] = s;
  }
  // Gaussian elimination with partial pivoting
  for (size_t c = 0; c < p; ++c) {
    size_t piv = c;
    for (size_t r = c + 1; r < p; ++r)
      if (std::abs((double)g[r][c]) > std::abs((double)g[piv][c])) piv = r;
    std::swap(g[c], g[piv]);
    if (g[c][c] == 0.0L) throw std::runtime_error("lsq_solve: singular design");
    for (size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      long double f = g[r][c] / g[c][c];
      for (size_t k = c; k <= p; ++k) g[r][k] -= f * g[c][k];
    }
  }
  std::vector<double> coef(p);
  for (size_t c = 0; c < p; ++c) coef[c] = (double)(g[c][p] / g[c][c]);
  return coef;
}

inline double lsq_rms(const std::vector<std::vector<double>>& cols,
                      const std::vector<double>& coef, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    double r = -y[i];
    for (size_t c = 0; c < cols.size(); ++c) r += coef[c] * cols[c][i];
    s += r * r;
  }
  return std::sqrt(s / std::max<size_t>(1, y.size()));
}

struct DecayFit {
  double delta = 0.0;  // shared decay rate
  double rms = 0.0;    // combined over all series
  std::vector<double> offset;  // a_q
  std::vector<double> amp;     // c_q
  std::vector<double> drift;   // b_q, empty when no growth column requested
};

namespace detail {

inline double decay_fit_rms(const std::vector<double>& t,
                            const std::vector<std::vector<double>>& ys,
                            double delta, double growth, bool use_drift,
                            DecayFit* out) {
  const size_t n = t.size();
  std::vector<std::vector<double>> cols;
  cols.push_back(std::vector<double>(n, 1.0));
  cols.push_back(std::vector<double>(n));
  for (size_t i = 0; i < n; ++i) cols[1][i] = std::exp(-delta * t[i]);
  if (use_drift) {
    cols.push_back(std::vector<double>(n));
    for (size_t i = 0; i < n; ++i) cols[2][i] = std::exp(growth * t[i]);
  }
  double total = 0.0;
  if (out) {
    out->offset.clear();
    out->amp.clear();
    out->drift.clear();
  }
  for (const auto& y : ys) {
    auto coef = lsq_solve(cols, y);
    double r = lsq_rms(cols, coef, y);
    total += r * r;
    if (out) {
      out->offset.push_back(coef[0]);
      out->amp.push_back(coef[1]);
      if (use_drift) out->drift.push_back(coef[2]);
    }
  }
  return std::sqrt(total / std::max<size_t>(1, ys.size()));
}

}  // namespace detail

// Fit every series in ys against a + c e^{-delta t} with one shared delta,
// searched over [delta_lo, delta_hi] (log grid, then golden section).  When
// `growth` is finite an extra shared column e^{+growth t} absorbs slowly
// amplified contamination from earlier stages of a peel.
inline DecayFit fit_const_plus_decay(const std::vector<double>& t,
                                     const std::vector<std::vector<double>>& ys,
                                     double delta_lo, double delta_hi,
                                     double growth = std::numeric_limits<double>::quiet_NaN()) {
  if (t.size() < 4) throw std::invalid_argument("fit_const_plus_decay: too few samples");
  if (!(delta_lo > 0.0) || !(delta_hi > delta_lo))
    throw std::invalid_argument("fit_const_plus_decay: bad rate bracket");
  for (const auto& y : ys)
    if (y.size() != t.size()) throw std::invalid_argument("fit_const_plus_decay: ragged data");
  const bool use_drift = std::isfinite(growth);

  auto score = [&](double d) {
    return detail::decay_fit_rms(t, ys, d, growth, use_drift, nullptr);
  };

  const int grid = 64;
  double best_d = delta_lo, best_r = std::numeric_limits<double>::infinity();
  double llo = std::log(delta_lo), lhi = std::log(delta_hi);
  for (int i = 0; i <= grid; ++i) {
    double d = std::exp(llo + (lhi - llo) * i / grid);
    double r = score(d);
    if (r < best_r) {
      best_r = r;
      best_d = d;
    }
  }
  // golden-section refine around the winning grid cell
  double span = (lhi - llo) / grid;
  double a = std::exp(std::log(best_d) - span), b = std::exp(std::log(best_d) + span);
  a = std::max(a, delta_lo);
  b = std::min(b, delta_hi);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = score(x1), f2 = score(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-13 * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = score(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = score(x2);
    }
  }
  DecayFit fit;
  fit.delta = 0.5 * (a + b);
  fit.rms = detail::decay_fit_rms(t, ys, fit.delta, growth, use_drift, &fit);
  return fit;
}

// Degree sweep for |y(t)| ~ C t^d e^{-2 h t}, d in {0, 1, 2}: fit
// log|y| - d log t  against  {1, t}  and promote the degree only while it
// buys an order of magnitude in residual.
struct LogDecayFit {
  int degree = 0;
  double rate = 0.0;   // h in e^{-2 h t}
  double logc = 0.0;
  double rms = 0.0;
};

inline LogDecayFit fit_log_poly_decay(const std::vector<double>& t,
                                      const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 4)
    throw std::invalid_argument("fit_log_poly_decay: bad input");
  std::vector<double> logt(t.size()), logy(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(std::abs(y[i]) > 0.0))
      throw std::invalid_argument("fit_log_poly_decay: needs t > 0 and y != 0");
    logt[i] = std::log(t[i]);
    logy[i] = std::log(std::abs(y[i]));
  }
  std::vector<std::vector<double>> cols{std::vector<double>(t.size(), 1.0), t};
  LogDecayFit best;
  bool have = false;
  for (int d = 0; d <= 2; ++d) {
    std::vector<double> rhs(t.size());
    for (size_t i = 0; i < t.size(); ++i) rhs[i] = logy[i] - d * logt[i];
    auto coef = lsq_solve(cols, rhs);
    double rms = lsq_rms(cols, coef, rhs);
    if (!have || rms < 0.1 * best.rms) {
      best.degree = d;
      best.logc = coef[0];
      best.rate = -0.5 * coef[1];
      best.rms = rms;
      have = true;
    }
  }
  return best;
}

}  // namespace torusnf
