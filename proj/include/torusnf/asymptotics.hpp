#pragma once
// Late-time diagnostics on trajectories: the Dirichlet quotient and the
// eigenvalue it settles on, characterization of the invariant manifolds
// through amplified shell components, the level-set functionals built from a
// forward integral, and helicity asymptotics.

#include "torusnf/bilinear.hpp"
#include "torusnf/fitting.hpp"
#include "torusnf/solver.hpp"

namespace torusnf {

// ---------------------------------------------------------------------------
// Dirichlet quotient lambda(t) = ||u||^2 / |u|^2
// ---------------------------------------------------------------------------

struct QuotientSeries {
  std::vector<double> times;
  std::vector<double> lambda;
  double limit_hat = 0.0;  // fitted limit
  int matched_shell = 0;   // nearest eigenvalue
  double residual = 0.0;   // fit rms
  double delta = 0.0;      // fitted transient rate
  bool monotone_tail = true;
};

inline QuotientSeries dirichlet_limit(const Trajectory& traj, double t1 = -1.0, double t2 = -1.0) {
  const double T = traj.horizon();
  if (t1 < 0.0) t1 = 0.6 * T;
  if (t2 < 0.0) t2 = 0.95 * T;
  QuotientSeries out;
  for (const auto& s : traj.fine) {
    if (s.t < t1 || s.t > t2) continue;
    if (s.e2 < 1e-300) throw std::runtime_error("dirichlet_limit: trajectory decayed below floor");
    out.times.push_back(s.t);
    out.lambda.push_back(s.f2 / s.e2);
  }
  if (out.times.size() < 8) throw std::invalid_argument("dirichlet_limit: window too narrow");

  auto fit = fit_const_plus_decay(out.times, {out.lambda}, 0.2, 30.0);
  out.limit_hat = fit.offset[0];
  out.residual = fit.rms;
  out.delta = fit.delta;

  for (size_t i = 0; i + 1 < out.lambda.size(); ++i)
    if (out.lambda[i + 1] > out.lambda[i] * (1.0 + 1e-9)) out.monotone_tail = false;

  const Lattice& lat = Lattice::get(traj.dim, traj.lambda_max);
  int m = lat.nearest_shell(out.limit_hat);
  if (std::abs(out.limit_hat - m) > std::max(1e-3, 10.0 * out.residual))
    throw std::runtime_error("dirichlet_limit: fitted limit is not near any eigenvalue");
  out.matched_shell = m;
  return out;
}

// ---------------------------------------------------------------------------
// invariant-manifold membership via amplified shell components
// ---------------------------------------------------------------------------

struct ShellRate {
  int shell = 0;
  double rate = 0.0;       // fitted growth rate of log(e^{jt} |R_j u|)
  double amplitude = 0.0;  // max of the amplified component on the window
  bool identically_zero = false;
};

struct MembershipEvidence {
  bool member = true;  // in M_{k-1}
  int up_to = 0;       // shells 1..up_to-1 examined
  std::vector<ShellRate> rates;
};

// decides membership in M_{k-1}: every amplified component e^{jt} R_j u(t),
// j < k, must decay at rate at least delta_min
inline MembershipEvidence manifold_membership(const Trajectory& traj, int k,
                                              double delta_min = 0.1) {
  if (k < 2) throw std::invalid_argument("manifold_membership: need k >= 2");
  const double T = traj.horizon();
  const double t1 = 0.5 * T, t2 = 0.95 * T;
  const Lattice& lat = Lattice::get(traj.dim, traj.lambda_max);

  MembershipEvidence ev;
  ev.up_to = k;
  std::vector<size_t> idx;
  for (size_t s = 0; s < traj.times.size(); ++s)
    if (traj.times[s] >= t1 && traj.times[s] <= t2) idx.push_back(s);
  if (idx.size() < 6) throw std::invalid_argument("manifold_membership: window too narrow");

  for (int j = 1; j < k; ++j) {
    ShellRate r;
    r.shell = j;
    if (!lat.representable(j)) {
      r.identically_zero = true;
      r.rate = -std::numeric_limits<double>::infinity();
      ev.rates.push_back(r);
      continue;
    }
    std::vector<double> ts, lg;
    for (size_t s : idx) {
      double g = std::exp(double(j) * traj.times[s]) *
                 h_norm(shell_project(traj.states[s], j));
      r.amplitude = std::max(r.amplitude, g);
      if (g > 0.0) {
        ts.push_back(traj.times[s]);
        lg.push_back(std::log(g));
      }
    }
    if (r.amplitude < 1e-250) {
      r.identically_zero = true;
      r.rate = -std::numeric_limits<double>::infinity();
    } else {
      auto coef = lsq_solve({std::vector<double>(ts.size(), 1.0), ts}, lg);
      r.rate = coef[1];
      if (r.rate > -delta_min) ev.member = false;
    }
    ev.rates.push_back(r);
  }
  return ev;
}

// ---------------------------------------------------------------------------
// level-set functionals Phi_m(v) = R_m v - int_0^inf e^{mt} R_m B(u(t), u(t)) dt
// ---------------------------------------------------------------------------

struct PhiResult {
  SpectralField value;
  int shell = 0;
  double t_max = 0.0;
  double tail_estimate = 0.0;  // bound on the discarded remainder of the integral
};

inline PhiResult phi_functional(const SpectralField& u0, int shell_m, double t_max = 15.0,
                                double dt = 5e-3, double node_dt = 0.05) {
  const int dim = u0.dim(), lmax = u0.lambda_max();
  const Lattice& lat = Lattice::get(dim, lmax);
  if (shell_m < 1 || shell_m > lmax || !lat.representable(shell_m))
    throw std::invalid_argument("phi_functional: shell is not an eigenvalue of the truncation");
  const long per_node = std::lround(node_dt / dt);
  if (per_node < 1 || std::abs(per_node * dt - node_dt) > 1e-12)
    throw std::invalid_argument("phi_functional: node spacing must be a multiple of dt");
  long nodes = std::lround(t_max / node_dt);
  if (nodes < 4 || std::abs(nodes * node_dt - t_max) > 1e-9)
    throw std::invalid_argument("phi_functional: t_max must be a multiple of the node spacing");
  if (nodes % 2 != 0) ++nodes;  // composite Simpson needs an even interval count

  const InteractionTable& tab = InteractionTable::get(dim, lmax);
  NseStepper st(dim, lmax, dt);
  std::vector<cplx> x = pack(u0, lat);
  std::vector<cplx> b(3 * lat.size());
  const auto& shell_modes = lat.by_shell.at(shell_m);
  const size_t nm = shell_modes.size();

  std::vector<cplx> acc(3 * nm, cplx(0, 0));
  double g_prev = 0.0, g_last = 0.0;
  for (long i = 0; i <= nodes; ++i) {
    const double t = i * node_dt;
    bilinear_packed(tab, lat, x.data(), x.data(), b.data());
    double w = (i == 0 || i == nodes) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w *= node_dt / 3.0;
    const double amp = std::exp(double(shell_m) * t);
    double gnorm2 = 0.0;
    for (size_t q = 0; q < nm; ++q) {
      for (int c = 0; c < 3; ++c) {
        cplx g = amp * b[3 * shell_modes[q] + c];
        acc[3 * q + c] += w * g;
        gnorm2 += std::norm(g);
      }
    }
    g_prev = g_last;
    g_last = std::sqrt(gnorm2);
    if (i < nodes)
      for (long s = 0; s < per_node; ++s) st.step(x);
  }

  // remainder bound from the last observed decay rate of the integrand
  double rate = (g_prev > 0.0 && g_last > 0.0) ? std::log(g_prev / g_last) / node_dt : 1.0;
  double tail = (g_last > 0.0) ? g_last / std::max(rate, 0.05) : 0.0;

  std::vector<Mode> modes(nm);
  for (size_t q = 0; q < nm; ++q) {
    modes[q].k = lat.modes[shell_modes[q]];
    const Cvec* a0 = u0.find(modes[q].k);
    for (int c = 0; c < 3; ++c)
      modes[q].a[c] = (a0 ? (*a0)[c] : cplx(0, 0)) - acc[3 * q + c];
  }
  PhiResult res{trim_zeros(SpectralField::make(dim, lmax, std::move(modes))), shell_m, nodes * node_dt,
                tail};
  return res;
}

// ---------------------------------------------------------------------------
// helicity asymptotics
// ---------------------------------------------------------------------------

struct HelicityReport {
  std::vector<double> times, hel, e2, f2, icr;
  bool zero = false;              // identically-zero helicity per the numeric floor
  double balance_residual = 0.0;  // max | dH/dt / 2 + I | in integrated form
  int degree = -1;                // polynomial degree in |H| ~ C t^d e^{-2 h0 t}
  double h0_log = 0.0;            // rate from the log fit
  double logc = 0.0;
  double log_rms = 0.0;
  double alpha0 = 0.0;  // limit of H / |u|^2
  double alpha0_rms = 0.0;
  double h0_ratio = 0.0;  // limit of I / H
  double h0_ratio_rms = 0.0;
};

inline HelicityReport helicity_report(const Trajectory& traj) {
  HelicityReport rep;
  double max_h = 0.0, max_e = 0.0;
  for (const auto& s : traj.fine) {
    rep.times.push_back(s.t);
    rep.hel.push_back(s.hel);
    rep.e2.push_back(s.e2);
    rep.f2.push_back(s.f2);
    rep.icr.push_back(s.icr);
    max_h = std::max(max_h, std::abs(s.hel));
    max_e = std::max(max_e, s.e2);
  }
  rep.balance_residual = helicity_balance_residual(traj);
  if (max_h < 1e-12 * max_e) {
    rep.zero = true;
    return rep;
  }

  const double T = traj.horizon();
  const double t1 = 0.6 * T, t2 = 0.95 * T;
  std::vector<double> ts, alpha, ratio_t, ratio, habs_t, habs;
  double win_hmax = 0.0;
  for (const auto& s : traj.fine)
    if (s.t >= t1 && s.t <= t2) win_hmax = std::max(win_hmax, std::abs(s.hel));
  for (const auto& s : traj.fine) {
    if (s.t < t1 || s.t > t2) continue;
    ts.push_back(s.t);
    alpha.push_back(s.hel / s.e2);
    if (std::abs(s.hel) > 1e-3 * win_hmax) {
      ratio_t.push_back(s.t);
      ratio.push_back(s.icr / s.hel);
      habs_t.push_back(s.t);
      habs.push_back(s.hel);
    }
  }
  if (ts.size() < 8) throw std::invalid_argument("helicity_report: window too narrow");

  auto fa = fit_const_plus_decay(ts, {alpha}, 0.2, 30.0);
  rep.alpha0 = fa.offset[0];
  rep.alpha0_rms = fa.rms;

  auto fr = fit_const_plus_decay(ratio_t, {ratio}, 0.2, 30.0);
  rep.h0_ratio = fr.offset[0];
  rep.h0_ratio_rms = fr.rms;

  auto fl = fit_log_poly_decay(habs_t, habs);
  rep.degree = fl.degree;
  rep.h0_log = fl.rate;
  rep.logc = fl.logc;
  rep.log_rms = fl.rms;
  return rep;
}

}  // namespace torusnf
