#pragma once
// Time integration of the truncated equation
//
//   du/dt + A u + B(u, u) = 0
//
// by a classical RK4 step applied in the integrating-factor variable
// w = e^{tA} u, so the linear flow is exact and only the advective term is
// integrated numerically.  With E = e^{-(dt/2) A}:
//
//   ua = E (u + dt/2 F(u))                      F(u) = -B(u, u)
//   ub = E u + dt/2 F(ua)
//   uc = E^2 u + dt E F(ub)
//   u' = E^2 u + dt/6 [ E^2 F(u) + 2 E (F(ua) + F(ub)) + F(uc) ]
//
// Scalar diagnostics (|u|^2, ||u||^2, helicity, <curl u, curl curl u>) are
// recorded at every step so balance laws can be checked by quadrature on the
// integration grid itself.

#include <cstdint>

#include "torusnf/bilinear.hpp"

namespace torusnf {

struct ScalarSample {
  double t = 0.0;
  double e2 = 0.0;   // |u|^2
  double f2 = 0.0;   // ||u||^2 = |curl u|^2
  double hel = 0.0;  // <u, curl u>
  double icr = 0.0;  // <curl u, curl curl u>
};

struct Trajectory {
  int dim = 3;
  int lambda_max = 0;
  double dt = 0.0;
  int stride = 1;
  std::vector<double> times;          // snapshot times
  std::vector<SpectralField> states;  // snapshots, same cadence as times
  std::vector<ScalarSample> fine;     // every integration knot, t = 0 included

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

namespace detail {

inline void packed_scalars(const Lattice& lat, const std::vector<cplx>& x, ScalarSample& s) {
  s.e2 = s.f2 = s.hel = s.icr = 0.0;
  for (int i = 0; i < lat.size(); ++i) {
    const Wave& k = lat.modes[i];
    const cplx* a = &x[3 * i];
    Cvec w{cplx(0, 1) * (double(k[1]) * a[2] - double(k[2]) * a[1]),
           cplx(0, 1) * (double(k[2]) * a[0] - double(k[0]) * a[2]),
           cplx(0, 1) * (double(k[0]) * a[1] - double(k[1]) * a[0])};
    Cvec cw{cplx(0, 1) * (double(k[1]) * w[2] - double(k[2]) * w[1]),
            cplx(0, 1) * (double(k[2]) * w[0] - double(k[0]) * w[2]),
            cplx(0, 1) * (double(k[0]) * w[1] - double(k[1]) * w[0])};
    for (int c = 0; c < 3; ++c) {
      s.e2 += std::norm(a[c]);
      s.f2 += std::norm(w[c]);
      s.hel += a[c].real() * w[c].real() + a[c].imag() * w[c].imag();
      s.icr += w[c].real() * cw[c].real() + w[c].imag() * cw[c].imag();
    }
  }
}

}  // namespace detail

class NseStepper {
 public:
  NseStepper(int dim, int lambda_max, double dt)
      : lat_(&Lattice::get(dim, lambda_max)),
        tab_(&InteractionTable::get(dim, lambda_max)),
        dt_(dt) {
    if (dt <= 0.0) throw std::invalid_argument("NseStepper: dt must be positive");
    const int n = lat_->size();
    e_half_.resize(n);
    e_full_.resize(n);
    for (int i = 0; i < n; ++i) {
      double m = static_cast<double>(lat_->shell_of[i]);
      e_half_[i] = std::exp(-0.5 * dt * m);
      e_full_[i] = e_half_[i] * e_half_[i];
    }
  }

  const Lattice& lattice() const { return *lat_; }
  double dt() const { return dt_; }

  void step(std::vector<cplx>& x) const {
    const int n = lat_->size();
    thread_local std::vector<cplx> k1, k2, k3, k4, us;
    k1.resize(3 * n);
    k2.resize(3 * n);
    k3.resize(3 * n);
    k4.resize(3 * n);
    us.resize(3 * n);

    bilinear_packed(*tab_, *lat_, x.data(), x.data(), k1.data());  // k1 = B(u,u) = -F(u)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c)
        us[3 * i + c] = e_half_[i] * (x[3 * i + c] - 0.5 * dt_ * k1[3 * i + c]);
    bilinear_packed(*tab_, *lat_, us.data(), us.data(), k2.data());
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c)
        us[3 * i + c] = e_half_[i] * x[3 * i + c] - 0.5 * dt_ * k2[3 * i + c];
    bilinear_packed(*tab_, *lat_, us.data(), us.data(), k3.data());
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c)
        us[3 * i + c] = e_full_[i] * x[3 * i + c] - dt_ * e_half_[i] * k3[3 * i + c];
    bilinear_packed(*tab_, *lat_, us.data(), us.data(), k4.data());
    for (int i = 0; i < n; ++i) {
      double eh = e_half_[i], ef = e_full_[i];
      for (int c = 0; c < 3; ++c) {
        int p = 3 * i + c;
        x[p] = ef * x[p] -
               (dt_ / 6.0) * (ef * k1[p] + 2.0 * eh * (k2[p] + k3[p]) + k4[p]);
      }
    }
  }

 private:
  const Lattice* lat_;
  const InteractionTable* tab_;
  double dt_;
  std::vector<double> e_half_, e_full_;
};

inline Trajectory evolve(const SpectralField& u0, double dt, double T, int stride = 10) {
  if (dt <= 0.0) throw std::invalid_argument("evolve: dt must be positive");
  if (stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
  const long nsteps = std::llround(T / dt);
  if (nsteps < 1 || std::abs(nsteps * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("evolve: T must be a positive multiple of dt");
  if (nsteps % stride != 0)
    throw std::invalid_argument("evolve: step count must be divisible by the snapshot stride");

  NseStepper st(u0.dim(), u0.lambda_max(), dt);
  const Lattice& lat = st.lattice();
  std::vector<cplx> x = pack(u0, lat);

  Trajectory traj;
  traj.dim = u0.dim();
  traj.lambda_max = u0.lambda_max();
  traj.dt = dt;
  traj.stride = stride;
  traj.fine.reserve(nsteps + 1);

  ScalarSample s;
  detail::packed_scalars(lat, x, s);
  s.t = 0.0;
  traj.fine.push_back(s);
  traj.times.push_back(0.0);
  traj.states.push_back(unpack(lat, x));

  for (long i = 1; i <= nsteps; ++i) {
    st.step(x);
    detail::packed_scalars(lat, x, s);
    s.t = i * dt;
    if (!std::isfinite(s.e2) || s.e2 > 1e60)
      throw std::runtime_error("evolve: state diverged (NaN/overflow) at t = " + std::to_string(i * dt));
    traj.fine.push_back(s);
    if (i % stride == 0) {
      traj.times.push_back(i * dt);
      traj.states.push_back(unpack(lat, x));
    }
  }
  return traj;
}

// Balance diagnostics on the integration grid.  The energy law
// d|u|^2/dt = -2||u||^2 is checked in integrated form over step pairs with
// Simpson quadrature, normalized per unit time; the decay diagnostic monitors
// |u(t)|^2 e^{2t}, which cannot increase since the bottom eigenvalue is 1.
struct EnergyReport {
  double max_balance_residual = 0.0;
  double max_decay_drift = 0.0;  // max relative increase of |u|^2 e^{2t}
};

inline EnergyReport energy_checks(const Trajectory& traj) {
  EnergyReport rep;
  const auto& f = traj.fine;
  for (size_t i = 0; i + 2 < f.size(); ++i) {
    double dE = (f[i + 2].e2 - f[i].e2) / (4.0 * traj.dt);
    double q = (f[i].f2 + 4.0 * f[i + 1].f2 + f[i + 2].f2) / 6.0;
    rep.max_balance_residual = std::max(rep.max_balance_residual, std::abs(dE + q));
  }
  for (size_t i = 0; i + 1 < f.size(); ++i) {
    double m0 = f[i].e2 * std::exp(2.0 * f[i].t);
    double m1 = f[i + 1].e2 * std::exp(2.0 * f[i + 1].t);
    if (m0 > 0.0) rep.max_decay_drift = std::max(rep.max_decay_drift, (m1 - m0) / m0);
  }
  return rep;
}

// helicity law d<u, curl u>/dt = -2 <curl u, curl curl u>, same treatment
inline double helicity_balance_residual(const Trajectory& traj) {
  double worst = 0.0;
  const auto& f = traj.fine;
  for (size_t i = 0; i + 2 < f.size(); ++i) {
    double dH = (f[i + 2].hel - f[i].hel) / (4.0 * traj.dt);
    double q = (f[i].icr + 4.0 * f[i + 1].icr + f[i + 2].icr) / 6.0;
    worst = std::max(worst, std::abs(dH + q));
  }
  return worst;
}

}  // namespace torusnf
