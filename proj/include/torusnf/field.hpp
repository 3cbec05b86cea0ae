#pragma once
// Divergence-free truncated Fourier vector fields and the diagonal calculus
// on them: Stokes powers, Leray projection, eigenvalue shells, Sobolev and
// Gevrey norms, curl.
//
// Conventions: a field holds canonical half-space modes only, and
//   <u, v> = Re sum_k uhat(k) . conj(vhat(k)),   |u|^2 = sum_k |uhat(k)|^2,
// so a single stored mode of unit amplitude has unit H-norm.  The V-norm is
// |A^{1/2} u| and the (alpha, sigma) Gevrey norm weights each mode by
// |k|^{4 alpha} e^{2 sigma |k|} inside the sum.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusnf/lattice.hpp"

namespace torusnf {

struct GevreyParams {
  double alpha = 0.0;
  double sigma = 0.0;
};

struct Mode {
  Wave k;
  Cvec a;
};

inline bool mode_less(const Mode& x, const Mode& y) { return x.k < y.k; }

class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField zero(int dim, int lambda_max) {
    SpectralField u;
    u.dim_ = dim;
    u.lambda_max_ = lambda_max;
    return u;
  }

  // all canonical modes of the truncation, zero amplitudes
  static SpectralField full(const Lattice& lat) {
    SpectralField u;
    u.dim_ = lat.dim;
    u.lambda_max_ = lat.lambda_max;
    u.modes_.resize(lat.modes.size());
    for (size_t i = 0; i < lat.modes.size(); ++i) u.modes_[i] = Mode{lat.modes[i], Cvec{}};
    return u;
  }

  static SpectralField make(int dim, int lambda_max, std::vector<Mode> modes) {
    std::sort(modes.begin(), modes.end(), mode_less);
    SpectralField u;
    u.dim_ = dim;
    u.lambda_max_ = lambda_max;
    u.modes_ = std::move(modes);
    u.validate();
    return u;
  }

  // for internal construction sites that preserve the invariants
  static SpectralField unchecked(int dim, int lambda_max, std::vector<Mode> modes) {
    SpectralField u;
    u.dim_ = dim;
    u.lambda_max_ = lambda_max;
    u.modes_ = std::move(modes);
    return u;
  }

  int dim() const { return dim_; }
  int lambda_max() const { return lambda_max_; }
  const std::vector<Mode>& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  const Cvec* find(const Wave& k) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), Mode{k, {}}, mode_less);
    if (it == modes_.end() || it->k != k) return nullptr;
    return &it->a;
  }

  void validate() const {
    if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("field: dim must be 2 or 3");
    if (lambda_max_ < 1) throw std::invalid_argument("field: lambda_max must be >= 1");
    const Wave* prev = nullptr;
    for (const Mode& md : modes_) {
      if (prev && !(*prev < md.k)) throw std::invalid_argument("field: modes not sorted/unique");
      prev = &md.k;
      if (!is_canonical(md.k)) throw std::invalid_argument("field: non-canonical wave stored");
      int m = norm2(md.k);
      if (m < 1 || m > lambda_max_) throw std::invalid_argument("field: wave outside truncation");
      if (dim_ == 2 && md.k[2] != 0) throw std::invalid_argument("field: 2d wave with k3 != 0");
      double amp = 0.0;
      cplx div = 0.0;
      for (int c = 0; c < 3; ++c) {
        if (!std::isfinite(md.a[c].real()) || !std::isfinite(md.a[c].imag()))
          throw std::invalid_argument("field: non-finite amplitude");
        amp += std::norm(md.a[c]);
        div += static_cast<double>(md.k[c]) * md.a[c];
      }
      if (std::abs(div) > 1e-12 * std::max(1.0, std::sqrt(amp) * std::sqrt(static_cast<double>(m))))
        throw std::invalid_argument("field: amplitude not divergence-free");
    }
  }

 private:
  int dim_ = 3;
  int lambda_max_ = 0;
  std::vector<Mode> modes_;
};

// ---- arithmetic (sorted-merge; shared support hits the aligned fast path) --

inline SpectralField lin_comb(double au, const SpectralField& u, double av, const SpectralField& v) {
  if (u.dim() != v.dim() || u.lambda_max() != v.lambda_max())
    throw std::invalid_argument("lin_comb: mismatched truncations");
  std::vector<Mode> out;
  out.reserve(std::max(u.modes().size(), v.modes().size()));
  size_t i = 0, j = 0;
  const auto& mu = u.modes();
  const auto& mv = v.modes();
  while (i < mu.size() || j < mv.size()) {
    if (j >= mv.size() || (i < mu.size() && mu[i].k < mv[j].k)) {
      Mode md = mu[i++];
      for (auto& c : md.a) c *= au;
      out.push_back(md);
    } else if (i >= mu.size() || mv[j].k < mu[i].k) {
      Mode md = mv[j++];
      for (auto& c : md.a) c *= av;
      out.push_back(md);
    } else {
      Mode md{mu[i].k, {}};
      for (int c = 0; c < 3; ++c) md.a[c] = au * mu[i].a[c] + av * mv[j].a[c];
      ++i, ++j;
      out.push_back(md);
    }
  }
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

inline SpectralField operator+(const SpectralField& u, const SpectralField& v) { return lin_comb(1, u, 1, v); }
inline SpectralField operator-(const SpectralField& u, const SpectralField& v) { return lin_comb(1, u, -1, v); }

inline SpectralField scale(const SpectralField& u, double s) {
  std::vector<Mode> out = u.modes();
  for (Mode& md : out)
    for (auto& c : md.a) c *= s;
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

// ---- diagonal operators ----------------------------------------------------

// A^alpha: multiply each mode by |k|^{2 alpha}; alpha = 1 is the Stokes operator
inline SpectralField stokes_apply(const SpectralField& u, double alpha = 1.0) {
  std::vector<Mode> out = u.modes();
  for (Mode& md : out) {
    double f = std::pow(static_cast<double>(norm2(md.k)), alpha);
    for (auto& c : md.a) c *= f;
  }
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

// resolvent powers (A - j)^{-p} away from the shell |k|^2 = j (shell dropped)
inline SpectralField resolvent_off_shell(const SpectralField& u, int j, int p) {
  std::vector<Mode> out;
  out.reserve(u.modes().size());
  for (const Mode& md : u.modes()) {
    int m = norm2(md.k);
    if (m == j) continue;
    Mode r = md;
    double f = std::pow(1.0 / (m - j), p);
    for (auto& c : r.a) c *= f;
    out.push_back(r);
  }
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

inline SpectralField shell_project(const SpectralField& u, int m) {
  std::vector<Mode> out;
  for (const Mode& md : u.modes())
    if (norm2(md.k) == m) out.push_back(md);
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

inline SpectralField shell_complement(const SpectralField& u, int m) {
  std::vector<Mode> out;
  for (const Mode& md : u.modes())
    if (norm2(md.k) != m) out.push_back(md);
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

// Leray projection of raw Fourier data: a |-> a - k (k.a)/|k|^2 per mode.
inline SpectralField leray_project(int dim, int lambda_max, std::vector<Mode> raw) {
  std::sort(raw.begin(), raw.end(), mode_less);
  for (Mode& md : raw) {
    if (!is_canonical(md.k)) throw std::invalid_argument("leray_project: non-canonical wave");
    int m = norm2(md.k);
    if (m < 1 || m > lambda_max) throw std::invalid_argument("leray_project: wave outside truncation");
    cplx kd = 0.0;
    for (int c = 0; c < 3; ++c) kd += static_cast<double>(md.k[c]) * md.a[c];
    kd /= static_cast<double>(m);
    for (int c = 0; c < 3; ++c) md.a[c] -= static_cast<double>(md.k[c]) * kd;
  }
  return SpectralField::unchecked(dim, lambda_max, std::move(raw));
}

// curl: a |-> i k x a.  In 2d this covers both directions of the embedding:
// velocity fields land on the vorticity axis (0, 0, w) and vice versa.
inline SpectralField curl(const SpectralField& u) {
  std::vector<Mode> out = u.modes();
  for (Mode& md : out) {
    const Cvec& a = md.a;
    const Wave& k = md.k;
    Cvec kxa{static_cast<double>(k[1]) * a[2] - static_cast<double>(k[2]) * a[1],
             static_cast<double>(k[2]) * a[0] - static_cast<double>(k[0]) * a[2],
             static_cast<double>(k[0]) * a[1] - static_cast<double>(k[1]) * a[0]};
    for (int c = 0; c < 3; ++c) md.a[c] = cplx(0.0, 1.0) * kxa[c];
  }
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

// ---- norms and inner products ----------------------------------------------

inline double norm(const SpectralField& u, GevreyParams p = {}) {
  double s = 0.0;
  for (const Mode& md : u.modes()) {
    double m = static_cast<double>(norm2(md.k));
    double w = 1.0;
    if (p.alpha != 0.0) w *= std::pow(m, 2.0 * p.alpha);
    if (p.sigma != 0.0) w *= std::exp(2.0 * p.sigma * std::sqrt(m));
    double amp = 0.0;
    for (const auto& c : md.a) amp += std::norm(c);
    s += w * amp;
  }
  return std::sqrt(s);
}

inline double h_norm(const SpectralField& u) { return norm(u); }
inline double v_norm(const SpectralField& u) { return norm(u, {0.5, 0.0}); }

inline double inner_h(const SpectralField& u, const SpectralField& v) {
  double s = 0.0;
  size_t i = 0, j = 0;
  const auto& mu = u.modes();
  const auto& mv = v.modes();
  while (i < mu.size() && j < mv.size()) {
    if (mu[i].k < mv[j].k) ++i;
    else if (mv[j].k < mu[i].k) ++j;
    else {
      for (int c = 0; c < 3; ++c)
        s += mu[i].a[c].real() * mv[j].a[c].real() + mu[i].a[c].imag() * mv[j].a[c].imag();
      ++i, ++j;
    }
  }
  return s;
}

inline double energy(const SpectralField& u) { return 0.5 * inner_h(u, u); }
inline double helicity(const SpectralField& u) { return inner_h(u, curl(u)); }

// drop numerically dead modes (exact zeros) to keep sparse data sparse
inline SpectralField trim_zeros(const SpectralField& u) {
  std::vector<Mode> out;
  for (const Mode& md : u.modes()) {
    bool nz = false;
    for (const auto& c : md.a)
      if (c.real() != 0.0 || c.imag() != 0.0) nz = true;
    if (nz) out.push_back(md);
  }
  return SpectralField::unchecked(u.dim(), u.lambda_max(), std::move(out));
}

// ---- packed layout on the full lattice (hot paths) --------------------------

inline std::vector<cplx> pack(const SpectralField& u, const Lattice& lat) {
  std::vector<cplx> x(3 * lat.size(), cplx(0.0, 0.0));
  for (const Mode& md : u.modes()) {
    int i = lat.index_of(md.k);
    if (i < 0) throw std::invalid_argument("pack: mode not in lattice");
    for (int c = 0; c < 3; ++c) x[3 * i + c] = md.a[c];
  }
  return x;
}

inline SpectralField unpack(const Lattice& lat, const std::vector<cplx>& x) {
  std::vector<Mode> out(lat.size());
  for (int i = 0; i < lat.size(); ++i) {
    out[i].k = lat.modes[i];
    for (int c = 0; c < 3; ++c) out[i].a[c] = x[3 * i + c];
  }
  return SpectralField::unchecked(lat.dim, lat.lambda_max, std::move(out));
}

}  // namespace torusnf
