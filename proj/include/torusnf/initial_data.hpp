#pragma once
// Initial-data constructors: seeded random divergence-free fields, curl
// eigenfields (Beltrami flows), the translation-invariant family
// u = (phi(k.x), ..., phi(k.x)) with k1+...+kn = 0, and directional fields
// uhat(k) = c_k a with k.a = 0.  The last two make the advective term vanish
// identically, so they evolve by the heat semigroup.

#include <cstdint>
#include <random>

#include "torusnf/field.hpp"

namespace torusnf {

// uniform in (0,1), then Box-Muller; fully determined by the mt19937_64 stream
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_ = false;
};

// i.i.d. complex Gaussian amplitudes, Leray-projected, rescaled to |u| = amplitude
inline SpectralField random_field(int dim, int lambda_max, std::uint64_t seed, double amplitude) {
  const Lattice& lat = Lattice::get(dim, lambda_max);
  GaussianSource g(seed);
  std::vector<Mode> raw(lat.size());
  for (int i = 0; i < lat.size(); ++i) {
    raw[i].k = lat.modes[i];
    for (int c = 0; c < dim; ++c) raw[i].a[c] = cplx(g(), g());
  }
  SpectralField u = leray_project(dim, lambda_max, std::move(raw));
  double h = h_norm(u);
  if (h == 0.0) throw std::runtime_error("random_field: degenerate draw");
  return scale(u, amplitude / h);
}

// eigenfield of curl on one shell: every mode carries the h_{sign} polarization
//   h+ = (e1 + i e2)/sqrt(2),  h- = (e1 - i e2)/sqrt(2),  curl u = sign sqrt(m) u
inline SpectralField beltrami(int dim, int lambda_max, int shell, int sign, double amplitude) {
  if (dim != 3) throw std::invalid_argument("beltrami: curl eigenfields need dim 3");
  if (sign != 1 && sign != -1) throw std::invalid_argument("beltrami: sign must be +-1");
  const Lattice& lat = Lattice::get(dim, lambda_max);
  auto it = lat.by_shell.find(shell);
  if (it == lat.by_shell.end()) throw std::invalid_argument("beltrami: empty shell");
  std::vector<Mode> modes;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i : it->second) {
    auto [e1, e2] = perp_frame(lat.modes[i]);
    Mode md{lat.modes[i], {}};
    for (int c = 0; c < 3; ++c) md.a[c] = cplx(r * e1[c], sign * r * e2[c]);
    modes.push_back(md);
  }
  SpectralField u = SpectralField::make(dim, lambda_max, std::move(modes));
  return scale(u, amplitude / h_norm(u));
}

// both curl polarizations on a single wave pair {k, -k}; the nonlinearity
// still vanishes because u x omega at +-2k is parallel to k
inline SpectralField single_pair_mixture(int dim, int lambda_max, const Wave& k,
                                         cplx c_plus, cplx c_minus) {
  if (dim != 3) throw std::invalid_argument("single_pair_mixture: dim 3 only");
  if (!is_canonical(k)) throw std::invalid_argument("single_pair_mixture: wave not canonical");
  auto [e1, e2] = perp_frame(k);
  const double r = 1.0 / std::sqrt(2.0);
  Mode md{k, {}};
  for (int c = 0; c < 3; ++c) {
    cplx hp(r * e1[c], r * e2[c]);
    cplx hm(r * e1[c], -r * e2[c]);
    md.a[c] = c_plus * hp + c_minus * hm;
  }
  return SpectralField::make(dim, lambda_max, {md});
}

// u = (phi(k.x), ..., phi(k.x)) with sum k_i = 0; profile[j-1] is the complex
// Fourier coefficient of phi at frequency j, carried by the wave j k
inline SpectralField invariant_family(int dim, int lambda_max, const Wave& kvec,
                                      const std::vector<cplx>& profile) {
  long s = kvec[0] + kvec[1] + (dim == 3 ? kvec[2] : 0);
  if (s != 0) throw std::invalid_argument("invariant_family: coordinates of k must sum to 0");
  if (dim == 2 && kvec[2] != 0) throw std::invalid_argument("invariant_family: 2d wave with k3 != 0");
  if (norm2(kvec) == 0) throw std::invalid_argument("invariant_family: zero wave");
  std::vector<Mode> modes;
  for (size_t j = 1; j <= profile.size(); ++j) {
    if (profile[j - 1] == cplx(0.0, 0.0)) continue;
    Wave kj{static_cast<int>(j) * kvec[0], static_cast<int>(j) * kvec[1], static_cast<int>(j) * kvec[2]};
    if (norm2(kj) > lambda_max)
      throw std::invalid_argument("invariant_family: profile frequency outside truncation");
    bool flipped = false;
    Wave kc = canonicalize(kj, flipped);
    cplx c = flipped ? std::conj(profile[j - 1]) : profile[j - 1];
    Mode md{kc, {}};
    for (int c3 = 0; c3 < dim; ++c3) md.a[c3] = c;
    modes.push_back(md);
  }
  return SpectralField::make(dim, lambda_max, std::move(modes));
}

// every amplitude collinear with a fixed lattice direction a, waves k with k.a = 0
inline SpectralField directional_field(int dim, int lambda_max, const Wave& a,
                                       const std::vector<int>& shells, std::uint64_t seed,
                                       double amplitude) {
  if (norm2(a) == 0) throw std::invalid_argument("directional_field: zero direction");
  const Lattice& lat = Lattice::get(dim, lambda_max);
  double an = std::sqrt(static_cast<double>(norm2(a)));
  GaussianSource g(seed);
  std::vector<Mode> modes;
  for (int i = 0; i < lat.size(); ++i) {
    const Wave& k = lat.modes[i];
    if (k[0] * a[0] + k[1] * a[1] + k[2] * a[2] != 0) continue;
    if (!shells.empty() &&
        std::find(shells.begin(), shells.end(), lat.shell_of[i]) == shells.end())
      continue;
    cplx c(g(), g());
    Mode md{k, {}};
    for (int c3 = 0; c3 < 3; ++c3) md.a[c3] = c * (a[c3] / an);
    modes.push_back(md);
  }
  if (modes.empty()) throw std::invalid_argument("directional_field: no admissible modes");
  SpectralField u = SpectralField::make(dim, lambda_max, std::move(modes));
  return scale(u, amplitude / h_norm(u));
}

}  // namespace torusnf
