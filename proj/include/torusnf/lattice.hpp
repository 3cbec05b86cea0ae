#pragma once
// Wave-vector lattice of the 2*pi-periodic torus.
//
// Real fields are stored on half the lattice only: of each pair {k, -k} we
// keep the representative whose first nonzero coordinate is positive, and the
// amplitude at -k is implied by conjugation.  The Stokes eigenvalue of a mode
// is |k|^2, so the spectrum is the set of integers representable as a sum of
// dim squares (with viscosity 1 and period 2*pi the lowest eigenvalue is 1).

#include <array>
#include <complex>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace torusnf {

using Wave = std::array<int, 3>;  // 2d waves keep k[2] == 0
using cplx = std::complex<double>;
using Cvec = std::array<cplx, 3>;
using Rvec = std::array<double, 3>;

inline int norm2(const Wave& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

inline Wave negate(const Wave& k) { return {-k[0], -k[1], -k[2]}; }

// Canonical representative of {k, -k}: first nonzero coordinate positive.
// The zero wave has no representative (fields are mean-free).
inline bool is_canonical(const Wave& k) {
  for (int c : k) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return false;
}

inline Wave canonicalize(const Wave& k, bool& flipped) {
  flipped = !is_canonical(k) && norm2(k) > 0;
  return flipped ? negate(k) : k;
}

// All canonical modes with 1 <= |k|^2 <= lambda_max, lexicographically sorted,
// plus the shell decomposition.  Instances are cached per (dim, lambda_max).
struct Lattice {
  int dim = 3;
  int lambda_max = 0;
  std::vector<Wave> modes;              // canonical, sorted
  std::vector<int> shell_of;            // |k|^2 per mode
  std::vector<int> shells;              // distinct representable shells, ascending
  std::map<int, std::vector<int>> by_shell;

  int size() const { return static_cast<int>(modes.size()); }

  int index_of(const Wave& k) const {
    auto it = std::lower_bound(modes.begin(), modes.end(), k);
    if (it == modes.end() || *it != k) return -1;
    return static_cast<int>(it - modes.begin());
  }

  bool representable(int m) const {
    return std::binary_search(shells.begin(), shells.end(), m);
  }

  // nearest representable shell to a real value (ties resolved downward)
  int nearest_shell(double x) const {
    int best = shells.front();
    double d = std::abs(x - best);
    for (int m : shells) {
      double dm = std::abs(x - m);
      if (dm < d) { d = dm; best = m; }
    }
    return best;
  }

  static const Lattice& get(int dim, int lambda_max);
};

inline Lattice build_lattice(int dim, int lambda_max) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("lattice: dim must be 2 or 3");
  if (lambda_max < 1) throw std::invalid_argument("lattice: lambda_max must be >= 1");
  Lattice lat;
  lat.dim = dim;
  lat.lambda_max = lambda_max;
  const int kmax = static_cast<int>(std::floor(std::sqrt(static_cast<double>(lambda_max))));
  const int zmax = (dim == 3) ? kmax : 0;
  for (int k0 = -kmax; k0 <= kmax; ++k0)
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = -zmax; k2 <= zmax; ++k2) {
        Wave k{k0, k1, k2};
        int m = norm2(k);
        if (m < 1 || m > lambda_max || !is_canonical(k)) continue;
        lat.modes.push_back(k);
      }
  std::sort(lat.modes.begin(), lat.modes.end());
  lat.shell_of.reserve(lat.modes.size());
  for (const Wave& k : lat.modes) {
    int m = norm2(k);
    lat.shell_of.push_back(m);
    lat.by_shell[m].push_back(static_cast<int>(lat.shell_of.size()) - 1);
  }
  for (const auto& [m, idx] : lat.by_shell) lat.shells.push_back(m);
  return lat;
}

inline const Lattice& Lattice::get(int dim, int lambda_max) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Lattice>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, lambda_max);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Lattice>(build_lattice(dim, lambda_max))).first;
  return *it->second;
}

// Validated eigenvalue index: construction requires m in the spectrum of the
// truncation.  Non-representable integers have an empty shell; code that only
// needs the projection R_m accepts a plain int and returns zero there.
struct ShellIndex {
  int value;
  ShellIndex(const Lattice& lat, int m) : value(m) {
    if (!lat.representable(m))
      throw std::invalid_argument("ShellIndex: " + std::to_string(m) +
                                  " is not a Stokes eigenvalue of this truncation");
  }
};

// Deterministic orthonormal real frame (e1, e2) of the plane k-perp in 3d,
// right-handed: e1 x e2 = k/|k|.  Divergence-free amplitudes at k live in the
// complex span of the frame.
inline std::pair<Rvec, Rvec> perp_frame(const Wave& k) {
  double kn = std::sqrt(static_cast<double>(norm2(k)));
  Rvec kh{k[0] / kn, k[1] / kn, k[2] / kn};
  // axis least aligned with k, lowest index on ties
  int ax = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(k[c]) < std::abs(k[ax])) ax = c;
  Rvec t{0, 0, 0};
  t[ax] = 1.0;
  // e1 = normalize(t x kh), e2 = kh x e1
  Rvec e1{t[1] * kh[2] - t[2] * kh[1], t[2] * kh[0] - t[0] * kh[2], t[0] * kh[1] - t[1] * kh[0]};
  double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& c : e1) c /= n1;
  Rvec e2{kh[1] * e1[2] - kh[2] * e1[1], kh[2] * e1[0] - kh[0] * e1[2], kh[0] * e1[1] - kh[1] * e1[0]};
  return {e1, e2};
}

// 2d counterpart: the fiber is one-dimensional, spanned by rot(k)/|k|.
inline Rvec perp_frame_2d(const Wave& k) {
  double kn = std::sqrt(static_cast<double>(norm2(k)));
  return {-k[1] / kn, k[0] / kn, 0.0};
}

}  // namespace torusnf
