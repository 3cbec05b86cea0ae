#pragma once
// Truncated advective term B(u, v) = P [(u . grad) v] by exact convolution:
//
//   Bhat(k) = P_k sum_{k' + k'' = k} i (uhat(k') . k'') vhat(k''),
//
// with both factor indices running over the full (mirrored) lattice and the
// output restricted to 1 <= |k|^2 <= lambda_max.  The admissible index pairs
// depend only on (dim, lambda_max), so they are enumerated once and cached.

#include <mutex>

#include "torusnf/field.hpp"

namespace torusnf {

struct InteractionTable {
  int dim = 3;
  int lambda_max = 0;
  int n = 0;  // canonical mode count; full index f >= n means conj mode -modes[f-n]
  struct Entry {
    int32_t ia, ib, iout;
    double kb[3];  // the wave carried by index ib, as doubles
  };
  std::vector<Entry> entries;

  static const InteractionTable& get(int dim, int lambda_max);
};

inline InteractionTable build_interaction_table(int dim, int lambda_max) {
  const Lattice& lat = Lattice::get(dim, lambda_max);
  InteractionTable tab;
  tab.dim = dim;
  tab.lambda_max = lambda_max;
  tab.n = lat.size();
  const int n = tab.n;
  std::vector<Wave> full(2 * n);
  for (int i = 0; i < n; ++i) {
    full[i] = lat.modes[i];
    full[n + i] = negate(lat.modes[i]);
  }
  for (int ia = 0; ia < 2 * n; ++ia)
    for (int ib = 0; ib < 2 * n; ++ib) {
      Wave k{full[ia][0] + full[ib][0], full[ia][1] + full[ib][1], full[ia][2] + full[ib][2]};
      int m = norm2(k);
      if (m < 1 || m > lambda_max || !is_canonical(k)) continue;
      InteractionTable::Entry e;
      e.ia = ia;
      e.ib = ib;
      e.iout = lat.index_of(k);
      for (int c = 0; c < 3; ++c) e.kb[c] = static_cast<double>(full[ib][c]);
      tab.entries.push_back(e);
    }
  return tab;
}

inline const InteractionTable& InteractionTable::get(int dim, int lambda_max) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<InteractionTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, lambda_max);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<InteractionTable>(build_interaction_table(dim, lambda_max))).first;
  return *it->second;
}

// packed kernel: a, b, out are 3n complex amplitude arrays on lat.modes order
inline void bilinear_packed(const InteractionTable& tab, const Lattice& lat,
                            const cplx* a, const cplx* b, cplx* out) {
  const int n = tab.n;
  thread_local std::vector<cplx> af, bf;
  af.resize(6 * n);
  bf.resize(6 * n);
  for (int i = 0; i < 3 * n; ++i) {
    af[i] = a[i];
    bf[i] = b[i];
  }
  for (int i = 0; i < 3 * n; ++i) {
    af[3 * n + i] = std::conj(a[i]);
    bf[3 * n + i] = std::conj(b[i]);
  }
  for (int i = 0; i < 3 * n; ++i) out[i] = cplx(0.0, 0.0);
  for (const auto& e : tab.entries) {
    const cplx* ua = &af[3 * e.ia];
    const cplx* vb = &bf[3 * e.ib];
    cplx dot = ua[0] * e.kb[0] + ua[1] * e.kb[1] + ua[2] * e.kb[2];
    cplx s(-dot.imag(), dot.real());  // i * (uhat(k') . k'')
    cplx* o = &out[3 * e.iout];
    o[0] += s * vb[0];
    o[1] += s * vb[1];
    o[2] += s * vb[2];
  }
  // Leray projection per output mode
  for (int i = 0; i < n; ++i) {
    const Wave& k = lat.modes[i];
    double m = static_cast<double>(lat.shell_of[i]);
    cplx* o = &out[3 * i];
    cplx kd = (static_cast<double>(k[0]) * o[0] + static_cast<double>(k[1]) * o[1] +
               static_cast<double>(k[2]) * o[2]) / m;
    for (int c = 0; c < 3; ++c) o[c] -= static_cast<double>(k[c]) * kd;
  }
}

inline SpectralField bilinear_b(const SpectralField& u, const SpectralField& v) {
  if (u.dim() != v.dim() || u.lambda_max() != v.lambda_max())
    throw std::invalid_argument("bilinear_b: mismatched truncations");
  const Lattice& lat = Lattice::get(u.dim(), u.lambda_max());
  const InteractionTable& tab = InteractionTable::get(u.dim(), u.lambda_max());
  std::vector<cplx> a = pack(u, lat);
  std::vector<cplx> b = pack(v, lat);
  std::vector<cplx> out(3 * lat.size());
  bilinear_packed(tab, lat, a.data(), b.data(), out.data());
  return unpack(lat, out);
}

}  // namespace torusnf
