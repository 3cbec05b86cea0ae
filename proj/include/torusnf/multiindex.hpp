#pragma once
// Sparse multi-indices over the eigenvalue shells: a finite exponent pattern
// alpha = (alpha_k) with degree |alpha| = sum alpha_k and weight
// ||alpha|| = sum k alpha_k.  The enumeration of all patterns with a given
// degree and weight over the representable shells is a bounded knapsack walk.

#include <vector>

#include "torusnf/lattice.hpp"

namespace torusnf {

struct MultiIndex {
  std::vector<std::pair<int, int>> terms;  // (shell, exponent > 0), shells ascending

  int degree() const {
    int d = 0;
    for (auto& t : terms) d += t.second;
    return d;
  }
  int weight() const {
    int w = 0;
    for (auto& t : terms) w += t.first * t.second;
    return w;
  }
  int exponent(int shell) const {
    for (auto& t : terms)
      if (t.first == shell) return t.second;
    return 0;
  }
};

// shells m <= up_to that occur as |k|^2 on the integer lattice of the given
// dimension
inline std::vector<int> representable_shells(int dim, int up_to) {
  if (up_to < 1) return {};
  const Lattice& lat = Lattice::get(dim, up_to);
  return lat.shells;
}

namespace detail {

inline void mi_walk(const std::vector<int>& shells, size_t i, int deg_left, int wt_left,
                    MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (deg_left == 0) {
    if (wt_left == 0) out.push_back(cur);
    return;
  }
  if (i == shells.size()) return;
  const int k = shells[i];
  // remaining shells are >= k (ascending), so the weight still to place is
  // bracketed by deg_left * k from below and deg_left * shells.back() above
  if (wt_left < deg_left * k) return;
  if (wt_left > deg_left * shells.back()) return;
  int amax = std::min(deg_left, wt_left / k);
  for (int a = 0; a <= amax; ++a) {
    if (a > 0) cur.terms.emplace_back(k, a);
    mi_walk(shells, i + 1, deg_left - a, wt_left - a * k, cur, out);
    if (a > 0) cur.terms.pop_back();
  }
}

}  // namespace detail

// all multi-indices with |alpha| = d and ||alpha|| = n over the given shells
inline std::vector<MultiIndex> multi_indices(const std::vector<int>& shells, int d, int n) {
  std::vector<MultiIndex> out;
  if (d < 0 || n < 0 || shells.empty()) return out;
  MultiIndex cur;
  detail::mi_walk(shells, 0, d, n, cur, out);
  return out;
}

}  // namespace torusnf
