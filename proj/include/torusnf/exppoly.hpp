#pragma once
// Polynomials in time with field coefficients, and finite sums of terms
// P_m(t) e^{-mt}.  This algebra is closed under the operations the expansion
// machinery needs: bilinear products add decay indices and degrees, time
// differentiation maps P e^{-mt} to (P' - mP) e^{-mt}, and the level equation
//
//   q' + (A - j) q + beta = 0,   R_j q(0) = xi_j,
//
// with polynomial beta has the unique polynomial solution
//
//   q = R_j [ xi_j - int_0^t beta ]
//       + sum_{n>=0} (-1)^{n+1} (A - j)^{-n-1} (I - R_j) beta^{(n)},
//
// the series terminating at n = deg beta.

#include <map>

#include "torusnf/bilinear.hpp"

namespace torusnf {

struct PolyField {
  int dim = 3;
  int lambda_max = 0;
  std::vector<SpectralField> c;  // c[i] is the coefficient of t^i, dense from 0

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool zero() const { return c.empty(); }
};

inline PolyField poly_zero(int dim, int lambda_max) { return {dim, lambda_max, {}}; }

inline PolyField poly_const(SpectralField f) {
  PolyField p{f.dim(), f.lambda_max(), {}};
  p.c.push_back(std::move(f));
  return p;
}

// drop trailing coefficients that are exactly zero
inline void poly_normalize(PolyField& p) {
  while (!p.c.empty()) {
    bool nz = false;
    for (const Mode& md : p.c.back().modes())
      for (const auto& a : md.a)
        if (a.real() != 0.0 || a.imag() != 0.0) nz = true;
    if (nz) break;
    p.c.pop_back();
  }
}

inline PolyField poly_add(const PolyField& p, const PolyField& q) {
  PolyField r{p.dim, p.lambda_max, {}};
  size_t n = std::max(p.c.size(), q.c.size());
  for (size_t i = 0; i < n; ++i) {
    if (i < p.c.size() && i < q.c.size()) r.c.push_back(p.c[i] + q.c[i]);
    else if (i < p.c.size()) r.c.push_back(p.c[i]);
    else r.c.push_back(q.c[i]);
  }
  poly_normalize(r);
  return r;
}

inline PolyField poly_scale(const PolyField& p, double s) {
  PolyField r = p;
  for (auto& f : r.c) f = scale(f, s);
  return r;
}

template <typename Fn>
inline PolyField poly_apply(const PolyField& p, Fn&& fn) {
  PolyField r{p.dim, p.lambda_max, {}};
  for (const auto& f : p.c) r.c.push_back(fn(f));
  poly_normalize(r);
  return r;
}

inline SpectralField poly_eval(const PolyField& p, double t) {
  if (p.zero()) return SpectralField::zero(p.dim, p.lambda_max);
  SpectralField acc = p.c.back();
  for (int i = static_cast<int>(p.c.size()) - 2; i >= 0; --i)
    acc = lin_comb(1.0, p.c[i], t, acc);
  return acc;
}

inline PolyField poly_derivative(const PolyField& p) {
  PolyField r{p.dim, p.lambda_max, {}};
  for (size_t i = 1; i < p.c.size(); ++i) r.c.push_back(scale(p.c[i], static_cast<double>(i)));
  poly_normalize(r);
  return r;
}

// antiderivative vanishing at t = 0
inline PolyField poly_integrate(const PolyField& p) {
  PolyField r{p.dim, p.lambda_max, {}};
  if (p.zero()) return r;
  r.c.push_back(SpectralField::zero(p.dim, p.lambda_max));
  for (size_t i = 0; i < p.c.size(); ++i) r.c.push_back(scale(p.c[i], 1.0 / (i + 1.0)));
  poly_normalize(r);
  return r;
}

// coefficient-wise convolution through B
inline PolyField poly_bilinear(const PolyField& p, const PolyField& q) {
  PolyField r{p.dim, p.lambda_max, {}};
  if (p.zero() || q.zero()) return r;
  r.c.assign(p.c.size() + q.c.size() - 1, SpectralField::zero(p.dim, p.lambda_max));
  for (size_t i = 0; i < p.c.size(); ++i)
    for (size_t j = 0; j < q.c.size(); ++j) r.c[i + j] = r.c[i + j] + bilinear_b(p.c[i], q.c[j]);
  poly_normalize(r);
  return r;
}

// ---- finite exponential-polynomial sums -------------------------------------

struct ExpPolyField {
  int dim = 3;
  int lambda_max = 0;
  std::map<int, PolyField> terms;  // decay index m >= 0 -> P_m
};

inline void ep_insert(ExpPolyField& f, int m, const PolyField& p) {
  if (m < 0) throw std::invalid_argument("ExpPolyField: negative decay index");
  auto it = f.terms.find(m);
  if (it == f.terms.end()) {
    PolyField q = p;
    poly_normalize(q);
    if (!q.zero()) f.terms.emplace(m, std::move(q));
  } else {
    it->second = poly_add(it->second, p);
    if (it->second.zero()) f.terms.erase(it);
  }
}

inline SpectralField ep_eval(const ExpPolyField& f, double t) {
  SpectralField acc = SpectralField::zero(f.dim, f.lambda_max);
  for (const auto& [m, p] : f.terms)
    acc = lin_comb(1.0, acc, std::exp(-static_cast<double>(m) * t), poly_eval(p, t));
  return acc;
}

inline ExpPolyField ep_add(const ExpPolyField& f, const ExpPolyField& g) {
  ExpPolyField r = f;
  for (const auto& [m, p] : g.terms) ep_insert(r, m, p);
  return r;
}

inline ExpPolyField ep_bilinear(const ExpPolyField& f, const ExpPolyField& g) {
  ExpPolyField r{f.dim, f.lambda_max, {}};
  for (const auto& [m, p] : f.terms)
    for (const auto& [mm, q] : g.terms) ep_insert(r, m + mm, poly_bilinear(p, q));
  return r;
}

inline ExpPolyField ep_derivative(const ExpPolyField& f) {
  ExpPolyField r{f.dim, f.lambda_max, {}};
  for (const auto& [m, p] : f.terms) {
    ep_insert(r, m, poly_derivative(p));
    ep_insert(r, m, poly_scale(p, -static_cast<double>(m)));
  }
  return r;
}

// ---- the level equation ------------------------------------------------------

inline PolyField solve_level(int j, const SpectralField& xi_j, const PolyField& beta) {
  const int dim = beta.dim, lambda_max = beta.lambda_max;
  if (xi_j.dim() != dim || xi_j.lambda_max() != lambda_max)
    throw std::invalid_argument("solve_level: mismatched truncations");
  for (const Mode& md : xi_j.modes()) {
    bool dead = true;
    for (const auto& a : md.a)
      if (a != cplx(0.0, 0.0)) dead = false;
    if (!dead && norm2(md.k) != j)
      throw std::invalid_argument("solve_level: xi_j has support off the shell |k|^2 = j");
  }

  // shell part: xi_j - int_0^t R_j beta
  PolyField shell = poly_const(shell_project(xi_j, j));
  shell = poly_add(shell, poly_scale(poly_integrate(poly_apply(beta, [&](const SpectralField& f) {
                             return shell_project(f, j);
                           })),
                           -1.0));

  // off-shell part: terminating resolvent series
  PolyField q = shell;
  PolyField d = beta;
  for (int n = 0; !d.zero(); ++n) {
    double sgn = (n % 2 == 0) ? -1.0 : 1.0;
    q = poly_add(q, poly_scale(poly_apply(d, [&](const SpectralField& f) {
                        return resolvent_off_shell(f, j, n + 1);
                      }),
                      sgn));
    d = poly_derivative(d);
  }
  return q;
}

}  // namespace torusnf
