#pragma once
// Classical polynomial normal forms for finite-dimensional ODE systems
//   dx/dt + diag(lambda) x + sum_d phi^[d](x) = 0
// with a diagonal linear part: degree-by-degree removal of non-resonant
// monomials through near-identity changes of variables, an exact symbolic
// conjugacy check, and the Galerkin system recast in real coordinates so the
// two constructions can be compared term by term.

#include <map>
#include <sstream>
#include <string>

#include "torusnf/bilinear.hpp"

namespace torusnf {

// dense exponent vector over coordinates plus the target coordinate
struct PdMonomial {
  std::vector<int> alpha;
  int k = 0;

  int degree() const {
    int d = 0;
    for (int a : alpha) d += a;
    return d;
  }
  bool operator<(const PdMonomial& o) const {
    if (k != o.k) return k < o.k;
    return alpha < o.alpha;
  }
  bool operator==(const PdMonomial& o) const { return k == o.k && alpha == o.alpha; }
};

struct PolySystem {
  int m = 0;
  std::vector<double> lambda;
  std::map<PdMonomial, double> terms;

  void validate() const {
    if (m < 1) throw std::invalid_argument("PolySystem: empty system");
    if (static_cast<int>(lambda.size()) != m)
      throw std::invalid_argument("PolySystem: eigenvalue count != dimension");
    for (double l : lambda)
      if (!std::isfinite(l)) throw std::invalid_argument("PolySystem: eigenvalue not finite");
    for (const auto& [mon, c] : terms) {
      if (static_cast<int>(mon.alpha.size()) != m)
        throw std::invalid_argument("PolySystem: exponent vector size != dimension");
      if (mon.k < 0 || mon.k >= m) throw std::invalid_argument("PolySystem: coordinate out of range");
      for (int a : mon.alpha)
        if (a < 0) throw std::invalid_argument("PolySystem: negative exponent");
      if (mon.degree() < 2) throw std::invalid_argument("PolySystem: nonlinear terms start at degree 2");
      if (!std::isfinite(c)) throw std::invalid_argument("PolySystem: coefficient not finite");
    }
  }
};

inline double resonance_gap(const std::vector<double>& lambda, const std::vector<int>& alpha,
                            int k) {
  double s = 0.0;
  for (size_t i = 0; i < alpha.size(); ++i) s += alpha[i] * lambda[i];
  return s - lambda[k];
}

inline bool is_resonant(const std::vector<double>& lambda, const std::vector<int>& alpha, int k,
                        double tol_res = 1e-9) {
  if (alpha.size() != lambda.size()) throw std::invalid_argument("is_resonant: size mismatch");
  if (k < 0 || k >= static_cast<int>(lambda.size()))
    throw std::invalid_argument("is_resonant: coordinate out of range");
  return std::abs(resonance_gap(lambda, alpha, k)) < tol_res;
}

namespace detail {

// scalar polynomial: exponent vector -> coefficient
using ScalarPoly = std::map<std::vector<int>, double>;
// vector-valued polynomial, one scalar polynomial per coordinate
using VecPoly = std::vector<ScalarPoly>;

inline int exp_degree(const std::vector<int>& a) {
  int d = 0;
  for (int x : a) d += x;
  return d;
}

inline void sp_add(ScalarPoly& p, const std::vector<int>& a, double c) {
  if (c == 0.0) return;
  auto [it, fresh] = p.emplace(a, c);
  if (!fresh && (it->second += c) == 0.0) p.erase(it);
}

inline ScalarPoly sp_mul_trunc(const ScalarPoly& a, const ScalarPoly& b, int D) {
  ScalarPoly out;
  for (const auto& [ea, ca] : a) {
    int da = exp_degree(ea);
    for (const auto& [eb, cb] : b) {
      if (da + exp_degree(eb) > D) continue;
      std::vector<int> e = ea;
      for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      sp_add(out, e, ca * cb);
    }
  }
  return out;
}

inline VecPoly vp_identity(int m) {
  VecPoly id(m);
  for (int q = 0; q < m; ++q) {
    std::vector<int> e(m, 0);
    e[q] = 1;
    id[q][e] = 1.0;
  }
  return id;
}

// F(G(y)) truncated at degree D; per-coordinate powers of G are cached
inline VecPoly vp_compose(const VecPoly& F, const VecPoly& G, int D) {
  const int m = static_cast<int>(F.size());
  std::vector<std::vector<ScalarPoly>> pw(m);  // pw[i][p] = G_i^p
  for (int i = 0; i < m; ++i) {
    pw[i].resize(1);
    pw[i][0][std::vector<int>(m, 0)] = 1.0;
  }
  auto power = [&](int i, int p) -> const ScalarPoly& {
    while (static_cast<int>(pw[i].size()) <= p)
      pw[i].push_back(sp_mul_trunc(pw[i].back(), G[i], D));
    return pw[i][p];
  };
  VecPoly out(m);
  for (int q = 0; q < m; ++q) {
    for (const auto& [e, c] : F[q]) {
      ScalarPoly prod;
      prod[std::vector<int>(m, 0)] = c;
      for (int i = 0; i < m && !prod.empty(); ++i)
        if (e[i] > 0) prod = sp_mul_trunc(prod, power(i, e[i]), D);
      for (const auto& [ee, cc] : prod) sp_add(out[q], ee, cc);
    }
  }
  return out;
}

// (Dpsi . Z)_q = sum_i dpsi_q/dy_i * Z_i, truncated at degree D
inline VecPoly vp_jacobian_apply(const VecPoly& psi, const VecPoly& Z, int D) {
  const int m = static_cast<int>(psi.size());
  VecPoly out(m);
  for (int q = 0; q < m; ++q) {
    for (const auto& [e, c] : psi[q]) {
      for (int i = 0; i < m; ++i) {
        if (e[i] == 0) continue;
        std::vector<int> de = e;
        --de[i];
        int dd = exp_degree(de);
        for (const auto& [ez, cz] : Z[i]) {
          if (dd + exp_degree(ez) > D) continue;
          std::vector<int> ee = de;
          for (size_t j = 0; j < ee.size(); ++j) ee[j] += ez[j];
          sp_add(out[q], ee, c * e[i] * cz);
        }
      }
    }
  }
  return out;
}

// the full right-hand side dx/dt = -lambda x - phi(x) as a vector polynomial
inline VecPoly vp_rhs(const PolySystem& sys, int D) {
  VecPoly F(sys.m);
  for (int q = 0; q < sys.m; ++q) {
    std::vector<int> e(sys.m, 0);
    e[q] = 1;
    F[q][e] = -sys.lambda[q];
  }
  for (const auto& [mon, c] : sys.terms)
    if (mon.degree() <= D) sp_add(F[mon.k], mon.alpha, -c);
  return F;
}

inline double vp_max_coeff(const VecPoly& F, int degree) {
  double mx = 0.0;
  for (const auto& p : F)
    for (const auto& [e, c] : p)
      if (exp_degree(e) == degree) mx = std::max(mx, std::abs(c));
  return mx;
}

// coefficients of D T(y).(-lambda y - theta(y)) - [-lambda T(y) - phi(T(y))],
// bucketed by degree; zero when T conjugates sys to theta exactly
inline std::vector<double> conjugacy_defect(const PolySystem& sys, const PolySystem& theta,
                                            const VecPoly& T, int D) {
  const int m = sys.m;
  VecPoly nf_rhs = vp_rhs(theta, D);
  VecPoly psi(m);
  for (int q = 0; q < m; ++q)
    for (const auto& [e, c] : T[q])
      if (exp_degree(e) >= 2) psi[q][e] = c;
  VecPoly lhs = nf_rhs;
  {
    VecPoly corr = vp_jacobian_apply(psi, nf_rhs, D);
    for (int q = 0; q < m; ++q)
      for (const auto& [e, c] : corr[q]) sp_add(lhs[q], e, c);
  }
  VecPoly rhs = vp_compose(vp_rhs(sys, D), T, D);

  std::vector<double> defect(D + 1, 0.0);
  for (int q = 0; q < m; ++q) {
    ScalarPoly diff = lhs[q];
    for (const auto& [e, c] : rhs[q]) sp_add(diff, e, -c);
    for (const auto& [e, c] : diff) {
      int d = exp_degree(e);
      if (d <= D) defect[d] = std::max(defect[d], std::abs(c));
    }
  }
  return defect;
}

}  // namespace detail

struct NFResult {
  PolySystem theta;                          // resonant terms only
  std::map<PdMonomial, double> psi;          // x = y + sum psi (composed across stages)
  std::vector<double> residual_by_degree;    // conjugacy defect, index = degree
  std::vector<std::string> warnings;         // near-resonances kept
};

inline NFResult normal_form(const PolySystem& sys, int D, double tol_res = 1e-9,
                            double tol_near = 1e-6) {
  sys.validate();
  if (D < 2) throw std::invalid_argument("normal_form: need degree >= 2");
  if (D > 5 || sys.m > 40)
    throw std::length_error("normal_form: dense enumeration capped at degree 5, dimension 40");

  const int m = sys.m;
  detail::VecPoly phi(m);  // current nonlinearity, rewritten stage by stage
  for (const auto& [mon, c] : sys.terms)
    if (mon.degree() <= D) detail::sp_add(phi[mon.k], mon.alpha, c);

  NFResult res;
  detail::VecPoly T = detail::vp_identity(m);

  for (int d = 2; d <= D; ++d) {
    detail::VecPoly psi_d(m);
    bool any = false;
    double scale_d = 1.0;
    for (int q = 0; q < m; ++q) {
      for (const auto& [e, c] : phi[q]) {
        if (detail::exp_degree(e) != d) continue;
        scale_d = std::max(scale_d, std::abs(c));
        double gap = resonance_gap(sys.lambda, e, q);
        if (std::abs(gap) < tol_res) continue;  // resonant: stays
        if (std::abs(gap) < tol_near) {
          std::ostringstream w;
          w << "near-resonance kept at degree " << d << ", coordinate " << q + 1
            << ": |<alpha,lambda> - lambda_k| = " << std::abs(gap);
          res.warnings.push_back(w.str());
          continue;
        }
        psi_d[q][e] = c / gap;
        any = true;
      }
    }
    if (!any) continue;

    detail::VecPoly G = detail::vp_identity(m);
    for (int q = 0; q < m; ++q)
      for (const auto& [e, c] : psi_d[q]) G[q][e] = c;

    // push the system through x = y + psi_d(y): solve (I + Dpsi) y' = RHS(G(y))
    PolySystem stage{m, sys.lambda, {}};
    for (int q = 0; q < m; ++q)
      for (const auto& [e, c] : phi[q]) stage.terms[{e, q}] = c;
    detail::VecPoly W = detail::vp_compose(detail::vp_rhs(stage, D), G, D);
    detail::VecPoly Z = W;
    for (int rep = 0; rep < D; ++rep) {
      detail::VecPoly corr = detail::vp_jacobian_apply(psi_d, Z, D);
      Z = W;
      for (int q = 0; q < m; ++q)
        for (const auto& [e, c] : corr[q]) detail::sp_add(Z[q], e, -c);
    }

    // y' = Z(y): strip the linear part, clamp the eliminated slots to zero
    const double dust = 1e-9 * scale_d * (1.0 + detail::vp_max_coeff(Z, d));
    detail::VecPoly next(m);
    for (int q = 0; q < m; ++q) {
      for (const auto& [e, c] : Z[q]) {
        int dg = detail::exp_degree(e);
        if (dg <= 1) {
          double want = (dg == 1 && e[q] == 1) ? -sys.lambda[q] : 0.0;
          if (std::abs(c - want) > dust)
            throw std::logic_error("normal_form: pushforward disturbed the linear part");
          continue;
        }
        double coeff = -c;
        if (dg == d) {
          double gap = resonance_gap(sys.lambda, e, q);
          if (std::abs(gap) >= tol_near) {
            if (std::abs(coeff) > dust)
              throw std::logic_error("normal_form: monomial survived its elimination stage");
            continue;
          }
        }
        detail::sp_add(next[q], e, coeff);
      }
    }
    phi = std::move(next);
    T = detail::vp_compose(T, G, D);
  }

  res.theta.m = m;
  res.theta.lambda = sys.lambda;
  for (int q = 0; q < m; ++q)
    for (const auto& [e, c] : phi[q]) res.theta.terms[{e, q}] = c;
  for (int q = 0; q < m; ++q)
    for (const auto& [e, c] : T[q])
      if (detail::exp_degree(e) >= 2) res.psi[{e, q}] = c;
  res.residual_by_degree = detail::conjugacy_defect(sys, res.theta, T, D);
  return res;
}

inline double verify_conjugacy(const PolySystem& sys, const NFResult& nf, int D) {
  sys.validate();
  nf.theta.validate();
  if (nf.theta.m != sys.m) throw std::invalid_argument("verify_conjugacy: dimension mismatch");
  detail::VecPoly T = detail::vp_identity(sys.m);
  for (const auto& [mon, c] : nf.psi) {
    if (static_cast<int>(mon.alpha.size()) != sys.m || mon.k < 0 || mon.k >= sys.m)
      throw std::invalid_argument("verify_conjugacy: malformed transformation term");
    detail::sp_add(T[mon.k], mon.alpha, c);
  }
  auto defect = detail::conjugacy_defect(sys, nf.theta, T, D);
  double mx = 0.0;
  for (double v : defect) mx = std::max(mx, v);
  return mx;
}

// evaluate x = y + psi(y)
inline std::vector<double> apply_transform(const NFResult& nf, const std::vector<double>& y) {
  std::vector<double> x = y;
  for (const auto& [mon, c] : nf.psi) {
    double v = c;
    for (size_t i = 0; i < y.size(); ++i)
      for (int rep = 0; rep < mon.alpha[i]; ++rep) v *= y[i];
    x[mon.k] += v;
  }
  return x;
}

// dense RK4 for dx/dt = -lambda x - phi(x), used by the conjugacy flow checks
inline std::vector<double> integrate_poly(const PolySystem& sys, std::vector<double> x, double dt,
                                          double T) {
  sys.validate();
  if (static_cast<int>(x.size()) != sys.m) throw std::invalid_argument("integrate_poly: bad state size");
  if (dt <= 0.0) throw std::invalid_argument("integrate_poly: dt must be positive");
  const long n = std::llround(T / dt);
  if (n < 1 || std::abs(n * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("integrate_poly: T must be a positive multiple of dt");
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> out(sys.m);
    for (int q = 0; q < sys.m; ++q) out[q] = -sys.lambda[q] * v[q];
    for (const auto& [mon, c] : sys.terms) {
      double t = c;
      for (int i = 0; i < sys.m; ++i)
        for (int rep = 0; rep < mon.alpha[i]; ++rep) t *= v[i];
      out[mon.k] -= t;
    }
    return out;
  };
  std::vector<double> k1, k2, k3, k4, tmp(sys.m);
  for (long s = 0; s < n; ++s) {
    k1 = f(x);
    for (int q = 0; q < sys.m; ++q) tmp[q] = x[q] + 0.5 * dt * k1[q];
    k2 = f(tmp);
    for (int q = 0; q < sys.m; ++q) tmp[q] = x[q] + 0.5 * dt * k2[q];
    k3 = f(tmp);
    for (int q = 0; q < sys.m; ++q) tmp[q] = x[q] + dt * k3[q];
    k4 = f(tmp);
    for (int q = 0; q < sys.m; ++q) x[q] += dt / 6.0 * (k1[q] + 2.0 * (k2[q] + k3[q]) + k4[q]);
  }
  return x;
}

// ---------------------------------------------------------------------------
// the Galerkin system in real coordinates
// ---------------------------------------------------------------------------

// orthonormal real coordinates over the stored half-space modes: per mode the
// real and imaginary components along the divergence-free frame (two complex
// directions in 3d, one in 2d)
struct NseCoordinates {
  int dim = 3;
  int lambda_max = 0;
  std::vector<SpectralField> basis;
  PolySystem sys;

  std::vector<double> coords(const SpectralField& u) const {
    if (u.dim() != dim || u.lambda_max() != lambda_max)
      throw std::invalid_argument("NseCoordinates: truncation mismatch");
    std::vector<double> x(sys.m);
    for (int q = 0; q < sys.m; ++q) x[q] = inner_h(u, basis[q]);
    return x;
  }

  SpectralField field(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != sys.m)
      throw std::invalid_argument("NseCoordinates: bad coordinate size");
    SpectralField acc = SpectralField::make(dim, lambda_max, {});
    for (int q = 0; q < sys.m; ++q)
      if (x[q] != 0.0) acc = acc + scale(basis[q], x[q]);
    return trim_zeros(acc);
  }
};

inline NseCoordinates truncated_nse_as_polysystem(int lambda_max, int dim) {
  const Lattice& lat = Lattice::get(dim, lambda_max);
  NseCoordinates nc;
  nc.dim = dim;
  nc.lambda_max = lambda_max;

  for (int i = 0; i < lat.size(); ++i) {
    const Wave& k = lat.modes[i];
    std::vector<Cvec> dirs;
    if (dim == 3) {
      auto [e1, e2] = perp_frame(k);
      dirs.push_back({cplx(e1[0], 0), cplx(e1[1], 0), cplx(e1[2], 0)});
      dirs.push_back({cplx(0, e1[0]), cplx(0, e1[1]), cplx(0, e1[2])});
      dirs.push_back({cplx(e2[0], 0), cplx(e2[1], 0), cplx(e2[2], 0)});
      dirs.push_back({cplx(0, e2[0]), cplx(0, e2[1]), cplx(0, e2[2])});
    } else {
      Rvec e = perp_frame_2d(k);
      dirs.push_back({cplx(e[0], 0), cplx(e[1], 0), cplx(0, 0)});
      dirs.push_back({cplx(0, e[0]), cplx(0, e[1]), cplx(0, 0)});
    }
    for (const Cvec& a : dirs) {
      nc.basis.push_back(SpectralField::make(dim, lambda_max, {Mode{k, a}}));
      nc.sys.lambda.push_back(static_cast<double>(norm2(k)));
    }
  }
  nc.sys.m = static_cast<int>(nc.basis.size());

  for (int p = 0; p < nc.sys.m; ++p) {
    for (int r = p; r < nc.sys.m; ++r) {
      SpectralField w = bilinear_b(nc.basis[p], nc.basis[r]);
      if (r != p) w = w + bilinear_b(nc.basis[r], nc.basis[p]);
      for (int q = 0; q < nc.sys.m; ++q) {
        double c = inner_h(w, nc.basis[q]);
        if (std::abs(c) < 1e-13) continue;
        std::vector<int> e(nc.sys.m, 0);
        ++e[p];
        ++e[r];
        nc.sys.terms[{e, q}] = c;
      }
    }
  }
  nc.sys.validate();
  return nc;
}

}  // namespace torusnf
