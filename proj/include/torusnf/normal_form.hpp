#pragma once
// Shell-indexed states, the level expansion q_n(t, xi), the normal-form flow
// and its extended companion system, the weighted level-sum norm, homogeneous
// gauges, homogeneous components of the level maps, and the homology-operator
// cross-check.

#include <functional>
#include <map>
#include <mutex>

#include "torusnf/exppoly.hpp"
#include <cstdint>
#include "torusnf/fitting.hpp"
#include "torusnf/multiindex.hpp"
#include "torusnf/solver.hpp"
#include "torusnf/weights.hpp"

namespace torusnf {

// ---------------------------------------------------------------------------
// shell-indexed state: one divergence-free field per eigenvalue shell
// ---------------------------------------------------------------------------

struct NormalState {
  int dim = 3;
  int lambda_max = 10;
  std::map<int, SpectralField> comp;  // shell m -> field supported on |k|^2 = m

  static NormalState zero(int dim, int lambda_max) {
    NormalState s;
    s.dim = dim;
    s.lambda_max = lambda_max;
    return s;
  }

  bool empty() const { return comp.empty(); }

  const SpectralField* find(int m) const {
    auto it = comp.find(m);
    return it == comp.end() ? nullptr : &it->second;
  }

  SpectralField component_or_zero(int m) const {
    if (const SpectralField* f = find(m)) return *f;
    return SpectralField::zero(dim, lambda_max);
  }

  void set(int m, SpectralField f) {
    if (f.dim() != dim || f.lambda_max() != lambda_max)
      throw std::invalid_argument("NormalState: component truncation mismatch");
    for (const Mode& md : f.modes())
      if (norm2(md.k) != m && (md.a[0] != cplx(0, 0) || md.a[1] != cplx(0, 0) || md.a[2] != cplx(0, 0)))
        throw std::invalid_argument("NormalState: component has support off its shell");
    SpectralField t = trim_zeros(f);
    if (t.modes().empty())
      comp.erase(m);
    else
      comp[m] = std::move(t);
  }

  void validate() const {
    const Lattice& lat = Lattice::get(dim, lambda_max);
    for (const auto& [m, f] : comp) {
      if (m < 1 || m > lambda_max || !lat.representable(m))
        throw std::invalid_argument("NormalState: component on a shell outside the spectrum");
      if (f.dim() != dim || f.lambda_max() != lambda_max)
        throw std::invalid_argument("NormalState: component truncation mismatch");
      for (const Mode& md : f.modes())
        if (norm2(md.k) != m)
          throw std::invalid_argument("NormalState: component has support off its shell");
    }
  }

  SpectralField sum() const {
    SpectralField s = SpectralField::zero(dim, lambda_max);
    for (const auto& [m, f] : comp) s = s + f;
    return s;
  }

  int max_shell() const { return comp.empty() ? 0 : comp.rbegin()->first; }
};

inline NormalState decompose(const SpectralField& u) {
  NormalState s = NormalState::zero(u.dim(), u.lambda_max());
  const Lattice& lat = Lattice::get(u.dim(), u.lambda_max());
  for (int m : lat.shells) {
    SpectralField f = trim_zeros(shell_project(u, m));
    if (!f.modes().empty()) s.comp[m] = std::move(f);
  }
  return s;
}

inline NormalState ns_lin_comb(double a, const NormalState& x, double b, const NormalState& y) {
  if (x.dim != y.dim || x.lambda_max != y.lambda_max)
    throw std::invalid_argument("ns_lin_comb: truncation mismatch");
  NormalState out = NormalState::zero(x.dim, x.lambda_max);
  auto add = [&](int m, const SpectralField& f, double w) {
    auto it = out.comp.find(m);
    if (it == out.comp.end())
      out.comp[m] = scale(f, w);
    else
      it->second = lin_comb(1.0, it->second, w, f);
  };
  for (const auto& [m, f] : x.comp) add(m, f, a);
  for (const auto& [m, f] : y.comp) add(m, f, b);
  for (auto it = out.comp.begin(); it != out.comp.end();) {
    it->second = trim_zeros(it->second);
    it = it->second.modes().empty() ? out.comp.erase(it) : std::next(it);
  }
  return out;
}

inline NormalState ns_scale(const NormalState& x, double s) {
  NormalState out = x;
  for (auto& [m, f] : out.comp) f = scale(f, s);
  return out;
}

// A^alpha componentwise: shell m scales by m^alpha
inline NormalState ns_stokes(const NormalState& x, double alpha = 1.0) {
  NormalState out = x;
  for (auto& [m, f] : out.comp) f = scale(f, std::pow(double(m), alpha));
  return out;
}

inline double ns_h_norm(const NormalState& x) {
  double s = 0.0;
  for (const auto& [m, f] : x.comp) {
    double h = h_norm(f);
    s += h * h;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// weighted level-sum norm and homogeneous gauges
// ---------------------------------------------------------------------------

inline double star_norm(const NormalState& xi, const WeightSchedule& w) {
  double s = 0.0;
  for (const auto& [m, f] : xi.comp) {
    if (m > w.levels()) throw std::out_of_range("star_norm: schedule too short");
    s += w.rho(m) * v_norm(f);
  }
  return s;
}

inline double star_norm(const std::vector<SpectralField>& levels, const WeightSchedule& w) {
  double s = 0.0;
  for (size_t i = 0; i < levels.size(); ++i) {
    int n = static_cast<int>(i) + 1;
    if (n > w.levels()) throw std::out_of_range("star_norm: schedule too short");
    s += w.rho(n) * v_norm(levels[i]);
  }
  return s;
}

// product norm |xi|^alpha = prod_k |xi_k|^{alpha_k}
inline double sinorm(const NormalState& xi, const MultiIndex& a) {
  double p = 1.0;
  for (auto& [shell, e] : a.terms) {
    double h = h_norm(xi.component_or_zero(shell));
    for (int i = 0; i < e; ++i) p *= h;
  }
  return p;
}

// [[xi]]_{d,n} = sqrt( sum_{|a|=d, ||a||=n} prod_k |xi_k|^{2 a_k} )
inline double gauge(const NormalState& xi, int d, int n) {
  if (d < 1 || n < 1) throw std::invalid_argument("gauge: degree and weight must be positive");
  auto shells = representable_shells(xi.dim, n);
  double s = 0.0;
  for (const MultiIndex& a : multi_indices(shells, d, n)) {
    double p = sinorm(xi, a);
    s += p * p;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// the level expansion: q_1 = xi_1 and, for n >= 2,
//   q_n' + (A - n) q_n + sum_{k+l=n} B(q_k, q_l) = 0,  R_n q_n(0) = xi_n,
// solved level by level in closed form (polynomial coefficients in t)
// ---------------------------------------------------------------------------

class ExpansionEngine {
 public:
  explicit ExpansionEngine(NormalState xi) : xi_(std::move(xi)) { xi_.validate(); }

  const NormalState& state() const { return xi_; }

  const PolyField& q(int n) {
    if (n < 1) throw std::invalid_argument("ExpansionEngine: level must be >= 1");
    std::lock_guard<std::mutex> lock(mu_);
    ensure(n);
    return memo_[n - 1];
  }

  // P_n(xi) = q_n(0, xi)
  SpectralField p_at_zero(int n) { return poly_eval(q(n), 0.0); }

  // sum_{n <= N} q_n(t, xi) e^{-n t}
  SpectralField eval_sum(double t, int N) {
    SpectralField s = SpectralField::zero(xi_.dim, xi_.lambda_max);
    for (int n = 1; n <= N; ++n)
      s = lin_comb(1.0, s, std::exp(-double(n) * t), poly_eval(q(n), t));
    return s;
  }

 private:
  void ensure(int n) {
    while (static_cast<int>(memo_.size()) < n) {
      int j = static_cast<int>(memo_.size()) + 1;
      if (j == 1) {
        memo_.push_back(poly_const(xi_.component_or_zero(1)));
        continue;
      }
      PolyField beta = poly_zero(xi_.dim, xi_.lambda_max);
      for (int k = 1; k < j; ++k) beta = poly_add(beta, poly_bilinear(memo_[k - 1], memo_[j - k - 1]));
      memo_.push_back(solve_level(j, xi_.component_or_zero(j), beta));
    }
  }

  NormalState xi_;
  std::vector<PolyField> memo_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// flows
// ---------------------------------------------------------------------------

// exact normal-form flow: component n at time t is R_n q_n(t, xi) e^{-nt}
inline NormalState s_normal(const NormalState& xi, double t, int N) {
  ExpansionEngine eng(xi);
  NormalState out = NormalState::zero(xi.dim, xi.lambda_max);
  const Lattice& lat = Lattice::get(xi.dim, xi.lambda_max);
  for (int n = 1; n <= N && n <= xi.lambda_max; ++n) {
    if (!lat.representable(n)) continue;
    SpectralField c = scale(shell_project(poly_eval(eng.q(n), t), n), std::exp(-double(n) * t));
    out.set(n, c);
  }
  return out;
}

// extended companion system: levels u_n coupled triangularly,
//   du_n/dt + A u_n + sum_{j+k=n} B(u_j, u_k) = 0,
// integrated as one stacked system by the same integrating-factor RK4
inline std::vector<SpectralField> s_ext(const std::vector<SpectralField>& u0, double t, int N,
                                        double dt = 1e-3) {
  if (u0.empty()) throw std::invalid_argument("s_ext: no levels");
  if (static_cast<int>(u0.size()) > N) throw std::invalid_argument("s_ext: level budget exceeded");
  if (!(t > 0.0)) throw std::invalid_argument("s_ext: need t > 0");
  const int dim = u0.front().dim(), lmax = u0.front().lambda_max();
  for (const auto& f : u0)
    if (f.dim() != dim || f.lambda_max() != lmax)
      throw std::invalid_argument("s_ext: mixed truncations");

  const Lattice& lat = Lattice::get(dim, lmax);
  const InteractionTable& tab = InteractionTable::get(dim, lmax);
  const int n = lat.size();
  const long nsteps = std::max(1L, std::lround(std::ceil(t / dt)));
  const double h = t / double(nsteps);

  std::vector<double> eh(n), ef(n);
  for (int i = 0; i < n; ++i) {
    eh[i] = std::exp(-0.5 * h * lat.shell_of[i]);
    ef[i] = eh[i] * eh[i];
  }

  std::vector<std::vector<cplx>> X(N);
  for (int l = 0; l < N; ++l)
    X[l] = (l < static_cast<int>(u0.size())) ? pack(u0[l], lat)
                                             : std::vector<cplx>(3 * n, cplx(0, 0));

  auto rhs = [&](const std::vector<std::vector<cplx>>& S, std::vector<std::vector<cplx>>& K) {
    std::vector<cplx> tmp(3 * n);
    for (int lv = 0; lv < N; ++lv) {
      std::fill(K[lv].begin(), K[lv].end(), cplx(0, 0));
      for (int a = 1; a <= lv; ++a) {  // levels a and (lv+1-a), both >= 1
        int b = lv + 1 - a;
        bilinear_packed(tab, lat, S[a - 1].data(), S[b - 1].data(), tmp.data());
        for (int p = 0; p < 3 * n; ++p) K[lv][p] += tmp[p];
      }
    }
  };

  std::vector<std::vector<cplx>> K1(N, std::vector<cplx>(3 * n)), K2 = K1, K3 = K1, K4 = K1,
                                 S(N, std::vector<cplx>(3 * n));
  for (long step = 0; step < nsteps; ++step) {
    rhs(X, K1);
    for (int l = 0; l < N; ++l)
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
          S[l][3 * i + c] = eh[i] * (X[l][3 * i + c] - 0.5 * h * K1[l][3 * i + c]);
    rhs(S, K2);
    for (int l = 0; l < N; ++l)
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
          S[l][3 * i + c] = eh[i] * X[l][3 * i + c] - 0.5 * h * K2[l][3 * i + c];
    rhs(S, K3);
    for (int l = 0; l < N; ++l)
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
          S[l][3 * i + c] = ef[i] * X[l][3 * i + c] - h * eh[i] * K3[l][3 * i + c];
    rhs(S, K4);
    for (int l = 0; l < N; ++l)
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
          int p = 3 * i + c;
          X[l][p] = ef[i] * X[l][p] -
                    (h / 6.0) * (ef[i] * K1[l][p] + 2.0 * eh[i] * (K2[l][p] + K3[l][p]) + K4[l][p]);
        }
  }

  std::vector<SpectralField> out;
  out.reserve(N);
  for (int l = 0; l < N; ++l) out.push_back(unpack(lat, X[l]));
  return out;
}

// ---------------------------------------------------------------------------
// homogeneous components of the level maps
// ---------------------------------------------------------------------------

// per-level homogeneous parts p[j-1][d] = degree-d part of q_j(0, .) at xi.
// The linear part is known exactly (it is xi_j), so degrees 2..jcap are
// separated numerically: evaluate at Chebyshev scales on [1/2, 1] and solve
// the Vandermonde system in extended precision.  The degree range must cover
// everything q_j can carry (degrees up to j), otherwise unmodeled high-degree
// content aliases into the low-degree estimates; jcap bounds both the level
// and the degree, since level j holds no monomial of degree above j.
struct LevelHomogeneous {
  std::vector<std::vector<SpectralField>> p;  // p[j-1][d], d = 0..jcap
  double condition = 1.0;                     // 1-norm estimate for the scale system
};

inline LevelHomogeneous level_homogeneous_parts(const NormalState& xi, int jcap) {
  if (jcap < 1) throw std::invalid_argument("level_homogeneous_parts: bad level cap");
  if (jcap > 20)
    throw std::invalid_argument(
        "level_homogeneous_parts: degree separation beyond 20 levels is not stable");
  const int dim = xi.dim, lmax = xi.lambda_max;
  LevelHomogeneous out;
  out.p.assign(jcap, std::vector<SpectralField>(jcap + 1, SpectralField::zero(dim, lmax)));
  for (int j = 1; j <= jcap; ++j) out.p[j - 1][1] = xi.component_or_zero(j);
  if (jcap == 1) return out;

  const int m = jcap - 1;  // unknown degrees 2..jcap
  std::vector<double> s(m);
  for (int i = 0; i < m; ++i)
    s[i] = 0.75 + 0.25 * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * m));

  // F_i[j] = q_j(0, s_i xi) - s_i xi_j  (linear part subtracted)
  std::vector<std::vector<SpectralField>> F(m);
  for (int i = 0; i < m; ++i) {
    ExpansionEngine eng(ns_scale(xi, s[i]));
    F[i].reserve(jcap);
    for (int j = 1; j <= jcap; ++j)
      F[i].push_back(lin_comb(1.0, eng.p_at_zero(j), -s[i], xi.component_or_zero(j)));
  }

  // invert the m x m system V_{i,e} = s_i^{e+2} in long double
  std::vector<std::vector<long double>> a(m, std::vector<long double>(2 * m, 0.0L));
  for (int i = 0; i < m; ++i) {
    long double pw = (long double)s[i] * s[i];
    for (int e = 0; e < m; ++e) {
      a[i][e] = pw;
      pw *= s[i];
    }
    a[i][m + i] = 1.0L;
  }
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs((double)a[r][c]) > std::abs((double)a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    if (a[c][c] == 0.0L) throw std::runtime_error("level_homogeneous_parts: singular scales");
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      long double f = a[r][c] / a[c][c];
      for (int k = c; k < 2 * m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<std::vector<double>> W(m, std::vector<double>(m));  // W[e][i]
  for (int e = 0; e < m; ++e)
    for (int i = 0; i < m; ++i) W[e][i] = (double)(a[e][m + i] / a[e][e]);

  double norm_v = 0.0, norm_w = 0.0;
  for (int i = 0; i < m; ++i) {
    double cv = 0.0, cw = 0.0;
    for (int e = 0; e < m; ++e) {
      cv += std::pow(s[i], e + 2);
      cw += std::abs(W[e][i]);
    }
    norm_v = std::max(norm_v, cv);
    norm_w = std::max(norm_w, cw);
  }
  out.condition = norm_v * norm_w;

  for (int j = 1; j <= jcap; ++j)
    for (int e = 0; e < m; ++e) {
      SpectralField acc = SpectralField::zero(dim, lmax);
      for (int i = 0; i < m; ++i) acc = lin_comb(1.0, acc, W[e][i], F[i][j - 1]);
      out.p[j - 1][e + 2] = trim_zeros(acc);
    }
  return out;
}

// P^{[d]}(xi) = sum_{j >= d} (degree-d part of q_j(0, .)); the level sum is
// finite because a degree-d monomial over shells <= s has weight <= d s
inline SpectralField p_homogeneous(const NormalState& xi, int d) {
  const int smax = xi.max_shell();
  if (d < 1) throw std::invalid_argument("p_homogeneous: degree must be >= 1");
  if (smax == 0) return SpectralField::zero(xi.dim, xi.lambda_max);
  if (d == 1) return xi.sum();
  const int jcap = d * smax;
  LevelHomogeneous tab = level_homogeneous_parts(xi, jcap);
  SpectralField s = SpectralField::zero(xi.dim, xi.lambda_max);
  for (int j = d; j <= jcap; ++j) s = s + tab.p[j - 1][d];
  return s;
}

// directional derivative of P^{[k]} at xi along a shell-indexed direction,
// by Richardson-refined central differences on a normalized direction (exact
// up to roundoff for the polynomial degrees used here)
inline SpectralField dp_directional(const NormalState& xi, int k, const NormalState& dir,
                                    double fd_step = 1e-4) {
  double nh = ns_h_norm(dir);
  if (nh == 0.0) return SpectralField::zero(xi.dim, xi.lambda_max);
  NormalState unit = ns_scale(dir, 1.0 / nh);
  auto eval = [&](double s) {
    return p_homogeneous(ns_lin_comb(1.0, xi, s, unit), k);
  };
  const double h = fd_step;
  SpectralField d_h = scale(eval(h) - eval(-h), 1.0 / (2.0 * h));
  SpectralField d_h2 = scale(eval(0.5 * h) - eval(-0.5 * h), 1.0 / h);
  SpectralField rich = lin_comb(4.0 / 3.0, d_h2, -1.0 / 3.0, d_h);
  return scale(rich, nh);
}

// resonant quadratic-in-parts sum
//   Bh^{[d]}(xi) = sum_j R_j sum_{k+l=j} sum_{m+n=d} B(p_k^{[m]}, p_l^{[n]})
inline SpectralField b_homogeneous(const NormalState& xi, int d) {
  if (d < 2) throw std::invalid_argument("b_homogeneous: degree must be >= 2");
  const int dim = xi.dim, lmax = xi.lambda_max;
  const int smax = xi.max_shell();
  SpectralField out = SpectralField::zero(dim, lmax);
  if (smax == 0) return out;
  const int jcap = std::min(lmax - 1, (d - 1) * smax);  // higher levels have no parts <= d-1
  if (jcap < 1) return out;
  LevelHomogeneous tab = level_homogeneous_parts(xi, jcap);
  const Lattice& lat = Lattice::get(dim, lmax);
  for (int j = 2; j <= lmax; ++j) {
    if (!lat.representable(j)) continue;
    SpectralField acc = SpectralField::zero(dim, lmax);
    for (int k = 1; k < j; ++k) {
      int l = j - k;
      if (k > jcap || l > jcap) continue;
      for (int m2 = 1; m2 < d; ++m2) {
        int n2 = d - m2;
        const SpectralField& fk = tab.p[k - 1][m2];
        const SpectralField& fl = tab.p[l - 1][n2];
        if (fk.modes().empty() || fl.modes().empty()) continue;
        acc = acc + bilinear_b(fk, fl);
      }
    }
    out = out + shell_project(acc, j);
  }
  return trim_zeros(out);
}

namespace detail {

inline NormalState prune_direction(const NormalState& x, double rel = 1e-9) {
  double total = ns_h_norm(x);
  NormalState out = NormalState::zero(x.dim, x.lambda_max);
  for (const auto& [m, f] : x.comp)
    if (h_norm(f) > rel * total) out.comp[m] = f;
  return out;
}

}  // namespace detail

// Cross-check of the transformed vector field against the resonant form: the
// degree-d term assembled from the chain rule,
//   Q^{[d]} = sum_{k+l=d} B(P^{[k]}, P^{[l]})
//           - sum_{2<=k,l<=d-1, k+l=d+1} DP^{[k]} Q^{[l]}
//           + A P^{[d]} - DP^{[d]}(A xi),
// must coincide with Bh^{[d]}.  Returns |Q - Bh| / |Bh| (absolute when the
// reference vanishes).
inline double homology_residual(const NormalState& xi, int d) {
  if (d < 2 || d > 3) throw std::invalid_argument("homology_residual: supported degrees are 2 and 3");
  const int dim = xi.dim, lmax = xi.lambda_max;
  if (xi.max_shell() == 0) return 0.0;

  NormalState a_xi = ns_stokes(xi, 1.0);

  std::vector<SpectralField> P(d + 1, SpectralField::zero(dim, lmax));
  for (int k = 1; k <= d; ++k) P[k] = p_homogeneous(xi, k);

  // Q^{[2]}
  SpectralField q2 = bilinear_b(P[1], P[1]) + stokes_apply(P[2]) - dp_directional(xi, 2, a_xi);
  SpectralField target = q2;
  if (d == 3) {
    NormalState q2_dir = detail::prune_direction(decompose(q2));
    target = bilinear_b(P[1], P[2]) + bilinear_b(P[2], P[1]) - dp_directional(xi, 2, q2_dir) +
             stokes_apply(P[3]) - dp_directional(xi, 3, a_xi);
  }

  SpectralField ref = b_homogeneous(xi, d);
  double denom = h_norm(ref);
  double diff = h_norm(target - ref);
  return denom > 1e-300 ? diff / denom : diff;
}

// ---------------------------------------------------------------------------
// recovery of the shell data from a trajectory (the normalization map)
// ---------------------------------------------------------------------------

struct LevelDiagnostic {
  int shell = 0;
  double rms = 0.0;
  double delta = 0.0;      // fitted decay rate of the correction term
  double drift = 0.0;      // magnitude of the growth-column coefficient
  bool fitted = false;     // false for empty shells (nothing to fit)
  bool reliable = true;
};

struct ExtractionResult {
  NormalState xi;
  std::vector<LevelDiagnostic> levels;
};

// Peel the trajectory level by level: at stage j subtract the already
// reconstructed levels in state space, amplify by e^{jt}, project onto shell
// j, add back the known polynomial drift of R_j q_j, and fit what remains to
// a constant plus decaying correction on a late-time window.  The window
// shrinks with j because subtraction errors of earlier levels are amplified
// like e^{(j-1)t}; a growth column at that rate absorbs what is left of them.
inline ExtractionResult extract_normalization(const Trajectory& traj, int N,
                                              double fit_tol = 1e-4) {
  if (N < 1) throw std::invalid_argument("extract_normalization: need N >= 1");
  if (traj.states.size() < 8) throw std::invalid_argument("extract_normalization: trajectory too short");
  const int dim = traj.dim, lmax = traj.lambda_max;
  const Lattice& lat = Lattice::get(dim, lmax);
  const double T = traj.horizon();

  ExtractionResult res;
  res.xi = NormalState::zero(dim, lmax);

  for (int j = 1; j <= N; ++j) {
    LevelDiagnostic diag;
    diag.shell = j;
    if (j > lmax || !lat.representable(j)) {
      res.levels.push_back(diag);
      continue;
    }
    const auto& shell_modes = lat.by_shell.at(j);

    // engine over the components recovered so far gives the lower levels and
    // the known shell drift of level j
    ExpansionEngine eng(res.xi);
    PolyField beta_j = poly_zero(dim, lmax);
    for (int k = 1; k < j; ++k) beta_j = poly_add(beta_j, poly_bilinear(eng.q(k), eng.q(j - k)));
    PolyField drift_poly = poly_integrate(poly_apply(beta_j, [&](const SpectralField& f) {
      return shell_project(f, j);
    }));  // int_0^t R_j beta_j; R_j q_j(t) = xi_j - this

    double t_hi = (j == 1) ? 0.9 * T : std::min(0.9 * T, 18.4 / double(j - 1));
    double t_lo = 0.35 * t_hi;
    std::vector<size_t> idx;
    for (size_t s = 0; s < traj.times.size(); ++s)
      if (traj.times[s] >= t_lo && traj.times[s] <= t_hi) idx.push_back(s);
    if (idx.size() < 8) {
      t_lo = 0.15 * t_hi;
      idx.clear();
      for (size_t s = 0; s < traj.times.size(); ++s)
        if (traj.times[s] >= t_lo && traj.times[s] <= t_hi) idx.push_back(s);
    }
    if (idx.size() < 6)
      throw std::invalid_argument("extract_normalization: too few snapshots in the fit window");

    // series: for every shell mode and component, e^{jt} R_j (u - lower levels)
    // plus the known drift polynomial, sampled on the window
    const size_t nm = shell_modes.size();
    std::vector<double> ts(idx.size());
    std::vector<std::vector<double>> series(6 * nm, std::vector<double>(idx.size()));
    for (size_t s = 0; s < idx.size(); ++s) {
      double t = traj.times[idx[s]];
      ts[s] = t;
      SpectralField v = traj.states[idx[s]];
      for (int i = 1; i < j; ++i)
        v = lin_comb(1.0, v, -std::exp(-double(i) * t), poly_eval(eng.q(i), t));
      SpectralField w = lin_comb(std::exp(double(j) * t), shell_project(v, j), 1.0,
                                 poly_eval(drift_poly, t));
      for (size_t mi = 0; mi < nm; ++mi) {
        Cvec a{};
        if (const Cvec* pa = w.find(lat.modes[shell_modes[mi]])) a = *pa;
        for (int c = 0; c < 3; ++c) {
          series[6 * mi + 2 * c][s] = a[c].real();
          series[6 * mi + 2 * c + 1][s] = a[c].imag();
        }
      }
    }

    DecayFit fit = (j == 1) ? fit_const_plus_decay(ts, series, 0.5, 10.0)
                            : fit_const_plus_decay(ts, series, 0.5, 10.0, double(j - 1));

    std::vector<Mode> fitted(nm);
    for (size_t mi = 0; mi < nm; ++mi) {
      fitted[mi].k = lat.modes[shell_modes[mi]];
      for (int c = 0; c < 3; ++c)
        fitted[mi].a[c] = cplx(fit.offset[6 * mi + 2 * c], fit.offset[6 * mi + 2 * c + 1]);
    }
    // fitted amplitudes carry fit noise; restore exact incompressibility
    SpectralField xi_j = trim_zeros(leray_project(dim, lmax, std::move(fitted)));
    res.xi.set(j, xi_j);

    diag.fitted = true;
    diag.rms = fit.rms;
    diag.delta = fit.delta;
    for (double b : fit.drift) diag.drift = std::max(diag.drift, std::abs(b));
    diag.reliable = fit.rms <= fit_tol;
    res.levels.push_back(diag);
  }
  return res;
}

}  // namespace torusnf
