#pragma once

// Acceptance suite: eleven checks, each guarding one advertised behavior of
// the library, with tolerances pinned in this header.  The report is
// deterministic plain text (no timestamps, no wall times), so repeated runs
// with the same seed produce byte-identical output.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "torusnf/asymptotics.hpp"
#include "torusnf/config.hpp"
#include "torusnf/io.hpp"
#include "torusnf/pd.hpp"

namespace torusnf {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace acceptance {

// ---- pinned tolerances ----------------------------------------------------
constexpr double kEnergyBalanceTol = 1e-8;
constexpr double kOrthogonalityTol = 1e-12;
constexpr double kHeatOracleTol = 1e-10;
constexpr double kQuotientTol = 1e-4;
constexpr double kSlopeMargin = 0.8;      // residual slope must beat -(N + 0.8)
constexpr double kRecoveryTol = 1e-5;     // normalization recovery
constexpr double kTrajectorySumTol = 1e-6;
constexpr double kDiagramTol = 1e-5;
constexpr double kExtendedSumTol = 1e-6;
constexpr double kHomologyTolD2 = 1e-6;
constexpr double kHomologyTolD3 = 1e-5;
constexpr double kLinearizeTol = 1e-12;
constexpr double kCrossModuleTol = 1e-8;
constexpr double kHelicityBalanceTol = 1e-8;
constexpr double kHelicityFloorTol = 1e-13;  // times |u|^2
constexpr double kAlphaTol = 1e-4;
constexpr int kGaugeStates = 1000;
constexpr int kHomologyStates = 20;

struct Ctx {
  std::uint64_t seed = 1;
  double tf = 1.0;  // multiplies every magnitude tolerance above
};

inline std::string e3(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

inline std::string f3(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3f", x);
  return b;
}

// equal up to one rounding step, including the 0 == 0 case
inline bool ulp_equal(double a, double b) {
  return std::abs(a - b) <= 2.3e-16 * std::max(std::abs(a), std::abs(b));
}

// nonlinear part of a polynomial system evaluated pointwise
inline std::vector<double> eval_system(const PolySystem& s, const std::vector<double>& x) {
  std::vector<double> out(s.m, 0.0);
  for (const auto& [mon, c] : s.terms) {
    double v = c;
    for (int i = 0; i < s.m; ++i)
      for (int rep = 0; rep < mon.alpha[i]; ++rep) v *= x[i];
    out[mon.k] += v;
  }
  return out;
}

inline NormalState shelled_state(std::uint64_t seed, double amplitude,
                                 std::initializer_list<int> shells) {
  auto full = decompose(random_field(3, 10, seed, amplitude));
  NormalState s = NormalState::zero(3, 10);
  for (int m : shells)
    if (const SpectralField* f = full.find(m)) s.set(m, *f);
  return s;
}

inline NormalState low_shell_state(std::uint64_t seed, double target_norm) {
  NormalState s = shelled_state(seed, 1.0, {1, 2});
  return ns_scale(s, target_norm / ns_h_norm(s));
}

// ---- 01: energy balance and nonlinear orthogonality ------------------------
inline CheckResult check_energy_balance(const Ctx& c) {
  auto traj = evolve(random_field(3, 10, c.seed, 0.1), 1e-3, 5.0, 10);
  double bal = energy_checks(traj).max_balance_residual;

  double orth = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto u = random_field(3, 10, c.seed + 101 + i, 0.1);
    orth = std::max(orth, std::abs(inner_h(bilinear_b(u, u), u)));
  }
  CheckResult r;
  r.pass = bal < kEnergyBalanceTol * c.tf && orth < kOrthogonalityTol * c.tf;
  r.detail = "balance " + e3(bal) + " tol " + e3(kEnergyBalanceTol * c.tf) + "; <B(u,u),u> " +
             e3(orth) + " tol " + e3(kOrthogonalityTol * c.tf) + " on 100 fields";
  return r;
}

// ---- 02: translation-invariant family against the heat closed form ---------
inline CheckResult check_invariant_heat(const Ctx& c) {
  (void)c;
  std::vector<cplx> prof{{0.04, -0.02}, {0.01, 0.03}};
  auto u0 = invariant_family(3, 10, {1, -1, 0}, prof);
  auto traj = evolve(u0, 1e-3, 1.0, 100);
  const SpectralField& u1 = traj.states.back();
  double err = 0.0;
  for (const Mode& md : u0.modes()) {
    double lam = double(norm2(md.k));
    const Cvec* got = u1.find(md.k);
    for (int cc = 0; cc < 3; ++cc) {
      cplx want = md.a[cc] * std::exp(-lam);
      err = std::max(err, std::abs((got ? (*got)[cc] : cplx(0, 0)) - want));
    }
  }
  for (const Mode& md : u1.modes())
    if (!u0.find(md.k))
      for (int cc = 0; cc < 3; ++cc) err = std::max(err, std::abs(md.a[cc]));
  CheckResult r;
  r.pass = err < kHeatOracleTol * c.tf;
  r.detail = "max mode error at t=1: " + e3(err) + " tol " + e3(kHeatOracleTol * c.tf);
  return r;
}

// ---- 03: Dirichlet quotient limits and 2d monotonicity ----------------------
inline CheckResult check_dirichlet_quotient(const Ctx& c) {
  auto qa = dirichlet_limit(evolve(beltrami(3, 10, 1, +1, 0.05), 1e-3, 5.0, 10));
  auto qb =
      dirichlet_limit(evolve(directional_field(3, 10, {0, 0, 1}, {2}, c.seed + 3, 0.05), 1e-3, 5.0, 10));
  auto qc = dirichlet_limit(evolve(random_field(3, 10, c.seed + 4, 0.1), 1e-3, 10.0, 10));

  bool mono = true;
  auto t2 = evolve(random_field(2, 8, c.seed + 5, 0.1), 1e-3, 5.0, 10);
  for (size_t i = 0; i + 1 < t2.fine.size(); ++i) {
    double l0 = t2.fine[i].f2 / t2.fine[i].e2;
    double l1 = t2.fine[i + 1].f2 / t2.fine[i + 1].e2;
    if (l1 > l0 * (1.0 + 1e-12)) mono = false;
  }

  double tol = kQuotientTol * c.tf;
  CheckResult r;
  r.pass = qa.matched_shell == 1 && std::abs(qa.limit_hat - 1.0) < tol && qb.matched_shell == 2 &&
           std::abs(qb.limit_hat - 2.0) < tol && qc.matched_shell == 1 &&
           std::abs(qc.limit_hat - 1.0) < tol && mono;
  r.detail = "beltrami->" + e3(qa.limit_hat) + " directional->" + e3(qb.limit_hat) + " generic->" +
             e3(qc.limit_hat) + " tol " + e3(tol) + "; 2d monotone " + (mono ? "yes" : "no");
  return r;
}

// ---- 04: expansion residual decay and degree bounds -------------------------
inline CheckResult check_expansion_residual(const Ctx& c) {
  NormalState xi = decompose(random_field(3, 10, c.seed + 6, 0.1));
  ExpansionEngine eng(xi);
  GevreyParams gp{1.0, 0.1};
  const int deep = 12;

  bool ok = true;
  std::string slopes;
  for (int N = 1; N <= 3; ++N) {
    std::vector<double> ts, lh, lg;
    for (int i = 0; i <= 60; ++i) {
      double t = 8.0 + 0.1 * i;
      SpectralField res = SpectralField::zero(3, 10);
      for (int n = N + 1; n <= deep; ++n)
        res = lin_comb(1.0, res, std::exp(-double(n) * t), poly_eval(eng.q(n), t));
      double rh = h_norm(res), rg = norm(res, gp);
      if (rh <= 1e-290 || rg <= 1e-290) continue;
      ts.push_back(t);
      lh.push_back(std::log(rh));
      lg.push_back(std::log(rg));
    }
    std::vector<double> ones(ts.size(), 1.0);
    double sh = lsq_solve({ones, ts}, lh)[1];
    double sg = lsq_solve({ones, ts}, lg)[1];
    double bound = -(double(N) + kSlopeMargin);
    if (!(sh <= bound && sg <= bound)) ok = false;
    slopes += " N=" + std::to_string(N) + ":" + f3(sh) + "/" + f3(sg);
  }

  bool degs = true;
  for (int j = 1; j <= 6; ++j) {
    const PolyField& q = eng.q(j);
    int deg = -1;
    for (size_t d = 0; d < q.c.size(); ++d)
      if (!trim_zeros(q.c[d]).modes().empty()) deg = int(d);
    if (deg > j - 1) degs = false;
  }
  CheckResult r;
  r.pass = ok && degs;
  r.detail = "slopes(H/G) on [8,14]:" + slopes + " bounds -(N+0.8); deg q_j <= j-1 for j<=6: " +
             (degs ? "yes" : "no");
  return r;
}

// ---- 05: normalization round trip -------------------------------------------
inline CheckResult check_round_trip(const Ctx& c) {
  NormalState xi = low_shell_state(c.seed + 52, 0.03);
  ExpansionEngine eng(xi);
  SpectralField u0 = eng.eval_sum(0.0, 4);
  auto traj = evolve(u0, 2e-3, 12.0, 50);

  auto ext = extract_normalization(traj, 4);
  double rec = 0.0;
  for (int m = 1; m <= 4; ++m)
    rec = std::max(rec, h_norm(ext.xi.component_or_zero(m) - xi.component_or_zero(m)));

  double dev = 0.0;
  for (size_t s = 0; s < traj.times.size(); ++s) {
    double t = traj.times[s];
    if (t > 10.0) break;
    SpectralField res = traj.states[s];
    for (int n = 1; n <= 4; ++n)
      res = lin_comb(1.0, res, -std::exp(-double(n) * t), poly_eval(eng.q(n), t));
    dev = std::max(dev, h_norm(res));
  }
  CheckResult r;
  r.pass = rec < kRecoveryTol * c.tf && dev < kTrajectorySumTol * c.tf;
  r.detail = "recovery " + e3(rec) + " tol " + e3(kRecoveryTol * c.tf) + "; trajectory-vs-sum " +
             e3(dev) + " tol " + e3(kTrajectorySumTol * c.tf) + " on [0,10]";
  return r;
}

// ---- 06: the normalization map conjugates the two flows ---------------------
inline CheckResult check_diagram(const Ctx& c) {
  auto traj = evolve(random_field(3, 10, c.seed + 16, 0.05), 1e-3, 15.0, 100);
  auto ext0 = extract_normalization(traj, 4);
  WeightSchedule w = WeightSchedule::standard(4);

  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    size_t off = size_t(std::lround(t / 0.1));
    Trajectory sub;
    sub.dim = traj.dim;
    sub.lambda_max = traj.lambda_max;
    sub.dt = traj.dt;
    sub.stride = traj.stride;
    for (size_t s = off; s < traj.times.size(); ++s) {
      sub.times.push_back(traj.times[s] - t);
      sub.states.push_back(traj.states[s]);
    }
    auto extt = extract_normalization(sub, 4);
    NormalState pred = s_normal(ext0.xi, t, 4);
    worst = std::max(worst, star_norm(ns_lin_comb(1.0, extt.xi, -1.0, pred), w));
  }

  NormalState xis = low_shell_state(c.seed + 52, 0.03);
  ExpansionEngine eng(xis);
  std::vector<SpectralField> lv;
  SpectralField sum0 = SpectralField::zero(3, 10);
  for (int n = 1; n <= 4; ++n) {
    lv.push_back(poly_eval(eng.q(n), 0.0));
    sum0 = sum0 + lv.back();
  }
  auto vt = evolve(sum0, 1e-3, 2.0, 200);
  auto exl = s_ext(lv, 2.0, 4, 1e-3);
  SpectralField se = SpectralField::zero(3, 10);
  for (auto& f : exl) se = se + f;
  double esum = h_norm(se - vt.states.back());

  CheckResult r;
  r.pass = worst < kDiagramTol * c.tf && esum < kExtendedSumTol * c.tf;
  r.detail = "diagram defect " + e3(worst) + " tol " + e3(kDiagramTol * c.tf) +
             " at t in {0.5,1,2}; extended-sum " + e3(esum) + " tol " +
             e3(kExtendedSumTol * c.tf);
  return r;
}

// ---- 07: gauge product/smoothing inequalities and equality cases ------------
inline CheckResult check_gauges(const Ctx& c) {
  double worst_prod = 0.0, worst_smooth = 0.0;
  bool eq = true;
  for (int i = 0; i < kGaugeStates; ++i) {
    NormalState s =
        decompose(random_field(3, 10, c.seed * 1009 + i, 0.4 + 0.05 * double(i % 7)));

    double g[7][21];
    for (int d = 1; d <= 6; ++d)
      for (int n = 1; n <= 20; ++n) g[d][n] = (n >= d) ? gauge(s, d, n) : 0.0;

    for (int d = 1; d <= 5; ++d)
      for (int dp = 1; dp + d <= 6; ++dp)
        for (int n = d; n <= 10; ++n)
          for (int np = dp; np <= 10; ++np) {
            double lhs = g[d][n] * g[dp][np];
            double rhs = std::exp(double(d + dp)) * g[d + dp][n + np];
            if (lhs > 0.0) worst_prod = std::max(worst_prod, lhs / (rhs + 1e-300));
          }

    NormalState sa = ns_stokes(s, 0.5);
    NormalState s1 = ns_stokes(s, 1.5);
    NormalState s2 = ns_stokes(s, 2.5);
    for (int d = 1; d <= 3; ++d)
      for (int n = d; n <= 10; ++n) {
        double lhs = gauge(sa, d, n);
        if (lhs <= 0.0) continue;
        double r1 = (double(d) / n) * gauge(s1, d, n);
        double r2 = std::pow(double(d) / n, 2) * gauge(s2, d, n);
        worst_smooth = std::max({worst_smooth, lhs / (r1 + 1e-300), lhs / (r2 + 1e-300)});
      }

    if (i % 37 == 0)
      for (int n = 1; n <= 10; ++n)
        if (!ulp_equal(gauge(s, 1, n), h_norm(s.component_or_zero(n)))) eq = false;
  }
  CheckResult r;
  r.pass = worst_prod <= 1.0 + 1e-12 && worst_smooth <= 1.0 + 1e-12 && eq;
  r.detail = std::to_string(kGaugeStates) + " states: product excess " + e3(worst_prod) +
             ", smoothing excess " + e3(worst_smooth) + " (<=1); degree-one equality " +
             (eq ? "exact" : "VIOLATED");
  return r;
}

// ---- 08: homology identity ---------------------------------------------------
inline CheckResult check_homology(const Ctx& c) {
  double w2 = 0.0, w3 = 0.0;
  for (int i = 0; i < kHomologyStates; ++i) {
    NormalState s = shelled_state(c.seed * 4099 + i, 0.02, {1, 2});
    w2 = std::max(w2, homology_residual(s, 2));
    w3 = std::max(w3, homology_residual(s, 3));
  }
  CheckResult r;
  r.pass = w2 < kHomologyTolD2 * c.tf && w3 < kHomologyTolD3 * c.tf;
  r.detail = "d=2: " + e3(w2) + " tol " + e3(kHomologyTolD2 * c.tf) + "; d=3: " + e3(w3) +
             " tol " + e3(kHomologyTolD3 * c.tf) + " on " + std::to_string(kHomologyStates) +
             " states (shells <= 2)";
  return r;
}

// ---- 09: Poincare-Dulac engine ------------------------------------------------
inline CheckResult check_pd_engine(const Ctx& c) {
  PolySystem nonres;
  nonres.m = 2;
  nonres.lambda = {1.0, M_PI};
  nonres.terms[{{1, 1}, 0}] = 0.3;
  nonres.terms[{{0, 2}, 0}] = -0.2;
  nonres.terms[{{2, 0}, 1}] = 0.7;
  nonres.terms[{{1, 1}, 1}] = 0.1;
  nonres.validate();
  auto nf1 = normal_form(nonres, 4);
  double res1 = verify_conjugacy(nonres, nf1, 4);
  bool lin_ok = nf1.theta.terms.empty() && res1 < kLinearizeTol * c.tf;

  PolySystem res;
  res.m = 2;
  res.lambda = {1.0, 2.0};
  res.terms[{{2, 0}, 1}] = 0.6;
  res.terms[{{1, 1}, 0}] = 0.4;
  res.validate();
  auto nf2 = normal_form(res, 2);
  bool keep_ok = nf2.theta.terms.size() == 1 && nf2.theta.terms.count({{2, 0}, 1}) == 1 &&
                 nf2.theta.terms.at({{2, 0}, 1}) == 0.6;

  PolySystem staged;
  staged.m = 2;
  staged.lambda = {1.0, 3.0};
  staged.terms[{{2, 0}, 1}] = 0.5;
  staged.terms[{{1, 1}, 0}] = 0.7;
  staged.validate();
  auto nf3 = normal_form(staged, 3);
  std::vector<double> le, lerr;
  for (double eps : {0.2, 0.1, 0.05}) {
    std::vector<double> y0{0.6 * eps, -0.8 * eps};
    auto x1 = integrate_poly(staged, apply_transform(nf3, y0), 1e-3, 1.0);
    auto x2 = apply_transform(nf3, integrate_poly(nf3.theta, y0, 1e-3, 1.0));
    double d = 0.0;
    for (size_t i = 0; i < x1.size(); ++i) d += (x1[i] - x2[i]) * (x1[i] - x2[i]);
    le.push_back(std::log(eps));
    lerr.push_back(std::log(std::sqrt(d)));
  }
  double slope = lsq_solve({std::vector<double>(le.size(), 1.0), le}, lerr)[1];
  bool flow_ok = slope >= 3.8;

  auto nc = truncated_nse_as_polysystem(2, 3);
  auto nfg = normal_form(nc.sys, 2);
  auto u = random_field(3, 2, c.seed + 28, 0.2);
  auto th = eval_system(nfg.theta, nc.coords(u));
  double cross = h_norm(nc.field(th) - b_homogeneous(decompose(u), 2));
  bool cross_ok = cross < kCrossModuleTol * c.tf;

  CheckResult r;
  r.pass = lin_ok && keep_ok && flow_ok && cross_ok;
  r.detail = "linearize(1,pi) residual " + e3(res1) + " tol " + e3(kLinearizeTol * c.tf) +
             "; resonant kept " + (keep_ok ? "exactly" : "WRONG") + "; flow slope " + f3(slope) +
             " (>=3.8); galerkin cross-check " + e3(cross) + " tol " + e3(kCrossModuleTol * c.tf);
  return r;
}

// ---- 10: helicity balance, floors, and designed limits -------------------------
inline CheckResult check_helicity(const Ctx& c) {
  auto tg = evolve(random_field(3, 10, c.seed + 9, 0.1), 1e-3, 5.0, 10);
  double bal = helicity_balance_residual(tg);
  bool bal_ok = bal < kHelicityBalanceTol * c.tf;

  auto td = evolve(directional_field(3, 10, {0, 0, 1}, {}, c.seed + 10, 0.1), 1e-3, 5.0, 10);
  double floor_ratio = 0.0;
  for (const ScalarSample& s : td.fine)
    if (s.e2 > 0.0) floor_ratio = std::max(floor_ratio, std::abs(s.hel) / s.e2);
  bool floor_ok = floor_ratio < kHelicityFloorTol * c.tf;

  double tol = kAlphaTol * c.tf;
  auto ap = helicity_report(evolve(beltrami(3, 10, 1, +1, 0.05), 1e-3, 5.0, 10)).alpha0;
  auto am = helicity_report(evolve(beltrami(3, 10, 1, -1, 0.05), 1e-3, 5.0, 10)).alpha0;
  bool belt_ok = std::abs(ap - 1.0) < tol && std::abs(am + 1.0) < tol;

  const double s2 = std::sqrt(2.0);
  auto m1 = helicity_report(
      evolve(single_pair_mixture(3, 10, {1, 1, 0}, {0.05, 0.0}, {0.05 * std::sqrt(3.0), 0.0}),
             1e-3, 5.0, 10));
  auto m2 = helicity_report(
      evolve(single_pair_mixture(3, 10, {1, 1, 0}, {0.05 * std::sqrt(1.3), 0.0},
                                 {0.05 * std::sqrt(0.7), 0.0}),
             1e-3, 5.0, 10));
  bool mix_ok = std::abs(m1.alpha0 - (-0.5 * s2)) < tol && std::abs(m2.alpha0 - 0.3 * s2) < tol;

  CheckResult r;
  r.pass = bal_ok && floor_ok && belt_ok && mix_ok;
  r.detail = "balance " + e3(bal) + " tol " + e3(kHelicityBalanceTol * c.tf) +
             "; directional |H|/|u|^2 " + e3(floor_ratio) + " tol " +
             e3(kHelicityFloorTol * c.tf) + "; alpha0 " + f3(ap) + "/" + f3(am) + " (+-1), " +
             f3(m1.alpha0) + " (-0.707), " + f3(m2.alpha0) + " (0.424), tol " + e3(tol);
  return r;
}

// ---- 11: determinism of the emission pipeline ----------------------------------
inline CheckResult check_determinism(const Ctx& c) {
  auto slice = [&]() -> std::string {
    RunConfig rc;
    rc.dim = 3;
    rc.lambda_max = 10;
    rc.dt = 1e-3;
    rc.T = 4.0;
    rc.stride = 20;
    rc.seed = c.seed;
    rc.initial.kind = "random-small";
    rc.initial.amplitude = 0.08;
    rc.validate();
    auto u0 = build_initial(rc);
    auto traj = evolve(u0, rc.dt, rc.T, rc.stride);

    std::string out = series_csv(traj);
    out += state_to_json(extract_normalization(traj, 2).xi).dump(2);
    auto q = dirichlet_limit(traj);
    out += json{{"limit", q.limit_hat}, {"residual", q.residual}, {"matched", q.matched_shell}}
               .dump();
    auto hr = helicity_report(traj);
    out += json{{"alpha0", hr.alpha0}, {"h0_ratio", hr.h0_ratio}}.dump();
    out += field_to_json(traj.states.back()).dump(2);
    out += config_to_json(rc).dump(2);

    auto nc = truncated_nse_as_polysystem(2, rc.dim);
    out += nfresult_to_json(normal_form(nc.sys, 2)).dump();
    return out;
  };
  std::string a = slice(), b = slice();
  CheckResult r;
  r.pass = a == b;
  r.detail = "two pipeline runs, " + std::to_string(a.size()) + " report bytes: " +
             (r.pass ? "byte-identical" : "DIFFER");
  return r;
}

}  // namespace acceptance

struct AcceptanceReport {
  std::uint64_t seed = 1;
  double tol_factor = 1.0;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& ck : checks)
      if (!ck.pass) return false;
    return true;
  }

  std::string text() const {
    char head[96];
    std::snprintf(head, sizeof head, "torusnf acceptance suite (seed %llu, tolerance factor %g)\n",
                  static_cast<unsigned long long>(seed), tol_factor);
    std::string out = head;
    int npass = 0;
    for (const auto& ck : checks) {
      char line[64];
      std::snprintf(line, sizeof line, "[%s] %02d %-24s ", ck.pass ? "PASS" : "FAIL", ck.id,
                    ck.name.c_str());
      out += line;
      out += ck.detail;
      out += "\n";
      npass += ck.pass ? 1 : 0;
    }
    out += "result: " + std::to_string(npass) + "/" + std::to_string(checks.size()) + " passed\n";
    return out;
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& ck : checks)
      arr.push_back({{"id", ck.id}, {"name", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
    return {{"schema", "torusnf-verify/1"}, {"version", kToolVersion},
            {"seed", seed},                 {"tol_factor", tol_factor},
            {"passed", all_pass()},         {"checks", arr}};
  }
};

inline AcceptanceReport run_acceptance(std::uint64_t seed = 1, double tol_factor = 1.0,
                                       int jobs = 1) {
  if (!(tol_factor > 0.0)) throw std::invalid_argument("run_acceptance: tolerance factor must be positive");
  if (jobs < 1) throw std::invalid_argument("run_acceptance: jobs must be at least 1");

  acceptance::Ctx ctx{seed, tol_factor};
  using Fn = std::function<CheckResult(const acceptance::Ctx&)>;
  const std::vector<std::pair<const char*, Fn>> table = {
      {"energy-balance", acceptance::check_energy_balance},
      {"invariant-family-heat", acceptance::check_invariant_heat},
      {"dirichlet-quotient", acceptance::check_dirichlet_quotient},
      {"expansion-residual", acceptance::check_expansion_residual},
      {"normalization-round-trip", acceptance::check_round_trip},
      {"normalization-diagram", acceptance::check_diagram},
      {"gauge-inequalities", acceptance::check_gauges},
      {"homology-identity", acceptance::check_homology},
      {"poincare-dulac", acceptance::check_pd_engine},
      {"helicity-asymptotics", acceptance::check_helicity},
      {"determinism", acceptance::check_determinism},
  };

  AcceptanceReport rep;
  rep.seed = seed;
  rep.tol_factor = tol_factor;
  rep.checks.resize(table.size());

  auto run_one = [&](size_t i) {
    CheckResult r;
    try {
      r = table[i].second(ctx);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.id = int(i) + 1;
    r.name = table[i].first;
    rep.checks[i] = std::move(r);
  };

  if (jobs == 1) {
    for (size_t i = 0; i < table.size(); ++i) run_one(i);
  } else {
    // warm the shared caches before fanning out
    for (auto [d, l] : {std::pair{3, 10}, {2, 8}, {3, 2}}) {
      Lattice::get(d, l);
      InteractionTable::get(d, l);
    }
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t i = next.fetch_add(1); i < table.size(); i = next.fetch_add(1)) run_one(i);
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < std::min<int>(jobs, int(table.size())); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rep;
}

}  // namespace torusnf
