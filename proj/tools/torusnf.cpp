// torusnf: command-line driver for the spectral normal-form toolkit.
//
//   simulate   integrate initial data and persist the trajectory
//   expand     recover shell data and fit the residual decay per level count
//   normalize  recover shell data and report the weighted norm
//   diagnose   long-time diagnostics: quotient limit, helicity, membership
//   pdnf       Poincare-Dulac normal form of a polynomial system
//   verify     run the acceptance suite
//
// Output root: --out flag, else $TORUSNF_OUT, else ./out.
// Exit codes: 0 ok, 2 validation error, 3 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torusnf/verify.hpp"

namespace fs = std::filesystem;
using namespace torusnf;

namespace {

fs::path out_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("TORUSNF_OUT"); env && *env) return env;
  return "out";
}

std::string hex16(std::uint64_t h) {
  char b[24];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

std::string e3(double x) { return acceptance::e3(x); }

// flag overrides applied on top of the config file
struct Overrides {
  CLI::Option *dim = nullptr, *lmax = nullptr, *dt = nullptr, *T = nullptr, *stride = nullptr,
              *order = nullptr, *seed = nullptr, *fit = nullptr;
  int dim_v = 3, lmax_v = 10, stride_v = 10, order_v = 4;
  double dt_v = 1e-3, T_v = 5.0;
  std::uint64_t seed_v = 1;
  std::vector<double> fit_v;
};

void add_config_flags(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  ov.dim = cmd->add_option("--dim", ov.dim_v, "space dimension (2 or 3)");
  ov.lmax = cmd->add_option("--lambda-max", ov.lmax_v, "spectral truncation");
  ov.dt = cmd->add_option("--dt", ov.dt_v, "time step");
  ov.T = cmd->add_option("--T", ov.T_v, "integration horizon");
  ov.stride = cmd->add_option("--stride", ov.stride_v, "snapshot stride in steps");
  ov.order = cmd->add_option("--order", ov.order_v, "expansion order");
  ov.seed = cmd->add_option("--seed", ov.seed_v, "seed for random initial data");
  ov.fit = cmd->add_option("--fit-window", ov.fit_v, "fit window t1 t2")->expected(2);
}

RunConfig resolve_config(const std::string& path, const Overrides& ov) {
  RunConfig c = path.empty() ? RunConfig{} : load_config(path);
  if (ov.dim->count()) c.dim = ov.dim_v;
  if (ov.lmax->count()) c.lambda_max = ov.lmax_v;
  if (ov.dt->count()) c.dt = ov.dt_v;
  if (ov.T->count()) c.T = ov.T_v;
  if (ov.stride->count()) c.stride = ov.stride_v;
  if (ov.order->count()) c.order = ov.order_v;
  if (ov.seed->count()) c.seed = ov.seed_v;
  if (ov.fit->count()) {
    c.fit_t1 = ov.fit_v[0];
    c.fit_t2 = ov.fit_v[1];
  }
  c.validate();
  return c;
}

Trajectory obtain_trajectory(const RunConfig& c, const std::string& traj_dir, RunManifest& man) {
  if (!traj_dir.empty()) {
    StageTimer t("load-trajectory");
    Trajectory tr = load_trajectory(traj_dir);
    man.stages.push_back(t.finish(file_checksum(fs::path(traj_dir) / "series.csv")));
    return tr;
  }
  StageTimer t0("initial-data");
  SpectralField u0 = build_initial(c);
  man.stages.push_back(t0.finish(fnv1a(field_to_json(u0).dump())));
  StageTimer t1("evolve");
  Trajectory tr = evolve(u0, c.dt, c.T, c.stride);
  man.stages.push_back(t1.finish(fnv1a(series_csv(tr))));
  return tr;
}

void write_manifest(const RunManifest& man, const fs::path& dir) {
  detail::write_text(dir / "run.json", man.to_json().dump(2) + "\n");
}

struct SlopeFit {
  double slope = 0.0, rms = 0.0;
  int points = 0;
};

SlopeFit fit_slope(const std::vector<double>& t, const std::vector<double>& logv) {
  std::vector<double> ones(t.size(), 1.0);
  auto c = lsq_solve({ones, t}, logv);
  SlopeFit f;
  f.slope = c[1];
  f.rms = lsq_rms({ones, t}, c, logv);
  f.points = int(t.size());
  return f;
}

// nominal fit window of the level-j recovery, mirroring the extractor
json level_window(int j, double T) {
  double hi = (j == 1) ? 0.9 * T : std::min(0.9 * T, 18.4 / double(j - 1));
  return json::array({0.35 * hi, hi});
}

json levels_to_json(const std::vector<LevelDiagnostic>& levels, double T) {
  json arr = json::array();
  for (const LevelDiagnostic& l : levels)
    arr.push_back({{"shell", l.shell},
                   {"rms", l.rms},
                   {"delta", l.delta},
                   {"drift", l.drift},
                   {"fitted", l.fitted},
                   {"reliable", l.reliable},
                   {"window", level_window(l.shell, T)}});
  return arr;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const std::vector<std::string>& cfg_paths, const Overrides& ov,
                 const std::string& out_flag, int jobs) {
  std::vector<std::string> paths = cfg_paths;
  if (paths.empty()) paths.emplace_back();

  auto run_one = [&](const std::string& path) -> std::string {
    RunConfig c = resolve_config(path, ov);
    RunManifest man;
    man.config = c;

    StageTimer t0("initial-data");
    SpectralField u0 = build_initial(c);
    man.stages.push_back(t0.finish(fnv1a(field_to_json(u0).dump())));

    StageTimer t1("evolve");
    Trajectory tr = evolve(u0, c.dt, c.T, c.stride);
    man.stages.push_back(t1.finish(fnv1a(series_csv(tr))));
    EnergyReport rep = energy_checks(tr);

    fs::path dir = out_root(out_flag) / "simulate" /
                   ("run-" + hex16(fnv1a(config_to_json(c).dump())).substr(8));
    StageTimer t2("persist");
    save_trajectory(tr, dir);
    man.stages.push_back(t2.finish(file_checksum(dir / "series.csv")));
    write_manifest(man, dir);

    return dir.string() + ": " + std::to_string(tr.times.size()) + " snapshots on [0," +
           e3(c.T) + "], balance residual " + e3(rep.max_balance_residual) + ", decay drift " +
           e3(rep.max_decay_drift) + "\n";
  };

  std::vector<std::string> lines(paths.size());
  if (jobs > 1 && paths.size() > 1) {
    std::vector<std::future<std::string>> fut;
    fut.reserve(paths.size());
    for (const auto& p : paths)
      fut.push_back(std::async(std::launch::async, run_one, p));
    for (size_t i = 0; i < fut.size(); ++i) lines[i] = fut[i].get();
  } else {
    for (size_t i = 0; i < paths.size(); ++i) lines[i] = run_one(paths[i]);
  }
  for (const auto& l : lines) std::fputs(l.c_str(), stdout);
  return 0;
}

// ---- expand -----------------------------------------------------------------

int cmd_expand(const std::string& cfg_path, const Overrides& ov, const std::string& traj_dir,
               double gev_alpha, double gev_sigma, const std::string& out_flag) {
  RunConfig c = resolve_config(cfg_path, ov);
  RunManifest man;
  man.config = c;
  Trajectory tr = obtain_trajectory(c, traj_dir, man);
  const double T = tr.horizon();

  StageTimer te("extract");
  auto ext = extract_normalization(tr, c.order);
  man.stages.push_back(te.finish(fnv1a(state_to_json(ext.xi).dump())));

  double t1 = c.fit_t1 >= 0.0 ? c.fit_t1 : 0.35 * T;
  double t2 = c.fit_t2 >= 0.0 ? c.fit_t2 : 0.9 * T;
  if (!(t1 < t2 && t2 <= T + 1e-12))
    throw std::invalid_argument("expand: fit window must satisfy t1 < t2 <= T");

  ExpansionEngine eng(ext.xi);
  GevreyParams gp{gev_alpha, gev_sigma};
  const double floor_scale = h_norm(tr.states.front());

  json fits = json::array();
  std::string summary;
  for (int N = 1; N <= c.order; ++N) {
    std::vector<double> ts, lh, lg;
    double rmax = 0.0;
    for (size_t s = 0; s < tr.times.size(); ++s) {
      double t = tr.times[s];
      if (t < t1 || t > t2) continue;
      SpectralField res = tr.states[s];
      for (int n = 1; n <= N; ++n)
        res = lin_comb(1.0, res, -std::exp(-double(n) * t), poly_eval(eng.q(n), t));
      double rh = h_norm(res), rg = norm(res, gp);
      rmax = std::max(rmax, rh);
      if (rh <= 1e-290 || rg <= 1e-290) continue;
      ts.push_back(t);
      lh.push_back(std::log(rh));
      lg.push_back(std::log(rg));
    }
    bool floor = rmax < 1e-13 * std::max(floor_scale, 1e-300);
    json entry{{"N", N}, {"window", json::array({t1, t2})}, {"floor", floor}};
    if (!floor && ts.size() >= 4) {
      SlopeFit fh = fit_slope(ts, lh), fg = fit_slope(ts, lg);
      entry["slope_h"] = fh.slope;
      entry["rms_h"] = fh.rms;
      entry["slope_g"] = fg.slope;
      entry["rms_g"] = fg.rms;
      entry["points"] = fh.points;
      summary += "N=" + std::to_string(N) + ": slope_H " + e3(fh.slope) + " (rms " + e3(fh.rms) +
                 "), slope_G " + e3(fg.slope) + " (rms " + e3(fg.rms) + ") on [" + e3(t1) + "," +
                 e3(t2) + "]\n";
    } else {
      entry["points"] = int(ts.size());
      summary += "N=" + std::to_string(N) +
                 (floor ? ": residual at machine floor\n" : ": too few usable points\n");
    }
    fits.push_back(entry);
  }

  json out{{"schema", "torusnf-expand/1"},
           {"version", kToolVersion},
           {"config", config_to_json(c)},
           {"gevrey", {{"alpha", gev_alpha}, {"sigma", gev_sigma}}},
           {"xi", state_to_json(ext.xi)},
           {"levels", levels_to_json(ext.levels, T)},
           {"residual_fits", fits}};
  fs::path dir = out_root(out_flag) / "expand";
  fs::create_directories(dir);
  detail::write_text(dir / "expansion.json", out.dump(2) + "\n");
  write_manifest(man, dir);
  std::fputs(summary.c_str(), stdout);
  std::printf("wrote %s\n", (dir / "expansion.json").c_str());
  return 0;
}

// ---- normalize -----------------------------------------------------------------

int cmd_normalize(const std::string& cfg_path, const Overrides& ov, const std::string& traj_dir,
                  const std::string& out_flag) {
  RunConfig c = resolve_config(cfg_path, ov);
  RunManifest man;
  man.config = c;
  Trajectory tr = obtain_trajectory(c, traj_dir, man);

  StageTimer te("extract");
  auto ext = extract_normalization(tr, c.order);
  man.stages.push_back(te.finish(fnv1a(state_to_json(ext.xi).dump())));

  WeightSchedule w = c.weights ? *c.weights : WeightSchedule::standard(std::max(c.order, 1));
  double star = star_norm(ext.xi, w);
  NormalState fwd = s_normal(ext.xi, 1.0, c.order);
  double star_fwd = star_norm(fwd, w);

  json out{{"schema", "torusnf-normalize/1"},
           {"version", kToolVersion},
           {"config", config_to_json(c)},
           {"xi", state_to_json(ext.xi)},
           {"levels", levels_to_json(ext.levels, tr.horizon())},
           {"star_norm", star},
           {"star_norm_after_unit_time", star_fwd},
           {"weights", weights_to_json(w)}};
  fs::path dir = out_root(out_flag) / "normalize";
  fs::create_directories(dir);
  detail::write_text(dir / "normalization.json", out.dump(2) + "\n");
  write_manifest(man, dir);
  std::printf("recovered %d components, ||xi||_* = %s (unit-time flow: %s)\nwrote %s\n",
              ext.xi.max_shell(), e3(star).c_str(), e3(star_fwd).c_str(),
              (dir / "normalization.json").c_str());
  return 0;
}

// ---- diagnose -----------------------------------------------------------------

int cmd_diagnose(const std::string& cfg_path, const Overrides& ov, const std::string& traj_dir,
                 int phi_shell, const std::string& out_flag) {
  RunConfig c = resolve_config(cfg_path, ov);
  RunManifest man;
  man.config = c;
  Trajectory tr = obtain_trajectory(c, traj_dir, man);
  const double T = tr.horizon();
  double w1 = c.fit_t1 >= 0.0 ? c.fit_t1 : 0.6 * T;
  double w2 = c.fit_t2 >= 0.0 ? c.fit_t2 : 0.95 * T;

  StageTimer td("diagnostics");
  auto q = dirichlet_limit(tr, c.fit_t1, c.fit_t2);
  auto hel = helicity_report(tr);

  json membership = json::array();
  for (int k = 2; k <= 4; ++k) {
    try {
      auto ev = manifold_membership(tr, k);
      json rates = json::array();
      for (const ShellRate& sr : ev.rates)
        rates.push_back({{"shell", sr.shell},
                         {"rate", sr.rate},
                         {"amplitude", sr.amplitude},
                         {"identically_zero", sr.identically_zero}});
      membership.push_back({{"k", k},
                            {"member", ev.member},
                            {"window", json::array({0.5 * T, 0.95 * T})},
                            {"rates", rates}});
    } catch (const std::exception& e) {
      membership.push_back({{"k", k}, {"error", e.what()}});
    }
  }

  json phi;
  if (phi_shell > 0) {
    auto p = phi_functional(tr.states.front(), phi_shell);
    phi = json{{"shell", p.shell},
               {"t_max", p.t_max},
               {"tail_estimate", p.tail_estimate},
               {"value", field_to_json(p.value)}};
  }

  json out{{"schema", "torusnf-diagnose/1"},
           {"version", kToolVersion},
           {"config", config_to_json(c)},
           {"quotient",
            {{"limit", q.limit_hat},
             {"matched_shell", q.matched_shell},
             {"residual", q.residual},
             {"delta", q.delta},
             {"monotone_tail", q.monotone_tail},
             {"window", json::array({w1, w2})}}},
           {"helicity",
            {{"zero", hel.zero},
             {"balance_residual", hel.balance_residual},
             {"alpha0", hel.alpha0},
             {"alpha0_rms", hel.alpha0_rms},
             {"h0_ratio", hel.h0_ratio},
             {"h0_ratio_rms", hel.h0_ratio_rms},
             {"decay_degree", hel.degree},
             {"h0_log", hel.h0_log},
             {"log_rms", hel.log_rms},
             {"window", json::array({w1, w2})}}},
           {"membership", membership}};
  if (!phi.is_null()) out["phi"] = phi;

  man.stages.push_back(td.finish(fnv1a(out.dump())));
  fs::path dir = out_root(out_flag) / "diagnose";
  fs::create_directories(dir);
  detail::write_text(dir / "diagnose.json", out.dump(2) + "\n");
  write_manifest(man, dir);

  std::printf("quotient limit %s (shell %d, residual %s, window [%s,%s])\n", e3(q.limit_hat).c_str(),
              q.matched_shell, e3(q.residual).c_str(), e3(w1).c_str(), e3(w2).c_str());
  if (hel.zero)
    std::printf("helicity: identically zero (balance residual %s)\n",
                e3(hel.balance_residual).c_str());
  else
    std::printf("helicity: alpha0 %s (rms %s), h0 %s (rms %s), balance residual %s\n",
                e3(hel.alpha0).c_str(), e3(hel.alpha0_rms).c_str(), e3(hel.h0_ratio).c_str(),
                e3(hel.h0_ratio_rms).c_str(), e3(hel.balance_residual).c_str());
  std::printf("wrote %s\n", (dir / "diagnose.json").c_str());
  return 0;
}

// ---- pdnf ---------------------------------------------------------------------

int cmd_pdnf(const std::string& system_path, bool use_nse, int degree, int pd_lmax, int pd_dim,
             const std::string& out_flag) {
  PolySystem sys;
  if (use_nse) {
    sys = truncated_nse_as_polysystem(pd_lmax, pd_dim).sys;
  } else if (!system_path.empty()) {
    sys = polysystem_from_json(detail::parse_file(system_path));
  } else {
    throw std::invalid_argument("pdnf: pass --system FILE or --nse");
  }

  StageTimer tn("normal-form");
  NFResult nf = normal_form(sys, degree);
  double resid = verify_conjugacy(sys, nf, degree);

  json out{{"schema", "torusnf-pdnf/1"},
           {"version", kToolVersion},
           {"degree", degree},
           {"m", sys.m},
           {"lambda", sys.lambda},
           {"conjugacy_residual", resid},
           {"result", nfresult_to_json(nf)}};
  fs::path dir = out_root(out_flag) / "pdnf";
  fs::create_directories(dir);
  detail::write_text(dir / "nf.json", out.dump(2) + "\n");

  RunManifest man;
  man.stages.push_back(tn.finish(fnv1a(out.dump())));
  write_manifest(man, dir);

  std::printf("m=%d, degree %d: %zu resonant terms kept, %zu substitutions, %zu warnings\n",
              sys.m, degree, nf.theta.terms.size(), nf.psi.size(), nf.warnings.size());
  for (size_t d = 0; d < nf.residual_by_degree.size(); ++d)
    std::printf("  degree %zu defect %s\n", d + 1, e3(nf.residual_by_degree[d]).c_str());
  std::printf("conjugacy residual %s\nwrote %s\n", e3(resid).c_str(), (dir / "nf.json").c_str());
  return 0;
}

// ---- verify ---------------------------------------------------------------------

int cmd_verify(std::uint64_t seed, double tol_factor, int jobs, const std::string& out_flag) {
  AcceptanceReport rep = run_acceptance(seed, tol_factor, jobs);
  fs::path dir = out_root(out_flag) / "verify";
  fs::create_directories(dir);
  detail::write_text(dir / "report.txt", rep.text());
  detail::write_text(dir / "report.json", rep.to_json().dump(2) + "\n");
  std::fputs(rep.text().c_str(), stdout);
  if (tol_factor != 1.0)
    std::printf(
        "note: tolerance factor %g; checks bounded by magnitude tolerances are expected to fail "
        "when tightened far beyond their measured margins (see README).\n",
        tol_factor);
  std::printf("wrote %s and report.json\n", (dir / "report.txt").c_str());
  return rep.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral Galerkin Navier-Stokes normal-form toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string out_flag;
  app.add_option("--out", out_flag, "output root (default $TORUSNF_OUT or ./out)");

  auto* sim = app.add_subcommand("simulate", "integrate initial data and persist the trajectory");
  std::vector<std::string> sim_cfgs;
  Overrides sim_ov;
  sim->add_option("--config", sim_cfgs, "one or more JSON run configurations")
      ->check(CLI::ExistingFile);
  sim_ov.dim = sim->add_option("--dim", sim_ov.dim_v, "space dimension (2 or 3)");
  sim_ov.lmax = sim->add_option("--lambda-max", sim_ov.lmax_v, "spectral truncation");
  sim_ov.dt = sim->add_option("--dt", sim_ov.dt_v, "time step");
  sim_ov.T = sim->add_option("--T", sim_ov.T_v, "integration horizon");
  sim_ov.stride = sim->add_option("--stride", sim_ov.stride_v, "snapshot stride in steps");
  sim_ov.order = sim->add_option("--order", sim_ov.order_v, "expansion order");
  sim_ov.seed = sim->add_option("--seed", sim_ov.seed_v, "seed for random initial data");
  sim_ov.fit = sim->add_option("--fit-window", sim_ov.fit_v, "fit window t1 t2")->expected(2);
  int sim_jobs = 1;
  sim->add_option("--jobs", sim_jobs, "run independent configs in parallel");

  auto* exp = app.add_subcommand("expand", "shell recovery and residual-decay fits");
  std::string exp_cfg, exp_traj;
  Overrides exp_ov;
  add_config_flags(exp, exp_cfg, exp_ov);
  exp->add_option("--traj", exp_traj, "trajectory directory (default: simulate from config)")
      ->check(CLI::ExistingDirectory);
  double gev_alpha = 1.0, gev_sigma = 0.1;
  exp->add_option("--gevrey-alpha", gev_alpha, "Gevrey exponent");
  exp->add_option("--gevrey-sigma", gev_sigma, "Gevrey radius");

  auto* nrm = app.add_subcommand("normalize", "shell recovery and weighted-norm report");
  std::string nrm_cfg, nrm_traj;
  Overrides nrm_ov;
  add_config_flags(nrm, nrm_cfg, nrm_ov);
  nrm->add_option("--traj", nrm_traj, "trajectory directory (default: simulate from config)")
      ->check(CLI::ExistingDirectory);

  auto* dia = app.add_subcommand("diagnose", "quotient limit, helicity, manifold membership");
  std::string dia_cfg, dia_traj;
  Overrides dia_ov;
  add_config_flags(dia, dia_cfg, dia_ov);
  dia->add_option("--traj", dia_traj, "trajectory directory (default: simulate from config)")
      ->check(CLI::ExistingDirectory);
  int phi_shell = 0;
  dia->add_option("--phi-shell", phi_shell, "also evaluate the shell functional at this shell");

  auto* pd = app.add_subcommand("pdnf", "Poincare-Dulac normal form of a polynomial system");
  std::string pd_system;
  bool pd_nse = false;
  int pd_degree = 2, pd_lmax = 2, pd_dim = 3;
  pd->add_option("--system", pd_system, "polynomial system JSON")->check(CLI::ExistingFile);
  pd->add_flag("--nse", pd_nse, "use the truncated equations as the system");
  pd->add_option("--degree", pd_degree, "normalization degree (2..5)");
  pd->add_option("--pd-lambda-max", pd_lmax, "truncation for --nse");
  pd->add_option("--pd-dim", pd_dim, "dimension for --nse");

  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  std::uint64_t ver_seed = 1;
  double ver_tol = 1.0;
  int ver_jobs = 1;
  ver->add_option("--seed", ver_seed, "suite seed");
  ver->add_option("--tol-factor", ver_tol, "multiply magnitude tolerances (1e-3 tightens)");
  ver->add_option("--jobs", ver_jobs, "run checks in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_cfgs, sim_ov, out_flag, sim_jobs);
    if (exp->parsed()) return cmd_expand(exp_cfg, exp_ov, exp_traj, gev_alpha, gev_sigma, out_flag);
    if (nrm->parsed()) return cmd_normalize(nrm_cfg, nrm_ov, nrm_traj, out_flag);
    if (dia->parsed()) return cmd_diagnose(dia_cfg, dia_ov, dia_traj, phi_shell, out_flag);
    if (pd->parsed()) return cmd_pdnf(pd_system, pd_nse, pd_degree, pd_lmax, pd_dim, out_flag);
    if (ver->parsed()) return cmd_verify(ver_seed, ver_tol, ver_jobs, out_flag);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::length_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
