#pragma once
// JSON and CSV persistence: spectral fields, shell states, weight schedules,
// polynomial systems, and trajectory directories.  All readers reject unknown
// keys and re-validate the decoded objects; writers emit shortest round-trip
// doubles so identical inputs produce identical bytes.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "torusnf/normal_form.hpp"
#include "torusnf/pd.hpp"
#include "torusnf/solver.hpp"
#include "torusnf/weights.hpp"

namespace torusnf {

using nlohmann::json;

namespace detail {

inline void require_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  for (const auto& [key, val] : j.items()) {
    (void)val;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
  }
}

inline const json& need(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string(what) + ": missing key '" + key + "'");
  return *it;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
  if (!out) throw std::runtime_error("short write to " + p.string());
}

inline json parse_file(const std::filesystem::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + p.string() + ": " + e.what());
  }
}

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t file_checksum(const std::filesystem::path& p) {
  return fnv1a(detail::read_text(p));
}

// ---------------------------------------------------------------------------
// SpectralField  {dim, lambda_max, modes: [{k, re, im}]}
// ---------------------------------------------------------------------------

inline json field_to_json(const SpectralField& u) {
  json modes = json::array();
  for (const Mode& md : u.modes()) {
    json re = json::array(), im = json::array();
    for (int c = 0; c < 3; ++c) {
      re.push_back(md.a[c].real());
      im.push_back(md.a[c].imag());
    }
    modes.push_back({{"k", {md.k[0], md.k[1], md.k[2]}}, {"re", re}, {"im", im}});
  }
  return {{"dim", u.dim()}, {"lambda_max", u.lambda_max()}, {"modes", modes}};
}

inline SpectralField field_from_json(const json& j) {
  detail::require_keys(j, {"dim", "lambda_max", "modes"}, "field");
  int dim = detail::need(j, "dim", "field").get<int>();
  int lmax = detail::need(j, "lambda_max", "field").get<int>();
  const json& jm = detail::need(j, "modes", "field");
  if (!jm.is_array()) throw std::invalid_argument("field: modes must be an array");
  std::vector<Mode> modes;
  for (const json& e : jm) {
    detail::require_keys(e, {"k", "re", "im"}, "field mode");
    const json& jk = detail::need(e, "k", "field mode");
    const json& jre = detail::need(e, "re", "field mode");
    const json& jim = detail::need(e, "im", "field mode");
    if (!jk.is_array() || jk.size() != 3 || !jre.is_array() || jre.size() != 3 ||
        !jim.is_array() || jim.size() != 3)
      throw std::invalid_argument("field mode: k/re/im must be length-3 arrays");
    Mode md;
    for (int c = 0; c < 3; ++c) {
      md.k[c] = jk[c].get<int>();
      md.a[c] = cplx(jre[c].get<double>(), jim[c].get<double>());
    }
    modes.push_back(md);
  }
  return SpectralField::make(dim, lmax, std::move(modes));  // full invariant check
}

// ---------------------------------------------------------------------------
// NormalState  {dim, lambda_max, components: [{shell, modes}]}
// ---------------------------------------------------------------------------

inline json state_to_json(const NormalState& xi) {
  json comps = json::array();
  for (const auto& [m, f] : xi.comp)
    comps.push_back({{"shell", m}, {"modes", field_to_json(f)["modes"]}});
  return {{"dim", xi.dim}, {"lambda_max", xi.lambda_max}, {"components", comps}};
}

inline NormalState state_from_json(const json& j) {
  detail::require_keys(j, {"dim", "lambda_max", "components"}, "state");
  int dim = detail::need(j, "dim", "state").get<int>();
  int lmax = detail::need(j, "lambda_max", "state").get<int>();
  NormalState xi = NormalState::zero(dim, lmax);
  const json& jc = detail::need(j, "components", "state");
  if (!jc.is_array()) throw std::invalid_argument("state: components must be an array");
  for (const json& e : jc) {
    detail::require_keys(e, {"shell", "modes"}, "state component");
    int m = detail::need(e, "shell", "state component").get<int>();
    json jf = {{"dim", dim}, {"lambda_max", lmax}, {"modes", detail::need(e, "modes", "state component")}};
    xi.set(m, field_from_json(jf));
  }
  xi.validate();
  return xi;
}

// ---------------------------------------------------------------------------
// WeightSchedule  {log_kappa, log_gamma, log_rho}
// ---------------------------------------------------------------------------

inline json weights_to_json(const WeightSchedule& w) {
  return {{"log_kappa", w.log_kappa}, {"log_gamma", w.log_gamma}, {"log_rho", w.log_rho}};
}

inline WeightSchedule weights_from_json(const json& j) {
  detail::require_keys(j, {"log_kappa", "log_gamma", "log_rho"}, "weights");
  WeightSchedule w;
  detail::need(j, "log_kappa", "weights").get_to(w.log_kappa);
  detail::need(j, "log_gamma", "weights").get_to(w.log_gamma);
  detail::need(j, "log_rho", "weights").get_to(w.log_rho);
  w.validate();
  return w;
}

// ---------------------------------------------------------------------------
// PolySystem / NFResult
// ---------------------------------------------------------------------------

inline json polysystem_to_json(const PolySystem& s) {
  json terms = json::array();
  for (const auto& [mon, c] : s.terms)
    terms.push_back({{"alpha", mon.alpha}, {"k", mon.k}, {"c", c}});
  return {{"m", s.m}, {"lambda", s.lambda}, {"terms", terms}};
}

inline PolySystem polysystem_from_json(const json& j) {
  detail::require_keys(j, {"m", "lambda", "terms"}, "polysystem");
  PolySystem s;
  s.m = detail::need(j, "m", "polysystem").get<int>();
  detail::need(j, "lambda", "polysystem").get_to(s.lambda);
  const json& jt = detail::need(j, "terms", "polysystem");
  if (!jt.is_array()) throw std::invalid_argument("polysystem: terms must be an array");
  for (const json& e : jt) {
    detail::require_keys(e, {"alpha", "k", "c"}, "polysystem term");
    PdMonomial mon;
    detail::need(e, "alpha", "polysystem term").get_to(mon.alpha);
    mon.k = detail::need(e, "k", "polysystem term").get<int>();
    s.terms[mon] = detail::need(e, "c", "polysystem term").get<double>();
  }
  s.validate();
  return s;
}

inline json nfresult_to_json(const NFResult& r) {
  json psi = json::array();
  for (const auto& [mon, c] : r.psi)
    psi.push_back({{"alpha", mon.alpha}, {"k", mon.k}, {"c", c}});
  return {{"theta", polysystem_to_json(r.theta)},
          {"psi", psi},
          {"residual_by_degree", r.residual_by_degree},
          {"warnings", r.warnings}};
}

inline NFResult nfresult_from_json(const json& j) {
  detail::require_keys(j, {"theta", "psi", "residual_by_degree", "warnings"}, "nfresult");
  NFResult r;
  r.theta = polysystem_from_json(detail::need(j, "theta", "nfresult"));
  const json& jp = detail::need(j, "psi", "nfresult");
  if (!jp.is_array()) throw std::invalid_argument("nfresult: psi must be an array");
  for (const json& e : jp) {
    detail::require_keys(e, {"alpha", "k", "c"}, "nfresult psi term");
    PdMonomial mon;
    detail::need(e, "alpha", "nfresult psi term").get_to(mon.alpha);
    mon.k = detail::need(e, "k", "nfresult psi term").get<int>();
    r.psi[mon] = detail::need(e, "c", "nfresult psi term").get<double>();
  }
  detail::need(j, "residual_by_degree", "nfresult").get_to(r.residual_by_degree);
  detail::need(j, "warnings", "nfresult").get_to(r.warnings);
  return r;
}

// ---------------------------------------------------------------------------
// trajectory directory: manifest.json + states/NNNN.json + series.csv
// ---------------------------------------------------------------------------

inline constexpr const char* kSeriesHeader =
    "t,u_l2,u_h1,lambda,helicity,energy,enstrophy,I";

inline std::string series_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "# schema: torusnf-series/1\n" << kSeriesHeader << "\n";
  for (const ScalarSample& s : traj.fine) {
    using detail::fmt17;
    out << fmt17(s.t) << ',' << fmt17(std::sqrt(s.e2)) << ',' << fmt17(std::sqrt(s.f2)) << ','
        << fmt17(s.e2 > 0.0 ? s.f2 / s.e2 : 0.0) << ',' << fmt17(s.hel) << ','
        << fmt17(0.5 * s.e2) << ',' << fmt17(0.5 * s.f2) << ',' << fmt17(s.icr) << "\n";
  }
  return out.str();
}

inline void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "states");
  json manifest = {{"schema", "torusnf-trajectory/1"},
                   {"dim", traj.dim},
                   {"lambda_max", traj.lambda_max},
                   {"dt", traj.dt},
                   {"stride", traj.stride},
                   {"times", traj.times}};
  detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  for (size_t i = 0; i < traj.states.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%04zu.json", i);
    detail::write_text(dir / "states" / name, field_to_json(traj.states[i]).dump(2) + "\n");
  }
  detail::write_text(dir / "series.csv", series_csv(traj));
}

inline Trajectory load_trajectory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  json manifest = detail::parse_file(dir / "manifest.json");
  detail::require_keys(manifest, {"schema", "dim", "lambda_max", "dt", "stride", "times"},
                       "trajectory manifest");
  if (detail::need(manifest, "schema", "trajectory manifest").get<std::string>() !=
      "torusnf-trajectory/1")
    throw std::invalid_argument("trajectory manifest: unsupported schema");
  Trajectory traj;
  traj.dim = manifest["dim"].get<int>();
  traj.lambda_max = manifest["lambda_max"].get<int>();
  traj.dt = manifest["dt"].get<double>();
  traj.stride = manifest["stride"].get<int>();
  manifest["times"].get_to(traj.times);
  if (traj.dt <= 0.0 || traj.stride < 1)
    throw std::invalid_argument("trajectory manifest: bad dt/stride");

  for (size_t i = 0; i < traj.times.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%04zu.json", i);
    SpectralField u = field_from_json(detail::parse_file(dir / "states" / name));
    if (u.dim() != traj.dim || u.lambda_max() != traj.lambda_max)
      throw std::invalid_argument("trajectory state truncation mismatch");
    traj.states.push_back(std::move(u));
  }

  std::istringstream csv(detail::read_text(dir / "series.csv"));
  std::string line;
  if (!std::getline(csv, line) || line.rfind("# schema: torusnf-series/1", 0) != 0)
    throw std::invalid_argument("series.csv: missing schema line");
  if (!std::getline(csv, line) || line != kSeriesHeader)
    throw std::invalid_argument("series.csv: unexpected header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double col[8];
    char sep = ',';
    for (int c = 0; c < 8; ++c) {
      if (!(ls >> col[c])) throw std::invalid_argument("series.csv: malformed row");
      if (c < 7 && !(ls >> sep && sep == ',')) throw std::invalid_argument("series.csv: malformed row");
    }
    ScalarSample s;
    s.t = col[0];
    s.e2 = col[1] * col[1];
    s.f2 = col[2] * col[2];
    s.hel = col[4];
    s.icr = col[7];
    traj.fine.push_back(s);
  }
  if (traj.fine.empty()) throw std::invalid_argument("series.csv: no samples");
  return traj;
}

}  // namespace torusnf
