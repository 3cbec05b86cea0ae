#pragma once
// Run configuration: a single JSON file, field-by-field validation with
// unknown keys rejected, and the dispatch from an initial-data spec to the
// concrete constructors.  The manifest records what a run actually did.

#include <chrono>
#include <optional>

#include "torusnf/initial_data.hpp"
#include "torusnf/io.hpp"

namespace torusnf {

inline constexpr const char* kToolVersion = "0.1.0";

struct InitialSpec {
  std::string kind = "random-small";  // file | random-small | beltrami | invariant-family | m-perp | from-xi
  std::string path;
  double amplitude = 0.05;
  int shell = 1;
  int sign = 1;
  Wave k{0, 0, 0};
  std::vector<cplx> profile;
  Wave a{0, 0, 0};
  std::vector<int> shells;
};

struct RunConfig {
  int dim = 3;
  int lambda_max = 10;
  double dt = 1e-3;
  double T = 5.0;
  int stride = 10;
  int order = 4;           // expansion levels carried by expand/normalize
  double fit_t1 = -1.0;    // fit window; negative = module defaults
  double fit_t2 = -1.0;
  std::uint64_t seed = 1;
  InitialSpec initial;
  std::optional<WeightSchedule> weights;  // override for star-norm reports

  void validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("config: dim must be 2 or 3");
    if (lambda_max < 1) throw std::invalid_argument("config: lambda_max must be >= 1");
    if (dt <= 0.0 || T <= 0.0) throw std::invalid_argument("config: dt and T must be positive");
    if (stride < 1) throw std::invalid_argument("config: stride must be >= 1");
    if (order < 1) throw std::invalid_argument("config: order must be >= 1");
    if (fit_t1 >= 0.0 && fit_t2 >= 0.0 && fit_t2 <= fit_t1)
      throw std::invalid_argument("config: fit window must be increasing");
    static const char* kinds[] = {"file",   "random-small", "beltrami",
                                  "invariant-family", "m-perp", "from-xi"};
    bool ok = false;
    for (const char* k : kinds) ok = ok || initial.kind == k;
    if (!ok) throw std::invalid_argument("config: unknown initial-data kind '" + initial.kind + "'");
    if (initial.amplitude <= 0.0) throw std::invalid_argument("config: amplitude must be positive");
    if ((initial.kind == "file" || initial.kind == "from-xi") && initial.path.empty())
      throw std::invalid_argument("config: initial-data kind needs a path");
    if (weights) weights->validate();
  }
};

namespace detail {

inline Wave wave_from_json(const json& j, const char* what) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3))
    throw std::invalid_argument(std::string(what) + ": wave must be a 2- or 3-vector");
  Wave k{0, 0, 0};
  for (size_t c = 0; c < j.size(); ++c) k[c] = j[c].get<int>();
  return k;
}

inline InitialSpec initial_from_json(const json& j) {
  require_keys(j, {"kind", "path", "amplitude", "shell", "sign", "k", "profile", "a", "shells"},
               "initial");
  InitialSpec s;
  s.kind = need(j, "kind", "initial").get<std::string>();
  if (j.contains("path")) s.path = j["path"].get<std::string>();
  if (j.contains("amplitude")) s.amplitude = j["amplitude"].get<double>();
  if (j.contains("shell")) s.shell = j["shell"].get<int>();
  if (j.contains("sign")) s.sign = j["sign"].get<int>();
  if (j.contains("k")) s.k = wave_from_json(j["k"], "initial.k");
  if (j.contains("a")) s.a = wave_from_json(j["a"], "initial.a");
  if (j.contains("shells")) j["shells"].get_to(s.shells);
  if (j.contains("profile")) {
    const json& jp = j["profile"];
    if (!jp.is_array()) throw std::invalid_argument("initial.profile: expected an array");
    for (const json& e : jp) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("initial.profile: entries are [re, im] pairs");
      s.profile.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  return s;
}

inline json initial_to_json(const InitialSpec& s) {
  json j = {{"kind", s.kind}};
  if (!s.path.empty()) j["path"] = s.path;
  j["amplitude"] = s.amplitude;
  if (s.kind == "beltrami") {
    j["shell"] = s.shell;
    j["sign"] = s.sign;
  }
  if (s.kind == "invariant-family") {
    j["k"] = {s.k[0], s.k[1], s.k[2]};
    json p = json::array();
    for (cplx c : s.profile) p.push_back({c.real(), c.imag()});
    j["profile"] = p;
  }
  if (s.kind == "m-perp") {
    j["a"] = {s.a[0], s.a[1], s.a[2]};
    j["shells"] = s.shells;
  }
  return j;
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  detail::require_keys(j,
                       {"dim", "lambda_max", "dt", "T", "stride", "order", "fit_window", "seed",
                        "initial", "weights"},
                       "config");
  RunConfig c;
  if (j.contains("dim")) c.dim = j["dim"].get<int>();
  if (j.contains("lambda_max")) c.lambda_max = j["lambda_max"].get<int>();
  if (j.contains("dt")) c.dt = j["dt"].get<double>();
  if (j.contains("T")) c.T = j["T"].get<double>();
  if (j.contains("stride")) c.stride = j["stride"].get<int>();
  if (j.contains("order")) c.order = j["order"].get<int>();
  if (j.contains("fit_window")) {
    const json& w = j["fit_window"];
    if (!w.is_array() || w.size() != 2)
      throw std::invalid_argument("config: fit_window must be [t1, t2]");
    c.fit_t1 = w[0].get<double>();
    c.fit_t2 = w[1].get<double>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("initial")) c.initial = detail::initial_from_json(j["initial"]);
  if (j.contains("weights")) c.weights = weights_from_json(j["weights"]);
  c.validate();
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json j = {{"dim", c.dim},       {"lambda_max", c.lambda_max},
            {"dt", c.dt},         {"T", c.T},
            {"stride", c.stride}, {"order", c.order},
            {"seed", c.seed},     {"initial", detail::initial_to_json(c.initial)}};
  if (c.fit_t1 >= 0.0 && c.fit_t2 >= 0.0) j["fit_window"] = {c.fit_t1, c.fit_t2};
  if (c.weights) j["weights"] = weights_to_json(*c.weights);
  return j;
}

inline RunConfig load_config(const std::filesystem::path& p) {
  return config_from_json(detail::parse_file(p));
}

// materialize the configured initial data
inline SpectralField build_initial(const RunConfig& c) {
  const InitialSpec& s = c.initial;
  if (s.kind == "file") {
    SpectralField u = field_from_json(detail::parse_file(s.path));
    if (u.dim() != c.dim || u.lambda_max() != c.lambda_max)
      throw std::invalid_argument("initial file does not match the configured truncation");
    return u;
  }
  if (s.kind == "random-small") return random_field(c.dim, c.lambda_max, c.seed, s.amplitude);
  if (s.kind == "beltrami") return beltrami(c.dim, c.lambda_max, s.shell, s.sign, s.amplitude);
  if (s.kind == "invariant-family") return invariant_family(c.dim, c.lambda_max, s.k, s.profile);
  if (s.kind == "m-perp")
    return directional_field(c.dim, c.lambda_max, s.a, s.shells, c.seed, s.amplitude);
  if (s.kind == "from-xi") {
    NormalState xi = state_from_json(detail::parse_file(s.path));
    if (xi.dim != c.dim || xi.lambda_max != c.lambda_max)
      throw std::invalid_argument("xi file does not match the configured truncation");
    // sum the expansion at t = 0; a last term comparable to the whole sum
    // means the series is diverging at this amplitude
    const int levels = 16;
    ExpansionEngine eng(xi);
    SpectralField u = eng.eval_sum(0.0, levels);
    double tail = h_norm(eng.p_at_zero(levels));
    if (!std::isfinite(tail) || tail > 0.1 * std::max(h_norm(u), 1e-12))
      throw std::runtime_error("from-xi: expansion is diverging; shrink the state");
    return u;
  }
  throw std::invalid_argument("config: unknown initial-data kind");  // unreachable after validate
}

// ---------------------------------------------------------------------------
// run manifest
// ---------------------------------------------------------------------------

struct StageRecord {
  std::string name;
  std::uint64_t checksum = 0;  // FNV-1a of the stage's primary artifact
  double wall_ms = 0.0;
};

struct RunManifest {
  RunConfig config;
  std::vector<StageRecord> stages;

  json to_json() const {
    json st = json::array();
    for (const StageRecord& s : stages) {
      std::ostringstream hex;
      hex << std::hex << s.checksum;
      st.push_back({{"name", s.name}, {"fnv64", hex.str()}, {"wall_ms", s.wall_ms}});
    }
    return {{"schema", "torusnf-run/1"},
            {"version", kToolVersion},
            {"config", config_to_json(config)},
            {"stages", st}};
  }
};

class StageTimer {
 public:
  explicit StageTimer(std::string name) : name_(std::move(name)), t0_(clock::now()) {}
  StageRecord finish(std::uint64_t checksum) const {
    auto dt = std::chrono::duration<double, std::milli>(clock::now() - t0_);
    return {name_, checksum, dt.count()};
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string name_;
  clock::time_point t0_;
};

}  // namespace torusnf
