#include "bhnls/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace bhnls {

namespace {

const std::vector<std::pair<Scenario, const char*>>& scenario_names() {
  static const std::vector<std::pair<Scenario, const char*>> names = {
      {Scenario::stationary_ground_state, "stationary_ground_state"},
      {Scenario::small_data_scattering, "small_data_scattering"},
      {Scenario::trapped_random, "trapped_random"},
      {Scenario::above_threshold_demo, "above_threshold_demo"},
      {Scenario::stability_perturbation, "stability_perturbation"},
      {Scenario::linear_dispersion, "linear_dispersion"},
      {Scenario::virial_audit, "virial_audit"},
      {Scenario::lp_suite, "lp_suite"},
  };
  return names;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw Error(ErrorKind::ConfigParse,
              "key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " + what);
}

template <class T>
T parse_number(std::string_view key, std::string_view value, const char* what) {
  value = trim(value);
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) bad_value(key, value, what);
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const double x = parse_number<double>(key, value, "a real number");
  if (!std::isfinite(x)) bad_value(key, value, "a finite real number");
  return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

std::vector<double> parse_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  value = trim(value);
  if (value.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(parse_real(key, value.substr(start, comma == std::string_view::npos ? value.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Key {
  const char* name;
  std::function<void(ExperimentConfig&, std::string_view, std::string_view)> set;
  std::function<nlohmann::ordered_json(const ExperimentConfig&)> get;
};

#define BHNLS_REAL(NAME, FIELD) \
  Key{NAME, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_real(k, v); }, \
      [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.FIELD); }}
#define BHNLS_INT(NAME, FIELD) \
  Key{NAME, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_number<int>(k, v, "an integer"); }, \
      [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.FIELD); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"scenario", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.scenario = scenario_from_string(trim(v)); },
          [](const ExperimentConfig& c) { return nlohmann::ordered_json(to_string(c.scenario)); }},
      BHNLS_INT("d", d),
      BHNLS_REAL("r_max", r_max),
      BHNLS_INT("n", n),
      BHNLS_REAL("dt", dt),
      BHNLS_REAL("T", T),
      BHNLS_INT("snapshot_stride", snapshot_stride),
      BHNLS_REAL("guard.energy_drift", guards.energy_drift),
      BHNLS_REAL("guard.boundary_tail", guards.boundary_tail),
      BHNLS_REAL("guard.overflow", guards.overflow),
      BHNLS_REAL("guard.concentration", guards.concentration),
      BHNLS_REAL("w.lambda", w_lambda),
      BHNLS_REAL("w.theta", w_theta),
      BHNLS_REAL("w.amplitude", w_amplitude),
      BHNLS_REAL("w.closure", w_closure),
      BHNLS_REAL("gauss.amplitude", gauss_amplitude),
      BHNLS_REAL("gauss.width", gauss_width),
      BHNLS_REAL("random.delta0", random.delta0),
      BHNLS_REAL("random.kinetic_cap", random.kinetic_cap),
      BHNLS_REAL("random.kinetic_lo", random.kinetic_lo),
      BHNLS_REAL("random.kinetic_hi", random.kinetic_hi),
      BHNLS_REAL("random.lambda_lo", random.lambda_lo),
      BHNLS_REAL("random.lambda_hi", random.lambda_hi),
      BHNLS_REAL("random.width_lo", random.width_lo),
      BHNLS_REAL("random.width_hi", random.width_hi),
      BHNLS_REAL("random.noise_lo", random.noise_lo),
      BHNLS_REAL("random.noise_hi", random.noise_hi),
      BHNLS_REAL("random.band_lo", random.band_lo),
      BHNLS_REAL("random.band_hi", random.band_hi),
      BHNLS_INT("random.max_attempts", random.max_attempts),
      BHNLS_REAL("perturbation.amplitude", perturbation_amplitude),
      BHNLS_REAL("perturbation.width", perturbation_width),
      Key{"diag.radii", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.radii = parse_list(k, v); },
          [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.radii); }},
      BHNLS_REAL("diag.eta", eta),
      BHNLS_REAL("diag.cutoff_inner", cutoff_inner),
      BHNLS_REAL("diag.cutoff_outer", cutoff_outer),
      BHNLS_REAL("diag.wall_band", wall_band),
      BHNLS_REAL("virial.kappa", virial_kappa),
      BHNLS_REAL("virial.fraction", virial_fraction),
      BHNLS_REAL("virial.tail", virial_tail),
      BHNLS_REAL("virial.mass_identity_tol", mass_identity_tol),
      BHNLS_REAL("virial.mass_noise_floor", mass_noise_floor),
      BHNLS_REAL("coercivity.constant", coercivity_constant),
      BHNLS_REAL("coercivity.fraction", coercivity_fraction),
      BHNLS_REAL("coercivity.z_envelope", z_envelope_factor),
      BHNLS_REAL("check.energy_tol", energy_tol),
      BHNLS_REAL("check.mass_tol", mass_tol),
      Key{"out", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(trim(v)); },
          [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.out_dir); }},
      Key{"seed", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = parse_number<std::uint64_t>(k, v, "an unsigned integer"); },
          [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.seed); }},
      Key{"plots", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.plots = parse_bool(k, v); },
          [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.plots); }},
  };
  return table;
}

#undef BHNLS_REAL
#undef BHNLS_INT

}  // namespace

std::string to_string(Scenario s) {
  for (const auto& [v, name] : scenario_names())
    if (v == s) return name;
  return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
  for (const auto& [v, n] : scenario_names())
    if (name == n) return v;
  throw Error(ErrorKind::ConfigParse, "unknown scenario '" + std::string(name) + "'");
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    for (const auto& p : scenario_names()) v.push_back(p.first);
    return v;
  }();
  return all;
}

bool is_demo(Scenario s) {
  return s == Scenario::above_threshold_demo || s == Scenario::stability_perturbation ||
         s == Scenario::linear_dispersion;
}

DiagnosticsConfig ExperimentConfig::diagnostics_config() const {
  DiagnosticsConfig c;
  c.radii = radii;
  c.eta = eta;
  c.cutoff = CutoffProfile(cutoff_inner, cutoff_outer);
  c.wall_band = wall_band;
  c.virial = scenario == Scenario::virial_audit;
  return c;
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig c;
  c.dt = dt;
  c.T = T;
  c.guards = guards;
  c.diagnostics = diagnostics_config();
  c.snapshot_stride = snapshot_stride;
  return c;
}

ExperimentConfig default_config(Scenario s) {
  ExperimentConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::stationary_ground_state:
      c.snapshot_stride = 100;
      break;
    case Scenario::small_data_scattering:
      c.r_max = 40.0;
      c.n = 800;
      c.gauss_amplitude = 0.04;
      c.gauss_width = 3.0;
      c.radii = {4.0, 8.0};
      break;
    case Scenario::trapped_random:
    case Scenario::virial_audit:
      c.r_max = 48.0;
      c.n = 960;
      c.T = 0.5;
      c.seed = 7;
      c.radii = {8.0, 12.0, 16.0, 24.0};
      break;
    case Scenario::above_threshold_demo:
      c.w_amplitude = 1.2;
      c.dt = 2.5e-4;
      c.eta = 0.1;
      c.guards.concentration = 0.1;
      c.radii = {4.0, 8.0};
      break;
    case Scenario::stability_perturbation:
      c.T = 0.5;
      c.snapshot_stride = 50;
      break;
    case Scenario::linear_dispersion:
      c.r_max = 160.0;
      c.n = 1600;
      c.T = 0.5;
      c.gauss_amplitude = 1.0;
      c.snapshot_stride = 50;
      c.radii = {4.0, 8.0};
      break;
    case Scenario::lp_suite:
      c.r_max = 40.0;
      c.n = 1500;
      c.T = 0.0;
      c.radii = {};
      break;
  }
  return c;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const Key& k : keys())
    if (key == k.name) {
      k.set(cfg, key, value);
      return;
    }
  throw Error(ErrorKind::ConfigParse, "unknown configuration key '" + std::string(key) + "'");
}

std::pair<std::string, std::string> split_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorKind::ConfigParse, "expected key=value, got '" + std::string(trim(line)) + "'");
  const std::string key(trim(line.substr(0, eq)));
  if (key.empty()) throw Error(ErrorKind::ConfigParse, "empty key in '" + std::string(trim(line)) + "'");
  return {key, std::string(trim(line.substr(eq + 1)))};
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!trim(line).empty()) out.push_back(split_assignment(line));
    pos = nl + 1;
  }
  return out;
}

ExperimentConfig build_config(std::optional<Scenario> scenario, std::string_view file_text,
                              const std::vector<std::string>& overrides) {
  auto entries = parse_key_values(file_text);
  const std::size_t n_file = entries.size();
  for (const auto& o : overrides) entries.push_back(split_assignment(o));

  if (!scenario) {
    for (std::size_t i = entries.size(); i-- > n_file;)
      if (entries[i].first == "scenario") {
        scenario = scenario_from_string(entries[i].second);
        break;
      }
  }
  if (!scenario) {
    for (std::size_t i = n_file; i-- > 0;)
      if (entries[i].first == "scenario") {
        scenario = scenario_from_string(entries[i].second);
        break;
      }
  }
  if (!scenario) throw Error(ErrorKind::ConfigParse, "no scenario given");

  ExperimentConfig cfg = default_config(*scenario);
  for (const auto& [k, v] : entries)
    if (k != "scenario") apply_setting(cfg, k, v);
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  build_grid(cfg.d, cfg.r_max, cfg.n);
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidParameter, what);
  };
  require(cfg.dt > 0.0, "dt must be positive");
  require(cfg.T >= 0.0, "T must be non-negative");
  require(cfg.snapshot_stride >= 0, "snapshot_stride must be non-negative");
  require(cfg.w_lambda > 0.0, "w.lambda must be positive");
  require(cfg.w_closure > 0.0 && cfg.w_closure < 1.0, "w.closure must lie in (0, 1)");
  require(cfg.gauss_width > 0.0, "gauss.width must be positive");
  require(cfg.perturbation_width > 0.0, "perturbation.width must be positive");
  require(cfg.eta > 0.0 && cfg.eta < 1.0, "diag.eta must lie in (0, 1)");
  require(cfg.cutoff_inner > 0.0 && cfg.cutoff_outer > cfg.cutoff_inner, "cutoff needs 0 < inner < outer");
  require(cfg.wall_band > 0.0 && cfg.wall_band < 1.0, "diag.wall_band must lie in (0, 1)");
  for (double R : cfg.radii) require(R > 0.0 && R < cfg.r_max, "every radius must lie in (0, r_max)");
  require(cfg.random.delta0 > 0.0 && cfg.random.delta0 < 1.0, "random.delta0 must lie in (0, 1)");
  require(cfg.random.kinetic_lo > 0.0 && cfg.random.kinetic_lo <= cfg.random.kinetic_hi &&
              cfg.random.kinetic_hi <= cfg.random.kinetic_cap && cfg.random.kinetic_cap < 1.0,
          "random kinetic fractions need 0 < lo <= hi <= cap < 1");
  require(cfg.random.max_attempts > 0, "random.max_attempts must be positive");
  require(cfg.virial_kappa >= 0.0, "virial.kappa must be non-negative");
  require(cfg.energy_tol > 0.0 && cfg.mass_tol > 0.0, "check tolerances must be positive");
  require(!cfg.out_dir.empty(), "out must not be empty");
  const SolverConfig sc = cfg.solver_config();
  if (cfg.T > 0.0) validate(sc);
}

nlohmann::ordered_json echo(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const Key& k : keys()) j[k.name] = k.get(cfg);
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bhnls
