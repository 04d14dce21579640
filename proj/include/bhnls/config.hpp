#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bhnls/initial_data.hpp"
#include "bhnls/propagator.hpp"

namespace bhnls {

enum class Scenario {
  stationary_ground_state,
  small_data_scattering,
  trapped_random,
  above_threshold_demo,
  stability_perturbation,
  linear_dispersion,
  virial_audit,
  lp_suite,
};

std::string to_string(Scenario s);
/// Throws ConfigParse for unknown names.
Scenario scenario_from_string(std::string_view name);
const std::vector<Scenario>& all_scenarios();
/// Demo scenarios never fail a run; acceptance scenarios fail on red checks
/// and on tripped guards.
bool is_demo(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::stationary_ground_state;
  int d = 5;
  double r_max = 60.0;
  int n = 750;

  double dt = 1e-3;
  double T = 1.0;
  int snapshot_stride = 0;
  GuardTolerances guards;

  // ground state data
  double w_lambda = 0.25;
  double w_theta = 0.0;
  double w_amplitude = 1.0;
  double w_closure = 0.3;
  // Gaussian data
  double gauss_amplitude = 0.02;
  double gauss_width = 1.0;
  // random trapped data
  TrappedRandomSpec random;
  // perturbation for the stability scenario (Gaussian bump)
  double perturbation_amplitude = 1e-3;
  double perturbation_width = 4.0;

  // diagnostics
  std::vector<double> radii = {8.0, 16.0};
  double eta = 0.5;
  double cutoff_inner = 1.0;
  double cutoff_outer = 2.0;
  double wall_band = 0.9;

  // virial audit
  double virial_kappa = 3.0;
  double virial_fraction = 0.99;      // share of admissible steps with the lower bound
  double virial_tail = 1e-3;          // admissible when tail fraction < this
  double mass_identity_tol = 0.05;
  double mass_noise_floor = 0.01;     // relative to max |FD dM_R/dt|
  double coercivity_constant = 0.1;   // z' >= c delta_bar K0
  double coercivity_fraction = 0.95;
  double z_envelope_factor = 3.0;

  // checks
  double energy_tol = 1e-6;
  double mass_tol = 1e-8;

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool plots = true;

  DiagnosticsConfig diagnostics_config() const;
  SolverConfig solver_config() const;
};

ExperimentConfig default_config(Scenario s);

/// Sets one key. Throws ConfigParse on an unknown key or a malformed value.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// key=value lines; '#' starts a comment; blank lines are skipped.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);
std::pair<std::string, std::string> split_assignment(std::string_view line);

/// Scenario precedence: explicit argument, then the last "scenario" among the
/// overrides, then the file. The remaining keys are applied file first.
ExperimentConfig build_config(std::optional<Scenario> scenario, std::string_view file_text,
                              const std::vector<std::string>& overrides);

/// Throws InvalidParameter when a value is outside its module precondition.
void validate(const ExperimentConfig& cfg);

/// Every key with its current value, in a fixed order.
nlohmann::ordered_json echo(const ExperimentConfig& cfg);

std::string read_text_file(const std::string& path);

}  // namespace bhnls
