#pragma once

#include <string>
#include <vector>

#include "bhnls/config.hpp"
#include "bhnls/frequency.hpp"
#include "bhnls/output.hpp"
#include "bhnls/symmetry.hpp"

namespace bhnls {

// ---------------------------------------------------------------------------
// Audits over recorded diagnostics

struct ConservationAudit {
  double energy_drift = 0.0;  // max |E(t) - E(0)| / |E(0)|
  double mass_drift = 0.0;    // max |M(t) - M(0)| / M(0)
};

ConservationAudit audit_conservation(const std::vector<DiagnosticsRecord>& records);

struct TrappingAudit {
  bool hypotheses_met = false;
  std::string note;
  int steps = 0;
  int violations = 0;
  double delta_bar = 0.0;
  double delta_bar_g = 0.0;
  double min_kinetic_margin = 0.0;
  double min_coercivity_margin = 0.0;
  double min_energy_margin = 0.0;
};

TrappingAudit audit_trapping(const std::vector<DiagnosticsRecord>& records, const SharpConstants& c, double delta0);

struct VirialAuditParams {
  double kappa = 3.0;
  double tail = 1e-3;
  double fraction = 0.99;
  double mass_tol = 0.05;
  double noise_floor = 0.01;
  double coercivity_constant = 0.1;
  double coercivity_fraction = 0.95;
  double z_factor = 3.0;
};

struct VirialAudit {
  int admissible = 0;            // (R, interior step) pairs with tail fraction < tail
  int inequality_ok = 0;         // FD z' >= main - kappa budget
  double inequality_fraction = 0.0;
  double worst_ratio = 0.0;      // min (FD z' - main) / budget over admissible pairs
  int mass_pairs = 0;            // pairs above the FD noise floor
  int mass_ok = 0;
  double mass_max_rel = 0.0;
  int coercive_ok = 0;           // FD z' >= c delta_bar K0
  double coercive_fraction = 0.0;
  double min_coercive_ratio = 0.0;  // min FD z' / (delta_bar K0)
  double z_max_ratio = 0.0;      // max |z_R(t)| / initial envelope
  bool inequality_pass = false;
  bool mass_pass = false;
  bool coercive_pass = false;
  bool z_pass = false;
};

/// Records must come from a run with DiagnosticsConfig::virial and a fixed dt.
VirialAudit audit_virial(const std::vector<DiagnosticsRecord>& records, double dt, double delta_bar, double K0,
                         const std::vector<double>& envelope, const VirialAuditParams& p);

/// max over admissible pairs of (main - FD z') / budget; 0 if never positive.
double calibrate_kappa(const std::vector<DiagnosticsRecord>& records, double dt, double tail);

/// outer R * ||u||_{L2(r < outer R)} * ||grad u||_{L2(r < outer R)}, which bounds |z_R(u)|.
std::vector<double> z_envelope(const RadialField& u, const std::vector<double>& radii, const CutoffProfile& cutoff,
                               const RadialOperators& ops);

/// Constants measured on the reference grid r_max = 60, n = 3000.
const SharpConstants& reference_constants(int d);

// ---------------------------------------------------------------------------
// Frequency and symmetry suites

struct NamedField {
  std::string name;
  RadialField field;
};

/// 30 fields: Gaussians of several widths, rescaled and rotated Gaussians,
/// band-limited noise under an envelope of its own frequency scale, boxed W.
std::vector<NamedField> lp_corpus(const SpectralBasis& basis);

struct BernsteinSpread {
  double p = 0.0, q = 0.0;
  bool gated = false;
  int samples = 0;
  double min = 0.0, max = 0.0, spread = 0.0;
  std::string argmin, argmax;
};

struct LpSuiteReport {
  std::vector<BernsteinSpread> spreads;
  double derivative_min = 0.0, derivative_max = 0.0;
  double refined_max = 0.0;
  std::string refined_argmax;
  bool refined_finite = false;
  double refined_W = 0.0;
  std::vector<double> scaling_lambdas;
  std::vector<double> scaling_ratios;
  double scaling_variation = 0.0;  // max/min - 1
  double spread_field_ratio = 0.0;      // six-octave field
  double single_shell_ratio = 0.0;      // one-shell field of equal H^2 norm
};

/// Bernstein ratios over interior octaves, restricted to shells whose L2
/// norm is at least `significance` times the largest shell norm of the field.
LpSuiteReport lp_suite_report(const SpectralBasis& basis, const std::vector<NamedField>& corpus,
                              double significance = 0.01);

struct DecouplingSuiteReport {
  std::vector<double> ladder;      // lambda ratios 2^n
  DecouplingReport pairing;
  std::vector<KineticDecouplingReport> kinetic;
  bool defect_monotone = false;
  double max_identity_residual = 0.0;  // relative to the total
};

/// Gaussian pair under g_{0, 2^{-n/2}} and g_{0, 2^{n/2}}, n = 0..steps-1.
DecouplingSuiteReport decoupling_suite(const SpectralBasis& basis, int steps = 6, double width = 1.0);

/// Same Gaussian at t = 0 against e^{i t_n Lap^2} with t_n = 0.05 * 2^n.
/// The grid must leave room for the fast part of the Gaussian: group
/// velocity 4 xi^3 at xi ~ 3 reaches r = 120 near t = 1.
DecouplingReport time_divergent_check(const SpectralBasis& basis, int steps = 4, double width = 1.0);

// ---------------------------------------------------------------------------
// Runs

struct RunOutput {
  RunSummary summary;
  std::vector<DiagnosticsRecord> records;
  std::vector<double> times;
  std::vector<RadialField> fields;
};

/// Builds the grid, the basis and the initial data, evolves, audits and (if
/// write_files) writes timeseries.csv, summary.json and SVG plots into
/// cfg.out_dir.
RunOutput run_scenario(const ExperimentConfig& cfg, bool write_files = true);
RunSummary run(const ExperimentConfig& cfg);

}  // namespace bhnls
