#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bhnls/diagnostics.hpp"
#include "bhnls/grid.hpp"

namespace bhnls {

struct GuardTolerances {
  /// |E(t) - E(0)| / max(1, |E(0)|).
  double energy_drift = 1e-3;
  /// Growth of the kinetic fraction in the outer band next to the wall.
  double boundary_tail = 1e-2;
  /// Largest admissible |u|^p in the nonlinear phase.
  double overflow = 1e8;
  /// Largest admissible N(t) * h; above it the concentration scale is unresolved.
  double concentration = 1.0;
};

struct SolverConfig {
  double dt = 1e-3;
  double T = 1.0;
  std::string splitting = "strang";
  GuardTolerances guards;
  DiagnosticsConfig diagnostics;
  /// Keep every k-th field (plus the first and the last). 0 keeps only those two.
  int snapshot_stride = 0;
};

void validate(const SolverConfig& cfg);

struct Trajectory {
  std::vector<double> times;         // snapshot times
  std::vector<RadialField> fields;   // snapshots
  std::vector<DiagnosticsRecord> diagnostics;  // t = 0 and every completed step
  int steps = 0;
  bool guard_tripped = false;
  std::string guard_reason;
  double guard_time = 0.0;

  const RadialField& final_field() const { return fields.back(); }
};

/// e^{it Lap^2} in the eigenbasis: c_k -> e^{i t mu_k^2} c_k.
RadialField linear_step(const RadialField& u, double t, const SpectralBasis& basis);

/// Exact flow of i u_t = |u|^p u: u_j -> u_j exp(-i |u_j|^p t).
RadialField nonlinear_step(const RadialField& u, double t, int d,
                           double overflow_guard = std::numeric_limits<double>::infinity());

/// Strang splitting [N(dt/2) L(dt) N(dt/2)] from t = 0 to T, diagnostics at
/// every step. A tripped guard ends the run early and is recorded, not thrown.
Trajectory evolve(const RadialField& u0, const SolverConfig& cfg, const SpectralBasis& basis);

/// sqrt(int |Lap_h (a - b)|^2).
double h2_distance(const RadialField& a, const RadialField& b, const RadialOperators& ops);

struct StabilityReport {
  double initial_difference = 0.0;  // H^2 distance at t = 0
  double sup_difference = 0.0;      // sup over snapshot times
  double ratio = 0.0;               // sup / initial (0 if initial is 0)
  std::vector<double> times;
  std::vector<double> differences;
  bool base_guard_tripped = false;
  bool perturbed_guard_tripped = false;
  std::string base_guard_reason;
  std::string perturbed_guard_reason;
};

/// Evolves u0 and u0 + perturbation with the same configuration and compares
/// them at the common snapshot times (snapshot_stride of cfg, default 1).
StabilityReport stability_experiment(const RadialField& u0, const RadialField& perturbation, const SolverConfig& cfg,
                                     const SpectralBasis& basis);

}  // namespace bhnls
