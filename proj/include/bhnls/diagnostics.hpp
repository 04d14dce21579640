#pragma once

#include <vector>

#include "bhnls/grid.hpp"

namespace bhnls {

/// 2^# = 2d/(d-4).
double critical_exponent(int d);
/// p = 8/(d-4), so that F(u) = |u|^p u.
double nonlinearity_power(int d);
/// 2(d+4)/(d-4), the spacetime exponent of the scattering size.
double scattering_exponent(int d);

struct EnergyParts {
  double mass = 0.0;
  double kinetic = 0.0;    // int |Lap u|^2
  double potential = 0.0;  // int |u|^{2#}
  double energy = 0.0;     // kinetic/2 - (d-4)/(2d) potential
};

EnergyParts energy(const RadialField& u, const RadialOperators& ops);
/// Same, with the Laplacian already evaluated.
EnergyParts energy(const RadialField& u, const ComplexVector& lap, const RadialOperators& ops);

/// dt * int |u|^{2(d+4)/(d-4)}.
double scattering_increment(const RadialField& u, double dt, const RadialOperators& ops);

/// Smooth radial cutoff: 1 on [0, inner], 0 on [outer, inf), joined by the
/// degree-7 polynomial whose first three derivatives vanish at both ends.
class CutoffProfile {
 public:
  CutoffProfile() = default;
  CutoffProfile(double inner, double outer);

  double inner() const noexcept { return inner_; }
  double outer() const noexcept { return outer_; }

  double phi(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  double d3(double s) const;

 private:
  double inner_ = 1.0;
  double outer_ = 2.0;
};

/// Degree-7 step: 0 at x<=0, 1 at x>=1, C^3.
double smoothstep7(double x);
double smoothstep7_d1(double x);

double localized_mass(const RadialField& u, double R, const CutoffProfile& cutoff, const RadialOperators& ops);

/// -2 Im int Lap(psi) conj(u) Lap(u) - 4 Im int grad(psi).grad(conj u) Lap(u), psi = phi(|x|/R).
double localized_mass_derivative(const RadialField& u, double R, const CutoffProfile& cutoff,
                                 const RadialOperators& ops);

/// Im int r phi(r/R) d_r(conj u) u dx.
double virial_z(const RadialField& u, double R, const CutoffProfile& cutoff, const RadialOperators& ops);

/// 4 int_{|x|<=R} (|Lap u|^2 - |u|^{2#}).
double virial_main_term(const RadialField& u, double R, const RadialOperators& ops);

/// int over the cutoff transition annulus of |u||Lap u|/R^2 + |grad u||Lap u|/R + |Lap u|^2.
double virial_error_budget(const RadialField& u, double R, const CutoffProfile& cutoff, const RadialOperators& ops);

/// Spectral proxy for the frequency scale: the smallest eigenfrequency nu_m
/// such that the kinetic energy carried by modes above nu_m is at most
/// eta times the total.
double frequency_scale(const RadialField& u, const SpectralBasis& basis, double eta);
double frequency_scale_from_coefficients(const ComplexVector& coeffs, const SpectralBasis& basis, double eta);

/// int_{r>=R} (|Lap u|^2 + |grad u|^2/r^2 + |u|^2/r^4).
double tail_kinetic(const RadialField& u, double R, const RadialOperators& ops);

double hardy_u(const RadialField& u, const RadialOperators& ops);     // int |u|^2/|x|^4
double hardy_grad(const RadialField& u, const RadialOperators& ops);  // int |grad u|^2/|x|^2

struct DiagnosticsConfig {
  std::vector<double> radii;  // R values for M_R, z_R and tails
  double eta = 0.5;
  CutoffProfile cutoff;
  /// Outer band used by the boundary guard: r >= wall_band * r_max.
  double wall_band = 0.9;
  /// Also record dM_R/dt, the virial main term and the error budget per R.
  bool virial = false;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double S_accum = 0.0;
  std::vector<double> M_R;
  std::vector<double> z_R;
  double N_t = 0.0;
  std::vector<double> tail_kinetic_fraction;
  double hardy_u = 0.0;
  double hardy_grad = 0.0;
  double wall_fraction = 0.0;  // kinetic fraction in the outer band
  double max_abs = 0.0;
  std::vector<double> dM_R;           // only with DiagnosticsConfig::virial
  std::vector<double> virial_main;
  std::vector<double> virial_budget;
};

/// All per-step scalars. `coeffs` may be null, in which case the spectral
/// coefficients are computed here (one transform).
DiagnosticsRecord measure(const RadialField& u, double t, double S_accum, const SpectralBasis& basis,
                          const DiagnosticsConfig& cfg, const ComplexVector* coeffs = nullptr);

}  // namespace bhnls
