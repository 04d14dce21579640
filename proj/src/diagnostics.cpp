#include "bhnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bhnls {

double critical_exponent(int d) { return 2.0 * d / (d - 4.0); }
double nonlinearity_power(int d) { return 8.0 / (d - 4.0); }
double scattering_exponent(int d) { return 2.0 * (d + 4.0) / (d - 4.0); }

namespace {

RealVector abs_pow(const ComplexVector& u, double p) {
  return u.cwiseAbs().array().pow(p).matrix();
}

void require_positive_radius(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::InvalidParameter, "cutoff radius must be positive");
}

double localized_mass_derivative_impl(const ComplexVector& u, const ComplexVector& lap, const ComplexVector& grad,
                                      double R, const CutoffProfile& cut, const RadialOperators& ops) {
  const int d = ops.grid().d;
  const RealVector& r = ops.nodes();
  RealVector dens(u.size());
  for (int j = 0; j < u.size(); ++j) {
    const double s = r[j] / R;
    const double p1 = cut.d1(s) / R;
    const double lap_psi = cut.d2(s) / (R * R) + (d - 1) * p1 / r[j];
    dens[j] = -2.0 * lap_psi * std::imag(std::conj(u[j]) * lap[j]) - 4.0 * p1 * std::imag(std::conj(grad[j]) * lap[j]);
  }
  return ops.integrate(dens);
}

double virial_z_impl(const ComplexVector& u, const ComplexVector& grad, double R, const CutoffProfile& cut,
                     const RadialOperators& ops) {
  const RealVector& r = ops.nodes();
  RealVector dens(u.size());
  for (int j = 0; j < u.size(); ++j) dens[j] = r[j] * cut.phi(r[j] / R) * std::imag(std::conj(grad[j]) * u[j]);
  return ops.integrate(dens);
}

double main_term_impl(const ComplexVector& u, const ComplexVector& lap, double R, const RadialOperators& ops) {
  const double q = critical_exponent(ops.grid().d);
  RealVector dens = lap.cwiseAbs2() - abs_pow(u, q);
  return 4.0 * ops.integrate_range(dens, 0.0, R);
}

double error_budget_impl(const ComplexVector& u, const ComplexVector& lap, const ComplexVector& grad, double R,
                         const CutoffProfile& cut, const RadialOperators& ops) {
  RealVector dens(u.size());
  for (int j = 0; j < u.size(); ++j) {
    const double al = std::abs(lap[j]);
    dens[j] = std::abs(u[j]) * al / (R * R) + std::abs(grad[j]) * al / R + al * al;
  }
  return ops.integrate_range(dens, cut.inner() * R, cut.outer() * R);
}

double tail_impl(const ComplexVector& u, const ComplexVector& lap, const ComplexVector& grad, double R,
                 const RadialOperators& ops) {
  const RealVector& r = ops.nodes();
  RealVector dens(u.size());
  for (int j = 0; j < u.size(); ++j) {
    const double r2 = r[j] * r[j];
    dens[j] = std::norm(lap[j]) + std::norm(grad[j]) / r2 + std::norm(u[j]) / (r2 * r2);
  }
  return ops.integrate_range(dens, R, std::numeric_limits<double>::infinity());
}

}  // namespace

EnergyParts energy(const RadialField& u, const RadialOperators& ops) {
  require_same_grid(u.grid(), ops.grid(), "energy");
  return energy(u, ops.laplacian(u.values()), ops);
}

EnergyParts energy(const RadialField& u, const ComplexVector& lap, const RadialOperators& ops) {
  const int d = ops.grid().d;
  EnergyParts e;
  e.mass = ops.integrate(u.abs2());
  e.kinetic = ops.integrate(lap.cwiseAbs2());
  e.potential = ops.integrate(abs_pow(u.values(), critical_exponent(d)));
  e.energy = 0.5 * e.kinetic - (d - 4.0) / (2.0 * d) * e.potential;
  return e;
}

double scattering_increment(const RadialField& u, double dt, const RadialOperators& ops) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  return dt * ops.integrate(abs_pow(u.values(), scattering_exponent(ops.grid().d)));
}

// ---------------------------------------------------------------------------

double smoothstep7(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x4 = x * x * x * x;
  return x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

double smoothstep7_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double y = x * (1.0 - x);
  return 140.0 * y * y * y;
}

CutoffProfile::CutoffProfile(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(inner > 0.0) || !(outer > inner)) throw Error(ErrorKind::InvalidParameter, "cutoff needs 0 < inner < outer");
}

double CutoffProfile::phi(double s) const { return 1.0 - smoothstep7((s - inner_) / (outer_ - inner_)); }

double CutoffProfile::d1(double s) const {
  const double w = outer_ - inner_;
  return -smoothstep7_d1((s - inner_) / w) / w;
}

double CutoffProfile::d2(double s) const {
  const double w = outer_ - inner_;
  const double x = (s - inner_) / w;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  // d/dx 140 x^3 (1-x)^3 = 420 x^2 (1-x)^2 (1 - 2x)
  const double y = x * (1.0 - x);
  return -420.0 * y * y * (1.0 - 2.0 * x) / (w * w);
}

double CutoffProfile::d3(double s) const {
  const double w = outer_ - inner_;
  const double x = (s - inner_) / w;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  // d/dx 420 x^2 (1-x)^2 (1-2x) = 420 x (1-x) (2 - 10x + 10x^2)
  const double y = x * (1.0 - x);
  return -420.0 * y * (2.0 - 10.0 * x + 10.0 * x * x) / (w * w * w);
}

// ---------------------------------------------------------------------------

double localized_mass(const RadialField& u, double R, const CutoffProfile& cutoff, const RadialOperators& ops) {
  require_positive_radius(R);
  require_same_grid(u.grid(), ops.grid(), "localized_mass");
  const RealVector& r = ops.nodes();
  RealVector dens(u.size());
  for (int j = 0; j < u.size(); ++j) dens[j] = cutoff.phi(r[j] / R) * std::norm(u[j]);
  return ops.integrate(dens);
}

double localized_mass_derivative(const RadialField& u, double R, const CutoffProfile& cutoff,
                                 const RadialOperators& ops) {
  require_positive_radius(R);
  require_same_grid(u.grid(), ops.grid(), "localized_mass_derivative");
  return localized_mass_derivative_impl(u.values(), ops.laplacian(u.values()), ops.gradient(u.values()), R, cutoff,
                                        ops);
}

double virial_z(const RadialField& u, double R, const CutoffProfile& cutoff, const RadialOperators& ops) {
  require_positive_radius(R);
  require_same_grid(u.grid(), ops.grid(), "virial_z");
  return virial_z_impl(u.values(), ops.gradient(u.values()), R, cutoff, ops);
}

double virial_main_term(const RadialField& u, double R, const RadialOperators& ops) {
  require_positive_radius(R);
  require_same_grid(u.grid(), ops.grid(), "virial_main_term");
  return main_term_impl(u.values(), ops.laplacian(u.values()), R, ops);
}

double virial_error_budget(const RadialField& u, double R, const CutoffProfile& cutoff, const RadialOperators& ops) {
  require_positive_radius(R);
  require_same_grid(u.grid(), ops.grid(), "virial_error_budget");
  return error_budget_impl(u.values(), ops.laplacian(u.values()), ops.gradient(u.values()), R, cutoff, ops);
}

double frequency_scale_from_coefficients(const ComplexVector& coeffs, const SpectralBasis& basis, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidParameter, "eta must lie in (0, 1)");
  const RealVector& mu = basis.eigenvalues();
  const int n = basis.size();
  RealVector e = (mu.array().square() * coeffs.cwiseAbs2().array()).matrix();
  const double total = e.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::ZeroField, "frequency scale of a zero field");
  // suffix[m] = sum_{k >= m} e_k; answer is the first m with suffix[m+1] <= eta total.
  double above = 0.0;
  int m = n - 1;
  for (int k = n - 1; k >= 0; --k) {
    if (above > eta * total) break;
    m = k;
    above += e[k];
  }
  return basis.frequencies()[m];
}

double frequency_scale(const RadialField& u, const SpectralBasis& basis, double eta) {
  if (u.is_zero()) throw Error(ErrorKind::ZeroField, "frequency scale of a zero field");
  return frequency_scale_from_coefficients(basis.decompose(u), basis, eta);
}

double tail_kinetic(const RadialField& u, double R, const RadialOperators& ops) {
  require_positive_radius(R);
  require_same_grid(u.grid(), ops.grid(), "tail_kinetic");
  return tail_impl(u.values(), ops.laplacian(u.values()), ops.gradient(u.values()), R, ops);
}

double hardy_u(const RadialField& u, const RadialOperators& ops) {
  RealVector r4 = ops.nodes().array().pow(4).matrix();
  return ops.integrate(u.abs2().cwiseQuotient(r4));
}

double hardy_grad(const RadialField& u, const RadialOperators& ops) {
  RealVector r2 = ops.nodes().cwiseAbs2();
  return ops.integrate(ops.gradient(u.values()).cwiseAbs2().cwiseQuotient(r2));
}

DiagnosticsRecord measure(const RadialField& u, double t, double S_accum, const SpectralBasis& basis,
                          const DiagnosticsConfig& cfg, const ComplexVector* coeffs) {
  const RadialOperators& ops = basis.ops();
  require_same_grid(u.grid(), ops.grid(), "measure");
  const ComplexVector& v = u.values();
  const ComplexVector lap = ops.laplacian(v);
  const ComplexVector grad = ops.gradient(v);

  DiagnosticsRecord rec;
  rec.t = t;
  const EnergyParts e = energy(u, lap, ops);
  rec.mass = e.mass;
  rec.kinetic = e.kinetic;
  rec.potential = e.potential;
  rec.energy = e.energy;
  rec.S_accum = S_accum;
  rec.max_abs = u.max_abs();

  const RealVector& r = ops.nodes();
  RealVector hu(v.size()), hg(v.size());
  for (int j = 0; j < v.size(); ++j) {
    const double r2 = r[j] * r[j];
    hu[j] = std::norm(v[j]) / (r2 * r2);
    hg[j] = std::norm(grad[j]) / r2;
  }
  rec.hardy_u = ops.integrate(hu);
  rec.hardy_grad = ops.integrate(hg);

  const double kin = std::max(e.kinetic, std::numeric_limits<double>::min());
  for (double R : cfg.radii) {
    require_positive_radius(R);
    RealVector m(v.size());
    for (int j = 0; j < v.size(); ++j) m[j] = cfg.cutoff.phi(r[j] / R) * std::norm(v[j]);
    rec.M_R.push_back(ops.integrate(m));
    rec.z_R.push_back(virial_z_impl(v, grad, R, cfg.cutoff, ops));
    rec.tail_kinetic_fraction.push_back(tail_impl(v, lap, grad, R, ops) / kin);
    if (cfg.virial) {
      rec.dM_R.push_back(localized_mass_derivative_impl(v, lap, grad, R, cfg.cutoff, ops));
      rec.virial_main.push_back(main_term_impl(v, lap, R, ops));
      rec.virial_budget.push_back(error_budget_impl(v, lap, grad, R, cfg.cutoff, ops));
    }
  }
  rec.wall_fraction =
      ops.integrate_range(lap.cwiseAbs2(), cfg.wall_band * ops.grid().r_max, ops.grid().r_max) / kin;

  if (u.is_zero()) {
    rec.N_t = 0.0;
  } else if (coeffs) {
    rec.N_t = frequency_scale_from_coefficients(*coeffs, basis, cfg.eta);
  } else {
    rec.N_t = frequency_scale_from_coefficients(basis.decompose(u), basis, cfg.eta);
  }
  return rec;
}

}  // namespace bhnls
