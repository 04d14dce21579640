#include "bhnls/frequency.hpp"

#include <cmath>
#include <limits>

#include "bhnls/diagnostics.hpp"

namespace bhnls {

double MultiplierSpec::bump(double s) const {
  if (kind == MultiplierKind::Sharp) return s <= 1.0 ? 1.0 : 0.0;
  return 1.0 - smoothstep7((s - 1.0) / 0.1);
}

DyadicLadder DyadicLadder::for_basis(const SpectralBasis& basis) {
  const RealVector& nu = basis.frequencies();
  const int lo = static_cast<int>(std::ceil(std::log2(nu[0])));
  const int hi = static_cast<int>(std::ceil(std::log2(nu[nu.size() - 1])));
  return DyadicLadder(lo, hi);
}

DyadicLadder::DyadicLadder(int lowest_exponent, int highest_exponent) {
  if (highest_exponent < lowest_exponent) throw Error(ErrorKind::InvalidParameter, "empty dyadic ladder");
  for (int j = lowest_exponent; j <= highest_exponent; ++j) levels_.push_back(std::ldexp(1.0, j));
}

bool DyadicLadder::contains(double N) const {
  return N >= lowest() * (1.0 - 1e-12) && N <= highest() * (1.0 + 1e-12);
}

std::vector<double> DyadicLadder::interior() const {
  if (levels_.size() <= 2) return {};
  return std::vector<double>(levels_.begin() + 1, levels_.end() - 1);
}

double multiplier(double nu, double N, Band band, const MultiplierSpec& spec) {
  switch (band) {
    case Band::Low:
      return spec.bump(nu / N);
    case Band::High:
      return 1.0 - spec.bump(nu / N);
    case Band::Shell:
      return spec.bump(nu / N) - spec.bump(2.0 * nu / N);
    case Band::Fattened:
      return spec.bump(nu / (2.0 * N)) - spec.bump(4.0 * nu / N);
  }
  return 0.0;
}

ComplexVector project_coefficients(const ComplexVector& coeffs, double N, Band band, const MultiplierSpec& spec,
                                   const SpectralBasis& basis) {
  const DyadicLadder ladder = DyadicLadder::for_basis(basis);
  if (!(N > 0.0) || !ladder.contains(N))
    throw Error(ErrorKind::OutOfRange, "frequency " + std::to_string(N) + " outside the dyadic ladder [" +
                                           std::to_string(ladder.lowest()) + ", " + std::to_string(ladder.highest()) + "]");
  if (coeffs.size() != basis.size()) throw Error(ErrorKind::GridMismatch, "coefficient length mismatch");
  const RealVector& nu = basis.frequencies();
  ComplexVector out(coeffs.size());
  for (int k = 0; k < coeffs.size(); ++k) out[k] = multiplier(nu[k], N, band, spec) * coeffs[k];
  return out;
}

RadialField project(const RadialField& u, double N, Band band, const MultiplierSpec& spec, const SpectralBasis& basis) {
  return basis.reconstruct(project_coefficients(basis.decompose(u), N, band, spec, basis));
}

double lp_norm(const ComplexVector& v, double p, const RadialOperators& ops) {
  if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidParameter, "L^p norm needs p >= 1");
  return std::pow(ops.integrate(v.cwiseAbs().array().pow(p).matrix()), 1.0 / p);
}

BernsteinReport bernstein_check(const RadialField& u, double N, double p, double q, const SpectralBasis& basis,
                                const MultiplierSpec& spec) {
  if (!(p >= 1.0 && q >= p)) throw Error(ErrorKind::InvalidParameter, "Bernstein check needs 1 <= p <= q");
  const int d = basis.grid().d;
  const RadialField pn = project(u, N, Band::Shell, spec, basis);
  BernsteinReport rep;
  rep.N = N;
  rep.p = p;
  rep.q = q;
  const double expo = d / p - (std::isinf(q) ? 0.0 : d / q);
  rep.lhs = lp_norm(pn.values(), q, basis.ops());
  rep.rhs = std::pow(N, expo) * lp_norm(pn.values(), p, basis.ops());
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

double derivative_bernstein_ratio(const RadialField& u, double N, const SpectralBasis& basis,
                                  const MultiplierSpec& spec) {
  const ComplexVector c = project_coefficients(basis.decompose(u), N, Band::Shell, spec, basis);
  const double l2 = c.norm();
  if (!(l2 > 0.0)) throw Error(ErrorKind::ZeroField, "projection onto the shell vanishes");
  const double lap = c.cwiseProduct(basis.eigenvalues().cast<Complex>()).norm();
  return lap / (N * N * l2);
}

namespace {

double besov_from_coefficients(const ComplexVector& c, const SpectralBasis& basis) {
  const DyadicLadder ladder = DyadicLadder::for_basis(basis);
  const RealVector& mu = basis.eigenvalues();
  const RealVector& nu = basis.frequencies();
  double best = 0.0;
  for (double N : ladder.levels()) {
    double s = 0.0;
    for (int k = 0; k < c.size(); ++k)
      if (nu[k] > 0.5 * N && nu[k] <= N) s += mu[k] * mu[k] * std::norm(c[k]);
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

}  // namespace

double besov_sup_norm(const RadialField& u, const SpectralBasis& basis) {
  if (u.is_zero()) throw Error(ErrorKind::ZeroField, "Besov norm of a zero field");
  return besov_from_coefficients(basis.decompose(u), basis);
}

double refined_sobolev_check(const RadialField& u, const SpectralBasis& basis) {
  if (u.is_zero()) throw Error(ErrorKind::ZeroField, "refined Sobolev ratio of a zero field");
  const int d = basis.grid().d;
  const ComplexVector c = basis.decompose(u);
  const double lap = c.cwiseProduct(basis.eigenvalues().cast<Complex>()).norm();
  const double besov = besov_from_coefficients(c, basis);
  const double lhs = lp_norm(u.values(), critical_exponent(d), basis.ops());
  return lhs / (std::pow(lap, (d - 4.0) / d) * std::pow(besov, 4.0 / d));
}

}  // namespace bhnls
