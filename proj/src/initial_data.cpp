#include "bhnls/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bhnls {

RadialField gaussian(const GridSpec& grid, double amplitude, double width) {
  if (!(width > 0.0)) throw Error(ErrorKind::InvalidParameter, "Gaussian width must be positive");
  return RadialField::sample(grid, [&](double r) { return Complex(amplitude * std::exp(-(r * r) / (width * width))); });
}

namespace {

RadialField band_noise(const SpectralBasis& basis, std::mt19937_64& rng, double nu_lo, double nu_hi) {
  std::normal_distribution<double> nd;
  const RealVector& nu = basis.frequencies();
  ComplexVector c = ComplexVector::Zero(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    const double re = nd(rng), im = nd(rng);
    if (nu[k] >= nu_lo && nu[k] <= nu_hi) c[k] = Complex(re, im);
  }
  const double norm = c.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidParameter, "noise band contains no eigenmodes");
  return basis.reconstruct(c / norm);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

RadialField band_limited_noise(const SpectralBasis& basis, std::uint64_t seed, double nu_lo, double nu_hi) {
  std::mt19937_64 rng(seed);
  return band_noise(basis, rng, nu_lo, nu_hi);
}

TrappedRandomDraw trapped_random(const SpectralBasis& basis, const SharpConstants& consts, std::uint64_t seed,
                                 const TrappedRandomSpec& spec) {
  const GridSpec& g = basis.grid();
  const RadialOperators& ops = basis.ops();
  if (g.d != consts.d) throw Error(ErrorKind::GridMismatch, "trapped_random: dimension mismatch");
  std::mt19937_64 rng(seed);

  for (int attempt = 1; attempt <= spec.max_attempts; ++attempt) {
    TrappedRandomDraw out{RadialField::zeros(g), {}, {}};
    out.attempts = attempt;
    out.lambda = uniform(rng, spec.lambda_lo, spec.lambda_hi);
    out.width = uniform(rng, spec.width_lo, spec.width_hi);
    out.theta = uniform(rng, -std::numbers::pi, std::numbers::pi);
    out.noise_share = uniform(rng, spec.noise_lo, spec.noise_hi);
    out.kinetic_fraction = uniform(rng, spec.kinetic_lo, spec.kinetic_hi);

    const double lam = out.lambda, rho = out.width;
    const Complex ph = std::polar(1.0, out.theta);
    RadialField envelope = RadialField::sample(g, [&](double r) { return Complex(std::exp(-(r * r) / (rho * rho))); });
    RadialField core = RadialField::sample(g, [&](double r) {
      return ph * std::pow(lam, (g.d - 4.0) / 2.0) * w_profile(g.d, lam * r) * std::exp(-(r * r) / (rho * rho));
    });
    RadialField noise = band_noise(basis, rng, spec.band_lo, spec.band_hi);
    noise = RadialField(g, noise.values().cwiseProduct(envelope.values()));

    const double k_core = energy(core, ops).kinetic;
    const double k_noise = energy(noise, ops).kinetic;
    // noise carries roughly noise_share of the kinetic energy before the joint rescale
    const double s = std::sqrt(out.noise_share / (1.0 - out.noise_share) * k_core / k_noise);
    RadialField u = core + Complex(s) * noise;
    const double k = energy(u, ops).kinetic;
    u *= Complex(std::sqrt(out.kinetic_fraction * consts.yC / k));

    out.energy = energy(u, ops);
    out.trapping = check_trapping(out.energy, consts, spec.delta0);
    out.field = std::move(u);
    const bool ok = out.trapping.hypotheses_met && out.energy.kinetic <= spec.kinetic_cap * consts.yC &&
                    out.energy.energy <= (1.0 - spec.delta0) * consts.EW_threshold;
    if (ok) return out;
  }
  throw Error(ErrorKind::InvalidParameter, "no admissible trapped draw after max_attempts");
}

}  // namespace bhnls
