#pragma once

#include <cstdint>

#include "bhnls/ground_state.hpp"

namespace bhnls {

/// amplitude * exp(-(r/width)^2).
RadialField gaussian(const GridSpec& grid, double amplitude, double width);

/// Complex Gaussian coefficients on the eigenmodes with frequency in
/// [nu_lo, nu_hi], zero elsewhere, normalised to unit L2 norm.
RadialField band_limited_noise(const SpectralBasis& basis, std::uint64_t seed, double nu_lo, double nu_hi);

struct TrappedRandomSpec {
  double delta0 = 0.1;
  double kinetic_cap = 0.8;            // kinetic <= cap * yC
  double kinetic_lo = 0.4;             // target kinetic fraction drawn from [lo, hi]
  double kinetic_hi = 0.7;
  double lambda_lo = 0.3, lambda_hi = 0.5;   // scale of the W-shaped core
  double width_lo = 4.0, width_hi = 7.0;     // Gaussian envelope width
  double noise_lo = 0.1, noise_hi = 0.3;     // kinetic share of the noise before rescaling
  double band_lo = 0.15, band_hi = 0.6;      // noise frequency band
  int max_attempts = 100;
};

struct TrappedRandomDraw {
  RadialField field;
  EnergyParts energy;
  TrappingReport trapping;
  int attempts = 0;
  double kinetic_fraction = 0.0;
  double lambda = 0.0, width = 0.0, theta = 0.0, noise_share = 0.0;
};

/// Seeded random data below the ground-state thresholds. The hypotheses
/// (kinetic <= cap yC, E <= (1 - delta0) E(W)) are verified before
/// returning; failed draws are redrawn from the same stream.
TrappedRandomDraw trapped_random(const SpectralBasis& basis, const SharpConstants& consts, std::uint64_t seed,
                                 const TrappedRandomSpec& spec = {});

}  // namespace bhnls
