#pragma once

#include <vector>

#include "bhnls/grid.hpp"

namespace bhnls {

enum class MultiplierKind { Smooth, Sharp };

/// Radial bump in the frequency variable: 1 on [0, 1], 0 beyond 11/10 (smooth
/// kind, C^3 monotone bridge), or the indicator of [0, 1] (sharp kind).
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::Smooth;
  double bump(double s) const;
};

/// P_N, P_{<=N}, P_{>=N} and the fattened P~_N = P_{N/2} + P_N + P_{2N}.
enum class Band { Shell, Low, High, Fattened };

/// Dyadic frequencies 2^j covering the eigenfrequencies of a basis: the lowest
/// level is the smallest power of two >= nu_1, the highest the smallest power
/// of two >= nu_n, so the sharp shells (N/2, N] partition the spectrum.
class DyadicLadder {
 public:
  static DyadicLadder for_basis(const SpectralBasis& basis);
  DyadicLadder(int lowest_exponent, int highest_exponent);

  const std::vector<double>& levels() const noexcept { return levels_; }
  double lowest() const { return levels_.front(); }
  double highest() const { return levels_.back(); }
  bool contains(double N) const;
  /// Levels without the lowest and the highest octave.
  std::vector<double> interior() const;

 private:
  std::vector<double> levels_;
};

/// Symbol of the projection at frequency nu.
double multiplier(double nu, double N, Band band, const MultiplierSpec& spec);

/// Multiplies c_k by the symbol at sqrt(mu_k). Throws OutOfRange if N is
/// outside the ladder of the basis.
RadialField project(const RadialField& u, double N, Band band, const MultiplierSpec& spec, const SpectralBasis& basis);
ComplexVector project_coefficients(const ComplexVector& coeffs, double N, Band band, const MultiplierSpec& spec,
                                   const SpectralBasis& basis);

/// Weighted discrete L^p norm; p = infinity gives the largest modulus.
double lp_norm(const ComplexVector& v, double p, const RadialOperators& ops);

struct BernsteinReport {
  double N = 0.0, p = 0.0, q = 0.0;
  double lhs = 0.0;  // ||P_N u||_q
  double rhs = 0.0;  // N^{d/p - d/q} ||P_N u||_p
  double ratio = 0.0;
};

BernsteinReport bernstein_check(const RadialField& u, double N, double p, double q, const SpectralBasis& basis,
                                const MultiplierSpec& spec = {});

/// ||Lap_h P_N u||_2 / (N^2 ||P_N u||_2).
double derivative_bernstein_ratio(const RadialField& u, double N, const SpectralBasis& basis,
                                  const MultiplierSpec& spec = {MultiplierKind::Sharp});

/// sup over the ladder of ||P_N Lap_h u||_2 with sharp shells.
double besov_sup_norm(const RadialField& u, const SpectralBasis& basis);

/// ||u||_{2#} / (||Lap_h u||_2^{(d-4)/d} * besov_sup_norm(u)^{4/d}).
double refined_sobolev_check(const RadialField& u, const SpectralBasis& basis);

}  // namespace bhnls
