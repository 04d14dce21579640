#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bhnls/grid.hpp"

namespace bhnls {

/// g_{theta,lambda}: f -> lambda^{-(d-4)/2} e^{i theta} f(r / lambda).
struct GroupElement {
  double theta = 0.0;
  double lambda = 1.0;

  void validate() const;
  /// (this * other) f = this(other(f)).
  GroupElement compose(const GroupElement& other) const;
  GroupElement inverse() const;
};

/// g e^{i t0 Lap^2}.
struct EnlargedElement {
  GroupElement base;
  double t0 = 0.0;
};

/// Samples g u on target_grid. u is extended evenly through the origin,
/// by zero beyond its wall, and interpolated with a cubic B-spline. Throws
/// SupportOverflow when more than tail_tolerance of the kinetic energy of u
/// lies beyond target.r_max / lambda.
RadialField apply(const GroupElement& g, const RadialField& u, const GridSpec& target_grid,
                  double tail_tolerance = 1e-4);

/// apply(g.base, linear_step(u, g.t0)); basis must live on the grid of u.
RadialField apply_enlarged(const EnlargedElement& g, const RadialField& u, const SpectralBasis& basis,
                           const GridSpec& target_grid, double tail_tolerance = 1e-4);
RadialField apply_enlarged(const EnlargedElement& g, const RadialField& u, const SpectralBasis& basis);

/// Rescales u so that its frequency scale becomes 1: applies g_{0, N_t}.
RadialField normalize_snapshot(const RadialField& u, double N_t, const SpectralBasis& basis);

/// lambda/lambda' + lambda'/lambda + |t lambda^4 - t' lambda'^4| / (lambda^2 lambda'^2).
double orthogonality_parameter(const EnlargedElement& a, const EnlargedElement& b);

struct DecouplingReport {
  bool applicable = false;
  std::string note;
  std::vector<double> divergence;  // orthogonality_parameter along the sequence
  std::vector<double> pairing;     // |<Lap g1 f1, Lap g2 f2>|
  bool monotone = false;
  double terminal_ratio = 0.0;     // pairing.front() / pairing.back()
  bool decays(double min_ratio = 4.0) const { return applicable && monotone && terminal_ratio >= min_ratio; }
};

/// Both sequences are applied on the grid of basis; f1 and f2 must live there.
/// Applicability: the orthogonality parameter increases strictly and grows at
/// least fourfold. Pairings are measured either way.
DecouplingReport decoupling_check(const std::vector<EnlargedElement>& g1, const std::vector<EnlargedElement>& g2,
                                  const RadialField& f1, const RadialField& f2, const SpectralBasis& basis);

struct KineticDecouplingReport {
  double total = 0.0;              // ||Lap u||^2
  double profile_sum = 0.0;        // sum ||Lap phi_j||^2 on the profile grids
  double remainder = 0.0;          // ||Lap w||^2
  double defect = 0.0;             // |total - profile_sum - remainder|
  double transformed_defect = 0.0; // total - sum ||Lap g_j phi_j||^2 - remainder
  double cross_terms = 0.0;        // 2 Re of all pairwise pairings
  double identity_residual = 0.0;  // |transformed_defect - cross_terms|
  double unitarity_residual = 0.0; // sum | ||Lap g_j phi_j||^2 - ||Lap phi_j||^2 |
  double min_divergence = 0.0;     // smallest pairwise orthogonality parameter
};

/// u = sum_j g_j phi_j + w on the grid of basis. Each phi_j needs a basis on
/// its own grid for the linear flow; a profile on the target grid reuses basis.
KineticDecouplingReport kinetic_decoupling_check(const std::vector<std::pair<EnlargedElement, RadialField>>& profiles,
                                                 const RadialField& remainder, const SpectralBasis& basis);

}  // namespace bhnls
