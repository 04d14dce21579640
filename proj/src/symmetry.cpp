#include "bhnls/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "bhnls/diagnostics.hpp"
#include "bhnls/propagator.hpp"

namespace bhnls {

void GroupElement::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidParameter, "group scale must be positive");
  if (!std::isfinite(theta)) throw Error(ErrorKind::InvalidParameter, "group phase must be finite");
}

GroupElement GroupElement::compose(const GroupElement& other) const {
  return GroupElement{theta + other.theta, lambda * other.lambda};
}

GroupElement GroupElement::inverse() const { return GroupElement{-theta, 1.0 / lambda}; }

namespace {

double kinetic_fraction_beyond(const RadialField& u, double cut) {
  const RadialOperators ops(u.grid());
  const RealVector dens = ops.laplacian(u.values()).cwiseAbs2();
  const double total = ops.integrate(dens);
  if (!(total > 0.0)) return 0.0;
  return ops.integrate_range(dens, cut, std::numeric_limits<double>::infinity()) / total;
}

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

}  // namespace

RadialField apply(const GroupElement& g, const RadialField& u, const GridSpec& target_grid, double tail_tolerance) {
  g.validate();
  const GridSpec& src = u.grid();
  if (target_grid.d != src.d) throw Error(ErrorKind::GridMismatch, "group action between different dimensions");
  const double cut = target_grid.r_max / g.lambda;
  if (cut < src.r_max) {
    const double lost = kinetic_fraction_beyond(u, cut);
    if (lost > tail_tolerance)
      throw Error(ErrorKind::SupportOverflow, "rescaled field leaves the target grid: kinetic fraction " +
                                                  std::to_string(lost) + " beyond r = " + std::to_string(cut));
  }

  const int n = src.n;
  std::vector<double> re(n + 2), im(n + 2);
  const Complex origin = (4.0 * u[0] - u[1]) / 3.0;
  re[0] = origin.real();
  im[0] = origin.imag();
  for (int j = 0; j < n; ++j) {
    re[j + 1] = u[j].real();
    im[j + 1] = u[j].imag();
  }
  re[n + 1] = im[n + 1] = 0.0;
  const Spline sre(re.data(), re.size(), 0.0, src.h(), 0.0);
  const Spline sim(im.data(), im.size(), 0.0, src.h(), 0.0);

  const Complex factor = std::pow(g.lambda, -0.5 * (src.d - 4)) * std::polar(1.0, g.theta);
  ComplexVector out(target_grid.n);
  for (int j = 0; j < target_grid.n; ++j) {
    const double s = target_grid.node(j) / g.lambda;
    out[j] = s >= src.r_max ? Complex(0.0) : factor * Complex(sre(s), sim(s));
  }
  return RadialField(target_grid, std::move(out));
}

RadialField apply_enlarged(const EnlargedElement& g, const RadialField& u, const SpectralBasis& basis,
                           const GridSpec& target_grid, double tail_tolerance) {
  require_same_grid(basis.grid(), u.grid(), "apply_enlarged");
  const RadialField moved = g.t0 == 0.0 ? u : linear_step(u, g.t0, basis);
  return apply(g.base, moved, target_grid, tail_tolerance);
}

RadialField apply_enlarged(const EnlargedElement& g, const RadialField& u, const SpectralBasis& basis) {
  return apply_enlarged(g, u, basis, basis.grid());
}

RadialField normalize_snapshot(const RadialField& u, double N_t, const SpectralBasis& basis) {
  if (u.is_zero()) throw Error(ErrorKind::ZeroField, "cannot normalise a zero field");
  if (!(N_t > 0.0) || !std::isfinite(N_t)) throw Error(ErrorKind::InvalidParameter, "frequency scale must be positive");
  require_same_grid(basis.grid(), u.grid(), "normalize_snapshot");
  // N(g_{0,lambda} u) = N(u) / lambda.
  return apply(GroupElement{0.0, N_t}, u, basis.grid());
}

double orthogonality_parameter(const EnlargedElement& a, const EnlargedElement& b) {
  a.base.validate();
  b.base.validate();
  const double l1 = a.base.lambda, l2 = b.base.lambda;
  const double l1sq = l1 * l1, l2sq = l2 * l2;
  return l1 / l2 + l2 / l1 + std::abs(a.t0 * l1sq * l1sq - b.t0 * l2sq * l2sq) / (l1sq * l2sq);
}

namespace {

Complex h2_pairing(const ComplexVector& a, const ComplexVector& b, const RadialOperators& ops) {
  return ops.inner(ops.laplacian(a), ops.laplacian(b));
}

}  // namespace

DecouplingReport decoupling_check(const std::vector<EnlargedElement>& g1, const std::vector<EnlargedElement>& g2,
                                  const RadialField& f1, const RadialField& f2, const SpectralBasis& basis) {
  DecouplingReport rep;
  if (g1.size() != g2.size() || g1.size() < 2) {
    rep.note = "sequences must have equal length >= 2";
    return rep;
  }
  for (std::size_t i = 0; i < g1.size(); ++i) rep.divergence.push_back(orthogonality_parameter(g1[i], g2[i]));
  bool increasing = true;
  for (std::size_t i = 1; i < rep.divergence.size(); ++i) increasing = increasing && rep.divergence[i] > rep.divergence[i - 1];
  rep.applicable = increasing && rep.divergence.back() >= 4.0 * rep.divergence.front();
  if (!rep.applicable) rep.note = "sequences are not diverging in the orthogonality parameter";
  const RadialOperators& ops = basis.ops();
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const RadialField a = apply_enlarged(g1[i], f1, basis);
    const RadialField b = apply_enlarged(g2[i], f2, basis);
    rep.pairing.push_back(std::abs(h2_pairing(a.values(), b.values(), ops)));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.pairing.size(); ++i) rep.monotone = rep.monotone && rep.pairing[i] <= rep.pairing[i - 1];
  rep.terminal_ratio = rep.pairing.back() > 0.0 ? rep.pairing.front() / rep.pairing.back()
                                                 : std::numeric_limits<double>::infinity();
  return rep;
}

KineticDecouplingReport kinetic_decoupling_check(const std::vector<std::pair<EnlargedElement, RadialField>>& profiles,
                                                 const RadialField& remainder, const SpectralBasis& basis) {
  require_same_grid(basis.grid(), remainder.grid(), "kinetic_decoupling_check");
  const RadialOperators& ops = basis.ops();
  KineticDecouplingReport rep;
  rep.min_divergence = std::numeric_limits<double>::infinity();

  std::vector<ComplexVector> lap;
  ComplexVector u = remainder.values();
  for (const auto& [g, phi] : profiles) {
    std::unique_ptr<SpectralBasis> own;
    const SpectralBasis* b = &basis;
    if (!(phi.grid() == basis.grid())) {
      if (g.t0 != 0.0) own = std::make_unique<SpectralBasis>(phi.grid());
      b = own.get();
    }
    const RadialField v = b ? apply_enlarged(g, phi, *b) : apply(g.base, phi, basis.grid());
    const RadialOperators phi_ops(phi.grid());
    const double k_phi = phi_ops.integrate(phi_ops.laplacian(phi.values()).cwiseAbs2());
    lap.push_back(ops.laplacian(v.values()));
    const double k_v = ops.integrate(lap.back().cwiseAbs2());
    rep.profile_sum += k_phi;
    rep.unitarity_residual += std::abs(k_v - k_phi);
    u += v.values();
  }
  for (std::size_t i = 0; i < profiles.size(); ++i)
    for (std::size_t j = i + 1; j < profiles.size(); ++j)
      rep.min_divergence = std::min(rep.min_divergence, orthogonality_parameter(profiles[i].first, profiles[j].first));

  const ComplexVector lap_w = ops.laplacian(remainder.values());
  rep.remainder = ops.integrate(lap_w.cwiseAbs2());
  rep.total = ops.integrate(ops.laplacian(u).cwiseAbs2());
  rep.defect = std::abs(rep.total - rep.profile_sum - rep.remainder);

  double transformed = 0.0;
  for (const auto& l : lap) transformed += ops.integrate(l.cwiseAbs2());
  rep.transformed_defect = rep.total - transformed - rep.remainder;

  double cross = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) {
    for (std::size_t j = i + 1; j < lap.size(); ++j) cross += 2.0 * ops.inner(lap[i], lap[j]).real();
    cross += 2.0 * ops.inner(lap[i], lap_w).real();
  }
  rep.cross_terms = cross;
  rep.identity_residual = std::abs(rep.transformed_defect - cross);
  return rep;
}

}  // namespace bhnls
