#include "bhnls/ground_state.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bhnls {

namespace {

double w_amplitude(int d) { return std::pow(d * (d - 4.0) * (d * d - 4.0), (d - 4.0) / 8.0); }

double w_derivative(int d, double r) {
  return -w_amplitude(d) * (d - 4.0) * r * std::pow(1.0 + r * r, -(d - 2.0) / 2.0);
}

void check_params(const GroundStateParams& p) {
  if (p.d < 5) throw Error(ErrorKind::InvalidParameter, "ground state needs d >= 5");
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    throw Error(ErrorKind::InvalidParameter, "ground state scale must be positive");
}

double exterior_integral(const std::function<double(double)>& f, double a) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, std::numeric_limits<double>::infinity(), 20, 1e-13);
}

}  // namespace

double w_profile(int d, double r) { return w_amplitude(d) * std::pow(1.0 + r * r, -(d - 4.0) / 2.0); }

double w_laplacian(int d, double r) {
  // For (1+r^2)^{-a}: Lap = (1+r^2)^{-a-2} [4a(a+1) r^2 - 2ad(1+r^2)].
  const double a = (d - 4.0) / 2.0;
  const double s = 1.0 + r * r;
  return w_amplitude(d) * std::pow(s, -a - 2.0) * (4.0 * a * (a + 1.0) * r * r - 2.0 * a * d * s);
}

RadialField eval_W(const GroundStateParams& params, const GridSpec& grid) {
  check_params(params);
  if (params.d != grid.d) throw Error(ErrorKind::GridMismatch, "ground state dimension differs from grid dimension");
  const Complex phase = std::polar(1.0, params.theta) * std::pow(params.lambda, (params.d - 4.0) / 2.0);
  const double lam = params.lambda;
  const int d = params.d;
  return RadialField::sample(grid, [&](double r) { return phase * w_profile(d, lam * r); });
}

RadialField boxed_W(const GroundStateParams& params, const GridSpec& grid, double fraction) {
  check_params(params);
  if (params.d != grid.d) throw Error(ErrorKind::GridMismatch, "ground state dimension differs from grid dimension");
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorKind::InvalidParameter, "closure fraction must lie in (0,1)");
  const int d = params.d;
  const double lam = params.lambda;
  const double amp = std::pow(lam, (d - 4.0) / 2.0);
  const double a = fraction * grid.r_max;
  const double R = grid.r_max;

  // In x = r/r_max: v = A + B x^2 + C x^{2-d} + D x^{4-d}, Lap_x v = 2dB + 2(4-d) D x^{2-d}.
  const double xa = a / R;
  Eigen::Matrix4d M;
  Eigen::Vector4d rhs;
  M << 1.0, xa * xa, std::pow(xa, 2.0 - d), std::pow(xa, 4.0 - d),
      0.0, 2.0 * xa, (2.0 - d) * std::pow(xa, 1.0 - d), (4.0 - d) * std::pow(xa, 3.0 - d),
      1.0, 1.0, 1.0, 1.0,
      0.0, 2.0 * d, 0.0, 2.0 * (4.0 - d);
  rhs << amp * w_profile(d, lam * a), R * amp * lam * w_derivative(d, lam * a), 0.0, 0.0;
  const Eigen::Vector4d c = M.fullPivLu().solve(rhs);

  // Blend W into the closure with the C^3 step over [a, a + (r_max - a)/2], so Lap u has no jump.
  const double b = 0.5 * (R - a);
  const Complex phase = std::polar(1.0, params.theta);
  return RadialField::sample(grid, [&](double r) -> Complex {
    const double w = amp * w_profile(d, lam * r);
    if (r <= a) return phase * w;
    const double x = r / R;
    const double v = c[0] + c[1] * x * x + c[2] * std::pow(x, 2.0 - d) + c[3] * std::pow(x, 4.0 - d);
    const double chi = smoothstep7((r - a) / b);
    return phase * ((1.0 - chi) * w + chi * v);
  });
}

SharpConstants sharp_constants(int d, const GridSpec& grid) {
  if (d != grid.d) throw Error(ErrorKind::GridMismatch, "sharp_constants: dimension differs from grid dimension");
  RadialOperators ops(grid);
  const RadialField W = eval_W({d, 0.0, 1.0}, grid);
  const double q = critical_exponent(d);
  const double R = grid.r_max;
  const double area = sphere_area(d);

  const ComplexVector lap = ops.laplacian(W.values(), Complex(w_profile(d, R)));
  // Trapezoid end weight at r_max, then the exact exterior.
  const double end_w = 0.5 * area * std::pow(R, d - 1) * grid.h();
  const double kin_grid = ops.integrate(lap.cwiseAbs2()) + end_w * std::pow(w_laplacian(d, R), 2);
  const double pot_grid =
      ops.integrate(W.values().cwiseAbs().array().pow(q).matrix()) + end_w * std::pow(w_profile(d, R), q);

  SharpConstants c;
  c.d = d;
  c.two_sharp = q;
  c.kin_tail = exterior_integral([&](double r) { return area * std::pow(r, d - 1) * std::pow(w_laplacian(d, r), 2); }, R);
  c.pot_tail = exterior_integral([&](double r) { return area * std::pow(r, d - 1) * std::pow(w_profile(d, r), q); }, R);
  c.kinW = kin_grid + c.kin_tail;
  c.potW = pot_grid + c.pot_tail;
  c.EW = 0.5 * c.kinW - (d - 4.0) / (2.0 * d) * c.potW;
  c.Cd = std::pow(c.potW, 1.0 / q) / std::sqrt(c.kinW);
  c.yC = std::pow(c.Cd, -d / 2.0);
  c.EW_threshold = 2.0 / d * c.yC;

  const double ratio = c.EW / c.kinW;
  if (!std::isfinite(ratio) || std::abs(ratio - 2.0 / d) > 1e-3)
    throw Error(ErrorKind::ResolutionInsufficient,
                "E(W)/kin(W) = " + std::to_string(ratio) + " differs from 2/d by more than 1e-3");
  return c;
}

double elliptic_residual(const RadialField& W, const RadialOperators& ops) {
  require_same_grid(W.grid(), ops.grid(), "elliptic_residual");
  const int d = ops.grid().d;
  const ComplexVector bilap = ops.laplacian(ops.laplacian(W.values()));
  const RealVector mod = W.values().cwiseAbs();
  const ComplexVector rhs = (mod.array().pow(nonlinearity_power(d)).matrix().cast<Complex>()).cwiseProduct(W.values());
  const int m = ops.size() - 2;
  const RealVector& w = ops.weights();
  const double num = w.head(m).dot((bilap - rhs).head(m).cwiseAbs2());
  const double den = w.head(m).dot(rhs.head(m).cwiseAbs2());
  if (!(den > 0.0)) throw Error(ErrorKind::ZeroField, "elliptic residual of a zero field");
  return std::sqrt(num / den);
}

double elliptic_residual(const RadialField& W) { return elliptic_residual(W, RadialOperators(W.grid())); }

double trap_f(double y, const SharpConstants& c) {
  if (y < 0.0) throw Error(ErrorKind::NegativeArgument, "trap_f needs y >= 0");
  const int d = c.d;
  return 0.5 * y - (d - 4.0) / (2.0 * d) * std::pow(c.Cd, c.two_sharp) * std::pow(y, c.two_sharp / 2.0);
}

double trap_g(double y, const SharpConstants& c) {
  if (y < 0.0) throw Error(ErrorKind::NegativeArgument, "trap_g needs y >= 0");
  const int d = c.d;
  return y - std::pow(c.Cd, c.two_sharp) * std::pow(y, d / (d - 4.0));
}

double delta_bar(double delta0, const SharpConstants& c) {
  if (!(delta0 > 0.0 && delta0 <= 1.0)) throw Error(ErrorKind::InvalidParameter, "delta0 must lie in (0, 1]");
  const double target = (1.0 - delta0) * trap_f(c.yC, c);
  double lo = 0.0, hi = c.yC;
  if (!(trap_f(lo, c) <= target && trap_f(hi, c) >= target))
    throw Error(ErrorKind::RootBracketing, "f does not bracket the energy level on [0, yC]");
  for (int it = 0; it < 200 && hi - lo > 1e-14 * c.yC; ++it) {
    const double mid = 0.5 * (lo + hi);
    (trap_f(mid, c) < target ? lo : hi) = mid;
  }
  return 1.0 - 0.5 * (lo + hi) / c.yC;
}

double delta_bar_g(double delta0, const SharpConstants& c) {
  const double y = (1.0 - delta_bar(delta0, c)) * c.yC;
  if (y <= 0.0) return 1.0;  // g(y)/y -> g'(0) = 1
  // g(y)/y = 1 - Cd^{2#} y^{4/(d-4)} is decreasing, so the minimum sits at the right end.
  return trap_g(y, c) / y;
}

TrappingReport check_trapping(const EnergyParts& e, const SharpConstants& c, double delta0) {
  TrappingReport rep;
  rep.kinetic = e.kinetic;
  rep.potential = e.potential;
  rep.energy = e.energy;
  rep.delta0 = delta0;
  rep.delta_bar = delta_bar(delta0, c);
  rep.delta_bar_g = delta_bar_g(delta0, c);

  const bool below_kin = e.kinetic < c.yC;
  const bool below_energy = e.energy < (1.0 - delta0) * c.EW_threshold || e.kinetic == 0.0;
  rep.hypotheses_met = below_kin && below_energy;
  if (!below_kin) rep.hypotheses_note = "kinetic energy not below the ground-state threshold";
  else if (!below_energy) rep.hypotheses_note = "energy not below (1 - delta0) E(W)";

  rep.kinetic_margin = (1.0 - rep.delta_bar) * c.yC - e.kinetic;
  rep.coercivity_margin = (e.kinetic - e.potential) - rep.delta_bar_g * e.kinetic;
  rep.energy_margin = e.energy;
  rep.kinetic_bound = rep.kinetic_margin >= 0.0;
  rep.coercivity = rep.coercivity_margin >= 0.0;
  rep.energy_nonneg = rep.energy_margin >= 0.0;
  return rep;
}

TrappingReport check_trapping(const RadialField& u, const SharpConstants& c, double delta0,
                              const RadialOperators& ops) {
  return check_trapping(energy(u, ops), c, delta0);
}

}  // namespace bhnls
