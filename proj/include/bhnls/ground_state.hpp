#pragma once

#include <string>

#include "bhnls/diagnostics.hpp"
#include "bhnls/grid.hpp"

namespace bhnls {

struct GroundStateParams {
  int d = 5;
  double theta = 0.0;
  double lambda = 1.0;
};

/// W(r) = ((d(d-4)(d^2-4))^{1/4} / (1+r^2))^{(d-4)/2}.
double w_profile(int d, double r);
/// Closed-form radial Laplacian of W.
double w_laplacian(int d, double r);

/// Samples of e^{i theta} lambda^{(d-4)/2} W(lambda r).
RadialField eval_W(const GroundStateParams& params, const GridSpec& grid);

/// W with its far field replaced, beyond r = fraction * r_max, by the
/// radial biharmonic function A + B r^2 + C r^{2-d} + D r^{4-d} that matches W and
/// W' at the junction and satisfies v = Lap v = 0 at r_max, blended in with a
/// C^3 step over half the remaining distance to the wall. Used as initial
/// data on a bounded domain, where the slowly decaying tail of W would
/// otherwise hit the wall.
RadialField boxed_W(const GroundStateParams& params, const GridSpec& grid, double fraction = 0.5);

struct SharpConstants {
  int d = 5;
  double two_sharp = 0.0;  // 2d/(d-4)
  double kinW = 0.0;       // int |Lap W|^2, grid part plus exterior tail
  double potW = 0.0;       // int |W|^{2#}, grid part plus exterior tail
  double EW = 0.0;         // kinW/2 - (d-4)/(2d) potW
  double Cd = 0.0;         // potW^{1/2#} / kinW^{1/2}
  double yC = 0.0;         // Cd^{-d/2}
  double EW_threshold = 0.0;  // f(yC) = (2/d) yC; the trapping thresholds use yC and this
  double kin_tail = 0.0;   // part of kinW from r >= r_max
  double pot_tail = 0.0;
};

/// Measures the constants from W on `grid`. The grid part uses the discrete
/// Laplacian with the exact wall value of W as ghost; the exterior part is the
/// closed-form integral over [r_max, inf). Throws ResolutionInsufficient if
/// EW/kinW misses 2/d by more than 1e-3.
SharpConstants sharp_constants(int d, const GridSpec& grid);

/// ||Lap_h^2 W - |W|^p W|| / || |W|^p W || in the weighted L2 norm, over nodes
/// not touched by the wall closure (the last two are excluded).
double elliptic_residual(const RadialField& W, const RadialOperators& ops);
double elliptic_residual(const RadialField& W);

double trap_f(double y, const SharpConstants& c);
double trap_g(double y, const SharpConstants& c);

/// 1 - y*/yC where y* in [0, yC) solves f(y*) = (1 - delta0) f(yC).
double delta_bar(double delta0, const SharpConstants& c);
/// min of g(y)/y over (0, (1 - delta_bar) yC]; the coercivity margin that
/// the kinetic bound certifies.
double delta_bar_g(double delta0, const SharpConstants& c);

struct TrappingReport {
  bool hypotheses_met = false;
  std::string hypotheses_note;
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double delta0 = 0.0;
  double delta_bar = 0.0;
  double delta_bar_g = 0.0;
  bool kinetic_bound = false;   // kinetic <= (1 - delta_bar) yC
  bool coercivity = false;      // kinetic - potential >= delta_bar_g kinetic
  bool energy_nonneg = false;   // E >= 0
  double kinetic_margin = 0.0;
  double coercivity_margin = 0.0;
  double energy_margin = 0.0;
  bool all() const { return kinetic_bound && coercivity && energy_nonneg; }
};

TrappingReport check_trapping(const RadialField& u, const SharpConstants& c, double delta0, const RadialOperators& ops);
TrappingReport check_trapping(const EnergyParts& e, const SharpConstants& c, double delta0);

}  // namespace bhnls
