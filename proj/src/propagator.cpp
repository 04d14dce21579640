#include "bhnls/propagator.hpp"

#include <cmath>
#include <sstream>

namespace bhnls {

void validate(const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw Error(ErrorKind::InvalidParameter, "T must be positive");
  if (cfg.splitting != "strang") throw Error(ErrorKind::InvalidParameter, "unknown splitting '" + cfg.splitting + "'");
  const auto& g = cfg.guards;
  if (!(g.energy_drift > 0.0 && g.boundary_tail > 0.0 && g.overflow > 0.0 && g.concentration > 0.0))
    throw Error(ErrorKind::InvalidParameter, "guard tolerances must be positive");
  if (cfg.snapshot_stride < 0) throw Error(ErrorKind::InvalidParameter, "snapshot stride must be >= 0");
  if (!(cfg.diagnostics.eta > 0.0 && cfg.diagnostics.eta < 1.0))
    throw Error(ErrorKind::InvalidParameter, "eta must lie in (0, 1)");
}

RadialField linear_step(const RadialField& u, double t, const SpectralBasis& basis) {
  const RealVector& mu = basis.eigenvalues();
  ComplexVector c = basis.decompose(u);
  for (int k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, t * mu[k] * mu[k]);
  return basis.reconstruct(c);
}

namespace {

void nonlinear_inplace(ComplexVector& v, double t, double half_p, double overflow_guard) {
  for (int j = 0; j < v.size(); ++j) {
    const double a = std::pow(std::norm(v[j]), half_p);
    if (!(a <= overflow_guard)) {
      std::ostringstream os;
      os << "|u|^p = " << a << " at node " << j << " exceeds " << overflow_guard;
      throw Error(ErrorKind::Overflow, os.str());
    }
    v[j] *= std::polar(1.0, -a * t);
  }
}

}  // namespace

RadialField nonlinear_step(const RadialField& u, double t, int d, double overflow_guard) {
  ComplexVector v = u.values();
  nonlinear_inplace(v, t, 0.5 * nonlinearity_power(d), overflow_guard);
  return RadialField(u.grid(), std::move(v));
}

double h2_distance(const RadialField& a, const RadialField& b, const RadialOperators& ops) {
  require_same_grid(a.grid(), b.grid(), "h2_distance");
  return std::sqrt(ops.integrate(ops.laplacian(a.values() - b.values()).cwiseAbs2()));
}

Trajectory evolve(const RadialField& u0, const SolverConfig& cfg, const SpectralBasis& basis) {
  validate(cfg);
  require_same_grid(u0.grid(), basis.grid(), "evolve");
  const RadialOperators& ops = basis.ops();
  const int d = basis.grid().d;
  const double half_p = 0.5 * nonlinearity_power(d);
  const double h = basis.grid().h();
  const double dt = cfg.dt;
  const long steps = std::lround(std::ceil(cfg.T / dt - 1e-9));

  const RealVector& mu = basis.eigenvalues();
  ComplexVector phase(mu.size());
  for (int k = 0; k < mu.size(); ++k) phase[k] = std::polar(1.0, dt * mu[k] * mu[k]);

  Trajectory traj;
  RadialField u = u0;
  double S = 0.0;
  traj.diagnostics.push_back(measure(u, 0.0, S, basis, cfg.diagnostics));
  traj.times.push_back(0.0);
  traj.fields.push_back(u);
  const DiagnosticsRecord& first = traj.diagnostics.front();
  const double E0 = first.energy;
  const double wall0 = first.wall_fraction;

  auto trip = [&](const std::string& reason, double t) {
    traj.guard_tripped = true;
    traj.guard_reason = reason;
    traj.guard_time = t;
  };

  for (long s = 0; s < steps; ++s) {
    const double t_next = (s + 1) * dt;
    S += scattering_increment(u, dt, ops);
    ComplexVector v = u.values();
    ComplexVector c;
    try {
      nonlinear_inplace(v, 0.5 * dt, half_p, cfg.guards.overflow);
      c = basis.decompose(RadialField(u.grid(), v)).cwiseProduct(phase);
      v = basis.reconstruct(c).values();
      nonlinear_inplace(v, 0.5 * dt, half_p, cfg.guards.overflow);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Overflow) throw;
      trip("overflow", t_next);
      break;
    }
    u = RadialField(u.grid(), std::move(v));
    ++traj.steps;

    DiagnosticsRecord rec = measure(u, t_next, S, basis, cfg.diagnostics);
    const double drift = std::abs(rec.energy - E0) / std::max(1.0, std::abs(E0));
    const bool keep = cfg.snapshot_stride > 0 && (s + 1) % cfg.snapshot_stride == 0;
    traj.diagnostics.push_back(std::move(rec));
    const DiagnosticsRecord& r = traj.diagnostics.back();

    std::string reason;
    if (drift > cfg.guards.energy_drift) reason = "energy drift";
    else if (r.wall_fraction - wall0 > cfg.guards.boundary_tail) reason = "boundary tail";
    else if (r.N_t * h > cfg.guards.concentration) reason = "kinetic concentration";

    if (keep || s + 1 == steps || !reason.empty()) {
      traj.times.push_back(t_next);
      traj.fields.push_back(u);
    }
    if (!reason.empty()) {
      trip(reason, t_next);
      break;
    }
  }
  if (traj.times.back() != traj.diagnostics.back().t) {
    traj.times.push_back(traj.diagnostics.back().t);
    traj.fields.push_back(u);
  }
  return traj;
}

StabilityReport stability_experiment(const RadialField& u0, const RadialField& perturbation, const SolverConfig& cfg,
                                     const SpectralBasis& basis) {
  SolverConfig c = cfg;
  if (c.snapshot_stride == 0) c.snapshot_stride = 1;
  const Trajectory a = evolve(u0, c, basis);
  const Trajectory b = evolve(u0 + perturbation, c, basis);

  StabilityReport rep;
  rep.base_guard_tripped = a.guard_tripped;
  rep.perturbed_guard_tripped = b.guard_tripped;
  rep.base_guard_reason = a.guard_reason;
  rep.perturbed_guard_reason = b.guard_reason;
  const std::size_t m = std::min(a.times.size(), b.times.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double dist = h2_distance(a.fields[i], b.fields[i], basis.ops());
    rep.times.push_back(a.times[i]);
    rep.differences.push_back(dist);
    rep.sup_difference = std::max(rep.sup_difference, dist);
  }
  rep.initial_difference = rep.differences.empty() ? 0.0 : rep.differences.front();
  rep.ratio = rep.initial_difference > 0.0 ? rep.sup_difference / rep.initial_difference : 0.0;
  return rep;
}

}  // namespace bhnls
