#include "bhnls/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>

#include "bhnls/initial_data.hpp"

namespace bhnls {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Audits

ConservationAudit audit_conservation(const std::vector<DiagnosticsRecord>& records) {
  ConservationAudit a;
  if (records.empty()) return a;
  const double E0 = records.front().energy;
  const double M0 = records.front().mass;
  const double escale = std::abs(E0) > 0.0 ? std::abs(E0) : 1.0;
  const double mscale = M0 > 0.0 ? M0 : 1.0;
  for (const auto& r : records) {
    a.energy_drift = std::max(a.energy_drift, std::abs(r.energy - E0) / escale);
    a.mass_drift = std::max(a.mass_drift, std::abs(r.mass - M0) / mscale);
  }
  return a;
}

TrappingAudit audit_trapping(const std::vector<DiagnosticsRecord>& records, const SharpConstants& c, double delta0) {
  TrappingAudit a;
  a.min_kinetic_margin = a.min_coercivity_margin = a.min_energy_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const EnergyParts e{r.mass, r.kinetic, r.potential, r.energy};
    const TrappingReport t = check_trapping(e, c, delta0);
    if (i == 0) {
      a.hypotheses_met = t.hypotheses_met;
      a.note = t.hypotheses_note;
      a.delta_bar = t.delta_bar;
      a.delta_bar_g = t.delta_bar_g;
    }
    ++a.steps;
    if (!t.all()) ++a.violations;
    a.min_kinetic_margin = std::min(a.min_kinetic_margin, t.kinetic_margin);
    a.min_coercivity_margin = std::min(a.min_coercivity_margin, t.coercivity_margin);
    a.min_energy_margin = std::min(a.min_energy_margin, t.energy_margin);
  }
  return a;
}

namespace {

void require_virial(const std::vector<DiagnosticsRecord>& records) {
  for (const auto& r : records)
    if (r.virial_main.size() != r.z_R.size() || r.dM_R.size() != r.M_R.size())
      throw Error(ErrorKind::InvalidParameter, "records were measured without virial terms");
}

double centered(const std::vector<DiagnosticsRecord>& rec, std::size_t i, std::size_t k, double dt, bool z) {
  const double a = z ? rec[i + 1].z_R[k] : rec[i + 1].M_R[k];
  const double b = z ? rec[i - 1].z_R[k] : rec[i - 1].M_R[k];
  return (a - b) / (2.0 * dt);
}

}  // namespace

VirialAudit audit_virial(const std::vector<DiagnosticsRecord>& records, double dt, double delta_bar, double K0,
                         const std::vector<double>& envelope, const VirialAuditParams& p) {
  require_virial(records);
  VirialAudit a;
  a.worst_ratio = a.min_coercive_ratio = std::numeric_limits<double>::infinity();
  if (records.size() < 3) return a;
  const std::size_t nR = records.front().z_R.size();
  if (envelope.size() != nR) throw Error(ErrorKind::InvalidParameter, "one envelope value per radius is needed");
  const double coercive_scale = delta_bar * K0;

  for (std::size_t k = 0; k < nR; ++k) {
    double fd_max = 0.0;
    for (std::size_t i = 1; i + 1 < records.size(); ++i) fd_max = std::max(fd_max, std::abs(centered(records, i, k, dt, false)));
    for (std::size_t i = 1; i + 1 < records.size(); ++i) {
      const DiagnosticsRecord& r = records[i];
      const double fdm = centered(records, i, k, dt, false);
      if (std::abs(fdm) > p.noise_floor * fd_max && fd_max > 0.0) {
        ++a.mass_pairs;
        const double rel = std::abs(r.dM_R[k] - fdm) / std::abs(fdm);
        a.mass_max_rel = std::max(a.mass_max_rel, rel);
        if (rel <= p.mass_tol) ++a.mass_ok;
      }
      if (!(r.tail_kinetic_fraction[k] < p.tail)) continue;
      ++a.admissible;
      const double fdz = centered(records, i, k, dt, true);
      if (fdz >= r.virial_main[k] - p.kappa * r.virial_budget[k]) ++a.inequality_ok;
      if (r.virial_budget[k] > 0.0) a.worst_ratio = std::min(a.worst_ratio, (fdz - r.virial_main[k]) / r.virial_budget[k]);
      const double cr = fdz / coercive_scale;
      a.min_coercive_ratio = std::min(a.min_coercive_ratio, cr);
      if (cr >= p.coercivity_constant) ++a.coercive_ok;
    }
    for (const auto& r : records)
      if (envelope[k] > 0.0) a.z_max_ratio = std::max(a.z_max_ratio, std::abs(r.z_R[k]) / envelope[k]);
  }
  a.inequality_fraction = a.admissible ? static_cast<double>(a.inequality_ok) / a.admissible : 0.0;
  a.coercive_fraction = a.admissible ? static_cast<double>(a.coercive_ok) / a.admissible : 0.0;
  a.inequality_pass = a.admissible > 0 && a.inequality_fraction >= p.fraction;
  a.coercive_pass = a.admissible > 0 && a.coercive_fraction >= p.coercivity_fraction;
  a.mass_pass = a.mass_pairs > 0 && a.mass_ok == a.mass_pairs;
  a.z_pass = a.z_max_ratio <= p.z_factor;
  return a;
}

double calibrate_kappa(const std::vector<DiagnosticsRecord>& records, double dt, double tail) {
  require_virial(records);
  double kappa = 0.0;
  if (records.size() < 3) return kappa;
  const std::size_t nR = records.front().z_R.size();
  for (std::size_t k = 0; k < nR; ++k)
    for (std::size_t i = 1; i + 1 < records.size(); ++i) {
      const DiagnosticsRecord& r = records[i];
      if (!(r.tail_kinetic_fraction[k] < tail) || !(r.virial_budget[k] > 0.0)) continue;
      kappa = std::max(kappa, (r.virial_main[k] - centered(records, i, k, dt, true)) / r.virial_budget[k]);
    }
  return kappa;
}

std::vector<double> z_envelope(const RadialField& u, const std::vector<double>& radii, const CutoffProfile& cutoff,
                               const RadialOperators& ops) {
  const RealVector m = u.abs2();
  const RealVector g = ops.gradient(u.values()).cwiseAbs2();
  std::vector<double> out;
  for (double R : radii) {
    const double rho = cutoff.outer() * R;
    out.push_back(rho * std::sqrt(ops.integrate_range(m, 0.0, rho) * ops.integrate_range(g, 0.0, rho)));
  }
  return out;
}

const SharpConstants& reference_constants(int d) {
  static std::mutex mu;
  static std::map<int, SharpConstants> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, sharp_constants(d, build_grid(d, 60.0, 3000))).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Frequency suite

std::vector<NamedField> lp_corpus(const SpectralBasis& basis) {
  const GridSpec& g = basis.grid();
  std::vector<NamedField> out;
  char name[64];
  for (double w : {0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    std::snprintf(name, sizeof name, "gaussian_w%g", w);
    out.push_back({name, gaussian(g, 1.0, w)});
  }
  const RadialField base = gaussian(g, 1.0, 1.0);
  for (double l : {0.25, 0.5, 2.0, 4.0}) {
    std::snprintf(name, sizeof name, "rescaled_l%g", l);
    out.push_back({name, apply(GroupElement{0.7, l}, base, g)});
  }
  const RealVector& nu = basis.frequencies();
  const double top = nu[nu.size() - 1];
  for (int s = 0; s < 10; ++s) {
    const double lo = std::pow(2.0, -0.5 * s) * top / 4.0;
    const RadialField noise = band_limited_noise(basis, static_cast<std::uint64_t>(s), lo, std::min(2.0 * lo, top));
    ComplexVector v = noise.values();
    for (int j = 0; j < v.size(); ++j) v[j] *= std::exp(-std::pow(g.node(j) * lo / 4.0, 2));
    std::snprintf(name, sizeof name, "noise_s%d", s);
    out.push_back({name, RadialField(g, std::move(v))});
  }
  for (double l : {0.25, 0.5, 1.0, 2.0}) {
    std::snprintf(name, sizeof name, "W_l%g", l);
    out.push_back({name, boxed_W({g.d, 0.0, l}, g, 0.3)});
  }
  for (double w : {0.7, 1.2, 2.5, 3.5}) {
    std::snprintf(name, sizeof name, "gaussian_phase_w%g", w);
    out.push_back({name, gaussian(g, 1.0, w) * std::polar(1.0, 1.3)});
  }
  return out;
}

LpSuiteReport lp_suite_report(const SpectralBasis& basis, const std::vector<NamedField>& corpus, double significance) {
  const DyadicLadder ladder = DyadicLadder::for_basis(basis);
  const RadialOperators& ops = basis.ops();
  const int d = basis.grid().d;
  const MultiplierSpec smooth{MultiplierKind::Smooth};
  struct Pair {
    double p, q;
    bool gated;
  };
  const std::vector<Pair> pairs = {{2.0, std::numeric_limits<double>::infinity(), true},
                                   {2.0, 4.0, true},
                                   {2.0, critical_exponent(d), true},
                                   {1.0, 2.0, false},
                                   {1.0, std::numeric_limits<double>::infinity(), false}};
  LpSuiteReport rep;
  for (const auto& pr : pairs) {
    BernsteinSpread s;
    s.p = pr.p;
    s.q = pr.q;
    s.gated = pr.gated;
    s.min = std::numeric_limits<double>::infinity();
    rep.spreads.push_back(s);
  }
  rep.derivative_min = std::numeric_limits<double>::infinity();

  for (const auto& [name, f] : corpus) {
    const ComplexVector c = basis.decompose(f);
    double biggest = 0.0;
    for (double N : ladder.levels())
      biggest = std::max(biggest, project_coefficients(c, N, Band::Shell, smooth, basis).norm());
    for (double N : ladder.interior()) {
      const ComplexVector pc = project_coefficients(c, N, Band::Shell, smooth, basis);
      if (pc.norm() < significance * biggest) continue;
      const ComplexVector pn = basis.reconstruct(pc).values();
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double qpart = std::isinf(pairs[k].q) ? 0.0 : d / pairs[k].q;
        const double ratio =
            lp_norm(pn, pairs[k].q, ops) / (std::pow(N, d / pairs[k].p - qpart) * lp_norm(pn, pairs[k].p, ops));
        BernsteinSpread& s = rep.spreads[k];
        ++s.samples;
        char where[96];
        std::snprintf(where, sizeof where, "%s@N=%g", name.c_str(), N);
        if (ratio < s.min) s.min = ratio, s.argmin = where;
        if (ratio > s.max) s.max = ratio, s.argmax = where;
      }
    }
    for (double N : ladder.levels()) {
      try {
        const double r = derivative_bernstein_ratio(f, N, basis);
        rep.derivative_min = std::min(rep.derivative_min, r);
        rep.derivative_max = std::max(rep.derivative_max, r);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroField) throw;
      }
    }
    const double r = refined_sobolev_check(f, basis);
    if (r > rep.refined_max || rep.refined_argmax.empty()) rep.refined_max = r, rep.refined_argmax = name;
    if (name.rfind("W_l1", 0) == 0 && name.size() == 4) rep.refined_W = r;
  }
  for (auto& s : rep.spreads) s.spread = s.samples ? s.max / s.min : std::numeric_limits<double>::infinity();
  rep.refined_finite = std::isfinite(rep.refined_max);

  const RadialField base = gaussian(basis.grid(), 1.0, 1.0);
  rep.scaling_lambdas = {0.25, 1.0, 4.0};
  for (double l : rep.scaling_lambdas) rep.scaling_ratios.push_back(refined_sobolev_check(apply(GroupElement{0.0, l}, base, basis.grid()), basis));
  const auto [lo, hi] = std::minmax_element(rep.scaling_ratios.begin(), rep.scaling_ratios.end());
  rep.scaling_variation = *hi / *lo - 1.0;

  // Six octaves: sum_k 2^{-k} phi_{n_k} with n_k the first mode of successive
  // interior shells, against the single mode phi_{n_0} scaled to equal H^2 norm.
  const std::vector<double> interior = ladder.interior();
  const RealVector& nu = basis.frequencies();
  const RealVector& mu = basis.eigenvalues();
  ComplexVector spread = ComplexVector::Zero(basis.size());
  int first = -1;
  const std::size_t start = interior.size() > 6 ? interior.size() - 6 : 0;
  for (std::size_t k = start; k < interior.size(); ++k) {
    int m = 0;
    while (m < basis.size() && nu[m] <= 0.5 * interior[k]) ++m;
    if (m >= basis.size()) break;
    if (first < 0) first = m;
    spread[m] = std::pow(2.0, -static_cast<double>(k - start)) / mu[m];
  }
  const RadialField spread_field = basis.reconstruct(spread);
  ComplexVector single = ComplexVector::Zero(basis.size());
  single[first] = spread.cwiseProduct(mu.cast<Complex>()).norm() / mu[first];
  rep.spread_field_ratio = refined_sobolev_check(spread_field, basis);
  rep.single_shell_ratio = refined_sobolev_check(basis.reconstruct(single), basis);
  return rep;
}

DecouplingSuiteReport decoupling_suite(const SpectralBasis& basis, int steps, double width) {
  const RadialField f = gaussian(basis.grid(), 1.0, width);
  DecouplingSuiteReport rep;
  std::vector<EnlargedElement> a, b;
  for (int n = 0; n < steps; ++n) {
    rep.ladder.push_back(std::pow(2.0, n));
    a.push_back({{0.0, std::pow(2.0, -0.5 * n)}, 0.0});
    b.push_back({{0.0, std::pow(2.0, 0.5 * n)}, 0.0});
  }
  rep.pairing = decoupling_check(a, b, f, f, basis);
  rep.defect_monotone = true;
  for (int n = 0; n < steps; ++n) {
    rep.kinetic.push_back(kinetic_decoupling_check({{a[n], f}, {b[n], f}}, RadialField::zeros(basis.grid()), basis));
    const auto& k = rep.kinetic.back();
    rep.max_identity_residual = std::max(rep.max_identity_residual, k.identity_residual / k.total);
    if (n > 0 && std::abs(k.transformed_defect) > std::abs(rep.kinetic[n - 1].transformed_defect))
      rep.defect_monotone = false;
  }
  return rep;
}

DecouplingReport time_divergent_check(const SpectralBasis& basis, int steps, double width) {
  const RadialField f = gaussian(basis.grid(), 1.0, width);
  std::vector<EnlargedElement> c, e;
  for (int n = 0; n < steps; ++n) {
    c.push_back({{0.0, 1.0}, 0.0});
    e.push_back({{0.0, 1.0}, 0.05 * std::pow(2.0, n)});
  }
  return decoupling_check(c, e, f, f, basis);
}

// ---------------------------------------------------------------------------
// Runs

namespace {

class Checks {
 public:
  explicit Checks(RunSummary& s) : s_(s) {}
  void add(std::string id, int criterion, double measured, const std::string& rel, double threshold,
           std::string note = {}) {
    CheckResult c;
    c.id = std::move(id);
    c.criterion = criterion;
    c.measured = measured;
    c.relation = rel;
    c.threshold = threshold;
    c.note = std::move(note);
    c.passed = rel == "<=" ? measured <= threshold : rel == ">=" ? measured >= threshold : measured == threshold;
    s_.checks.push_back(std::move(c));
  }

 private:
  RunSummary& s_;
};

std::vector<double> column(const std::vector<DiagnosticsRecord>& rec, double DiagnosticsRecord::*field) {
  std::vector<double> out;
  for (const auto& r : rec) out.push_back(r.*field);
  return out;
}

std::vector<double> column(const std::vector<DiagnosticsRecord>& rec, std::vector<double> DiagnosticsRecord::*field,
                           std::size_t k) {
  std::vector<double> out;
  for (const auto& r : rec) out.push_back((r.*field)[k]);
  return out;
}

void write_plots(const fs::path& dir, const std::vector<DiagnosticsRecord>& rec, const std::vector<double>& radii,
                 std::vector<std::string>& files) {
  fs::create_directories(dir / "plots");
  const std::vector<double> t = column(rec, &DiagnosticsRecord::t);
  auto emit = [&](const std::string& file, const std::string& title, std::vector<Series> series, bool log_y = false) {
    const fs::path p = dir / "plots" / file;
    write_svg_plot(p.string(), title, "t", t, series, log_y);
    files.push_back(fs::relative(p, dir).string());
  };
  emit("energy.svg", "energy", {{"E", column(rec, &DiagnosticsRecord::energy)}});
  emit("kinetic_potential.svg", "kinetic and potential energy",
       {{"kinetic", column(rec, &DiagnosticsRecord::kinetic)}, {"potential", column(rec, &DiagnosticsRecord::potential)}});
  emit("mass.svg", "mass", {{"mass", column(rec, &DiagnosticsRecord::mass)}});
  emit("N_t.svg", "frequency scale N(t)", {{"N_t", column(rec, &DiagnosticsRecord::N_t)}});
  emit("S_accum.svg", "accumulated scattering size", {{"S", column(rec, &DiagnosticsRecord::S_accum)}});
  if (radii.empty()) return;
  std::vector<Series> m, z, tail;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    char lab[32];
    std::snprintf(lab, sizeof lab, "R=%g", radii[k]);
    m.push_back({lab, column(rec, &DiagnosticsRecord::M_R, k)});
    z.push_back({lab, column(rec, &DiagnosticsRecord::z_R, k)});
    tail.push_back({lab, column(rec, &DiagnosticsRecord::tail_kinetic_fraction, k)});
  }
  emit("M_R.svg", "localized mass", m);
  emit("z_R.svg", "virial functional", z);
  emit("tail.svg", "kinetic tail fraction", tail, true);
}

void conservation_checks(Checks& checks, const ExperimentConfig& cfg, const std::vector<DiagnosticsRecord>& rec,
                         nlohmann::ordered_json& metrics) {
  const ConservationAudit c = audit_conservation(rec);
  metrics["energy_drift"] = c.energy_drift;
  metrics["mass_drift"] = c.mass_drift;
  checks.add("energy_drift", 3, c.energy_drift, "<=", cfg.energy_tol);
  checks.add("mass_drift", 3, c.mass_drift, "<=", cfg.mass_tol);
}

void record_trajectory(RunOutput& out, Trajectory&& traj) {
  out.summary.steps = traj.steps;
  out.summary.guard_tripped = traj.guard_tripped;
  out.summary.guard_reason = traj.guard_reason;
  out.summary.guard_time = traj.guard_time;
  out.records = std::move(traj.diagnostics);
  out.times = std::move(traj.times);
  out.fields = std::move(traj.fields);
}

double h2_norm(const RadialField& u, const RadialOperators& ops) { return ops.norm(ops.laplacian(u.values())); }

}  // namespace

RunOutput run_scenario(const ExperimentConfig& cfg, bool write_files) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  RunSummary& S = out.summary;
  S.scenario = to_string(cfg.scenario);
  S.demo = is_demo(cfg.scenario);
  S.config = echo(cfg);
  Checks checks(S);
  auto& M = S.metrics;

  const GridSpec grid = build_grid(cfg.d, cfg.r_max, cfg.n);
  const SpectralBasis basis(grid);
  const RadialOperators& ops = basis.ops();
  const SolverConfig solver = cfg.solver_config();
  std::vector<Column> extras;
  std::vector<Column> side_table;
  std::string side_name;

  switch (cfg.scenario) {
    case Scenario::stationary_ground_state: {
      const RadialField W = boxed_W({cfg.d, cfg.w_theta, cfg.w_lambda}, grid, cfg.w_closure);
      const RadialField u0 = cfg.w_amplitude * W;
      M["elliptic_residual"] = elliptic_residual(W, ops);
      record_trajectory(out, evolve(u0, solver, basis));
      const double ref = h2_norm(u0, ops);
      std::vector<double> dev;
      for (const auto& f : out.fields) dev.push_back(h2_distance(f, u0, ops) / ref);
      M["h2_deviation_sup"] = *std::max_element(dev.begin(), dev.end());
      M["h2_deviation_final"] = dev.back();
      side_name = "h2_deviation.csv";
      side_table = {{"t", out.times}, {"h2_deviation", dev}};
      conservation_checks(checks, cfg, out.records, M);
      break;
    }
    case Scenario::small_data_scattering: {
      const RadialField u0 = gaussian(grid, cfg.gauss_amplitude, cfg.gauss_width);
      record_trajectory(out, evolve(u0, solver, basis));
      M["S_total"] = out.records.back().S_accum;
      checks.add("guard_free", 9, S.guard_tripped ? 0.0 : 1.0, ">=", 1.0, S.guard_reason);
      conservation_checks(checks, cfg, out.records, M);
      break;
    }
    case Scenario::trapped_random:
    case Scenario::virial_audit: {
      const SharpConstants& c = reference_constants(cfg.d);
      const TrappedRandomDraw draw = trapped_random(basis, c, cfg.seed, cfg.random);
      M["draw"] = {{"attempts", draw.attempts}, {"kinetic_fraction", draw.kinetic_fraction}, {"lambda", draw.lambda},
                   {"width", draw.width}, {"theta", draw.theta}, {"noise_share", draw.noise_share}};
      record_trajectory(out, evolve(draw.field, solver, basis));
      const TrappingAudit t = audit_trapping(out.records, c, cfg.random.delta0);
      M["delta_bar"] = t.delta_bar;
      M["delta_bar_g"] = t.delta_bar_g;
      M["min_kinetic_margin"] = t.min_kinetic_margin;
      M["min_coercivity_margin"] = t.min_coercivity_margin;
      M["min_energy_margin"] = t.min_energy_margin;
      checks.add("trapping_hypotheses", 2, t.hypotheses_met ? 1.0 : 0.0, ">=", 1.0, t.note);
      checks.add("trapping_violations", 2, t.violations, "<=", 0.0);
      conservation_checks(checks, cfg, out.records, M);
      if (cfg.scenario == Scenario::virial_audit) {
        const CutoffProfile cut(cfg.cutoff_inner, cfg.cutoff_outer);
        const std::vector<double> env = z_envelope(draw.field, cfg.radii, cut, ops);
        VirialAuditParams p;
        p.kappa = cfg.virial_kappa;
        p.tail = cfg.virial_tail;
        p.fraction = cfg.virial_fraction;
        p.mass_tol = cfg.mass_identity_tol;
        p.noise_floor = cfg.mass_noise_floor;
        p.coercivity_constant = cfg.coercivity_constant;
        p.coercivity_fraction = cfg.coercivity_fraction;
        p.z_factor = cfg.z_envelope_factor;
        const VirialAudit v = audit_virial(out.records, cfg.dt, t.delta_bar, out.records.front().kinetic, env, p);
        M["virial"] = {{"admissible_pairs", v.admissible}, {"worst_ratio", v.worst_ratio},
                       {"kappa_needed", calibrate_kappa(out.records, cfg.dt, cfg.virial_tail)},
                       {"mass_pairs", v.mass_pairs}, {"mass_max_rel", v.mass_max_rel},
                       {"min_coercive_ratio", v.min_coercive_ratio}, {"z_max_ratio", v.z_max_ratio}};
        checks.add("virial_inequality_fraction", 5, v.inequality_fraction, ">=", cfg.virial_fraction);
        checks.add("mass_identity_max_rel", 5, v.mass_max_rel, "<=", cfg.mass_identity_tol);
        checks.add("coercivity_fraction", 6, v.coercive_fraction, ">=", cfg.coercivity_fraction);
        checks.add("z_envelope_ratio", 6, v.z_max_ratio, "<=", cfg.z_envelope_factor);
        for (std::size_t k = 0; k < cfg.radii.size(); ++k) {
          char lab[32];
          std::snprintf(lab, sizeof lab, "@%g", cfg.radii[k]);
          extras.push_back({std::string("dM_R") + lab, column(out.records, &DiagnosticsRecord::dM_R, k)});
          extras.push_back({std::string("virial_main") + lab, column(out.records, &DiagnosticsRecord::virial_main, k)});
          extras.push_back({std::string("virial_budget") + lab, column(out.records, &DiagnosticsRecord::virial_budget, k)});
        }
      }
      break;
    }
    case Scenario::above_threshold_demo: {
      const RadialField u0 = cfg.w_amplitude * boxed_W({cfg.d, cfg.w_theta, cfg.w_lambda}, grid, cfg.w_closure);
      const SharpConstants& c = reference_constants(cfg.d);
      const EnergyParts e0 = energy(u0, ops);
      M["kinetic_over_yC"] = e0.kinetic / c.yC;
      M["energy_over_EW"] = e0.energy / c.EW_threshold;
      record_trajectory(out, evolve(u0, solver, basis));
      const std::vector<double> N = column(out.records, &DiagnosticsRecord::N_t);
      M["N_initial"] = N.front();
      M["N_final"] = N.back();
      M["N_nondecreasing"] = std::is_sorted(N.begin(), N.end());
      break;
    }
    case Scenario::stability_perturbation: {
      const RadialField W = boxed_W({cfg.d, cfg.w_theta, cfg.w_lambda}, grid, cfg.w_closure);
      const RadialField du = gaussian(grid, cfg.perturbation_amplitude, cfg.perturbation_width);
      const StabilityReport st = stability_experiment(cfg.w_amplitude * W, du, solver, basis);
      M["initial_difference"] = st.initial_difference;
      M["sup_difference"] = st.sup_difference;
      M["ratio"] = st.ratio;
      if (st.base_guard_tripped || st.perturbed_guard_tripped) {
        S.guard_tripped = true;
        S.guard_reason = st.base_guard_tripped ? st.base_guard_reason : st.perturbed_guard_reason;
      }
      side_name = "stability.csv";
      side_table = {{"t", st.times}, {"h2_difference", st.differences}};
      SolverConfig one = solver;
      record_trajectory(out, evolve(cfg.w_amplitude * W + du, one, basis));
      break;
    }
    case Scenario::linear_dispersion: {
      const RadialField u0 = gaussian(grid, cfg.gauss_amplitude, cfg.gauss_width);
      const DiagnosticsConfig dc = cfg.diagnostics_config();
      const long steps = std::lround(std::ceil(cfg.T / cfg.dt - 1e-9));
      const RealVector& mu = basis.eigenvalues();
      ComplexVector phase(mu.size());
      for (int k = 0; k < mu.size(); ++k) phase[k] = std::polar(1.0, cfg.dt * mu[k] * mu[k]);
      ComplexVector c = basis.decompose(u0);
      out.records.push_back(measure(u0, 0.0, 0.0, basis, dc, &c));
      out.times.push_back(0.0);
      out.fields.push_back(u0);
      for (long s = 1; s <= steps; ++s) {
        c = c.cwiseProduct(phase);
        const RadialField u = basis.reconstruct(c);
        out.records.push_back(measure(u, s * cfg.dt, 0.0, basis, dc, &c));
        if (s == steps) out.times.push_back(s * cfg.dt), out.fields.push_back(u);
      }
      S.steps = static_cast<int>(steps);
      // log-log slope of max|u| over the second half of the run
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int m = 0;
      for (const auto& r : out.records)
        if (r.t >= 0.5 * cfg.T && r.t > 0.0) {
          const double x = std::log(r.t), y = std::log(r.max_abs);
          sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
        }
      M["sup_decay_exponent"] = m > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
      M["dispersive_exponent"] = -cfg.d / 4.0;
      const ConservationAudit a = audit_conservation(out.records);
      double kin_drift = 0.0;
      for (const auto& r : out.records)
        kin_drift = std::max(kin_drift, std::abs(r.kinetic - out.records[0].kinetic) / out.records[0].kinetic);
      M["mass_drift"] = a.mass_drift;
      M["kinetic_drift"] = kin_drift;
      extras.push_back({"max_abs", column(out.records, &DiagnosticsRecord::max_abs)});
      break;
    }
    case Scenario::lp_suite: {
      const LpSuiteReport lp = lp_suite_report(basis, lp_corpus(basis));
      auto& sp = M["bernstein"] = nlohmann::ordered_json::array();
      for (const auto& s : lp.spreads) {
        sp.push_back({{"p", s.p}, {"q", std::isinf(s.q) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(s.q)},
                      {"gated", s.gated}, {"samples", s.samples}, {"min", s.min}, {"max", s.max},
                      {"spread", s.spread}, {"argmin", s.argmin}, {"argmax", s.argmax}});
        char id[64];
        if (s.gated) {
          std::snprintf(id, sizeof id, "bernstein_spread_p%g_q%s", s.p, std::isinf(s.q) ? "inf" : format_number(s.q).c_str());
          checks.add(id, 7, s.spread, "<=", 50.0);
        }
      }
      M["derivative_ratio"] = {lp.derivative_min, lp.derivative_max};
      M["refined_max"] = lp.refined_max;
      M["refined_argmax"] = lp.refined_argmax;
      M["refined_W"] = lp.refined_W;
      M["refined_scaling"] = lp.scaling_ratios;
      M["refined_spread_field"] = lp.spread_field_ratio;
      M["refined_single_shell"] = lp.single_shell_ratio;
      checks.add("derivative_ratio_min", 7, lp.derivative_min, ">=", 0.2);
      checks.add("derivative_ratio_max", 7, lp.derivative_max, "<=", 5.0);
      checks.add("refined_finite", 7, lp.refined_finite ? 1.0 : 0.0, ">=", 1.0);
      checks.add("refined_scaling_variation", 7, lp.scaling_variation, "<=", 0.03);

      const DecouplingSuiteReport dec = decoupling_suite(basis);
      M["decoupling_pairing"] = dec.pairing.pairing;
      std::vector<double> defects;
      for (const auto& k : dec.kinetic) defects.push_back(k.transformed_defect);
      M["decoupling_defect"] = defects;
      const DecouplingReport td = time_divergent_check(SpectralBasis(build_grid(cfg.d, 120.0, 3000)));
      M["time_divergent_pairing"] = td.pairing;
      M["time_divergent_applicable"] = td.applicable;
      checks.add("decoupling_terminal_ratio", 8, dec.pairing.decays() ? dec.pairing.terminal_ratio : 0.0, ">=", 4.0,
                 dec.pairing.note);
      checks.add("defect_monotone", 8, dec.defect_monotone ? 1.0 : 0.0, ">=", 1.0);
      checks.add("defect_identity_residual", 8, dec.max_identity_residual, "<=", 1e-10);
      break;
    }
  }

  if (write_files) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    if (!out.records.empty()) {
      write_timeseries_csv((dir / "timeseries.csv").string(), out.records, cfg.radii, extras);
      S.files.push_back("timeseries.csv");
      if (cfg.plots) write_plots(dir, out.records, cfg.radii, S.files);
    }
    if (!side_table.empty()) {
      write_table_csv((dir / side_name).string(), side_table);
      S.files.push_back(side_name);
    }
    S.files.push_back("summary.json");
  }
  S.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (write_files) write_json((fs::path(cfg.out_dir) / "summary.json").string(), to_json(S));
  return out;
}

RunSummary run(const ExperimentConfig& cfg) { return run_scenario(cfg, true).summary; }

}  // namespace bhnls
