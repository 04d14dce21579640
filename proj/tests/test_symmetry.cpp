#include <doctest.h>

#include <cmath>

#include "bhnls/diagnostics.hpp"
#include "bhnls/initial_data.hpp"
#include "bhnls/propagator.hpp"
#include "bhnls/symmetry.hpp"

using namespace bhnls;

namespace {

double kinetic_norm(const RadialField& u) {
  const RadialOperators ops(u.grid());
  return ops.norm(ops.laplacian(u.values()));
}

}  // namespace

TEST_CASE("group element algebra") {
  const GroupElement a{0.3, 2.0}, b{-1.1, 0.25};
  const GroupElement ab = a.compose(b);
  CHECK(ab.theta == doctest::Approx(-0.8));
  CHECK(ab.lambda == doctest::Approx(0.5));
  const GroupElement e = a.compose(a.inverse());
  CHECK(e.lambda == doctest::Approx(1.0));
  CHECK(std::abs(std::remainder(e.theta, 2 * std::numbers::pi)) < 1e-15);
  CHECK_THROWS_AS((GroupElement{0.0, 0.0}).validate(), Error);
  CHECK_THROWS_AS((GroupElement{0.0, -1.0}).validate(), Error);
  CHECK_THROWS_AS((GroupElement{std::nan(""), 1.0}).validate(), Error);
}

TEST_CASE("identity element leaves the field unchanged") {
  const GridSpec g = build_grid(5, 30.0, 600);
  const SpectralBasis basis(g);
  const RadialField u = gaussian(g, 1.0, 2.0) + band_limited_noise(basis, 9, 0.2, 1.0) * Complex(0.1, 0.05);
  const RadialField v = apply({}, u, g);
  CHECK((v.values() - u.values()).cwiseAbs().maxCoeff() < 1e-12 * u.max_abs());
  const RadialField w = apply({1.3, 1.0}, u, g);
  CHECK((w.values() - u.values() * std::polar(1.0, 1.3)).cwiseAbs().maxCoeff() < 1e-12 * u.max_abs());
}

TEST_CASE("rescaling preserves the kinetic norm and the energy") {
  const GridSpec src = build_grid(5, 40.0, 1500);
  const RadialField u = gaussian(src, 0.8, 1.0);
  const double K = kinetic_norm(u);
  const EnergyParts E = energy(u, RadialOperators(src));
  for (double lambda : {0.125, 0.25, 0.5, 2.0, 4.0, 8.0}) {
    // target grid scaled with lambda so the profile keeps its resolution
    const GridSpec dst = build_grid(5, 40.0 * lambda, 1500);
    const RadialField v = apply({0.2, lambda}, u, dst);
    CHECK(std::abs(kinetic_norm(v) / K - 1.0) < 1e-3);
    const EnergyParts F = energy(v, RadialOperators(dst));
    CHECK(F.energy == doctest::Approx(E.energy).epsilon(2e-3));
    CHECK(F.mass == doctest::Approx(E.mass * std::pow(lambda, 4)).epsilon(1e-3));
  }
  // same grid: compression below 0.8 is limited by the resolution of the target grid
  for (double lambda : {0.8, 1.25, 2.0}) {
    const RadialField v = apply({0.0, lambda}, u, src);
    CHECK(std::abs(kinetic_norm(v) / K - 1.0) < 1e-3);
  }
}

TEST_CASE("composition law") {
  const GridSpec g = build_grid(5, 40.0, 1500);
  const RadialField u = gaussian(g, 1.0, 1.5) * std::polar(1.0, 0.2);
  const GroupElement g1{0.4, 1.6}, g2{-0.9, 0.7};
  const RadialField a = apply(g2, apply(g1, u, g), g);
  const RadialField b = apply(g2.compose(g1), u, g);
  const double tol = 2e-3 * kinetic_norm(b);
  CHECK(kinetic_norm(a - b) < tol);
}

TEST_CASE("support overflow") {
  const GridSpec g = build_grid(5, 30.0, 600);
  const RadialField u = gaussian(g, 1.0, 3.0);
  try {
    apply({0.0, 8.0}, u, g);
    FAIL("expected SupportOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SupportOverflow);
  }
  CHECK_NOTHROW(apply({0.0, 2.0}, u, g));
}

TEST_CASE("enlarged elements") {
  const GridSpec g = build_grid(5, 40.0, 800);
  const SpectralBasis basis(g);
  const RadialField u = gaussian(g, 1.0, 2.0);
  const GroupElement base{0.5, 1.5};
  const RadialField a = apply_enlarged({base, 0.0}, u, basis);
  const RadialField b = apply(base, u, g);
  CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() < 1e-14);

  const RadialField c = apply_enlarged({base, 0.05}, u, basis);
  CHECK(kinetic_norm(c) == doctest::Approx(kinetic_norm(u)).epsilon(1e-3));
  const RadialField d = apply_enlarged({base, 0.05}, u * std::polar(1.0, 0.8), basis);
  CHECK((d.values() - c.values() * std::polar(1.0, 0.8)).cwiseAbs().maxCoeff() < 1e-12 * c.max_abs());
}

TEST_CASE("normalized snapshots have unit frequency scale") {
  const GridSpec g = build_grid(5, 40.0, 1500);
  const SpectralBasis basis(g);
  const RadialOperators& ops = basis.ops();
  const RadialField u = gaussian(g, 1.0, 0.7);
  const double N = frequency_scale(u, basis, 0.5);
  const RadialField v = normalize_snapshot(u, N, basis);
  CHECK(frequency_scale(v, basis, 0.5) == doctest::Approx(1.0).epsilon(0.1));
  // a rescaled copy normalizes to the same field
  const RadialField w = apply({0.0, 1.7}, u, g);
  const RadialField vw = normalize_snapshot(w, frequency_scale(w, basis, 0.5), basis);
  CHECK(ops.norm(ops.laplacian((vw - v).values())) < 0.05 * ops.norm(ops.laplacian(v.values())));
  // already at scale 1
  const RadialField again = normalize_snapshot(v, 1.0, basis);
  CHECK(ops.norm(ops.laplacian((again - v).values())) < 1e-3 * ops.norm(ops.laplacian(v.values())));
  CHECK_THROWS_AS(normalize_snapshot(RadialField::zeros(g), 1.0, basis), Error);
}

TEST_CASE("orthogonality parameter") {
  const EnlargedElement a{{0.0, 1.0}, 0.0}, b{{0.0, 4.0}, 0.0}, c{{0.0, 1.0}, 2.0};
  CHECK(orthogonality_parameter(a, a) == doctest::Approx(2.0));
  CHECK(orthogonality_parameter(a, b) == doctest::Approx(4.25));
  CHECK(orthogonality_parameter(a, c) == doctest::Approx(4.0));
  CHECK(orthogonality_parameter(b, a) == doctest::Approx(orthogonality_parameter(a, b)));
}

TEST_CASE("decoupling along diverging scales") {
  const GridSpec g = build_grid(5, 40.0, 1500);
  const SpectralBasis basis(g);
  const RadialField f = gaussian(g, 1.0, 1.0);
  std::vector<EnlargedElement> s1, s2;
  for (int n = 0; n <= 5; ++n) {
    s1.push_back({{0.0, std::pow(2.0, -0.5 * n)}, 0.0});
    s2.push_back({{0.0, std::pow(2.0, 0.5 * n)}, 0.0});
  }
  const DecouplingReport r = decoupling_check(s1, s2, f, f, basis);
  CHECK(r.applicable);
  CHECK(r.monotone);
  CHECK(r.terminal_ratio >= 4.0);
  CHECK(r.decays());
  REQUIRE(r.pairing.size() == 6);
  REQUIRE(r.divergence.size() == 6);
  // the first pairing is the kinetic norm squared of the common profile
  CHECK(r.pairing.front() == doctest::Approx(std::pow(basis.ops().norm(basis.ops().laplacian(f.values())), 2)).epsilon(1e-3));

  const DecouplingReport same = decoupling_check(s1, s1, f, f, basis);
  CHECK_FALSE(same.applicable);
  CHECK_FALSE(same.decays());
  CHECK_FALSE(same.note.empty());
}

TEST_CASE("kinetic decoupling identity") {
  const GridSpec g = build_grid(5, 40.0, 1500);
  const SpectralBasis basis(g);
  const RadialOperators& ops = basis.ops();
  const RadialField phi = gaussian(g, 1.0, 1.0);
  const RadialField w = band_limited_noise(basis, 4, 1.0, 2.0) * Complex(0.01);

  SUBCASE("single profile") {
    const KineticDecouplingReport r = kinetic_decoupling_check({{{{0.0, 1.0}, 0.0}, phi}}, RadialField::zeros(g), basis);
    CHECK(r.defect < 1e-10 * r.total);
    CHECK(std::abs(r.transformed_defect) < 1e-10 * r.total);
  }
  SUBCASE("same element twice") {
    const KineticDecouplingReport r =
        kinetic_decoupling_check({{{{0.0, 1.0}, 0.0}, phi}, {{{0.0, 1.0}, 0.0}, phi}}, RadialField::zeros(g), basis);
    const double K = std::pow(ops.norm(ops.laplacian(phi.values())), 2);
    CHECK(r.defect == doctest::Approx(2.0 * K).epsilon(1e-10));
    CHECK(r.min_divergence == doctest::Approx(2.0));
  }
  SUBCASE("defect equals the cross terms and shrinks with divergence") {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= 4; ++n) {
      const double l = std::pow(2.0, 0.5 * n);
      const KineticDecouplingReport r =
          kinetic_decoupling_check({{{{0.3, l}, 0.0}, phi}, {{{-0.2, 1.0 / l}, 0.0}, phi}}, w, basis);
      CHECK(r.identity_residual < 1e-10 * r.total);
      CHECK(std::abs(r.transformed_defect) < prev);
      prev = std::abs(r.transformed_defect);
    }
  }
}

TEST_CASE("scaling symmetry of the flow") {
  // evolving g_{0,lambda} u0 for lambda^4 t equals g_{0,lambda} of the evolution for t
  const double lambda = 2.0, t = 0.02;
  const GridSpec g = build_grid(5, 30.0, 600);
  const GridSpec gl = build_grid(5, 30.0 * lambda, 600);
  const SpectralBasis b(g), bl(gl);
  const RadialField u0 = gaussian(g, 0.9, 1.5) * std::polar(1.0, 0.3);
  SolverConfig c;
  c.dt = 1e-4;
  c.T = t;
  c.diagnostics.radii = {};
  SolverConfig cl = c;
  cl.dt = c.dt * std::pow(lambda, 4);
  cl.T = t * std::pow(lambda, 4);
  const RadialField a = evolve(apply({0.0, lambda}, u0, gl), cl, bl).final_field();
  const RadialField ref = apply({0.0, lambda}, evolve(u0, c, b).final_field(), gl);
  CHECK(kinetic_norm(a - ref) < 1e-3 * kinetic_norm(ref));
}
