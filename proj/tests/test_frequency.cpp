#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bhnls/frequency.hpp"
#include "bhnls/initial_data.hpp"
#include "bhnls/propagator.hpp"
#include "bhnls/symmetry.hpp"

using namespace bhnls;

namespace {

const SpectralBasis& basis() {
  static const SpectralBasis b(build_grid(5, 30.0, 600));
  return b;
}

RadialField noise(std::uint64_t seed) {
  const SpectralBasis& b = basis();
  return band_limited_noise(b, seed, 0.0, b.frequencies()[b.size() - 1]);
}

double distance(const RadialField& a, const RadialField& b) {
  return basis().ops().norm(a.values() - b.values());
}

}  // namespace

TEST_CASE("bump profiles") {
  const MultiplierSpec smooth, sharp{MultiplierKind::Sharp};
  CHECK(smooth.bump(0.0) == 1.0);
  CHECK(smooth.bump(1.0) == 1.0);
  CHECK(smooth.bump(1.1) == 0.0);
  CHECK(smooth.bump(2.0) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = smooth.bump(1.0 + 0.1 * i / 200.0);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK(sharp.bump(1.0) == 1.0);
  CHECK(sharp.bump(1.0 + 1e-12) == 0.0);
}

TEST_CASE("dyadic ladder covers the spectrum with ratio two") {
  const SpectralBasis& b = basis();
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  const auto& lv = ladder.levels();
  REQUIRE(lv.size() >= 4);
  for (std::size_t i = 1; i < lv.size(); ++i) CHECK(lv[i] / lv[i - 1] == 2.0);
  CHECK(ladder.lowest() >= b.frequencies()[0]);
  CHECK(ladder.lowest() / 2 < b.frequencies()[0]);
  CHECK(ladder.highest() >= b.frequencies()[b.size() - 1]);
  CHECK(ladder.highest() / 2 < b.frequencies()[b.size() - 1]);
  CHECK(ladder.interior().size() == lv.size() - 2);
  CHECK(ladder.contains(lv[1]));
  CHECK(ladder.contains(3.0 * lv[1]));
  CHECK_FALSE(ladder.contains(2.0 * ladder.highest()));
  CHECK_FALSE(ladder.contains(0.4 * ladder.lowest()));
  CHECK_THROWS_AS(DyadicLadder(3, 2), Error);
}

TEST_CASE("projections act diagonally on eigenfunctions") {
  const SpectralBasis& b = basis();
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  const MultiplierSpec sharp{MultiplierKind::Sharp};
  const double N = ladder.levels()[3];
  for (int k = 0; k < b.size(); k += 37) {
    const RadialField phi = b.eigenfunction(k);
    const double m = multiplier(b.frequencies()[k], N, Band::Shell, {});
    const RadialField p = project(phi, N, Band::Shell, {}, b);
    CHECK(distance(p, phi * Complex(m)) < 1e-12);
    const bool inside = b.frequencies()[k] > N / 2 && b.frequencies()[k] <= N;
    CHECK(distance(project(phi, N, Band::Shell, sharp, b), inside ? phi : RadialField::zeros(b.grid())) < 1e-12);
  }
}

TEST_CASE("fattened projection absorbs the shell") {
  const SpectralBasis& b = basis();
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  const RadialField u = noise(1);
  for (double N : ladder.interior()) {
    for (auto kind : {MultiplierKind::Smooth, MultiplierKind::Sharp}) {
      const MultiplierSpec spec{kind};
      const RadialField a = project(project(u, N, Band::Fattened, spec, b), N, Band::Shell, spec, b);
      const RadialField c = project(project(u, N, Band::Shell, spec, b), N, Band::Fattened, spec, b);
      const RadialField p = project(u, N, Band::Shell, spec, b);
      CHECK(distance(a, p) < 1e-12);
      CHECK(distance(c, p) < 1e-12);
    }
  }
}

TEST_CASE("sharp shells partition the spectrum orthogonally") {
  const SpectralBasis& b = basis();
  const RadialOperators& ops = b.ops();
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  const MultiplierSpec sharp{MultiplierKind::Sharp};
  const RadialField u = noise(2);
  std::vector<RadialField> shells;
  RadialField sum = RadialField::zeros(b.grid());
  for (double N : ladder.levels()) {
    shells.push_back(project(u, N, Band::Shell, sharp, b));
    sum += shells.back();
  }
  CHECK(distance(sum, u) < 1e-10 * ops.norm(u.values()));
  for (std::size_t i = 0; i < shells.size(); ++i)
    for (std::size_t j = i + 1; j < shells.size(); ++j)
      CHECK(std::abs(ops.inner(shells[i].values(), shells[j].values())) < 1e-12);
  // low + high = identity for the smooth kind
  const double N = ladder.levels()[2];
  const RadialField lo = project(u, N, Band::Low, {}, b);
  const RadialField hi = project(u, N, Band::High, {}, b);
  CHECK(distance(lo + hi, u) < 1e-12);
}

TEST_CASE("projections commute with the linear flow") {
  const SpectralBasis& b = basis();
  const RadialField u = noise(3);
  for (double N : DyadicLadder::for_basis(b).interior()) {
    const RadialField a = linear_step(project(u, N, Band::Shell, {}, b), 0.37, b);
    const RadialField c = project(linear_step(u, 0.37, b), N, Band::Shell, {}, b);
    CHECK(distance(a, c) < 1e-12);
  }
}

TEST_CASE("projection errors") {
  const SpectralBasis& b = basis();
  const RadialField u = noise(4);
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  CHECK_THROWS_AS(project(u, ladder.highest() * 2, Band::Shell, {}, b), Error);
  try {
    project(u, ladder.lowest() / 2, Band::Shell, {}, b);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRange);
  }
  CHECK_THROWS_AS(project_coefficients(ComplexVector::Zero(5), ladder.lowest(), Band::Shell, {}, b), Error);
}

TEST_CASE("weighted Lp norms") {
  const GridSpec g = build_grid(6, 10.0, 400);
  const RadialOperators ops(g);
  const RadialField u = gaussian(g, 2.0, 1.0);
  // int e^{-p r^2} over R^6 = (pi/p)^3
  for (double p : {1.0, 2.0, 3.0}) {
    const double exact = 2.0 * std::pow(std::pow(std::numbers::pi / p, 3.0), 1.0 / p);
    CHECK(lp_norm(u.values(), p, ops) == doctest::Approx(exact).epsilon(1e-4));
  }
  CHECK(lp_norm(u.values(), std::numeric_limits<double>::infinity(), ops) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("Bernstein ratios") {
  const SpectralBasis& b = basis();
  const RadialField u = gaussian(b.grid(), 1.0, 1.0);
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  for (double N : ladder.interior()) {
    const BernsteinReport r = bernstein_check(u, N, 2.0, 2.0, b);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-14));
    const BernsteinReport s = bernstein_check(u, N, 2.0, std::numeric_limits<double>::infinity(), b);
    CHECK(s.ratio == doctest::Approx(s.lhs / s.rhs));
    CHECK(s.rhs == doctest::Approx(std::pow(N, 2.5) * lp_norm(project(u, N, Band::Shell, {}, b).values(), 2.0, b.ops())));
    const double q = derivative_bernstein_ratio(u, N, b);
    CHECK(q >= 0.2);
    CHECK(q <= 5.0);
  }
  CHECK_THROWS_AS(derivative_bernstein_ratio(RadialField::zeros(b.grid()), ladder.levels()[2], b), Error);
}

TEST_CASE("Besov norm") {
  const SpectralBasis& b = basis();
  const RadialOperators& ops = b.ops();
  for (int k : {0, 10, 100, 400}) {
    const RadialField phi = b.eigenfunction(k);
    CHECK(besov_sup_norm(phi, b) == doctest::Approx(b.eigenvalues()[k]).epsilon(1e-10));
  }
  for (std::uint64_t seed : {5, 6, 7}) {
    const RadialField u = noise(seed);
    CHECK(besov_sup_norm(u, b) <= ops.norm(ops.laplacian(u.values())) * (1 + 1e-12));
  }
  // single-shell field: equality up to the discrete Laplacian vs spectral symbol
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  const RadialField one = project(noise(8), ladder.levels()[4], Band::Shell, {MultiplierKind::Sharp}, b);
  CHECK(besov_sup_norm(one, b) == doctest::Approx(ops.norm(ops.laplacian(one.values()))).epsilon(1e-8));
  CHECK_THROWS_AS(besov_sup_norm(RadialField::zeros(b.grid()), b), Error);
}

TEST_CASE("refined Sobolev ratio") {
  {
    // the rescaled profiles need room on both ends: lambda = 1/4 gives width 1/4
    const SpectralBasis wide(build_grid(5, 40.0, 1500));
    const RadialField G = gaussian(wide.grid(), 1.0, 1.0);
    std::vector<double> ratios;
    for (double lambda : {0.25, 1.0, 4.0})
      ratios.push_back(refined_sobolev_check(apply({0.0, lambda}, G, wide.grid()), wide));
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo - 1.0 < 0.03);
  }
  const SpectralBasis& b = basis();

  // spread field against a single shell of equal kinetic norm
  const RadialOperators& ops = b.ops();
  const DyadicLadder ladder = DyadicLadder::for_basis(b);
  const auto& lv = ladder.levels();
  RadialField spread = RadialField::zeros(b.grid());
  int k = 0, octave = 0;
  for (std::size_t i = 1; i < lv.size() && octave < 6; ++i, ++octave) {
    while (k < b.size() && b.frequencies()[k] <= lv[i - 1] * 1.5) ++k;
    if (k >= b.size()) break;
    spread += b.eigenfunction(k) * Complex(std::pow(2.0, -octave) / b.eigenvalues()[k]);
  }
  const RadialField single = b.eigenfunction(k) * Complex(1.0 / b.eigenvalues()[k]);
  const double ks = ops.norm(ops.laplacian(spread.values()));
  const double k1 = ops.norm(ops.laplacian(single.values()));
  const RadialField single_n = single * Complex(ks / k1);
  CHECK(besov_sup_norm(spread, b) < besov_sup_norm(single_n, b));
  CHECK(refined_sobolev_check(spread, b) > refined_sobolev_check(single_n, b));
  CHECK_THROWS_AS(refined_sobolev_check(RadialField::zeros(b.grid()), b), Error);
}
