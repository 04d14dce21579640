#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bhnls/grid.hpp"

using namespace bhnls;

namespace {

RadialField random_field(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexVector v(g.n);
  for (int j = 0; j < g.n; ++j) v[j] = Complex(nd(rng), nd(rng));
  return RadialField(g, v);
}

double rel(const ComplexVector& a, const ComplexVector& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("build_grid spacing and preconditions") {
  auto g = build_grid(5, 10.0, 99);
  CHECK(g.h() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.node(0) == doctest::Approx(0.1));
  CHECK(g.node(98) == doctest::Approx(9.9));
  CHECK(build_grid(8, 20.0, 255).h() == 0.078125);
  CHECK_THROWS_AS(build_grid(4, 10.0, 99), Error);
  CHECK_THROWS_AS(build_grid(5, -1.0, 99), Error);
  CHECK_THROWS_AS(build_grid(5, 1.0, 15), Error);
  try {
    build_grid(4, 10.0, 99);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("field rejects non-finite samples and wrong length") {
  auto g = build_grid(5, 10.0, 32);
  ComplexVector v = ComplexVector::Zero(32);
  v[3] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(RadialField(g, v), Error);
  CHECK_THROWS_AS(RadialField(g, ComplexVector::Zero(31)), Error);
}

TEST_CASE("quadrature against adaptive Gauss-Kronrod") {
  auto g = build_grid(5, 10.0, 999);
  RadialOperators ops(g);
  CHECK(ops.integrate(RealVector::Zero(g.n)) == 0.0);

  RealVector f = ops.nodes().unaryExpr([](double r) { return std::exp(-r * r); });
  const double area = 2.0 * std::pow(std::numbers::pi, 2.5) / std::tgamma(2.5);
  auto integrand = [&](double r) { return area * std::pow(r, 4) * std::exp(-r * r); };
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 10.0, 15, 1e-14);
  CHECK(std::abs(ops.integrate(f) - oracle) / oracle < 1e-8);

  RealVector bad = f;
  bad[10] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ops.integrate(bad), Error);
}

TEST_CASE("unit ball volume within O(h)") {
  const double exact = std::pow(std::numbers::pi, 2.5) / std::tgamma(3.5);
  double prev = 1e9;
  for (int n : {99, 199, 399}) {
    auto g = build_grid(5, 2.0, n);
    RadialOperators ops(g);
    RealVector ind = ops.nodes().unaryExpr([](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    const double err = std::abs(ops.integrate(ind) - exact);
    CHECK(err < 5.0 * exact * g.h());
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Laplacian of a Gaussian converges at second order") {
  double errs[3];
  int i = 0;
  for (int n : {199, 399, 799}) {
    auto g = build_grid(5, 10.0, n);
    RadialOperators ops(g);
    auto f = RadialField::sample(g, [](double r) { return Complex(std::exp(-r * r)); });
    ComplexVector lap = ops.laplacian(f.values());
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      const double r = g.node(j);
      if (r > 8.0) break;
      const double exact = (4 * r * r - 10.0) * std::exp(-r * r);
      e = std::max(e, std::abs(lap[j] - exact));
    }
    errs[i++] = e / 10.0;
  }
  CHECK(errs[0] / errs[1] > 3.5);
  CHECK(errs[1] / errs[2] > 3.5);
  CHECK(errs[0] / errs[1] < 4.5);
}

TEST_CASE("Laplacian is exact on r^2 away from the wall") {
  for (int d : {5, 6, 8}) {
    auto g = build_grid(d, 3.0, 40);
    RadialOperators ops(g);
    auto q = RadialField::sample(g, [](double r) { return Complex(r * r); });
    ComplexVector lap = ops.laplacian(q.values(), Complex(3.0 * 3.0));
    for (int j = 0; j < g.n; ++j) CHECK(lap[j].real() == doctest::Approx(2.0 * d).epsilon(1e-10));
  }
}

TEST_CASE("Laplacian is symmetric in the weighted inner product") {
  auto g = build_grid(7, 15.0, 300);
  RadialOperators ops(g);
  auto f = random_field(g, 1), h = random_field(g, 2);
  Complex a = ops.inner(ops.laplacian(f.values()), h.values());
  Complex b = ops.inner(f.values(), ops.laplacian(h.values()));
  CHECK(std::abs(a - b) / std::abs(a) < 1e-10);
}

TEST_CASE("spectral basis orthonormality, round trip and Parseval") {
  auto g = build_grid(5, 20.0, 400);
  auto basis = radial_laplacian(g);
  const auto& mu = basis.eigenvalues();
  CHECK(mu[0] > 0.0);
  for (int k = 1; k < g.n; ++k) CHECK(mu[k] >= mu[k - 1]);

  const auto& ops = basis.ops();
  for (int k : {0, 3, 77, 399})
    for (int l : {0, 3, 77, 399}) {
      Complex ip = ops.inner(basis.eigenfunction(k).values(), basis.eigenfunction(l).values());
      CHECK(std::abs(ip - (k == l ? 1.0 : 0.0)) < 1e-10);
    }

  ComplexVector c3 = decompose(basis.eigenfunction(3), basis);
  ComplexVector e3 = ComplexVector::Zero(g.n);
  e3[3] = 1.0;
  CHECK((c3 - e3).norm() < 1e-10);

  auto f = random_field(g, 5);
  ComplexVector c = decompose(f, basis);
  CHECK(ops.norm(reconstruct(c, basis).values() - f.values()) / ops.norm(f.values()) < 1e-10);
  const double mass = ops.norm(f.values());
  CHECK(std::abs(c.squaredNorm() - mass * mass) / (mass * mass) < 1e-10);

  // -L phi_k = mu_k phi_k
  auto phi = basis.eigenfunction(10);
  ComplexVector lhs = -ops.laplacian(phi.values());
  CHECK(rel(lhs, mu[10] * phi.values()) < 1e-9);
}

TEST_CASE("discrete kinetic energy two ways") {
  auto g = build_grid(5, 20.0, 400);
  auto basis = radial_laplacian(g);
  auto f = RadialField::sample(g, [](double r) { return Complex(std::exp(-r * r / 4), 0.3 * r * std::exp(-r * r / 9)); });
  ComplexVector lap = basis.ops().laplacian(f.values());
  const double kin = basis.ops().integrate(lap.cwiseAbs2());
  ComplexVector c = basis.decompose(f);
  const double spec = (basis.eigenvalues().array().square() * c.cwiseAbs2().array()).sum();
  CHECK(std::abs(kin - spec) / kin < 1e-8);
}

TEST_CASE("grid mismatch is reported") {
  auto basis = radial_laplacian(build_grid(5, 20.0, 64));
  auto f = RadialField::zeros(build_grid(5, 20.0, 65));
  CHECK_THROWS_AS(basis.decompose(f), Error);
  try {
    basis.decompose(f);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridMismatch);
  }
}
