#pragma once

#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "bhnls/error.hpp"

namespace bhnls {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Uniform radial grid on (0, r_max) for radial functions on R^d.
/// Nodes are r_j = j*h, j = 1..n, h = r_max/(n+1); the origin and the
/// wall are not nodes.
struct GridSpec {
  int d = 5;
  double r_max = 1.0;
  int n = 16;

  double h() const noexcept { return r_max / (n + 1); }
  /// Zero-based node access: node(0) = h, node(n-1) = r_max - h.
  double node(int j) const noexcept { return (j + 1) * h(); }

  bool operator==(const GridSpec&) const = default;
};

GridSpec build_grid(int d, double r_max, int n);

/// Surface area of the unit sphere S^{d-1}.
double sphere_area(int d);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

/// Complex samples of a radial function. Samples are always finite.
class RadialField {
 public:
  RadialField(const GridSpec& grid, ComplexVector values);

  static RadialField zeros(const GridSpec& grid);
  static RadialField sample(const GridSpec& grid, const std::function<Complex(double)>& f);

  const GridSpec& grid() const noexcept { return grid_; }
  const ComplexVector& values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  Complex operator[](int j) const { return values_[j]; }

  RealVector abs2() const { return values_.cwiseAbs2(); }
  double max_abs() const;
  bool is_zero() const { return values_.isZero(0.0); }

  RadialField& operator+=(const RadialField& other);
  RadialField& operator-=(const RadialField& other);
  RadialField& operator*=(Complex s);

  friend RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
  friend RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
  friend RadialField operator*(Complex s, RadialField a) { return a *= s; }
  friend RadialField operator*(RadialField a, Complex s) { return a *= s; }

 private:
  GridSpec grid_;
  ComplexVector values_;
};

/// Quadrature and finite-difference operators attached to one grid.
///
/// The weights are the trapezoid weights w_j = |S^{d-1}| r_j^{d-1} h. The
/// Laplacian is the three-point conservative stencil
///   (L u)_j = [k_{j+1/2}(u_{j+1}-u_j) - k_{j-1/2}(u_j-u_{j-1})] / w_j
/// with zero flux through the origin (even extension) and a ghost value at
/// r_max (zero for the homogeneous Dirichlet wall). The conductances
/// k_{j+1/2} are fixed by requiring L r^2 = 2d exactly, which makes L
/// symmetric in the w-inner product and second-order accurate uniformly
/// up to the origin.
class RadialOperators {
 public:
  explicit RadialOperators(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.n; }
  const RealVector& nodes() const noexcept { return r_; }
  const RealVector& weights() const noexcept { return w_; }

  /// Sum_j w_j f_j. Throws NonFiniteInput on NaN/Inf samples.
  double integrate(const RealVector& density) const;
  /// Integral restricted to nodes with lo <= r_j <= hi.
  double integrate_range(const RealVector& density, double lo, double hi) const;

  Complex inner(const ComplexVector& a, const ComplexVector& b) const;
  double norm(const ComplexVector& a) const;

  ComplexVector laplacian(const ComplexVector& u, Complex ghost = 0.0) const;
  RadialField laplacian(const RadialField& u) const;
  /// Centered radial derivative. At r_1 the origin value comes from the
  /// even quadratic fit u(0) = (4u_1 - u_2)/3; beyond r_n the ghost is 0.
  ComplexVector gradient(const ComplexVector& u) const;

  /// Symmetrized tridiagonal form of -L (diagonal and off-diagonal).
  RealVector symmetric_diagonal() const;
  RealVector symmetric_offdiagonal() const;

 private:
  GridSpec grid_;
  RealVector r_;
  RealVector w_;
  RealVector up_;    // k_{j+1/2} / w_j
  RealVector down_;  // k_{j-1/2} / w_j
  RealVector cond_;  // k_{j+1/2}
};

/// Eigendecomposition of -L: -L phi_k = mu_k phi_k with phi_k orthonormal in
/// the w-inner product, mu_k ascending. Propagation and frequency
/// localisation are diagonal in this basis.
class SpectralBasis {
 public:
  explicit SpectralBasis(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return ops_->grid(); }
  const RadialOperators& ops() const noexcept { return *ops_; }
  std::shared_ptr<const RadialOperators> shared_ops() const noexcept { return ops_; }
  int size() const noexcept { return static_cast<int>(mu_.size()); }

  const RealVector& eigenvalues() const noexcept { return mu_; }
  /// sqrt(mu_k), the eigenfrequency standing in for |xi|.
  const RealVector& frequencies() const noexcept { return nu_; }

  ComplexVector decompose(const RadialField& f) const;
  RadialField reconstruct(const ComplexVector& coeffs) const;
  RadialField eigenfunction(int k) const;

  /// Multiply spectral coefficients by symbol(k) and reconstruct.
  RadialField apply_symbol(const RadialField& f, const std::function<Complex(int)>& symbol) const;

 private:
  std::shared_ptr<const RadialOperators> ops_;
  RealVector mu_;
  RealVector nu_;
  Eigen::MatrixXd vectors_;  // Euclidean-orthonormal eigenvectors of the symmetrized operator
  RealVector sqrt_w_;
};

/// Builds the radial Laplacian on `grid` and its full eigendecomposition.
SpectralBasis radial_laplacian(const GridSpec& grid);

ComplexVector decompose(const RadialField& f, const SpectralBasis& basis);
RadialField reconstruct(const ComplexVector& coeffs, const SpectralBasis& basis);

}  // namespace bhnls
