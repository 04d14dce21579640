#include "bhnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <lapacke.h>

namespace bhnls {

GridSpec build_grid(int d, double r_max, int n) {
  if (d < 5) throw Error(ErrorKind::InvalidParameter, "dimension must be >= 5, got " + std::to_string(d));
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw Error(ErrorKind::InvalidParameter, "r_max must be positive and finite");
  if (n < 16) throw Error(ErrorKind::InvalidParameter, "need at least 16 nodes, got " + std::to_string(n));
  return GridSpec{d, r_max, n};
}

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b)) {
    std::ostringstream os;
    os << where << ": grid (d=" << a.d << ", r_max=" << a.r_max << ", n=" << a.n << ") vs (d=" << b.d
       << ", r_max=" << b.r_max << ", n=" << b.n << ")";
    throw Error(ErrorKind::GridMismatch, os.str());
  }
}

// ---------------------------------------------------------------------------
// RadialField

RadialField::RadialField(const GridSpec& grid, ComplexVector values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n)
    throw Error(ErrorKind::GridMismatch, "field length " + std::to_string(values_.size()) + " != grid n " +
                                             std::to_string(grid_.n));
  if (!values_.allFinite()) throw Error(ErrorKind::NonFiniteInput, "radial field has non-finite samples");
}

RadialField RadialField::zeros(const GridSpec& grid) { return RadialField(grid, ComplexVector::Zero(grid.n)); }

RadialField RadialField::sample(const GridSpec& grid, const std::function<Complex(double)>& f) {
  ComplexVector v(grid.n);
  for (int j = 0; j < grid.n; ++j) v[j] = f(grid.node(j));
  return RadialField(grid, std::move(v));
}

double RadialField::max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

RadialField& RadialField::operator+=(const RadialField& other) {
  require_same_grid(grid_, other.grid_, "RadialField::operator+=");
  values_ += other.values_;
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& other) {
  require_same_grid(grid_, other.grid_, "RadialField::operator-=");
  values_ -= other.values_;
  return *this;
}

RadialField& RadialField::operator*=(Complex s) {
  values_ *= s;
  if (!values_.allFinite()) throw Error(ErrorKind::NonFiniteInput, "scaling produced non-finite samples");
  return *this;
}

// ---------------------------------------------------------------------------
// RadialOperators

RadialOperators::RadialOperators(const GridSpec& grid) : grid_(build_grid(grid.d, grid.r_max, grid.n)) {
  const int n = grid_.n;
  const int d = grid_.d;
  const double h = grid_.h();
  const double area = sphere_area(d);

  r_.resize(n);
  w_.resize(n);
  cond_.resize(n);
  up_.resize(n);
  down_.resize(n);

  // Work with m_j = j^{d-1} and a_j = 2d S_j / (2j+1), S_j = sum_{i<=j} i^{d-1};
  // then w_j = area h^d m_j and k_{j+1/2} = area h^{d-2} a_j.
  long double partial = 0.0L;
  RealVector m(n), a(n);
  for (int i = 0; i < n; ++i) {
    const long double j = i + 1;
    const long double mj = std::pow(j, static_cast<long double>(d - 1));
    partial += mj;
    m[i] = static_cast<double>(mj);
    a[i] = static_cast<double>(2.0L * d * partial / (2.0L * j + 1.0L));
    r_[i] = grid_.node(i);
    w_[i] = area * std::pow(h, d) * m[i];
    cond_[i] = area * std::pow(h, d - 2) * a[i];
  }
  const double inv_h2 = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    up_[i] = inv_h2 * a[i] / m[i];
    down_[i] = i > 0 ? inv_h2 * a[i - 1] / m[i] : 0.0;
  }
}

double RadialOperators::integrate(const RealVector& density) const {
  if (density.size() != grid_.n) throw Error(ErrorKind::GridMismatch, "density length mismatch");
  if (!density.allFinite()) throw Error(ErrorKind::NonFiniteInput, "integrand has non-finite samples");
  return w_.dot(density);
}

double RadialOperators::integrate_range(const RealVector& density, double lo, double hi) const {
  if (density.size() != grid_.n) throw Error(ErrorKind::GridMismatch, "density length mismatch");
  if (!density.allFinite()) throw Error(ErrorKind::NonFiniteInput, "integrand has non-finite samples");
  double s = 0.0;
  for (int j = 0; j < grid_.n; ++j)
    if (r_[j] >= lo && r_[j] <= hi) s += w_[j] * density[j];
  return s;
}

Complex RadialOperators::inner(const ComplexVector& a, const ComplexVector& b) const {
  Complex s = 0.0;
  for (int j = 0; j < grid_.n; ++j) s += w_[j] * std::conj(a[j]) * b[j];
  return s;
}

double RadialOperators::norm(const ComplexVector& a) const { return std::sqrt(w_.dot(a.cwiseAbs2())); }

ComplexVector RadialOperators::laplacian(const ComplexVector& u, Complex ghost) const {
  const int n = grid_.n;
  if (u.size() != n) throw Error(ErrorKind::GridMismatch, "laplacian: length mismatch");
  ComplexVector out(n);
  for (int i = 0; i < n; ++i) {
    const Complex next = i + 1 < n ? u[i + 1] : ghost;
    const Complex prev = i > 0 ? u[i - 1] : u[i];
    out[i] = up_[i] * (next - u[i]) - down_[i] * (u[i] - prev);
  }
  return out;
}

RadialField RadialOperators::laplacian(const RadialField& u) const {
  require_same_grid(grid_, u.grid(), "laplacian");
  return RadialField(grid_, laplacian(u.values()));
}

ComplexVector RadialOperators::gradient(const ComplexVector& u) const {
  const int n = grid_.n;
  if (u.size() != n) throw Error(ErrorKind::GridMismatch, "gradient: length mismatch");
  const double inv_2h = 0.5 / grid_.h();
  ComplexVector g(n);
  const Complex origin = (4.0 * u[0] - u[1]) / 3.0;
  for (int i = 0; i < n; ++i) {
    const Complex next = i + 1 < n ? u[i + 1] : Complex(0.0);
    const Complex prev = i > 0 ? u[i - 1] : origin;
    g[i] = (next - prev) * inv_2h;
  }
  return g;
}

RealVector RadialOperators::symmetric_diagonal() const { return up_ + down_; }

RealVector RadialOperators::symmetric_offdiagonal() const {
  const int n = grid_.n;
  RealVector off(n - 1);
  for (int i = 0; i + 1 < n; ++i) off[i] = -cond_[i] / std::sqrt(w_[i] * w_[i + 1]);
  return off;
}

// ---------------------------------------------------------------------------
// SpectralBasis

SpectralBasis::SpectralBasis(const GridSpec& grid) : ops_(std::make_shared<const RadialOperators>(grid)) {
  const int n = ops_->size();
  RealVector diag = ops_->symmetric_diagonal();
  RealVector off = RealVector::Zero(n);
  off.head(n - 1) = ops_->symmetric_offdiagonal();
  mu_.resize(n);
  vectors_.resize(n, n);
  // MRRR. The divide-and-conquer drivers returned non-eigenvectors with
  // some BLAS/LAPACK pairings, so they are avoided.
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0,
                                         &found, mu_.data(), vectors_.data(), n, n, support.data(), &tryrac);
  if (info != 0 || found != n)
    throw Error(ErrorKind::EigenFailure, "dstemr returned info=" + std::to_string(info));

  if (!(mu_[0] > 0.0)) throw Error(ErrorKind::EigenFailure, "smallest eigenvalue is not positive");
  for (int k = 1; k < n; ++k)
    if (mu_[k] < mu_[k - 1]) throw Error(ErrorKind::EigenFailure, "eigenvalues not ascending");
  nu_ = mu_.cwiseSqrt();

  // Deterministic sign: first entry of every eigenvector non-negative.
  for (int k = 0; k < n; ++k)
    if (vectors_(0, k) < 0.0) vectors_.col(k) *= -1.0;

  sqrt_w_ = ops_->weights().cwiseSqrt();
}

ComplexVector SpectralBasis::decompose(const RadialField& f) const {
  require_same_grid(grid(), f.grid(), "decompose");
  const int n = size();
  ComplexVector scaled = f.values().cwiseProduct(sqrt_w_.cast<Complex>());
  ComplexVector out(n);
  Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> x(reinterpret_cast<const double*>(scaled.data()), 2, n);
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> y(reinterpret_cast<double*>(out.data()), 2, n);
  y.noalias() = x * vectors_;
  return out;
}

RadialField SpectralBasis::reconstruct(const ComplexVector& coeffs) const {
  const int n = size();
  if (coeffs.size() != n) throw Error(ErrorKind::GridMismatch, "coefficient length mismatch");
  ComplexVector out(n);
  Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> x(reinterpret_cast<const double*>(coeffs.data()), 2, n);
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> y(reinterpret_cast<double*>(out.data()), 2, n);
  y.noalias() = x * vectors_.transpose();
  out.array() /= sqrt_w_.array().cast<Complex>();
  return RadialField(grid(), std::move(out));
}

RadialField SpectralBasis::eigenfunction(int k) const {
  if (k < 0 || k >= size()) throw Error(ErrorKind::OutOfRange, "eigenfunction index out of range");
  ComplexVector v = (vectors_.col(k).array() / sqrt_w_.array()).matrix().cast<Complex>();
  return RadialField(grid(), std::move(v));
}

RadialField SpectralBasis::apply_symbol(const RadialField& f, const std::function<Complex(int)>& symbol) const {
  ComplexVector c = decompose(f);
  for (int k = 0; k < size(); ++k) c[k] *= symbol(k);
  return reconstruct(c);
}

SpectralBasis radial_laplacian(const GridSpec& grid) { return SpectralBasis(grid); }

ComplexVector decompose(const RadialField& f, const SpectralBasis& basis) { return basis.decompose(f); }

RadialField reconstruct(const ComplexVector& coeffs, const SpectralBasis& basis) {
  return basis.reconstruct(coeffs);
}

}  // namespace bhnls
