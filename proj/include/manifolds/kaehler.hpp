#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "manifolds/ambient.hpp"
#include "manifolds/common.hpp"
#include "manifolds/rng.hpp"

namespace manifolds {

struct ComplexStiefelPoint {
  MatrixXcd frame;

  explicit ComplexStiefelPoint(MatrixXcd frame_in, double tol = kOrthTol)
      : frame(std::move(frame_in)) {
    detail::require_finite(frame, "ComplexStiefelPoint");
    const int p = static_cast<int>(frame.cols());
    if (p < 1 || frame.rows() < 2 * p)
      throw std::invalid_argument("ComplexStiefelPoint: requires n >= 2p");
    if ((frame.adjoint() * frame - MatrixXcd::Identity(p, p)).norm() > tol)
      throw std::invalid_argument("ComplexStiefelPoint: frame is not unitary-orthonormal");
  }

  int n() const { return static_cast<int>(frame.rows()); }
  int p() const { return static_cast<int>(frame.cols()); }
};

struct ComplexGrassmannPoint {
  MatrixXcd basis;

  explicit ComplexGrassmannPoint(MatrixXcd basis_in, double tol = kOrthTol)
      : basis(std::move(basis_in)) {
    detail::require_finite(basis, "ComplexGrassmannPoint");
    const int p = static_cast<int>(basis.cols());
    if (p < 1 || basis.rows() < p)
      throw std::invalid_argument("ComplexGrassmannPoint: invalid dimensions");
    if ((basis.adjoint() * basis - MatrixXcd::Identity(p, p)).norm() > tol)
      throw std::invalid_argument("ComplexGrassmannPoint: basis is not orthonormal");
  }

  int n() const { return static_cast<int>(basis.rows()); }
  int p() const { return static_cast<int>(basis.cols()); }
};

inline double hermitian_projector_distance(const ComplexGrassmannPoint& x,
                                           const ComplexGrassmannPoint& y) {
  if (x.n() != y.n())
    throw std::invalid_argument("hermitian_projector_distance: dimension mismatch");
  return (x.basis * x.basis.adjoint() - y.basis * y.basis.adjoint()).norm();
}

struct KaehlerPairing {
  double real_part;   // <X, Y> = Re h(X, Y)
  double omega_part;  // omega(X, Y) = -Im h(X, Y) = <J X, Y>
};

// Splits h(X, Y) = <X, Y> - i omega(X, Y), with J = multiplication by i.
inline KaehlerPairing kaehler_triple(const MatrixXcd& x, const MatrixXcd& y) {
  const std::complex<double> h = hermitian_inner(x, y);
  return {h.real(), -h.imag()};
}

// Removes the U(p)-fiber component Y (Y^* V). The result takes values in
// Ker Y^* and the split is J-invariant: J of a horizontal vector stays
// horizontal.
inline MatrixXcd complex_horizontal_project(const ComplexStiefelPoint& y, const MatrixXcd& v,
                                            double tol = kOrthTol) {
  if (v.rows() != y.frame.rows() || v.cols() != y.frame.cols())
    throw std::invalid_argument("complex_horizontal_project: dimension mismatch");
  const MatrixXcd yv = y.frame.adjoint() * v;
  if ((yv + yv.adjoint()).norm() > std::max(tol, 1e-8) * (1.0 + v.norm()))
    throw std::invalid_argument("complex_horizontal_project: Y^*V is not skew-hermitian");
  return v - y.frame * yv;
}

// Holomorphic sectional curvature of the plane span(X, JX) at a subspace x,
// with X horizontal (x^* X = 0). Symmetric-space evaluation through the
// commutator of horizontal lifts in u(n); reported in the metric
// normalization 2<.,.>, in which the values of Gr_C(p, n) fill [2/p, 2]
// (the fitted factor between the embedding normalization and that range
// is exactly 2; see the README notes).
inline double holomorphic_sectional_curvature(const ComplexGrassmannPoint& x,
                                              const MatrixXcd& big_x, double tol = 1e-10) {
  if (big_x.rows() != x.basis.rows() || big_x.cols() != x.basis.cols())
    throw std::invalid_argument("holomorphic_sectional_curvature: dimension mismatch");
  if ((x.basis.adjoint() * big_x).norm() > 1e-8 * (1.0 + big_x.norm()))
    throw std::invalid_argument("holomorphic_sectional_curvature: X is not horizontal");
  const double nrm2 = big_x.squaredNorm();
  if (nrm2 < tol)
    throw std::invalid_argument("holomorphic_sectional_curvature: degenerate direction");
  const MatrixXcd gram = big_x.adjoint() * big_x;  // hermitian PSD, invariant coordinates
  const double num = (gram * gram).trace().real();
  return 2.0 * num / (nrm2 * nrm2);
}

// Left action of an ambient unitary map on subspaces.
inline ComplexGrassmannPoint unitary_action(const MatrixXcd& t, const ComplexGrassmannPoint& x,
                                            double tol = kOrthTol) {
  if (t.rows() != t.cols() || t.cols() != x.basis.rows())
    throw std::invalid_argument("unitary_action: dimension mismatch");
  if ((t.adjoint() * t - MatrixXcd::Identity(t.cols(), t.cols())).norm() > tol * t.cols())
    throw std::invalid_argument("unitary_action: map is not unitary");
  return ComplexGrassmannPoint(t * x.basis, 1e-9);
}

// Principal-angle geodesic, as in the real case but with unitary factors.
inline ComplexGrassmannPoint complex_grassmann_geodesic(const ComplexGrassmannPoint& x,
                                                        const MatrixXcd& xi, double t) {
  if (xi.rows() != x.basis.rows() || xi.cols() != x.basis.cols())
    throw std::invalid_argument("complex_grassmann_geodesic: dimension mismatch");
  if ((x.basis.adjoint() * xi).norm() > 1e-8 * (1.0 + xi.norm()))
    throw std::invalid_argument("complex_grassmann_geodesic: direction is not horizontal");
  Eigen::JacobiSVD<MatrixXcd> svd(xi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd c = svd.singularValues();
  VectorXd s = svd.singularValues();
  for (int i = 0; i < c.size(); ++i) {
    c(i) = std::cos(t * svd.singularValues()(i));
    s(i) = std::sin(t * svd.singularValues()(i));
  }
  const MatrixXcd b = x.basis * svd.matrixV() * c.asDiagonal() * svd.matrixV().adjoint() +
                      svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
  Eigen::JacobiSVD<MatrixXcd> polar(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return ComplexGrassmannPoint(polar.matrixU() * polar.matrixV().adjoint(), 1e-9);
}

// Geodesic-deviation estimate of the holomorphic sectional curvature in the
// embedding normalization Re h. Cross-checks the closed evaluation above
// after rescaling by the fitted factor 2.
inline double holomorphic_curvature_jacobi_fd(const ComplexGrassmannPoint& x,
                                              const MatrixXcd& big_x, double t = 0.2,
                                              double h = 1e-4) {
  const double nx = big_x.norm();
  if (nx < 1e-10)
    throw std::invalid_argument("holomorphic_curvature_jacobi_fd: degenerate direction");
  const MatrixXcd v = big_x / nx;
  const MatrixXcd w = std::complex<double>(0, 1) * v;  // J v: automatically Re-h orthogonal to v

  const auto estimate = [&](double tt) {
    const ComplexGrassmannPoint gp = complex_grassmann_geodesic(x, v + h * w, tt);
    const ComplexGrassmannPoint gm = complex_grassmann_geodesic(x, v - h * w, tt);
    const ComplexGrassmannPoint at = complex_grassmann_geodesic(x, v, tt);
    MatrixXcd jd = (gp.basis - gm.basis) / (2.0 * h);
    jd -= at.basis * (at.basis.adjoint() * jd);  // horizontal part at the moved point
    const double jj = jd.squaredNorm();
    return 3.0 * (tt * tt - jj) / (tt * tt * tt * tt);
  };
  const double k1 = estimate(t);
  const double k2 = estimate(0.5 * t);
  return (4.0 * k2 - k1) / 3.0;
}

inline ComplexGrassmannPoint complex_grassmann_embed(const MatrixXcd& l,
                                                     const ComplexGrassmannPoint& x,
                                                     double tol = kOrthTol) {
  if (l.cols() != x.n())
    throw std::invalid_argument("complex_grassmann_embed: dimension mismatch");
  if ((l.adjoint() * l - MatrixXcd::Identity(l.cols(), l.cols())).norm() > tol)
    throw std::invalid_argument("complex_grassmann_embed: map is not an isometric immersion");
  return ComplexGrassmannPoint(l * x.basis, 1e-9);
}

inline ComplexGrassmannPoint random_complex_grassmann(CounterRng& rng, int n, int p) {
  const MatrixXcd g = rng.gaussian_complex(n, p);
  Eigen::JacobiSVD<MatrixXcd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return ComplexGrassmannPoint(svd.matrixU() * svd.matrixV().adjoint(), 1e-8);
}

inline MatrixXcd random_complex_horizontal(CounterRng& rng, const ComplexGrassmannPoint& x) {
  const MatrixXcd g = rng.gaussian_complex(x.n(), x.p());
  return g - x.basis * (x.basis.adjoint() * g);
}

}  // namespace manifolds
