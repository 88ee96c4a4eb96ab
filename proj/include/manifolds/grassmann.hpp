#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "manifolds/ambient.hpp"
#include "manifolds/common.hpp"
#include "manifolds/rng.hpp"
#include "manifolds/stiefel.hpp"

namespace manifolds {

// A p-dimensional subspace of R^n, stored as an orthonormal basis. No
// canonical representative is enforced; equality is always tested through
// the projector B B^T.
struct GrassmannPoint {
  MatrixXd basis;

  explicit GrassmannPoint(MatrixXd basis_in, double tol = kOrthTol)
      : basis(std::move(basis_in)) {
    detail::require_finite(basis, "GrassmannPoint");
    const int p = static_cast<int>(basis.cols());
    if (p < 1 || basis.rows() < p)
      throw std::invalid_argument("GrassmannPoint: invalid dimensions");
    if ((basis.transpose() * basis - MatrixXd::Identity(p, p)).norm() > tol)
      throw std::invalid_argument("GrassmannPoint: basis is not orthonormal");
  }

  int n() const { return static_cast<int>(basis.rows()); }
  int p() const { return static_cast<int>(basis.cols()); }
};

inline double projector_distance(const GrassmannPoint& x, const GrassmannPoint& y) {
  if (x.n() != y.n())
    throw std::invalid_argument("projector_distance: dimension mismatch");
  return (x.basis * x.basis.transpose() - y.basis * y.basis.transpose()).norm();
}

inline bool same_subspace(const GrassmannPoint& x, const GrassmannPoint& y,
                          double tol = kProjectorTol) {
  return projector_distance(x, y) <= tol;
}

// Horizontal tangent vector: basis^T direction = 0.
struct HorizontalAtGrassmann {
  GrassmannPoint base;
  MatrixXd direction;

  HorizontalAtGrassmann(GrassmannPoint base_in, MatrixXd direction_in, double tol = kOrthTol)
      : base(std::move(base_in)), direction(std::move(direction_in)) {
    detail::require_finite(direction, "HorizontalAtGrassmann");
    if (direction.rows() != base.basis.rows() || direction.cols() != base.basis.cols())
      throw std::invalid_argument("HorizontalAtGrassmann: dimension mismatch");
    if ((base.basis.transpose() * direction).norm() > tol * (1.0 + direction.norm()))
      throw std::invalid_argument("HorizontalAtGrassmann: direction is not horizontal");
  }
};

namespace detail {

inline void require_same_base(const HorizontalAtGrassmann& a, const HorizontalAtGrassmann& b,
                              const char* op) {
  if ((a.base.basis - b.base.basis).norm() > 10 * kOrthTol)
    throw std::invalid_argument(std::string(op) + ": different base points");
}

}  // namespace detail

// Removes the fiber component Y (Y^T V) of a Stiefel tangent vector; the
// remainder takes values in Ker Y^T.
inline HorizontalAtGrassmann horizontal_project(const StiefelPoint& y,
                                                const TangentAtStiefel& v) {
  if ((v.base.frame - y.frame).norm() > 10 * kOrthTol)
    throw std::invalid_argument("horizontal_project: tangent vector not based at the given point");
  const MatrixXd h = v.direction - y.frame * (y.frame.transpose() * v.direction);
  return HorizontalAtGrassmann(GrassmannPoint(y.frame), h, 1e-8);
}

// Quotient metric on horizontal representatives. The embedded and canonical
// Stiefel metrics agree here, so this is the plain trace pairing.
inline double submersion_metric(const HorizontalAtGrassmann& xi,
                                const HorizontalAtGrassmann& eta) {
  detail::require_same_base(xi, eta, "submersion_metric");
  return frobenius_inner(xi.direction, eta.direction);
}

inline double horizontal_norm(const HorizontalAtGrassmann& xi) {
  return std::sqrt(std::max(0.0, submersion_metric(xi, xi)));
}

// Principal-angle closed form: with xi = U diag(sigma) W^T,
//   B(t) = B W cos(sigma t) W^T + U sin(sigma t) W^T.
inline GrassmannPoint grassmann_geodesic(const GrassmannPoint& x,
                                         const HorizontalAtGrassmann& xi, double t) {
  if ((xi.base.basis - x.basis).norm() > 10 * kOrthTol)
    throw std::invalid_argument("grassmann_geodesic: vector not based at the given point");
  const ThinSvd svd = thin_svd(xi.direction);
  VectorXd c = svd.singular_values;
  VectorXd s = svd.singular_values;
  for (int i = 0; i < c.size(); ++i) {
    c(i) = std::cos(t * svd.singular_values(i));
    s(i) = std::sin(t * svd.singular_values(i));
  }
  const MatrixXd b = x.basis * svd.v * c.asDiagonal() * svd.v.transpose() +
                     svd.u * s.asDiagonal() * svd.v.transpose();
  return GrassmannPoint(detail::polar_orthonormalize(b), 1e-9);
}

// Principal angles between two subspaces: arccos of the clamped singular
// values of B_x^T B_y.
inline VectorXd principal_angles(const GrassmannPoint& x, const GrassmannPoint& y) {
  if (x.n() != y.n() || x.p() != y.p())
    throw std::invalid_argument("principal_angles: dimension mismatch");
  Eigen::JacobiSVD<MatrixXd> svd(x.basis.transpose() * y.basis);
  VectorXd angles = svd.singularValues();
  for (int i = 0; i < angles.size(); ++i)
    angles(i) = std::acos(std::clamp(angles(i), 0.0, 1.0));
  return angles;
}

inline double grassmann_distance(const GrassmannPoint& x, const GrassmannPoint& y) {
  return principal_angles(x, y).norm();
}

// Inverse of the exponential below the cut locus. A principal angle within
// kCutLocusTol of pi/2 makes the log multivalued and is reported as an error.
inline HorizontalAtGrassmann grassmann_log(const GrassmannPoint& x, const GrassmannPoint& y,
                                           double cut_tol = kCutLocusTol) {
  if (x.n() != y.n() || x.p() != y.p())
    throw std::invalid_argument("grassmann_log: dimension mismatch");
  const int p = x.p();
  const MatrixXd m = x.basis.transpose() * y.basis;
  Eigen::JacobiSVD<MatrixXd> overlap(m);
  const double smallest = overlap.singularValues()(p - 1);
  if (std::acos(std::clamp(smallest, 0.0, 1.0)) > std::numbers::pi / 2.0 - cut_tol)
    throw CutLocusError("grassmann_log: a principal angle is within tolerance of pi/2");
  const MatrixXd l = (y.basis - x.basis * m) * m.inverse();
  Eigen::JacobiSVD<MatrixXd> svd(l, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd theta = svd.singularValues();
  for (int i = 0; i < theta.size(); ++i) theta(i) = std::atan(theta(i));
  const MatrixXd xi = svd.matrixU() * theta.asDiagonal() * svd.matrixV().transpose();
  return HorizontalAtGrassmann(x, xi, 1e-8);
}

// Geodesic reflection through the subspace W, induced by the ambient
// isometry that is Id on W and -Id on its complement.
inline GrassmannPoint involution(const GrassmannPoint& w, const GrassmannPoint& x) {
  if (w.n() != x.n())
    throw std::invalid_argument("involution: dimension mismatch");
  const MatrixXd reflect =
      2.0 * (w.basis * w.basis.transpose()) - MatrixXd::Identity(w.n(), w.n());
  return GrassmannPoint(detail::polar_orthonormalize(reflect * x.basis), 1e-9);
}

inline GrassmannPoint grassmann_embed(const MatrixXd& l, const GrassmannPoint& x,
                                      double tol = kOrthTol) {
  if (l.cols() != x.n())
    throw std::invalid_argument("grassmann_embed: dimension mismatch");
  if ((l.transpose() * l - MatrixXd::Identity(l.cols(), l.cols())).norm() > tol)
    throw std::invalid_argument("grassmann_embed: map is not an isometric immersion");
  return GrassmannPoint(l * x.basis, 1e-9);
}

inline GrassmannPoint random_grassmann(CounterRng& rng, int n, int p) {
  return GrassmannPoint(detail::polar_orthonormalize(rng.gaussian(n, p)), 1e-8);
}

inline HorizontalAtGrassmann random_horizontal(CounterRng& rng, const GrassmannPoint& x) {
  const MatrixXd g = rng.gaussian(x.n(), x.p());
  const MatrixXd h = g - x.basis * (x.basis.transpose() * g);
  return HorizontalAtGrassmann(x, h, 1e-8);
}

}  // namespace manifolds
