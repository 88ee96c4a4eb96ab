#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "manifolds/actions.hpp"
#include "manifolds/ambient.hpp"
#include "manifolds/common.hpp"
#include "manifolds/rng.hpp"

namespace manifolds {

using Eigen::VectorXi;

// Upper half-space model: coords (x_1, ..., x_{d-1}, h) with h > 0 and
// metric h^{-2} (dx_1^2 + ... + dh^2).
struct HalfSpacePoint {
  VectorXd coords;

  explicit HalfSpacePoint(VectorXd coords_in) : coords(std::move(coords_in)) {
    if (coords.size() < 2) throw std::invalid_argument("HalfSpacePoint: need at least 2 coords");
    if (!coords.allFinite() || coords(coords.size() - 1) <= 0.0)
      throw std::invalid_argument("HalfSpacePoint: last coordinate must be positive");
  }

  int dim() const { return static_cast<int>(coords.size()); }
  double height() const { return coords(coords.size() - 1); }
};

// Hyperboloid model: (xi, t) in R^{d,1} with |xi|^2 - t^2 = -1, t > 0.
struct HyperboloidPoint {
  VectorXd coords;  // (xi_1, ..., xi_d, t)
  MinkowskiForm form;

  explicit HyperboloidPoint(VectorXd coords_in, double tol = kOrthTol)
      : coords(std::move(coords_in)),
        form(static_cast<int>(coords.size()) - 1, 1) {
    if (coords.size() < 2) throw std::invalid_argument("HyperboloidPoint: need at least 2 coords");
    if (!coords.allFinite()) throw std::invalid_argument("HyperboloidPoint: non-finite coords");
    const double t = coords(coords.size() - 1);
    const double q = coords.head(coords.size() - 1).squaredNorm() - t * t;
    if (t <= 0.0 || std::abs(q + 1.0) > tol * std::max(1.0, t * t))
      throw std::invalid_argument("HyperboloidPoint: point is not on the upper sheet");
  }

  int ambient_dim() const { return static_cast<int>(coords.size()); }
  double time() const { return coords(coords.size() - 1); }
};

inline double halfspace_distance(const HalfSpacePoint& x, const HalfSpacePoint& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("halfspace_distance: dimension mismatch");
  const double arg =
      1.0 + (x.coords - y.coords).squaredNorm() / (2.0 * x.height() * y.height());
  return std::acosh(std::max(1.0, arg));
}

inline double hyperboloid_distance(const HyperboloidPoint& u, const HyperboloidPoint& v) {
  if (u.ambient_dim() != v.ambient_dim())
    throw std::invalid_argument("hyperboloid_distance: dimension mismatch");
  const double inner = minkowski_inner(u.coords, v.coords, u.form);
  return std::acosh(std::max(1.0, -inner));
}

// Model isometry, normalized so that the half-space basepoint (0,...,0,1)
// maps to the hyperboloid basepoint (0,...,0,1). With s = |x|^2:
//   Phi(x, h) = ( x/h, (s + h^2 - 1)/(2h), (s + h^2 + 1)/(2h) ).
inline HyperboloidPoint halfspace_to_hyperboloid(const HalfSpacePoint& p) {
  const int d = p.dim();
  const VectorXd x = p.coords.head(d - 1);
  const double h = p.height();
  const double s = x.squaredNorm();
  VectorXd out(d + 1);
  out.head(d - 1) = x / h;
  out(d - 1) = (s + h * h - 1.0) / (2.0 * h);
  out(d) = (s + h * h + 1.0) / (2.0 * h);
  return HyperboloidPoint(out, 1e-9);
}

inline HalfSpacePoint hyperboloid_to_halfspace(const HyperboloidPoint& p) {
  const int d = p.ambient_dim() - 1;
  const double t = p.time();
  const double last_spatial = p.coords(d - 1);
  const double h = 1.0 / (t - last_spatial);  // t > |xi_d| on the sheet
  VectorXd out(d);
  out.head(d - 1) = p.coords.head(d - 1) * h;
  out(d - 1) = h;
  return HalfSpacePoint(out);
}

// Z^n acting by horizontal translations on the half-space model (the last
// coordinate is untouched). Free and isometric in closed form.
inline HalfSpacePoint zn_halfspace_action(const VectorXi& m, const HalfSpacePoint& x) {
  if (m.size() != x.dim() - 1)
    throw std::invalid_argument("zn_halfspace_action: rank mismatch");
  VectorXd out = x.coords;
  out.head(m.size()) += m.cast<double>();
  return HalfSpacePoint(out);
}

// The same translation conjugated through the model isometry: a Minkowski-
// orthogonal matrix of size (n+2) x (n+2) acting on the hyperboloid model.
// The matrix is extracted by solving a full-rank linear system on sampled
// hyperboloid points, not from a literal parabolic formula; the form and
// group-law residual tests guard the construction.
inline MatrixXd zn_minkowski_matrix(const VectorXi& m) {
  const int n = static_cast<int>(m.size());
  const int dim = n + 2;

  std::vector<VectorXd> halfspace_points;
  VectorXd base = VectorXd::Zero(n + 1);
  base(n) = 1.0;
  halfspace_points.push_back(base);
  for (int i = 0; i < n; ++i) {
    VectorXd p = base;
    p(i) = 1.0;
    halfspace_points.push_back(p);
  }
  VectorXd tall = base;
  tall(n) = 2.0;
  halfspace_points.push_back(tall);

  MatrixXd z(dim, dim), w(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const HalfSpacePoint hp(halfspace_points[j]);
    z.col(j) = halfspace_to_hyperboloid(hp).coords;
    w.col(j) = halfspace_to_hyperboloid(zn_halfspace_action(m, hp)).coords;
  }
  return z.transpose().partialPivLu().solve(w.transpose()).transpose();
}

// Point of the truncated infinite-dimensional hyperboloid: an l2 block over
// a cyclic window of Z^n, a spatial block xi in R^{n+1} and the time
// coordinate, with |x|^2 + |xi|^2 - t^2 = -1.
struct HinftyPoint {
  VectorXd l2_block;
  VectorXd spatial_block;
  double t;

  HinftyPoint(VectorXd l2, VectorXd spatial, double t_in, double tol = kOrthTol)
      : l2_block(std::move(l2)), spatial_block(std::move(spatial)), t(t_in) {
    if (!l2_block.allFinite() || !spatial_block.allFinite() || !std::isfinite(t))
      throw std::invalid_argument("HinftyPoint: non-finite coords");
    const double q = l2_block.squaredNorm() + spatial_block.squaredNorm() - t * t;
    if (t <= 0.0 || std::abs(q + 1.0) > tol * std::max(1.0, t * t))
      throw std::invalid_argument("HinftyPoint: constraint q = -1, t > 0 violated");
  }

  double quadratic_form() const {
    return l2_block.squaredNorm() + spatial_block.squaredNorm() - t * t;
  }
};

// m acts by right translation on the l2 block and by the conjugated
// Minkowski matrix on the (xi, t) block.
inline HinftyPoint hinfty_action(const VectorXi& m, const HinftyPoint& z,
                                 const L2Truncation& trunc) {
  if (trunc.rank != m.size()) throw std::invalid_argument("hinfty_action: rank mismatch");
  if (trunc.mode != BoundaryMode::cyclic)
    throw std::invalid_argument("hinfty_action: requires the cyclic window");
  if (z.l2_block.size() != trunc.dimension() || z.spatial_block.size() != m.size() + 1)
    throw std::invalid_argument("hinfty_action: dimension mismatch");
  GroupSpec spec(static_cast<int>(m.size()));
  GroupElement g = identity_element(spec);
  g.free_part = m;
  const MatrixXd shift = right_translation_matrix(g, trunc).matrix;
  const MatrixXd mink = zn_minkowski_matrix(m);
  VectorXd block(z.spatial_block.size() + 1);
  block.head(z.spatial_block.size()) = z.spatial_block;
  block(z.spatial_block.size()) = z.t;
  const VectorXd moved = mink * block;
  return HinftyPoint(shift * z.l2_block, moved.head(z.spatial_block.size()),
                     moved(z.spatial_block.size()), 1e-8);
}

inline double hinfty_distance(const HinftyPoint& a, const HinftyPoint& b) {
  if (a.l2_block.size() != b.l2_block.size() || a.spatial_block.size() != b.spatial_block.size())
    throw std::invalid_argument("hinfty_distance: dimension mismatch");
  const double inner =
      a.l2_block.dot(b.l2_block) + a.spatial_block.dot(b.spatial_block) - a.t * b.t;
  return std::acosh(std::max(1.0, -inner));
}

// Integer span of linearly independent generator columns.
struct Lattice {
  MatrixXd generators;  // dim x k
  double condition;     // sigma_1 / sigma_k, reported

  explicit Lattice(MatrixXd gens) : generators(std::move(gens)), condition(0.0) {
    if (generators.cols() < 1 || generators.rows() < generators.cols())
      throw std::invalid_argument("Lattice: need 1 <= rank <= dimension");
    Eigen::JacobiSVD<MatrixXd> svd(generators);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-14 * sv(0))
      throw std::invalid_argument("Lattice: generators are linearly dependent");
    condition = sv(0) / sv(sv.size() - 1);
  }

  int dim() const { return static_cast<int>(generators.rows()); }
  int rank() const { return static_cast<int>(generators.cols()); }
};

// Quotient distance d([x], [y]) = min over lattice vectors w of |x - y - w|.
// Babai rounding plus a box search widened until no candidate outside the
// box can beat the current best; directions off the lattice span contribute
// their euclidean distance unchanged.
inline double flat_quotient_distance(const Lattice& lat, const VectorXd& x, const VectorXd& y,
                                     double condition_threshold = 1e8) {
  if (x.size() != lat.dim() || y.size() != lat.dim())
    throw std::invalid_argument("flat_quotient_distance: dimension mismatch");
  if (lat.condition > condition_threshold)
    throw std::invalid_argument("flat_quotient_distance: ill-conditioned lattice");
  const MatrixXd& b = lat.generators;
  const int k = lat.rank();
  const VectorXd d = x - y;
  const VectorXd coeffs = (b.transpose() * b).ldlt().solve(b.transpose() * d);
  const VectorXd d_perp = d - b * coeffs;

  Eigen::JacobiSVD<MatrixXd> svd(b);
  const double sigma_min = svd.singularValues()(k - 1);

  VectorXd rounded(k);
  for (int i = 0; i < k; ++i) rounded(i) = std::round(coeffs(i));

  // Any integer vector outside the +-r offset box is at span distance at
  // least sigma_min * (r + 1/2) from d, so the search is provably optimal
  // once the current best beats that bound.
  double best = std::numeric_limits<double>::infinity();
  const double perp2 = d_perp.squaredNorm();
  for (int r = 1; r <= 24; ++r) {
    std::vector<int> offset(k, -r);
    while (true) {
      VectorXd zvec(k);
      for (int i = 0; i < k; ++i) zvec(i) = rounded(i) + offset[i];
      best = std::min(best, (d - b * zvec).norm());
      int a = 0;
      while (a < k && ++offset[a] > r) offset[a++] = -r;
      if (a == k) break;
    }
    const double outside = sigma_min * (r + 0.5);
    if (best * best - perp2 <= outside * outside) break;
  }
  return best;
}

// Unit quaternions represented as (w, x, y, z); complex numbers embed with
// y = z = 0, reals with x = y = z = 0.
using Quaternion = Eigen::Vector4d;

inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return Quaternion(a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3),
                    a(0) * b(1) + a(1) * b(0) + a(2) * b(3) - a(3) * b(2),
                    a(0) * b(2) - a(1) * b(3) + a(2) * b(0) + a(3) * b(1),
                    a(0) * b(3) + a(1) * b(2) - a(2) * b(1) + a(3) * b(0));
}

inline MatrixXd quat_left_matrix(const Quaternion& q) {
  MatrixXd m(4, 4);
  m << q(0), -q(1), -q(2), -q(3),
       q(1),  q(0), -q(3),  q(2),
       q(2),  q(3),  q(0), -q(1),
       q(3), -q(2),  q(1),  q(0);
  return m;
}

enum class ScalarField { real, complex, quaternion };

inline int field_real_dim(ScalarField f) {
  switch (f) {
    case ScalarField::real: return 1;
    case ScalarField::complex: return 2;
    case ScalarField::quaternion: return 4;
  }
  return 0;
}

// Finite multiplicative group of norm-1 scalars acting by scalar
// multiplication on F^d.
struct ScalarGroupSpec {
  ScalarField field;
  std::vector<Quaternion> generators;

  ScalarGroupSpec(ScalarField field_in, std::vector<Quaternion> gens)
      : field(field_in), generators(std::move(gens)) {
    if (generators.empty()) throw std::invalid_argument("ScalarGroupSpec: no generators");
    for (const auto& q : generators) {
      if (std::abs(q.norm() - 1.0) > kOrthTol)
        throw std::invalid_argument("ScalarGroupSpec: generators must have unit norm");
      if (field == ScalarField::real && q.tail(3).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("ScalarGroupSpec: real generators must be +-1");
      if (field == ScalarField::complex && q.tail(2).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("ScalarGroupSpec: complex generators must lie in C");
    }
  }
};

// Closure under multiplication, capped at order 120.
inline std::vector<Quaternion> scalar_group_closure(const ScalarGroupSpec& spec,
                                                    int max_order = 120, double tol = 1e-9) {
  std::vector<Quaternion> elements;
  elements.push_back(Quaternion(1, 0, 0, 0));
  const auto find = [&](const Quaternion& q) -> int {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if ((elements[i] - q).norm() <= tol) return static_cast<int>(i);
    return -1;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < elements.size(); ++i)
      for (const auto& g : spec.generators) {
        const Quaternion prod = quat_mul(elements[i], g);
        if (find(prod) < 0) {
          elements.push_back(prod);
          if (static_cast<int>(elements.size()) > max_order)
            throw std::runtime_error("scalar_group_closure: group does not close within the cap");
          grew = true;
        }
      }
  }
  return elements;
}

// Realified scalar multiplication on F^d.
inline MatrixXd scalar_realified_matrix(ScalarField field, const Quaternion& q, int module_dim) {
  const int fd = field_real_dim(field);
  MatrixXd block;
  if (field == ScalarField::real) {
    block = MatrixXd::Constant(1, 1, q(0));
  } else if (field == ScalarField::complex) {
    block = MatrixXd(2, 2);
    block << q(0), -q(1), q(1), q(0);
  } else {
    block = quat_left_matrix(q);
  }
  MatrixXd m = MatrixXd::Zero(fd * module_dim, fd * module_dim);
  for (int i = 0; i < module_dim; ++i) m.block(i * fd, i * fd, fd, fd) = block;
  return m;
}

struct SphereQuotientCertificate {
  long group_order = 0;
  bool closed = false;
  bool free = false;
  bool clifford = false;
  double min_eigen_gap = std::numeric_limits<double>::infinity();
  double max_displacement_spread = 0.0;
  std::vector<double> displacements;  // mean displacement per nontrivial element
};

// Certifies the three properties of a scalar quotient: closure of the group
// law, freeness of every nontrivial element on the unit sphere (spectrum
// check on the realified matrix) and constancy of each displacement
// function.
inline SphereQuotientCertificate sphere_quotient_check(const ScalarGroupSpec& spec,
                                                       int module_dim, int samples,
                                                       std::uint64_t seed,
                                                       double clifford_tol = 1e-9,
                                                       double eigen_tol = 1e-8) {
  if (module_dim < 1) throw std::invalid_argument("sphere_quotient_check: module_dim >= 1");
  SphereQuotientCertificate cert;
  const std::vector<Quaternion> elements = scalar_group_closure(spec);
  cert.group_order = static_cast<long>(elements.size());
  cert.closed = true;

  cert.free = true;
  cert.clifford = true;
  CounterRng rng(seed, 0);
  const int real_dim = field_real_dim(spec.field) * module_dim;
  for (const auto& q : elements) {
    if ((q - Quaternion(1, 0, 0, 0)).norm() <= 1e-12) continue;
    const MatrixXd m = scalar_realified_matrix(spec.field, q, module_dim);
    Eigen::EigenSolver<MatrixXd> eig(m);
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < eig.eigenvalues().size(); ++i)
      gap = std::min(gap, std::abs(eig.eigenvalues()(i) - std::complex<double>(1.0, 0.0)));
    cert.min_eigen_gap = std::min(cert.min_eigen_gap, gap);
    if (gap <= eigen_tol) cert.free = false;

    std::vector<double> deltas;
    deltas.reserve(samples);
    for (int s = 0; s < samples; ++s) {
      const VectorXd x = random_unit_vector(rng, real_dim);
      deltas.push_back(sphere_distance(x, m * x));
    }
    const DisplacementProfile profile = DisplacementProfile::from_values(std::move(deltas));
    const double spread = profile.max - profile.min;
    cert.max_displacement_spread = std::max(cert.max_displacement_spread, spread);
    if (spread > clifford_tol * (1.0 + profile.mean)) cert.clifford = false;
    cert.displacements.push_back(profile.mean);
  }
  return cert;
}

}  // namespace manifolds
