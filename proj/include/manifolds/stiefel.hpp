#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "manifolds/ambient.hpp"
#include "manifolds/common.hpp"
#include "manifolds/rng.hpp"

namespace manifolds {

enum class MetricKind { euclidean, canonical };

// Orthonormal p-frame in R^n. Frames are validated on construction;
// constraint violations are errors, never silently projected.
struct StiefelPoint {
  MatrixXd frame;
  MetricKind metric_kind = MetricKind::euclidean;

  StiefelPoint(MatrixXd frame_in, MetricKind kind = MetricKind::euclidean,
               double tol = kOrthTol)
      : frame(std::move(frame_in)), metric_kind(kind) {
    detail::require_finite(frame, "StiefelPoint");
    const int n = static_cast<int>(frame.rows());
    const int p = static_cast<int>(frame.cols());
    if (p < 1 || n < 2 * p)
      throw std::invalid_argument("StiefelPoint: requires n >= 2p");
    const double residual =
        (frame.transpose() * frame - MatrixXd::Identity(p, p)).norm();
    if (residual > tol)
      throw std::invalid_argument("StiefelPoint: frame is not orthonormal");
  }

  int n() const { return static_cast<int>(frame.rows()); }
  int p() const { return static_cast<int>(frame.cols()); }
};

// Tangent vector at a Stiefel point; Y^T V must be skew.
struct TangentAtStiefel {
  StiefelPoint base;
  MatrixXd direction;

  TangentAtStiefel(StiefelPoint base_in, MatrixXd direction_in, double tol = kOrthTol)
      : base(std::move(base_in)), direction(std::move(direction_in)) {
    detail::require_finite(direction, "TangentAtStiefel");
    if (direction.rows() != base.frame.rows() || direction.cols() != base.frame.cols())
      throw std::invalid_argument("TangentAtStiefel: dimension mismatch");
    const MatrixXd yv = base.frame.transpose() * direction;
    const double residual = (yv + yv.transpose()).norm();
    if (residual > tol * (1.0 + direction.norm()))
      throw std::invalid_argument("TangentAtStiefel: skew constraint violated");
  }
};

namespace detail {

inline void require_same_base(const TangentAtStiefel& v, const TangentAtStiefel& w,
                              const char* op) {
  if ((v.base.frame - w.base.frame).norm() > 10 * kOrthTol)
    throw std::invalid_argument(std::string(op) + ": tangent vectors have different base points");
}

inline MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Closest orthonormal frame (polar factor).
inline MatrixXd polar_orthonormalize(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

// Orthonormal basis of the complement of the column span (n x (n-p)).
inline MatrixXd orthogonal_complement(const MatrixXd& frame) {
  const int n = static_cast<int>(frame.rows());
  const int p = static_cast<int>(frame.cols());
  Eigen::HouseholderQR<MatrixXd> qr(frame);
  const MatrixXd q = qr.householderQ();
  return q.rightCols(n - p);
}

// Euclidean-orthogonal projection onto the tangent space at Y.
inline TangentAtStiefel tangent_project(const StiefelPoint& y, const MatrixXd& z) {
  if (z.rows() != y.frame.rows() || z.cols() != y.frame.cols())
    throw std::invalid_argument("tangent_project: dimension mismatch");
  const MatrixXd v = z - y.frame * detail::symmetrize(y.frame.transpose() * z);
  return TangentAtStiefel(y, v, 1e-8);
}

// L_Y = Id - (1/2) Y Y^T: halves Im Y, fixes Ker Y^T.
inline VectorXd l_operator(const StiefelPoint& y, const VectorXd& z) {
  if (z.size() != y.frame.rows())
    throw std::invalid_argument("l_operator: dimension mismatch");
  return z - 0.5 * y.frame * (y.frame.transpose() * z);
}

// Embedded metric Tr(V^T W) or canonical metric Tr(V^T (Id - 1/2 Y Y^T) W).
inline double metric(const TangentAtStiefel& v, const TangentAtStiefel& w, MetricKind kind) {
  detail::require_same_base(v, w, "metric");
  const double ambient = frobenius_inner(v.direction, w.direction);
  if (kind == MetricKind::euclidean) return ambient;
  const MatrixXd yv = v.base.frame.transpose() * v.direction;
  const MatrixXd yw = w.base.frame.transpose() * w.direction;
  return ambient - 0.5 * frobenius_inner(yv, yw);
}

inline double tangent_norm(const TangentAtStiefel& v, MetricKind kind) {
  return std::sqrt(std::max(0.0, metric(v, v, kind)));
}

struct GeodesicState {
  StiefelPoint point;
  MatrixXd velocity;
};

// Closed-form geodesics.
//
// Euclidean: Y(t) = [Y V] expm(t [A -S; I A]) [I; 0] expm(-t A) with
// A = Y^T V, S = V^T V.
//
// Canonical: horizontal exponential in O(n). With Q0 = [Y, Yperp],
// A = Y^T V, B = Yperp^T V and Omega = [A -B^T; B 0] (skew),
// Y(t) = Q0 expm(t Omega) [I; 0].
inline GeodesicState geodesic_with_velocity(const StiefelPoint& y, const TangentAtStiefel& v,
                                            double t, MetricKind kind) {
  if ((v.base.frame - y.frame).norm() > 10 * kOrthTol)
    throw std::invalid_argument("geodesic: tangent vector not based at the given point");
  const int n = y.n();
  const int p = y.p();
  const MatrixXd& yf = y.frame;
  const MatrixXd& vd = v.direction;
  const MatrixXd a = yf.transpose() * vd;

  if (kind == MetricKind::euclidean) {
    const MatrixXd s = vd.transpose() * vd;
    MatrixXd m(2 * p, 2 * p);
    m.topLeftCorner(p, p) = a;
    m.topRightCorner(p, p) = -s;
    m.bottomLeftCorner(p, p) = MatrixXd::Identity(p, p);
    m.bottomRightCorner(p, p) = a;
    const MatrixXd em = matrix_exp(t * m);
    const MatrixXd ea = matrix_exp(-t * a);
    MatrixXd yv(n, 2 * p);
    yv.leftCols(p) = yf;
    yv.rightCols(p) = vd;
    const MatrixXd g = em.leftCols(p) * ea;
    const MatrixXd point = yv * g;
    const MatrixXd velocity = yv * (m * g - g * a);
    return {StiefelPoint(detail::polar_orthonormalize(point), y.metric_kind, 1e-9), velocity};
  }

  const MatrixXd yperp = orthogonal_complement(yf);
  const MatrixXd b = yperp.transpose() * vd;
  MatrixXd omega = MatrixXd::Zero(n, n);
  omega.topLeftCorner(p, p) = a;
  omega.topRightCorner(p, n - p) = -b.transpose();
  omega.bottomLeftCorner(n - p, p) = b;
  MatrixXd q0(n, n);
  q0.leftCols(p) = yf;
  q0.rightCols(n - p) = yperp;
  const MatrixXd eo = matrix_exp(t * omega);
  const MatrixXd point = q0 * eo.leftCols(p);
  const MatrixXd velocity = q0 * (eo * omega.leftCols(p));
  return {StiefelPoint(point, y.metric_kind, 1e-9), velocity};
}

inline StiefelPoint geodesic(const StiefelPoint& y, const TangentAtStiefel& v, double t,
                             MetricKind kind) {
  return geodesic_with_velocity(y, v, t, kind).point;
}

// RK4 integrator for the geodesic equations, used as an independent oracle
// for the closed forms above. Accelerations:
//   euclidean:  Ydd = -Y (Yd^T Yd)
//   canonical:  Ydd = (Yd - Y A) A - Y (Yd^T Yd),  A = Y^T Yd
// The state is re-orthonormalized after every step.
inline StiefelPoint geodesic_ode(const StiefelPoint& y, const TangentAtStiefel& v, double t,
                                 MetricKind kind, int steps) {
  if (steps < 1) throw std::invalid_argument("geodesic_ode: steps must be >= 1");
  const double h = t / steps;
  MatrixXd pos = y.frame;
  MatrixXd vel = v.direction;

  const auto accel = [kind](const MatrixXd& q, const MatrixXd& qd) -> MatrixXd {
    const MatrixXd s = qd.transpose() * qd;
    if (kind == MetricKind::euclidean) return -q * s;
    const MatrixXd a = q.transpose() * qd;
    return (qd - q * a) * a - q * s;
  };

  for (int i = 0; i < steps; ++i) {
    const MatrixXd k1p = vel;
    const MatrixXd k1v = accel(pos, vel);
    const MatrixXd k2p = vel + 0.5 * h * k1v;
    const MatrixXd k2v = accel(pos + 0.5 * h * k1p, vel + 0.5 * h * k1v);
    const MatrixXd k3p = vel + 0.5 * h * k2v;
    const MatrixXd k3v = accel(pos + 0.5 * h * k2p, vel + 0.5 * h * k2v);
    const MatrixXd k4p = vel + h * k3v;
    const MatrixXd k4v = accel(pos + h * k3p, vel + h * k3v);
    pos += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    vel += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    pos = detail::polar_orthonormalize(pos);
    vel -= pos * detail::symmetrize(pos.transpose() * vel);
  }
  return StiefelPoint(pos, y.metric_kind, 1e-9);
}

// Push a frame through a linear isometric immersion L (m -> n columns of an
// orthonormal map). The image is totally geodesic for both metrics.
inline StiefelPoint embed_isometric(const MatrixXd& l, const StiefelPoint& y,
                                    double tol = kOrthTol) {
  if (l.cols() != y.frame.rows())
    throw std::invalid_argument("embed_isometric: dimension mismatch");
  if ((l.transpose() * l - MatrixXd::Identity(l.cols(), l.cols())).norm() > tol)
    throw std::invalid_argument("embed_isometric: map is not an isometric immersion");
  return StiefelPoint(l * y.frame, y.metric_kind, 1e-9);
}

inline TangentAtStiefel embed_isometric(const MatrixXd& l, const TangentAtStiefel& v,
                                        double tol = kOrthTol) {
  const StiefelPoint base = embed_isometric(l, v.base, tol);
  return TangentAtStiefel(base, l * v.direction, 1e-8);
}

// Left action of an ambient orthogonal map.
inline StiefelPoint isometry_action(const MatrixXd& t, const StiefelPoint& y,
                                    double tol = kOrthTol) {
  if (t.rows() != t.cols() || t.cols() != y.frame.rows())
    throw std::invalid_argument("isometry_action: dimension mismatch");
  if ((t.transpose() * t - MatrixXd::Identity(t.cols(), t.cols())).norm() > tol * t.cols())
    throw std::invalid_argument("isometry_action: map is not orthogonal");
  return StiefelPoint(t * y.frame, y.metric_kind, 1e-9);
}

// Right action of O(p): (A, Y) -> Y A^T. Free because ||Y(A^T - I)||_F
// equals ||A^T - I||_F for orthonormal Y.
inline StiefelPoint op_action(const MatrixXd& a, const StiefelPoint& y, double tol = kOrthTol) {
  const int p = y.p();
  if (a.rows() != p || a.cols() != p)
    throw std::invalid_argument("op_action: dimension mismatch");
  if ((a.transpose() * a - MatrixXd::Identity(p, p)).norm() > tol * p)
    throw std::invalid_argument("op_action: map is not orthogonal");
  return StiefelPoint(y.frame * a.transpose(), y.metric_kind, 1e-9);
}

// Euclidean-orthonormal basis of the tangent space at Y: p(p-1)/2 fiber
// directions Y (E_ij - E_ji)/sqrt(2) followed by p(n-p) horizontal
// directions Yperp e_l e_i^T.
inline std::vector<MatrixXd> tangent_basis(const StiefelPoint& y) {
  const int n = y.n();
  const int p = y.p();
  const MatrixXd yperp = orthogonal_complement(y.frame);
  std::vector<MatrixXd> basis;
  basis.reserve(p * (p - 1) / 2 + p * (n - p));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      MatrixXd skew = MatrixXd::Zero(p, p);
      skew(i, j) = inv_sqrt2;
      skew(j, i) = -inv_sqrt2;
      basis.push_back(y.frame * skew);
    }
  for (int i = 0; i < p; ++i)
    for (int l = 0; l < n - p; ++l) {
      MatrixXd dir = MatrixXd::Zero(n, p);
      dir.col(i) = yperp.col(l);
      basis.push_back(dir);
    }
  return basis;
}

struct LogMapResult {
  MatrixXd initial_velocity;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

// Lift of the subspace log to an initial-velocity guess: principal-angle
// horizontal part plus the fiber rotation aligning the endpoint frames.
inline std::optional<MatrixXd> log_initial_guess(const StiefelPoint& y1,
                                                 const StiefelPoint& y2) {
  const int p = y1.p();
  const MatrixXd m = y1.frame.transpose() * y2.frame;
  Eigen::JacobiSVD<MatrixXd> msvd(m);
  if (msvd.singularValues()(p - 1) < 1e-6) return std::nullopt;
  const MatrixXd l =
      (y2.frame - y1.frame * m) * m.inverse();  // (I - Y1 Y1^T) Y2 M^{-1}
  Eigen::JacobiSVD<MatrixXd> svd(l, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd theta = svd.singularValues();
  for (int i = 0; i < theta.size(); ++i) theta(i) = std::atan(theta(i));
  const MatrixXd xi =
      svd.matrixU() * theta.asDiagonal() * svd.matrixV().transpose();
  // Endpoint of the horizontal geodesic, then the in-fiber rotation.
  MatrixXd cos_t = theta;
  MatrixXd sin_t = theta;
  for (int i = 0; i < theta.size(); ++i) {
    cos_t(i) = std::cos(theta(i));
    sin_t(i) = std::sin(theta(i));
  }
  const MatrixXd reached = y1.frame * svd.matrixV() * cos_t.asDiagonal() * svd.matrixV().transpose() +
                           svd.matrixU() * sin_t.asDiagonal() * svd.matrixV().transpose();
  const MatrixXd r = polar_orthonormalize(reached.transpose() * y2.frame);
  if (r.determinant() < 0) return std::nullopt;
  const MatrixXd a = r.log();
  if ((a + a.transpose()).norm() > 1e-8) return std::nullopt;
  return xi + y1.frame * a;
}

}  // namespace detail

// Log map by shooting: damped Gauss-Newton on the initial velocity,
// initialized from the subspace principal-angle log lifted horizontally.
inline LogMapResult stiefel_log(const StiefelPoint& y1, const StiefelPoint& y2,
                                MetricKind kind, int max_iterations = 200) {
  if (y1.n() != y2.n() || y1.p() != y2.p())
    throw std::invalid_argument("stiefel_log: dimension mismatch");
  const int n = y1.n();
  const int p = y1.p();

  if (p == 1) {  // great circle
    const double c = std::clamp(y1.frame.col(0).dot(y2.frame.col(0)), -1.0, 1.0);
    const double theta = std::acos(c);
    MatrixXd v = MatrixXd::Zero(n, 1);
    if (theta > 1e-14) {
      VectorXd u = y2.frame.col(0) - c * y1.frame.col(0);
      if (u.norm() < 1e-14) {  // antipodal: pick any orthogonal direction
        u = orthogonal_complement(y1.frame).col(0);
      }
      v.col(0) = theta * u.normalized();
    }
    return {v, true, 0.0, 0};
  }

  const std::vector<MatrixXd> basis = tangent_basis(y1);
  const int m = static_cast<int>(basis.size());

  const auto assemble = [&](const VectorXd& c) {
    MatrixXd v = MatrixXd::Zero(n, p);
    for (int i = 0; i < m; ++i) v += c(i) * basis[i];
    return v;
  };
  const auto residual_of = [&](const VectorXd& c) -> VectorXd {
    const MatrixXd v = assemble(c);
    const TangentAtStiefel tv(y1, v, 1e-6);
    const MatrixXd diff = geodesic(y1, tv, 1.0, kind).frame - y2.frame;
    return Eigen::Map<const VectorXd>(diff.data(), diff.size());
  };

  std::vector<MatrixXd> seeds;
  if (const auto lift = detail::log_initial_guess(y1, y2)) seeds.push_back(*lift);
  const MatrixXd proj = tangent_project(y1, y2.frame - y1.frame).direction;
  seeds.push_back(proj);
  seeds.push_back(0.5 * proj);

  const double tol = 1e-11 * std::sqrt(static_cast<double>(n * p));
  LogMapResult best;
  best.residual = std::numeric_limits<double>::infinity();

  for (const MatrixXd& seed : seeds) {
    VectorXd c(m);
    for (int i = 0; i < m; ++i) c(i) = frobenius_inner(seed, basis[i]);
    VectorXd r = residual_of(c);
    double rn = r.norm();
    double lambda = 1e-4;
    int iter = 0;
    const double fd = 1e-6;
    while (iter < max_iterations && rn > tol) {
      MatrixXd jac(r.size(), m);
      for (int i = 0; i < m; ++i) {
        VectorXd cp = c, cm = c;
        cp(i) += fd;
        cm(i) -= fd;
        jac.col(i) = (residual_of(cp) - residual_of(cm)) / (2.0 * fd);
      }
      const MatrixXd jtj = jac.transpose() * jac;
      const VectorXd jtr = jac.transpose() * r;
      bool accepted = false;
      for (int attempt = 0; attempt < 25; ++attempt) {
        const MatrixXd lhs = jtj + lambda * MatrixXd::Identity(m, m);
        const VectorXd step = lhs.ldlt().solve(-jtr);
        const VectorXd c_new = c + step;
        const VectorXd r_new = residual_of(c_new);
        if (r_new.norm() < rn) {
          c = c_new;
          r = r_new;
          rn = r_new.norm();
          lambda = std::max(1e-12, lambda / 3.0);
          accepted = true;
          break;
        }
        lambda *= 10.0;
        if (lambda > 1e14) break;
      }
      ++iter;
      if (!accepted) break;
    }
    if (rn < best.residual) {
      best.initial_velocity = assemble(c);
      best.residual = rn;
      best.iterations = iter;
      best.converged = rn <= tol;
    }
    if (best.converged) break;
  }
  return best;
}

// Length of the connecting geodesic found by the shooting solver.
inline double distance(const StiefelPoint& y1, const StiefelPoint& y2, MetricKind kind) {
  if (y1.n() != y2.n() || y1.p() != y2.p())
    throw std::invalid_argument("distance: dimension mismatch");
  const LogMapResult log = stiefel_log(y1, y2, kind);
  const TangentAtStiefel v(y1, log.initial_velocity, 1e-6);
  const double length = tangent_norm(v, kind);
  if (!log.converged)
    throw SolverFailure("distance: shooting solver did not converge", length, log.residual);
  return length;
}

// Sectional curvature of the canonical metric through the submersion
// O(n) -> St(p, n) with the bi-invariant metric <X, Y> = 1/2 Tr(X^T Y)
// (the scale that matches the canonical metric on horizontal lifts):
//   K = (1/4 ||[X, Y]||^2 + 3/4 ||[X, Y]_vert||^2) / ||X ^ Y||^2.
inline double sectional_curvature_canonical(const StiefelPoint& y, const TangentAtStiefel& v,
                                            const TangentAtStiefel& w) {
  detail::require_same_base(v, w, "sectional_curvature_canonical");
  const int n = y.n();
  const int p = y.p();
  const double gvv = metric(v, v, MetricKind::canonical);
  const double gww = metric(w, w, MetricKind::canonical);
  const double gvw = metric(v, w, MetricKind::canonical);
  const double gram = gvv * gww - gvw * gvw;
  if (gram <= 1e-12 * std::max(1.0, gvv * gww))
    throw std::invalid_argument("sectional_curvature_canonical: degenerate plane");

  const MatrixXd yperp = orthogonal_complement(y.frame);
  const auto lift = [&](const MatrixXd& dir) {
    MatrixXd omega = MatrixXd::Zero(n, n);
    const MatrixXd a = y.frame.transpose() * dir;
    const MatrixXd b = yperp.transpose() * dir;
    omega.topLeftCorner(p, p) = a;
    omega.topRightCorner(p, n - p) = -b.transpose();
    omega.bottomLeftCorner(n - p, p) = b;
    return omega;
  };
  const MatrixXd ov = lift(v.direction);
  const MatrixXd ow = lift(w.direction);
  const MatrixXd c = ov * ow - ow * ov;
  const double full = 0.5 * c.squaredNorm();
  const double vert = 0.5 * c.bottomRightCorner(n - p, n - p).squaredNorm();
  return (0.25 * full + 0.75 * vert) / gram;
}

// Independent curvature estimate from geodesic deviation: for canonically
// orthonormal V, W the Jacobi field J(t) = d/ds exp_Y(t(V + sW)) satisfies
// ||J||^2 = t^2 - (K/3) t^4 + O(t^6); two step sizes give a Richardson
// extrapolation in t.
inline double sectional_curvature_jacobi_fd(const StiefelPoint& y, const TangentAtStiefel& v,
                                            const TangentAtStiefel& w, double t = 0.2,
                                            double h = 1e-4) {
  const double nv = tangent_norm(v, MetricKind::canonical);
  if (nv < 1e-10) throw std::invalid_argument("sectional_curvature_jacobi_fd: degenerate plane");
  const MatrixXd vu = v.direction / nv;
  MatrixXd wu = w.direction;
  const TangentAtStiefel vn(y, vu, 1e-8);
  wu -= metric(vn, TangentAtStiefel(y, wu, 1e-6), MetricKind::canonical) * vu;
  const double nw = tangent_norm(TangentAtStiefel(y, wu, 1e-6), MetricKind::canonical);
  if (nw < 1e-10) throw std::invalid_argument("sectional_curvature_jacobi_fd: degenerate plane");
  wu /= nw;

  const auto estimate = [&](double tt) {
    const TangentAtStiefel plus(y, vu + h * wu, 1e-6);
    const TangentAtStiefel minus(y, vu - h * wu, 1e-6);
    const MatrixXd jd = (geodesic(y, plus, tt, MetricKind::canonical).frame -
                         geodesic(y, minus, tt, MetricKind::canonical).frame) /
                        (2.0 * h);
    const StiefelPoint at = geodesic(y, TangentAtStiefel(y, vu, 1e-8), tt, MetricKind::canonical);
    const TangentAtStiefel j = tangent_project(at, jd);
    const double jj = metric(j, j, MetricKind::canonical);
    return 3.0 * (tt * tt - jj) / (tt * tt * tt * tt);
  };
  const double k1 = estimate(t);
  const double k2 = estimate(0.5 * t);
  return (4.0 * k2 - k1) / 3.0;
}

inline StiefelPoint random_stiefel(CounterRng& rng, int n, int p,
                                   MetricKind kind = MetricKind::euclidean) {
  MatrixXd g = rng.gaussian(n, p);
  return StiefelPoint(detail::polar_orthonormalize(g), kind, 1e-8);
}

inline TangentAtStiefel random_tangent(CounterRng& rng, const StiefelPoint& y) {
  return tangent_project(y, rng.gaussian(y.n(), y.p()));
}

}  // namespace manifolds
