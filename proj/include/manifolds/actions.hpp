#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "manifolds/ambient.hpp"
#include "manifolds/common.hpp"
#include "manifolds/grassmann.hpp"
#include "manifolds/kaehler.hpp"
#include "manifolds/rng.hpp"
#include "manifolds/stiefel.hpp"

namespace manifolds {

struct TorsionFactor {
  int prime;
  int exponent;

  long order() const {
    long o = 1;
    for (int i = 0; i < exponent; ++i) o *= prime;
    return o;
  }
};

// Z^k plus a finite abelian torsion part, standing in for G (+) sum of
// Z_{p_i^{a_i}} with G torsionfree.
struct GroupSpec {
  int free_rank = 0;
  std::vector<TorsionFactor> torsion;

  GroupSpec(int rank, std::vector<TorsionFactor> torsion_in = {})
      : free_rank(rank), torsion(std::move(torsion_in)) {
    if (free_rank < 0) throw std::invalid_argument("GroupSpec: free rank must be >= 0");
    for (const auto& t : torsion) {
      if (t.prime < 2) throw std::invalid_argument("GroupSpec: primes must be >= 2");
      if (t.exponent < 1) throw std::invalid_argument("GroupSpec: exponents must be >= 1");
    }
  }

  long torsion_order() const {
    long o = 1;
    for (const auto& t : torsion) {
      o *= t.order();
      if (o > 100000000L) throw std::runtime_error("GroupSpec: torsion order overflow");
    }
    return o;
  }
};

struct GroupElement {
  Eigen::VectorXi free_part;       // length = free_rank
  std::vector<long> torsion_part;  // residues, reduced mod p^a

  bool is_identity() const {
    if (free_part.size() > 0 && free_part.cwiseAbs().maxCoeff() != 0) return false;
    for (long r : torsion_part)
      if (r != 0) return false;
    return true;
  }
};

inline GroupElement identity_element(const GroupSpec& spec) {
  GroupElement e;
  e.free_part = Eigen::VectorXi::Zero(spec.free_rank);
  e.torsion_part.assign(spec.torsion.size(), 0);
  return e;
}

inline GroupElement reduce(const GroupSpec& spec, GroupElement g) {
  for (std::size_t i = 0; i < spec.torsion.size(); ++i) {
    const long o = spec.torsion[i].order();
    g.torsion_part[i] = ((g.torsion_part[i] % o) + o) % o;
  }
  return g;
}

inline GroupElement compose(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  GroupElement c;
  c.free_part = a.free_part + b.free_part;
  c.torsion_part.resize(spec.torsion.size());
  for (std::size_t i = 0; i < spec.torsion.size(); ++i)
    c.torsion_part[i] = a.torsion_part[i] + b.torsion_part[i];
  return reduce(spec, c);
}

enum class BoundaryMode { cyclic, zero_pad };

// Finite window of Z^k standing in for l2(Z^k). Cyclic mode folds the group
// through Z_{2R}^k and keeps every shift exactly isometric; zero-pad mode
// uses the literal box {-R..R}^k and loses mass at the boundary, which is
// recorded rather than hidden.
struct L2Truncation {
  int rank;
  int radius;
  BoundaryMode mode = BoundaryMode::cyclic;

  L2Truncation(int rank_in, int radius_in, BoundaryMode mode_in = BoundaryMode::cyclic)
      : rank(rank_in), radius(radius_in), mode(mode_in) {
    if (rank < 1 || radius < 1)
      throw std::invalid_argument("L2Truncation: rank and radius must be >= 1");
  }

  int points_per_axis() const { return mode == BoundaryMode::cyclic ? 2 * radius : 2 * radius + 1; }

  long dimension() const {
    long d = 1;
    for (int a = 0; a < rank; ++a) {
      d *= points_per_axis();
      if (d > 100000L) throw std::runtime_error("L2Truncation: window dimension overflow");
    }
    return d;
  }
};

struct TranslationMatrix {
  MatrixXd matrix;
  bool truncated = false;  // zero-pad shift exceeded the window radius
};

// Permutation matrix of the right-translation action of a free-part element
// on the truncated window.
inline TranslationMatrix right_translation_matrix(const GroupElement& g,
                                                  const L2Truncation& trunc) {
  for (long r : g.torsion_part)
    if (r != 0)
      throw std::invalid_argument("right_translation_matrix: element has a torsion component");
  if (g.free_part.size() != trunc.rank)
    throw std::invalid_argument("right_translation_matrix: rank mismatch");

  const int per_axis = trunc.points_per_axis();
  const long dim = trunc.dimension();
  TranslationMatrix out;
  out.matrix = MatrixXd::Zero(dim, dim);
  if (trunc.mode == BoundaryMode::zero_pad && g.free_part.size() > 0 &&
      g.free_part.cwiseAbs().maxCoeff() > trunc.radius)
    out.truncated = true;

  std::vector<int> idx(trunc.rank, 0);
  for (long flat = 0; flat < dim; ++flat) {
    long target = 0;
    bool inside = true;
    long stride = 1;
    for (int a = 0; a < trunc.rank; ++a) {
      long shifted = idx[a] - g.free_part(a);  // basis map e_h -> e_{h - m}
      if (trunc.mode == BoundaryMode::cyclic) {
        shifted = ((shifted % per_axis) + per_axis) % per_axis;
      } else if (shifted < 0 || shifted >= per_axis) {
        inside = false;
        break;
      }
      target += stride * shifted;
      stride *= per_axis;
    }
    if (inside) out.matrix(target, flat) = 1.0;
    for (int a = 0; a < trunc.rank; ++a) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
  }
  return out;
}

// Multiplication by a primitive p^a-th root of unity on the complexified
// truncation: order exactly p^a and no eigenvalue 1 for nontrivial powers,
// hence free on the unit sphere.
inline MatrixXcd torsion_scalar_action(int prime, int exponent, long dim) {
  if (prime < 2 || exponent < 1)
    throw std::invalid_argument("torsion_scalar_action: need p^a >= 2");
  const long order = TorsionFactor{prime, exponent}.order();
  const std::complex<double> zeta =
      std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(order));
  return zeta * MatrixXcd::Identity(dim, dim);
}

// A finitely generated abelian group acting by unitaries: one image per free
// generator, one per torsion factor, all on the same ambient space.
struct LinearIsometryAction {
  GroupSpec group;
  std::vector<MatrixXcd> free_images;
  std::vector<MatrixXcd> torsion_images;
  int ambient_dim = 0;
  std::optional<L2Truncation> truncation;  // set when built over a window

  LinearIsometryAction(GroupSpec group_in, std::vector<MatrixXcd> free_in,
                       std::vector<MatrixXcd> torsion_in,
                       std::optional<L2Truncation> trunc = std::nullopt,
                       double unitary_tol = kOrthTol, double order_tol = 1e-8)
      : group(std::move(group_in)),
        free_images(std::move(free_in)),
        torsion_images(std::move(torsion_in)),
        truncation(std::move(trunc)) {
    if (static_cast<int>(free_images.size()) != group.free_rank ||
        torsion_images.size() != group.torsion.size())
      throw std::invalid_argument("LinearIsometryAction: generator count mismatch");
    std::vector<const MatrixXcd*> all;
    for (const auto& m : free_images) all.push_back(&m);
    for (const auto& m : torsion_images) all.push_back(&m);
    if (all.empty()) throw std::invalid_argument("LinearIsometryAction: no generators");
    ambient_dim = static_cast<int>(all.front()->rows());
    for (const auto* m : all) {
      if (m->rows() != ambient_dim || m->cols() != ambient_dim)
        throw std::invalid_argument("LinearIsometryAction: inconsistent ambient dimensions");
      if ((m->adjoint() * *m - MatrixXcd::Identity(ambient_dim, ambient_dim)).norm() >
          unitary_tol * ambient_dim)
        throw std::invalid_argument("LinearIsometryAction: generator image is not unitary");
    }
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j)
        if ((*all[i] * *all[j] - *all[j] * *all[i]).norm() > 1e-10 * ambient_dim)
          throw std::invalid_argument("LinearIsometryAction: generator images do not commute");
    for (std::size_t i = 0; i < torsion_images.size(); ++i) {
      const long order = group.torsion[i].order();
      MatrixXcd power = MatrixXcd::Identity(ambient_dim, ambient_dim);
      for (long k = 0; k < order; ++k) power = power * torsion_images[i];
      if ((power - MatrixXcd::Identity(ambient_dim, ambient_dim)).norm() > order_tol)
        throw std::invalid_argument(
            "LinearIsometryAction: torsion image does not have the declared order");
    }
  }

  MatrixXcd represent(const GroupElement& g) const {
    if (g.free_part.size() != group.free_rank || g.torsion_part.size() != group.torsion.size())
      throw std::invalid_argument("represent: element does not match the group spec");
    MatrixXcd m = MatrixXcd::Identity(ambient_dim, ambient_dim);
    const auto apply_power = [&](const MatrixXcd& gen, long power) {
      if (power == 0) return;
      const MatrixXcd base = power > 0 ? gen : MatrixXcd(gen.adjoint());
      for (long i = 0; i < std::abs(power); ++i) m = m * base;
    };
    for (int a = 0; a < group.free_rank; ++a) apply_power(free_images[a], g.free_part(a));
    for (std::size_t i = 0; i < torsion_images.size(); ++i)
      apply_power(torsion_images[i], g.torsion_part[i]);
    return m;
  }
};

// Direct-sum realization on the complexified window: free generators act by
// right translation, torsion factors by scalar roots of unity.
inline LinearIsometryAction build_action(const GroupSpec& spec, const L2Truncation& trunc) {
  if (trunc.rank != std::max(spec.free_rank, 1))
    throw std::invalid_argument("build_action: truncation rank must match the free rank");
  const long dim = trunc.dimension();
  std::vector<MatrixXcd> free_images;
  for (int a = 0; a < spec.free_rank; ++a) {
    GroupElement g = identity_element(spec);
    g.free_part(a) = 1;
    free_images.push_back(right_translation_matrix(g, trunc).matrix.cast<std::complex<double>>());
  }
  std::vector<MatrixXcd> torsion_images;
  for (const auto& t : spec.torsion)
    torsion_images.push_back(torsion_scalar_action(t.prime, t.exponent, dim));
  return LinearIsometryAction(spec, std::move(free_images), std::move(torsion_images), trunc);
}

inline std::vector<GroupElement> enumerate_torsion_elements(const GroupSpec& spec,
                                                            bool include_identity = false) {
  const long order = spec.torsion_order();
  if (order > 1000000L) throw std::runtime_error("enumerate_torsion_elements: enumeration overflow");
  std::vector<GroupElement> out;
  out.reserve(order);
  GroupElement g = identity_element(spec);
  for (long code = 0; code < order; ++code) {
    long rest = code;
    for (std::size_t i = 0; i < spec.torsion.size(); ++i) {
      const long o = spec.torsion[i].order();
      g.torsion_part[i] = rest % o;
      rest /= o;
    }
    if (include_identity || !g.is_identity()) out.push_back(g);
  }
  return out;
}

struct FreenessViolation {
  GroupElement element;
  VectorXcd fixed_unit_vector;
  double eigenvalue_gap;  // |lambda - 1| for the closest eigenvalue
};

struct FreenessCertificate {
  bool torsion_free = true;  // no nontrivial torsion element fixes a unit vector
  std::vector<FreenessViolation> violations;
  long checked_elements = 0;
  std::string free_part_note;  // wrap caveat for the Z^k part, if present
};

// Exact freeness certificate over the torsion subgroup: an element acts
// freely on the unit sphere iff 1 is not an eigenvalue of its image.
inline FreenessCertificate freeness_check(const LinearIsometryAction& action,
                                          bool torsion_only = true, double tol = 1e-8) {
  FreenessCertificate cert;
  const auto elements = enumerate_torsion_elements(action.group);
  for (const auto& g : elements) {
    const MatrixXcd m = action.represent(g);
    Eigen::ComplexEigenSolver<MatrixXcd> eig(m);
    int best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < eig.eigenvalues().size(); ++i) {
      const double d = std::abs(eig.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
      if (d < gap) {
        gap = d;
        best = i;
      }
    }
    if (gap <= tol) {
      VectorXcd v = eig.eigenvectors().col(best);
      cert.violations.push_back({g, v / v.norm(), gap});
      cert.torsion_free = false;
    }
    ++cert.checked_elements;
  }
  if (!torsion_only && action.group.free_rank > 0)
    cert.free_part_note =
        "free part is certified only by orbit-divergence floors below the wrap radius";
  return cert;
}

struct OrbitDivergenceReport {
  double min_displacement = 0.0;
  int argmin_power = 0;
  bool clears_floor = false;
  double floor = 0.0;
};

// min over 1 <= k <= K of ||rho(g)^k x - x|| for an infinite-order g and a
// unit vector x. In cyclic mode K must stay below the window radius so that
// the finite model is wrap-free.
inline OrbitDivergenceReport orbit_divergence_check(const LinearIsometryAction& action,
                                                    const GroupElement& g, const VectorXcd& x,
                                                    int max_power, double floor = 1e-3) {
  if (g.free_part.size() == 0 || g.free_part.cwiseAbs().maxCoeff() == 0)
    throw std::invalid_argument("orbit_divergence_check: element must have infinite order");
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("orbit_divergence_check: x must be a unit vector");
  if (max_power < 1) throw std::invalid_argument("orbit_divergence_check: need K >= 1");
  if (action.truncation) {
    const auto& tr = *action.truncation;
    const long reach = static_cast<long>(max_power) * g.free_part.cwiseAbs().maxCoeff();
    if (tr.mode == BoundaryMode::cyclic && reach >= tr.radius)
      throw std::invalid_argument("orbit_divergence_check: K exceeds the wrap-free range");
    if (tr.mode == BoundaryMode::zero_pad && reach > 2 * tr.radius)
      throw std::invalid_argument("orbit_divergence_check: K exceeds the window support");
  }
  const MatrixXcd m = action.represent(g);
  OrbitDivergenceReport report;
  report.floor = floor;
  report.min_displacement = std::numeric_limits<double>::infinity();
  VectorXcd xk = x;
  for (int k = 1; k <= max_power; ++k) {
    xk = m * xk;
    const double d = (xk - x).norm();
    if (d < report.min_displacement) {
      report.min_displacement = d;
      report.argmin_power = k;
    }
  }
  report.clears_floor = report.min_displacement >= floor;
  return report;
}

// Real form of rho(g): the matrix itself when it is real, otherwise the
// realified operator on interleaved (Re, Im) coordinates.
inline MatrixXd real_representation(const LinearIsometryAction& action, const GroupElement& g) {
  const MatrixXcd m = action.represent(g);
  if (m.imag().cwiseAbs().maxCoeff() <= 1e-14) return m.real();
  return realify_operator(m);
}

inline StiefelPoint induced_stiefel_action(const LinearIsometryAction& action,
                                           const GroupElement& g, const StiefelPoint& y) {
  const MatrixXd m = real_representation(action, g);
  if (m.rows() != y.frame.rows())
    throw std::invalid_argument("induced_stiefel_action: dimension mismatch");
  return isometry_action(m, y);
}

inline GrassmannPoint induced_grassmann_action(const LinearIsometryAction& action,
                                               const GroupElement& g, const GrassmannPoint& x) {
  const MatrixXd m = real_representation(action, g);
  if (m.rows() != x.basis.rows())
    throw std::invalid_argument("induced_grassmann_action: dimension mismatch");
  return GrassmannPoint(detail::polar_orthonormalize(m * x.basis), 1e-9);
}

inline ComplexGrassmannPoint induced_grassmann_action(const LinearIsometryAction& action,
                                                      const GroupElement& g,
                                                      const ComplexGrassmannPoint& x) {
  const MatrixXcd m = action.represent(g);
  if (m.rows() != x.basis.rows())
    throw std::invalid_argument("induced_grassmann_action: dimension mismatch");
  return unitary_action(m, x);
}

// Great-circle distance between unit vectors, in the atan2 form that stays
// fully accurate near both the identity and the antipode.
inline double sphere_distance(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("sphere_distance: dimension mismatch");
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

// Displacement delta_g(x) = d(x, g x) on the unit sphere of the (realified)
// ambient space.
inline double displacement(const LinearIsometryAction& action, const GroupElement& g,
                           const VectorXd& x) {
  const MatrixXd m = real_representation(action, g);
  if (m.rows() != x.size()) throw std::invalid_argument("displacement: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("displacement: x must be a unit vector");
  return sphere_distance(x, m * x);
}

inline double displacement(const LinearIsometryAction& action, const GroupElement& g,
                           const StiefelPoint& y, MetricKind kind) {
  return distance(y, induced_stiefel_action(action, g, y), kind);
}

inline double displacement(const LinearIsometryAction& action, const GroupElement& g,
                           const GrassmannPoint& x) {
  return grassmann_distance(x, induced_grassmann_action(action, g, x));
}

struct DisplacementProfile {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  int argmin = -1;
  int argmax = -1;

  static DisplacementProfile from_values(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("DisplacementProfile: no samples");
    DisplacementProfile p;
    p.values = std::move(v);
    p.min = std::numeric_limits<double>::infinity();
    p.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      const double d = p.values[i];
      if (d < -1e-12) throw std::invalid_argument("DisplacementProfile: negative displacement");
      sum += d;
      if (d < p.min) {
        p.min = d;
        p.argmin = static_cast<int>(i);
      }
      if (d > p.max) {
        p.max = d;
        p.argmax = static_cast<int>(i);
      }
    }
    p.mean = sum / static_cast<double>(p.values.size());
    return p;
  }
};

struct CliffordVerdict {
  bool clifford = false;
  DisplacementProfile profile;
  double spread = 0.0;
  double threshold = 0.0;
  VectorXd witness_min, witness_max;  // sample points achieving min / max
};

// CLIFFORD iff max-min of the sampled displacement stays within
// tol * (1 + mean); otherwise the witness pair exhibits the variation.
inline CliffordVerdict clifford_detector(const std::function<VectorXd(int)>& sample,
                                         const std::function<VectorXd(const VectorXd&)>& apply,
                                         const std::function<double(const VectorXd&, const VectorXd&)>& dist,
                                         int sample_count, double tol) {
  if (sample_count < 2) throw std::invalid_argument("clifford_detector: need at least 2 samples");
  std::vector<double> values;
  std::vector<VectorXd> points;
  values.reserve(sample_count);
  points.reserve(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    const VectorXd p = sample(i);
    points.push_back(p);
    values.push_back(dist(p, apply(p)));
  }
  CliffordVerdict v;
  v.profile = DisplacementProfile::from_values(std::move(values));
  v.spread = v.profile.max - v.profile.min;
  v.threshold = tol * (1.0 + v.profile.mean);
  v.clifford = v.spread <= v.threshold;
  v.witness_min = points[v.profile.argmin];
  v.witness_max = points[v.profile.argmax];
  return v;
}

inline CliffordVerdict clifford_detector_sphere(const MatrixXd& map, int sample_count, double tol,
                                                CounterRng& rng) {
  const int n = static_cast<int>(map.rows());
  return clifford_detector(
      [&rng, n](int) { return random_unit_vector(rng, n); },
      [&map](const VectorXd& x) { return VectorXd(map * x); },
      [](const VectorXd& a, const VectorXd& b) { return sphere_distance(a, b); }, sample_count,
      tol);
}

struct InvariantGeodesicCertificate {
  double displacement = 0.0;
  double velocity_angle = 0.0;    // junction angle between incoming/outgoing velocities
  double mapping_residual = 0.0;  // max deviation of f(segment) from the extended geodesic
};

// For a Clifford isometry f of the sphere, the minimal geodesic x0 -> f(x0)
// concatenated with its f-image continues smoothly; this certifies the
// junction and that f maps the segment into the extended great circle.
inline InvariantGeodesicCertificate invariant_geodesic_sphere(const MatrixXd& map,
                                                              const VectorXd& x0,
                                                              const CliffordVerdict& verdict) {
  if (!verdict.clifford)
    throw std::invalid_argument("invariant_geodesic_sphere: requires a CLIFFORD verdict");
  if (std::abs(x0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("invariant_geodesic_sphere: x0 must be a unit vector");
  const VectorXd y = map * x0;
  const double c = std::clamp(x0.dot(y), -1.0, 1.0);
  const double theta = std::acos(c);
  InvariantGeodesicCertificate cert;
  cert.displacement = theta;
  if (theta < 1e-12) return cert;  // f fixes x0

  VectorXd u = y - c * x0;
  if (u.norm() > 1e-8) {
    u.normalize();
  } else {  // antipodal image: every great circle through x0 works
    VectorXd seed = VectorXd::Zero(x0.size());
    seed(0) = 1.0;
    u = seed - x0.dot(seed) * x0;
    if (u.norm() < 1e-8) {
      seed.setZero();
      seed(1) = 1.0;
      u = seed - x0.dot(seed) * x0;
    }
    u.normalize();
  }

  const auto gamma = [&](double s) { return VectorXd(x0 * std::cos(s) + u * std::sin(s)); };
  const VectorXd incoming = -x0 * std::sin(theta) + u * std::cos(theta);
  const VectorXd outgoing = map * u;
  cert.velocity_angle =
      std::acos(std::clamp(incoming.dot(outgoing) / (incoming.norm() * outgoing.norm()), -1.0, 1.0));

  double worst = 0.0;
  for (int i = 0; i <= 16; ++i) {
    const double s = theta * i / 16.0;
    worst = std::max(worst, (map * gamma(s) - gamma(s + theta)).norm());
  }
  cert.mapping_residual = worst;
  return cert;
}

// Flat case: translations slide their own lines.
inline InvariantGeodesicCertificate invariant_geodesic_flat(const VectorXd& translation,
                                                            const VectorXd& x0,
                                                            const CliffordVerdict& verdict) {
  if (!verdict.clifford)
    throw std::invalid_argument("invariant_geodesic_flat: requires a CLIFFORD verdict");
  InvariantGeodesicCertificate cert;
  const double len = translation.norm();
  cert.displacement = len;
  if (len < 1e-14) return cert;
  const VectorXd dir = translation / len;
  const auto gamma = [&](double s) { return VectorXd(x0 + s * dir); };
  cert.velocity_angle = std::acos(std::clamp(dir.dot(dir), -1.0, 1.0));
  double worst = 0.0;
  for (int i = 0; i <= 16; ++i) {
    const double s = len * i / 16.0;
    worst = std::max(worst, ((gamma(s) + translation) - gamma(s + len)).norm());
  }
  cert.mapping_residual = worst;
  return cert;
}

// Diagonal unitary with entries zeta_order^{exps_j}; the raw material of the
// exhaustive character-assignment searches.
inline MatrixXcd diagonal_unitary(const std::vector<int>& exponents, long order) {
  MatrixXcd m = MatrixXcd::Zero(exponents.size(), exponents.size());
  for (std::size_t j = 0; j < exponents.size(); ++j)
    m(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * exponents[j] / static_cast<double>(order));
  return m;
}

}  // namespace manifolds
