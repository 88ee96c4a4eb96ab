#include "manifolds/grassmann.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "manifolds/rng.hpp"
#include "manifolds/stiefel.hpp"

using namespace manifolds;

namespace {

GrassmannPoint span_of(std::initializer_list<int> axes, int n) {
  MatrixXd basis = MatrixXd::Zero(n, static_cast<int>(axes.size()));
  int j = 0;
  for (int axis : axes) basis(axis, j++) = 1.0;
  return GrassmannPoint(basis);
}

}  // namespace

TEST(HorizontalProject, KillsVerticalVectors) {
  CounterRng rng(60);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  MatrixXd a = rng.gaussian(2, 2);
  a = 0.5 * (a - a.transpose().eval());
  const TangentAtStiefel vertical(y, y.frame * a, 1e-8);
  EXPECT_LT(horizontal_project(y, vertical).direction.norm(), 1e-12);
}

TEST(HorizontalProject, FixesHorizontalVectors) {
  CounterRng rng(61);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const MatrixXd yperp = orthogonal_complement(y.frame);
  const TangentAtStiefel h(y, yperp * rng.gaussian(4, 2), 1e-8);
  EXPECT_LT((horizontal_project(y, h).direction - h.direction).norm(), 1e-12);
}

TEST(HorizontalProject, SplitIsOrthogonalInBothMetrics) {
  CounterRng rng(62);
  for (int t = 0; t < 50; ++t) {
    const StiefelPoint y = random_stiefel(rng, 6, 2);
    const TangentAtStiefel v = random_tangent(rng, y);
    const HorizontalAtGrassmann h = horizontal_project(y, v);
    const TangentAtStiefel hpart(y, h.direction, 1e-8);
    const TangentAtStiefel vpart(y, v.direction - h.direction, 1e-8);
    EXPECT_NEAR(metric(hpart, vpart, MetricKind::euclidean), 0.0, 1e-12);
    EXPECT_NEAR(metric(hpart, vpart, MetricKind::canonical), 0.0, 1e-12);
  }
}

TEST(SubmersionMetric, UnitHorizontalVector) {
  CounterRng rng(63);
  const GrassmannPoint x = random_grassmann(rng, 6, 2);
  HorizontalAtGrassmann xi = random_horizontal(rng, x);
  xi = HorizontalAtGrassmann(x, xi.direction / xi.direction.norm(), 1e-8);
  EXPECT_NEAR(submersion_metric(xi, xi), 1.0, 1e-12);
}

TEST(SubmersionMetric, EuclideanAndCanonicalEvaluationsAgree) {
  CounterRng rng(64);
  for (int t = 0; t < 50; ++t) {
    const StiefelPoint y = random_stiefel(rng, 6, 2);
    const HorizontalAtGrassmann xi = horizontal_project(y, random_tangent(rng, y));
    const HorizontalAtGrassmann eta = horizontal_project(y, random_tangent(rng, y));
    const TangentAtStiefel xs(y, xi.direction, 1e-8);
    const TangentAtStiefel es(y, eta.direction, 1e-8);
    const double quotient = submersion_metric(xi, eta);
    EXPECT_NEAR(quotient, metric(xs, es, MetricKind::euclidean), 1e-12);
    EXPECT_NEAR(quotient, metric(xs, es, MetricKind::canonical), 1e-12);
  }
}

TEST(SubmersionMetric, BilinearSpotCheck) {
  CounterRng rng(65);
  const GrassmannPoint x = random_grassmann(rng, 6, 2);
  const HorizontalAtGrassmann xi = random_horizontal(rng, x);
  const HorizontalAtGrassmann eta = random_horizontal(rng, x);
  const HorizontalAtGrassmann combo(x, 2.0 * xi.direction + 3.0 * eta.direction, 1e-8);
  const HorizontalAtGrassmann zeta = random_horizontal(rng, x);
  EXPECT_NEAR(submersion_metric(combo, zeta),
              2.0 * submersion_metric(xi, zeta) + 3.0 * submersion_metric(eta, zeta), 1e-11);
}

TEST(GrassmannGeodesic, ZeroVelocityStaysPut) {
  CounterRng rng(66);
  const GrassmannPoint x = random_grassmann(rng, 6, 2);
  const HorizontalAtGrassmann xi(x, MatrixXd::Zero(6, 2));
  EXPECT_LT(projector_distance(grassmann_geodesic(x, xi, 1.3), x), 1e-12);
}

TEST(GrassmannGeodesic, ProjectiveLineIdentifiesAntipodes) {
  // on Gr(1, n), the basis vector and its negation are the same point
  CounterRng rng(67);
  const GrassmannPoint x = random_grassmann(rng, 4, 1);
  const GrassmannPoint minus(-x.basis);
  EXPECT_LT(projector_distance(x, minus), 1e-14);
  const HorizontalAtGrassmann xi = random_horizontal(rng, x);
  EXPECT_LT(projector_distance(grassmann_geodesic(x, xi, 0.7),
                               grassmann_geodesic(minus, HorizontalAtGrassmann(minus, -xi.direction), 0.7)),
            1e-12);
}

TEST(GrassmannGeodesic, ProjectsFromHorizontalStiefelGeodesic) {
  CounterRng rng(68);
  for (int t = 0; t < 10; ++t) {
    const StiefelPoint y = random_stiefel(rng, 6, 2);
    const HorizontalAtGrassmann xi = horizontal_project(y, random_tangent(rng, y));
    const TangentAtStiefel lift(y, xi.direction, 1e-8);
    const GrassmannPoint x(y.frame);
    for (double tt : {0.25, 0.5, 1.0}) {
      const StiefelPoint upstairs = geodesic(y, lift, tt, MetricKind::canonical);
      EXPECT_LT(projector_distance(GrassmannPoint(upstairs.frame, 1e-8),
                                   grassmann_geodesic(x, xi, tt)),
                1e-8);
    }
  }
}

TEST(GrassmannLog, SamePointGivesZero) {
  CounterRng rng(69);
  const GrassmannPoint x = random_grassmann(rng, 6, 2);
  EXPECT_LT(grassmann_log(x, x).direction.norm(), 1e-10);
}

TEST(GrassmannLog, SinglePrincipalAngleOracle) {
  // span{e1, e2} to span{e1, cos(t) e2 + sin(t) e3}: principal angles {0, t},
  // so the log has norm t.
  const double theta = 0.3;
  const GrassmannPoint x = span_of({0, 1}, 4);
  MatrixXd basis = MatrixXd::Zero(4, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = std::cos(theta);
  basis(2, 1) = std::sin(theta);
  const GrassmannPoint y{basis};
  const HorizontalAtGrassmann xi = grassmann_log(x, y);
  EXPECT_NEAR(horizontal_norm(xi), theta, 1e-12);
  EXPECT_LT(projector_distance(grassmann_geodesic(x, xi, 1.0), y), 1e-12);
}

TEST(GrassmannLog, RoundTripBelowCutLocus) {
  CounterRng rng(70);
  for (int t = 0; t < 50; ++t) {
    const GrassmannPoint x = random_grassmann(rng, 8, 2);
    const GrassmannPoint y = random_grassmann(rng, 8, 2);
    HorizontalAtGrassmann xi(x, MatrixXd::Zero(8, 2));
    try {
      xi = grassmann_log(x, y);
    } catch (const CutLocusError&) {
      continue;
    }
    EXPECT_LT(projector_distance(grassmann_geodesic(x, xi, 1.0), y), 1e-8);
    EXPECT_NEAR(horizontal_norm(xi), grassmann_distance(x, y), 1e-10);
  }
}

TEST(GrassmannLog, CutLocusIsAnError) {
  const GrassmannPoint x = span_of({0, 1}, 4);
  const GrassmannPoint y = span_of({0, 2}, 4);  // principal angles {0, pi/2}
  EXPECT_THROW(grassmann_log(x, y), CutLocusError);
}

TEST(GrassmannDistance, CoincidentPoints) {
  CounterRng rng(71);
  const GrassmannPoint x = random_grassmann(rng, 6, 2);
  EXPECT_NEAR(grassmann_distance(x, x), 0.0, 1e-12);
}

TEST(GrassmannDistance, OrthogonalPlanesQuarterTurn) {
  // overlap matrix of span{e1,e2} vs span{e1,e3} has singular values {1, 0},
  // so the principal angles are {0, pi/2} and the distance is pi/2.
  const GrassmannPoint x = span_of({0, 1}, 4);
  const GrassmannPoint y = span_of({0, 2}, 4);
  EXPECT_NEAR(grassmann_distance(x, y), std::numbers::pi / 2.0, 1e-12);
}

TEST(GrassmannDistance, InvariantUnderAmbientIsometries) {
  CounterRng rng(72);
  for (int t = 0; t < 20; ++t) {
    const GrassmannPoint x = random_grassmann(rng, 6, 2);
    const GrassmannPoint y = random_grassmann(rng, 6, 2);
    const MatrixXd q = random_orthogonal(rng, 6);
    const GrassmannPoint qx(q * x.basis, 1e-8);
    const GrassmannPoint qy(q * y.basis, 1e-8);
    EXPECT_NEAR(grassmann_distance(qx, qy), grassmann_distance(x, y), 1e-10);
  }
}

TEST(Involution, FixesItsCenterAndComplementSubspaces) {
  CounterRng rng(73);
  const GrassmannPoint w = random_grassmann(rng, 6, 2);
  EXPECT_LT(projector_distance(involution(w, w), w), 1e-12);
  const MatrixXd comp = orthogonal_complement(w.basis);
  const GrassmannPoint inside(comp.leftCols(2), 1e-8);
  EXPECT_LT(projector_distance(involution(w, inside), inside), 1e-12);
}

TEST(Involution, IsAnInvolution) {
  CounterRng rng(74);
  const GrassmannPoint w = random_grassmann(rng, 6, 2);
  const GrassmannPoint x = random_grassmann(rng, 6, 2);
  EXPECT_LT(projector_distance(involution(w, involution(w, x)), x), 1e-12);
}

TEST(Involution, PreservesDistances) {
  CounterRng rng(75);
  for (int t = 0; t < 20; ++t) {
    const GrassmannPoint w = random_grassmann(rng, 6, 2);
    const GrassmannPoint x = random_grassmann(rng, 6, 2);
    const GrassmannPoint y = random_grassmann(rng, 6, 2);
    EXPECT_NEAR(grassmann_distance(involution(w, x), involution(w, y)),
                grassmann_distance(x, y), 1e-10);
  }
}

TEST(Involution, DifferentialAtCenterIsMinusIdentity) {
  // sigma_W(exp_W(h xi)) = exp_W(-h xi); the finite-difference residual
  // must vanish to O(h^2) (here it is exact up to rounding).
  CounterRng rng(76);
  const GrassmannPoint w = random_grassmann(rng, 6, 2);
  const HorizontalAtGrassmann xi = random_horizontal(rng, w);
  for (double h : {1e-2, 1e-3}) {
    const double resid = projector_distance(involution(w, grassmann_geodesic(w, xi, h)),
                                            grassmann_geodesic(w, xi, -h));
    EXPECT_LT(resid, h * h);
  }
}

TEST(GrassmannEmbed, IdentityInclusionZeroPads) {
  CounterRng rng(77);
  const GrassmannPoint x = random_grassmann(rng, 4, 2);
  MatrixXd l = MatrixXd::Zero(6, 4);
  l.topRows(4) = MatrixXd::Identity(4, 4);
  const GrassmannPoint embedded = grassmann_embed(l, x);
  EXPECT_LT(embedded.basis.bottomRows(2).norm(), 1e-14);
}

TEST(GrassmannEmbed, PreservesMetricAndIsTotallyGeodesic) {
  CounterRng rng(78);
  const GrassmannPoint x = random_grassmann(rng, 4, 2);
  HorizontalAtGrassmann xi = random_horizontal(rng, x);
  xi = HorizontalAtGrassmann(x, xi.direction * (1.2 / xi.direction.norm()), 1e-8);
  const HorizontalAtGrassmann eta = random_horizontal(rng, x);
  const MatrixXd l = detail::polar_orthonormalize(rng.gaussian(8, 4));
  const GrassmannPoint xe = grassmann_embed(l, x);
  const HorizontalAtGrassmann xie(xe, l * xi.direction, 1e-8);
  const HorizontalAtGrassmann etae(xe, l * eta.direction, 1e-8);
  EXPECT_NEAR(submersion_metric(xie, etae), submersion_metric(xi, eta), 1e-12);
  const MatrixXd proj_out = MatrixXd::Identity(8, 8) - l * l.transpose();
  for (int i = 0; i <= 10; ++i) {
    const double t = 2.0 * i / 10.0;
    EXPECT_LT((proj_out * grassmann_geodesic(xe, xie, t).basis).norm(), 1e-9);
  }
}

TEST(RepresentativeIndependence, OperationsIgnoreTheBasisChoice) {
  CounterRng rng(79);
  for (int t = 0; t < 20; ++t) {
    const GrassmannPoint x = random_grassmann(rng, 6, 2);
    const GrassmannPoint y = random_grassmann(rng, 6, 2);
    const HorizontalAtGrassmann xi = random_horizontal(rng, x);
    const MatrixXd a = random_orthogonal(rng, 2);
    const GrassmannPoint x2(x.basis * a, 1e-8);
    const HorizontalAtGrassmann xi2(x2, xi.direction * a, 1e-8);

    EXPECT_LT(projector_distance(x, x2), 1e-10);
    EXPECT_NEAR(grassmann_distance(x2, y), grassmann_distance(x, y), 1e-10);
    EXPECT_LT(projector_distance(grassmann_geodesic(x2, xi2, 0.8),
                                 grassmann_geodesic(x, xi, 0.8)),
              1e-10);
    EXPECT_LT(projector_distance(involution(y, x2), involution(y, x)), 1e-10);
  }
}
