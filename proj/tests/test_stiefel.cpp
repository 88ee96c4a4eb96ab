#include "manifolds/stiefel.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "manifolds/rng.hpp"

using namespace manifolds;

namespace {

StiefelPoint sphere_point(const VectorXd& v) {
  MatrixXd m(v.size(), 1);
  m.col(0) = v / v.norm();
  return StiefelPoint(m);
}

// Matrix of the tangent projector at Y on the np-dimensional ambient space,
// assembled column by column from the canonical matrix units. Used as the
// independent oracle for idempotence and self-adjointness.
MatrixXd tangent_projector_matrix(const StiefelPoint& y) {
  const int n = y.n(), p = y.p();
  MatrixXd proj(n * p, n * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) {
      MatrixXd unit = MatrixXd::Zero(n, p);
      unit(i, j) = 1.0;
      const MatrixXd image = tangent_project(y, unit).direction;
      proj.col(j * n + i) = Eigen::Map<const VectorXd>(image.data(), n * p);
    }
  return proj;
}

TangentAtStiefel scaled_tangent(CounterRng& rng, const StiefelPoint& y, double norm) {
  TangentAtStiefel v = random_tangent(rng, y);
  return TangentAtStiefel(y, v.direction * (norm / v.direction.norm()), 1e-8);
}

}  // namespace

TEST(StiefelPointTest, RejectsNonOrthonormalFrames) {
  MatrixXd m = MatrixXd::Ones(4, 2);
  EXPECT_THROW(StiefelPoint{m}, std::invalid_argument);
}

TEST(StiefelPointTest, RequiresAmbientAtLeastTwiceTheFrameWidth) {
  MatrixXd m = MatrixXd::Identity(3, 2);
  EXPECT_THROW(StiefelPoint{m}, std::invalid_argument);
}

TEST(TangentTest, RejectsSkewConstraintViolation) {
  CounterRng rng(20);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  EXPECT_THROW(TangentAtStiefel(y, y.frame), std::invalid_argument);
}

TEST(TangentProject, TangentVectorsAreFixed) {
  CounterRng rng(21);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const TangentAtStiefel v = random_tangent(rng, y);
  const TangentAtStiefel again = tangent_project(y, v.direction);
  EXPECT_LT((again.direction - v.direction).norm(), 1e-12);
}

TEST(TangentProject, SphereNormalDirectionProjectsToZero) {
  CounterRng rng(22);
  const StiefelPoint y = random_stiefel(rng, 5, 1);
  EXPECT_LT(tangent_project(y, y.frame).direction.norm(), 1e-12);
}

TEST(TangentProject, ProjectorMatrixIsIdempotentAndSelfAdjoint) {
  CounterRng rng(23);
  const StiefelPoint y = random_stiefel(rng, 5, 2);
  const MatrixXd proj = tangent_projector_matrix(y);
  EXPECT_LT((proj * proj - proj).norm(), 1e-12);
  EXPECT_LT((proj - proj.transpose()).norm(), 1e-12);
}

TEST(LOperator, HalvesTheFrameImage) {
  CounterRng rng(24);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const VectorXd z = y.frame.col(0);
  EXPECT_LT((l_operator(y, z) - 0.5 * z).norm(), 1e-13);
}

TEST(LOperator, FixesTheKernel) {
  CounterRng rng(25);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const MatrixXd yperp = orthogonal_complement(y.frame);
  const VectorXd z = yperp * rng.gaussian_vector(4);
  EXPECT_LT((l_operator(y, z) - z).norm(), 1e-13);
}

TEST(LOperator, SpectrumLiesInHalfOneInterval) {
  CounterRng rng(26);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const MatrixXd l = MatrixXd::Identity(6, 6) - 0.5 * y.frame * y.frame.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(l);
  EXPECT_GE(eig.eigenvalues().minCoeff(), 0.5 - 1e-12);
  EXPECT_LE(eig.eigenvalues().maxCoeff(), 1.0 + 1e-12);
  // and l_operator agrees with the explicit matrix
  const VectorXd z = rng.gaussian_vector(6);
  EXPECT_LT((l_operator(y, z) - l * z).norm(), 1e-13);
}

TEST(Metric, HorizontalVectorsSeeTheSameMetric) {
  CounterRng rng(27);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const MatrixXd yperp = orthogonal_complement(y.frame);
  const TangentAtStiefel h(y, yperp * rng.gaussian(4, 2), 1e-8);
  EXPECT_NEAR(metric(h, h, MetricKind::canonical), metric(h, h, MetricKind::euclidean), 1e-12);
}

TEST(Metric, VerticalVectorsSeeHalfTheMetric) {
  CounterRng rng(28);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  MatrixXd a = rng.gaussian(2, 2);
  a = 0.5 * (a - a.transpose().eval());
  const TangentAtStiefel v(y, y.frame * a, 1e-8);
  EXPECT_NEAR(metric(v, v, MetricKind::canonical), 0.5 * metric(v, v, MetricKind::euclidean),
              1e-12);
}

TEST(Metric, SphereCaseHasNoVerticalPart) {
  CounterRng rng(29);
  const StiefelPoint y = random_stiefel(rng, 5, 1);
  const TangentAtStiefel v = random_tangent(rng, y);
  EXPECT_NEAR(metric(v, v, MetricKind::canonical), metric(v, v, MetricKind::euclidean), 1e-13);
}

TEST(Metric, NormEquivalenceBoundsWithEqualityCases) {
  CounterRng rng(30);
  for (int t = 0; t < 2000; ++t) {
    const StiefelPoint y = random_stiefel(rng, 6, 2);
    const TangentAtStiefel v = random_tangent(rng, y);
    const double vv = frobenius_inner(v.direction, v.direction);
    const double g = metric(v, v, MetricKind::canonical);
    EXPECT_GE(g, 0.5 * vv - 1e-12);
    EXPECT_LE(g, vv + 1e-12);
    const MatrixXd ytv = y.frame.transpose() * v.direction;
    EXPECT_NEAR(g, vv - 0.5 * ytv.squaredNorm(), 1e-12);
  }
}

TEST(Geodesic, ZeroVelocityStaysPut) {
  CounterRng rng(31);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const TangentAtStiefel v(y, MatrixXd::Zero(6, 2));
  for (double t : {0.0, 0.5, 2.0}) {
    EXPECT_LT((geodesic(y, v, t, MetricKind::euclidean).frame - y.frame).norm(), 1e-12);
    EXPECT_LT((geodesic(y, v, t, MetricKind::canonical).frame - y.frame).norm(), 1e-12);
  }
}

TEST(Geodesic, SphereGreatCircleClosedForm) {
  CounterRng rng(32);
  const StiefelPoint y = random_stiefel(rng, 5, 1);
  const TangentAtStiefel v = random_tangent(rng, y);
  const double speed = v.direction.norm();
  for (double t : {0.3, 1.0, 1.7}) {
    const MatrixXd expected =
        y.frame * std::cos(speed * t) + (v.direction / speed) * std::sin(speed * t);
    EXPECT_LT((geodesic(y, v, t, MetricKind::euclidean).frame - expected).norm(), 1e-12);
    EXPECT_LT((geodesic(y, v, t, MetricKind::canonical).frame - expected).norm(), 1e-12);
  }
}

TEST(Geodesic, ClosedFormMatchesOdeIntegration) {
  CounterRng rng(33);
  for (int t = 0; t < 5; ++t) {
    const StiefelPoint y = random_stiefel(rng, 4, 2);
    const TangentAtStiefel v = scaled_tangent(rng, y, 1.2);
    for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
      const StiefelPoint closed = geodesic(y, v, 1.0, kind);
      const StiefelPoint ode = geodesic_ode(y, v, 1.0, kind, 2000);
      EXPECT_LT((closed.frame - ode.frame).norm(), 1e-6);
    }
  }
}

TEST(Geodesic, FiberDirectionRotatesTheFrame) {
  // canonical geodesic with vertical velocity Y A stays in the fiber:
  // Y(t) = Y expm(t A)
  CounterRng rng(34);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  MatrixXd a = rng.gaussian(2, 2);
  a = 0.5 * (a - a.transpose().eval());
  const TangentAtStiefel v(y, y.frame * a, 1e-8);
  const StiefelPoint moved = geodesic(y, v, 1.0, MetricKind::canonical);
  EXPECT_LT((moved.frame - y.frame * matrix_exp(a)).norm(), 1e-12);
}

TEST(GeodesicOde, SphereAgainstGreatCircle) {
  CounterRng rng(35);
  const StiefelPoint y = random_stiefel(rng, 4, 1);
  const TangentAtStiefel v = scaled_tangent(rng, y, 0.9);
  const MatrixXd expected =
      y.frame * std::cos(0.9) + (v.direction / 0.9) * std::sin(0.9);
  const StiefelPoint ode = geodesic_ode(y, v, 1.0, MetricKind::euclidean, 10000);
  EXPECT_LT((ode.frame - expected).norm(), 1e-8);
}

TEST(GeodesicOde, SecondOrderConvergenceOrBetter) {
  CounterRng rng(36);
  const StiefelPoint y = random_stiefel(rng, 5, 2);
  const TangentAtStiefel v = scaled_tangent(rng, y, 1.5);
  for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
    const MatrixXd reference = geodesic(y, v, 1.0, kind).frame;
    const double coarse = (geodesic_ode(y, v, 1.0, kind, 8).frame - reference).norm();
    const double fine = (geodesic_ode(y, v, 1.0, kind, 16).frame - reference).norm();
    EXPECT_GE(coarse / fine, 3.5) << "metric kind " << static_cast<int>(kind);
  }
}

TEST(Distance, CoincidentPointsAreAtZero) {
  CounterRng rng(37);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  EXPECT_NEAR(distance(y, y, MetricKind::euclidean), 0.0, 1e-10);
  EXPECT_NEAR(distance(y, y, MetricKind::canonical), 0.0, 1e-10);
}

TEST(Distance, SphereQuarterTurn) {
  VectorXd e1 = VectorXd::Zero(4), e2 = VectorXd::Zero(4);
  e1(0) = 1.0;
  e2(1) = 1.0;
  EXPECT_NEAR(distance(sphere_point(e1), sphere_point(e2), MetricKind::euclidean),
              std::numbers::pi / 2.0, 1e-12);
}

TEST(Distance, RecoversGeodesicGeneratedPairs) {
  CounterRng rng(38);
  for (int t = 0; t < 4; ++t) {
    const StiefelPoint y1 = random_stiefel(rng, 6, 2);
    for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
      const TangentAtStiefel v = scaled_tangent(rng, y1, 0.9);
      const StiefelPoint y2 = geodesic(y1, v, 1.0, kind);
      const double d = distance(y1, y2, kind);
      EXPECT_NEAR(d, tangent_norm(v, kind), 1e-7);
    }
  }
}

TEST(Distance, CanonicalAndEuclideanAreEquivalentMetrics) {
  // (1/2) d_euclid <= d_canonical <= d_euclid on sampled pairs
  CounterRng rng(39);
  for (int t = 0; t < 4; ++t) {
    const StiefelPoint y1 = random_stiefel(rng, 6, 2);
    const TangentAtStiefel v = scaled_tangent(rng, y1, 1.1);
    const StiefelPoint y2 = geodesic(y1, v, 1.0, MetricKind::euclidean);
    const double de = distance(y1, y2, MetricKind::euclidean);
    const double dc = distance(y1, y2, MetricKind::canonical);
    EXPECT_GE(dc, 0.5 * de - 1e-8);
    EXPECT_LE(dc, de + 1e-8);
  }
}

TEST(Distance, TriangleInequalityOnSampledTriples) {
  CounterRng rng(40);
  for (int t = 0; t < 3; ++t) {
    const StiefelPoint a = random_stiefel(rng, 6, 2);
    const StiefelPoint b = geodesic(a, scaled_tangent(rng, a, 0.6), 1.0, MetricKind::canonical);
    const StiefelPoint c = geodesic(b, scaled_tangent(rng, b, 0.6), 1.0, MetricKind::canonical);
    const double ab = distance(a, b, MetricKind::canonical);
    const double bc = distance(b, c, MetricKind::canonical);
    const double ac = distance(a, c, MetricKind::canonical);
    EXPECT_LE(ac, ab + bc + 1e-8);
  }
}

TEST(Distance, InvariantUnderAmbientIsometries) {
  CounterRng rng(41);
  const StiefelPoint y1 = random_stiefel(rng, 6, 2);
  const StiefelPoint y2 = geodesic(y1, scaled_tangent(rng, y1, 0.8), 1.0, MetricKind::canonical);
  const MatrixXd t = random_orthogonal(rng, 6);
  for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
    EXPECT_NEAR(distance(isometry_action(t, y1), isometry_action(t, y2), kind),
                distance(y1, y2, kind), 1e-7);
  }
}

TEST(EmbedIsometric, IdentityInclusionZeroPads) {
  CounterRng rng(42);
  const StiefelPoint y = random_stiefel(rng, 4, 2);
  MatrixXd l = MatrixXd::Zero(6, 4);
  l.topRows(4) = MatrixXd::Identity(4, 4);
  const StiefelPoint embedded = embed_isometric(l, y);
  EXPECT_LT((embedded.frame.topRows(4) - y.frame).norm(), 1e-14);
  EXPECT_LT(embedded.frame.bottomRows(2).norm(), 1e-14);
}

TEST(EmbedIsometric, PreservesBothMetrics) {
  CounterRng rng(43);
  const StiefelPoint y = random_stiefel(rng, 4, 2);
  const TangentAtStiefel v = random_tangent(rng, y);
  const TangentAtStiefel w = random_tangent(rng, y);
  const MatrixXd l = detail::polar_orthonormalize(rng.gaussian(7, 4));
  const TangentAtStiefel lv = embed_isometric(l, v);
  const TangentAtStiefel lw = embed_isometric(l, w);
  for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical})
    EXPECT_NEAR(metric(lv, lw, kind), metric(v, w, kind), 1e-12);
}

TEST(EmbedIsometric, ImageIsTotallyGeodesic) {
  CounterRng rng(44);
  const StiefelPoint y = random_stiefel(rng, 4, 2);
  const TangentAtStiefel v = scaled_tangent(rng, y, 1.3);
  const MatrixXd l = detail::polar_orthonormalize(rng.gaussian(8, 4));
  const MatrixXd proj_out = MatrixXd::Identity(8, 8) - l * l.transpose();
  const StiefelPoint ye = embed_isometric(l, y);
  const TangentAtStiefel ve = embed_isometric(l, v);
  for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical})
    for (int i = 0; i <= 10; ++i) {
      const double t = 2.0 * i / 10.0;
      EXPECT_LT((proj_out * geodesic(ye, ve, t, kind).frame).norm(), 1e-9);
    }
}

TEST(EmbedIsometric, RejectsNonIsometricMaps) {
  CounterRng rng(45);
  const StiefelPoint y = random_stiefel(rng, 4, 2);
  EXPECT_THROW(embed_isometric(2.0 * MatrixXd::Identity(6, 4), y), std::invalid_argument);
}

TEST(IsometryAction, IdentityFixesEverything) {
  CounterRng rng(46);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  EXPECT_LT((isometry_action(MatrixXd::Identity(6, 6), y).frame - y.frame).norm(), 1e-14);
}

TEST(IsometryAction, PreservesCanonicalMetric) {
  CounterRng rng(47);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const TangentAtStiefel v = random_tangent(rng, y);
  const TangentAtStiefel w = random_tangent(rng, y);
  const MatrixXd t = random_orthogonal(rng, 6);
  const StiefelPoint ty = isometry_action(t, y);
  const TangentAtStiefel tv(ty, t * v.direction, 1e-8);
  const TangentAtStiefel tw(ty, t * w.direction, 1e-8);
  for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical})
    EXPECT_NEAR(metric(tv, tw, kind), metric(v, w, kind), 1e-12);
}

TEST(IsometryAction, RejectsNonOrthogonalMaps) {
  CounterRng rng(48);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  EXPECT_THROW(isometry_action(2.0 * MatrixXd::Identity(6, 6), y), std::invalid_argument);
}

TEST(OpAction, IdentityAndHalfTurn) {
  CounterRng rng(49);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  EXPECT_LT((op_action(MatrixXd::Identity(2, 2), y).frame - y.frame).norm(), 1e-14);
  MatrixXd half_turn(2, 2);
  half_turn << -1.0, 0.0, 0.0, -1.0;
  EXPECT_LT((op_action(half_turn, y).frame + y.frame).norm(), 1e-14);
}

TEST(OpAction, FreenessWithExactDisplacementIdentity) {
  // ||Y A^T - Y||_F = ||A^T - I||_F for orthonormal Y, so any rotation
  // bounded away from the identity moves every frame by the same amount.
  CounterRng rng(50);
  for (int t = 0; t < 20; ++t) {
    const StiefelPoint y = random_stiefel(rng, 6, 2);
    const double angle = rng.uniform(0.2, std::numbers::pi);
    MatrixXd a(2, 2);
    a << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const double moved = (op_action(a, y).frame - y.frame).norm();
    EXPECT_NEAR(moved, (a.transpose() - MatrixXd::Identity(2, 2)).norm(), 1e-12);
    EXPECT_GT(moved, 0.1);
  }
}

TEST(OpAction, CommutesWithAmbientIsometries) {
  CounterRng rng(51);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const MatrixXd t = random_orthogonal(rng, 6);
  const MatrixXd a = random_orthogonal(rng, 2);
  const StiefelPoint left = isometry_action(t, op_action(a, y));
  const StiefelPoint right = op_action(a, isometry_action(t, y));
  EXPECT_LT((left.frame - right.frame).norm(), 1e-13);
}

TEST(ConstantSpeed, BothMetricsAlongClosedForms) {
  CounterRng rng(52);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const TangentAtStiefel v = scaled_tangent(rng, y, 1.7);
  for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
    const double speed0 = tangent_norm(v, kind);
    for (double t : {0.2, 0.7, 1.3, 2.0}) {
      const GeodesicState st = geodesic_with_velocity(y, v, t, kind);
      const TangentAtStiefel vel(st.point, st.velocity, 1e-6);
      EXPECT_NEAR(tangent_norm(vel, kind), speed0, 1e-8);
    }
  }
}

TEST(SectionalCurvature, SphereReducesToConstantOne) {
  CounterRng rng(53);
  for (int t = 0; t < 20; ++t) {
    const StiefelPoint y = random_stiefel(rng, 5, 1);
    const TangentAtStiefel v = random_tangent(rng, y);
    const TangentAtStiefel w = random_tangent(rng, y);
    EXPECT_NEAR(sectional_curvature_canonical(y, v, w), 1.0, 1e-10);
  }
}

TEST(SectionalCurvature, NonnegativeAndNonconstantForWiderFrames) {
  CounterRng rng(54);
  double kmin = 1e300, kmax = -1e300;
  for (int t = 0; t < 300; ++t) {
    const StiefelPoint y = random_stiefel(rng, 4, 2);
    const TangentAtStiefel v = random_tangent(rng, y);
    const TangentAtStiefel w = random_tangent(rng, y);
    const double k = sectional_curvature_canonical(y, v, w);
    EXPECT_GE(k, -1e-9);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  EXPECT_GT(kmax - kmin, 0.05);
}

TEST(SectionalCurvature, MatchesJacobiFieldEstimate) {
  CounterRng rng(55);
  for (int t = 0; t < 8; ++t) {
    const StiefelPoint y = random_stiefel(rng, 4, 2);
    const TangentAtStiefel v = random_tangent(rng, y);
    const TangentAtStiefel w = random_tangent(rng, y);
    const double k = sectional_curvature_canonical(y, v, w);
    const double k_fd = sectional_curvature_jacobi_fd(y, v, w);
    EXPECT_NEAR(k, k_fd, 5e-3);
  }
}

TEST(SectionalCurvature, DegeneratePlaneIsAnError) {
  CounterRng rng(56);
  const StiefelPoint y = random_stiefel(rng, 6, 2);
  const TangentAtStiefel v = random_tangent(rng, y);
  const TangentAtStiefel w(y, 2.0 * v.direction, 1e-8);
  EXPECT_THROW(sectional_curvature_canonical(y, v, w), std::invalid_argument);
}

TEST(StiefelLog, InvertsGeodesicsBelowModerateLengths) {
  CounterRng rng(57);
  for (int t = 0; t < 3; ++t) {
    const StiefelPoint y1 = random_stiefel(rng, 6, 2);
    for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
      const TangentAtStiefel v = scaled_tangent(rng, y1, 1.0);
      const StiefelPoint y2 = geodesic(y1, v, 1.0, kind);
      const LogMapResult log = stiefel_log(y1, y2, kind);
      ASSERT_TRUE(log.converged);
      const TangentAtStiefel rebuilt(y1, log.initial_velocity, 1e-6);
      EXPECT_LT((geodesic(y1, rebuilt, 1.0, kind).frame - y2.frame).norm(), 1e-9);
    }
  }
}
