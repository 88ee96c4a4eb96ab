#include "manifolds/ambient.hpp"

#include <complex>

#include <gtest/gtest.h>

#include "manifolds/rng.hpp"

using namespace manifolds;

namespace {

// Entrywise-sum oracle, independent of the trace evaluation.
double frobenius_entrywise(const MatrixXd& x, const MatrixXd& y) {
  double sum = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) sum += x(i, j) * y(i, j);
  return sum;
}

double minkowski_entrywise(const VectorXd& u, const VectorXd& v, const MinkowskiForm& form) {
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double sign = i < form.positive_dim ? 1.0 : -1.0;
    sum += sign * u(i) * v(i);
  }
  return sum;
}

}  // namespace

TEST(FrobeniusInner, IdentityFramePaddedToFourByTwo) {
  MatrixXd x = MatrixXd::Zero(4, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(frobenius_inner(x, x), 2.0);
}

TEST(FrobeniusInner, OrthogonalColumnFramesPairToZero) {
  MatrixXd x = MatrixXd::Zero(4, 1), y = MatrixXd::Zero(4, 1);
  x(0, 0) = 1.0;
  y(1, 0) = 1.0;
  EXPECT_DOUBLE_EQ(frobenius_inner(x, y), 0.0);
}

TEST(FrobeniusInner, MatchesEntrywiseSumAndIsSymmetric) {
  CounterRng rng(1);
  for (int t = 0; t < 100; ++t) {
    const MatrixXd x = rng.gaussian(4, 2);
    const MatrixXd y = rng.gaussian(4, 2);
    EXPECT_NEAR(frobenius_inner(x, y), frobenius_entrywise(x, y), 1e-13);
    EXPECT_NEAR(frobenius_inner(x, y), frobenius_inner(y, x), 1e-13);
  }
}

TEST(FrobeniusInner, DimensionMismatchThrows) {
  EXPECT_THROW(frobenius_inner(MatrixXd::Zero(3, 2), MatrixXd::Zero(4, 2)),
               std::invalid_argument);
}

TEST(HermitianInner, UnitColumn) {
  MatrixXcd x = MatrixXcd::Zero(3, 1);
  x(0, 0) = 1.0;
  const auto h = hermitian_inner(x, x);
  EXPECT_NEAR(h.real(), 1.0, 1e-15);
  EXPECT_NEAR(h.imag(), 0.0, 1e-15);
}

TEST(HermitianInner, SesquilinearInSecondArgument) {
  MatrixXcd x = MatrixXcd::Zero(3, 1), y = MatrixXcd::Zero(3, 1);
  x(0, 0) = std::complex<double>(0.0, 1.0);  // i e1
  y(0, 0) = 1.0;
  const auto h = hermitian_inner(x, y);
  EXPECT_NEAR(h.real(), 0.0, 1e-15);
  EXPECT_NEAR(h.imag(), 1.0, 1e-15);
}

TEST(HermitianInner, RealPartEqualsFrobeniusOfRealifications) {
  CounterRng rng(2);
  for (int t = 0; t < 100; ++t) {
    const MatrixXcd x = rng.gaussian_complex(4, 2);
    const MatrixXcd y = rng.gaussian_complex(4, 2);
    EXPECT_NEAR(hermitian_inner(x, y).real(), frobenius_inner(realify(x), realify(y)), 1e-12);
  }
}

TEST(HermitianInner, SelfPairingIsRealNonnegative) {
  CounterRng rng(3);
  for (int t = 0; t < 50; ++t) {
    const MatrixXcd x = rng.gaussian_complex(5, 2);
    const auto h = hermitian_inner(x, x);
    EXPECT_NEAR(h.imag(), 0.0, 1e-12);
    EXPECT_GE(h.real(), 0.0);
  }
}

TEST(ComplexStructure, OmegaEqualsJPairing) {
  // omega(x, y) = -Im h(x, y) = <J x, y> through the realification
  CounterRng rng(4);
  for (int t = 0; t < 100; ++t) {
    const MatrixXcd x = rng.gaussian_complex(4, 2);
    const MatrixXcd y = rng.gaussian_complex(4, 2);
    const double omega = -hermitian_inner(x, y).imag();
    const double j_pairing = frobenius_inner(apply_complex_structure(realify(x)), realify(y));
    EXPECT_NEAR(omega, j_pairing, 1e-12);
  }
}

TEST(OrthDecompose, SpanVectorHasNoKernelPart) {
  CounterRng rng(5);
  const MatrixXd x = detail::polar_orthonormalize(rng.gaussian(5, 2));
  const VectorXd z = x * rng.gaussian_vector(2);
  const OrthDecomposition d = orth_decompose(x, z);
  EXPECT_LT(d.kernel_part.norm(), 1e-12);
  EXPECT_LT((d.image_part - z).norm(), 1e-12);
}

TEST(OrthDecompose, OrthogonalVectorHasNoImagePart) {
  MatrixXd x = MatrixXd::Zero(4, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  VectorXd z = VectorXd::Zero(4);
  z(2) = 2.0;
  z(3) = -1.0;
  const OrthDecomposition d = orth_decompose(x, z);
  EXPECT_LT(d.image_part.norm(), 1e-12);
}

TEST(OrthDecompose, PythagorasAndMutualOrthogonality) {
  CounterRng rng(6);
  for (int t = 0; t < 50; ++t) {
    const MatrixXd x = rng.gaussian(6, 3);
    const VectorXd z = rng.gaussian_vector(6);
    const OrthDecomposition d = orth_decompose(x, z);
    EXPECT_LT((d.image_part + d.kernel_part - z).norm(), 1e-12);
    EXPECT_NEAR(z.squaredNorm(),
                d.image_part.squaredNorm() + d.kernel_part.squaredNorm(), 1e-10);
    EXPECT_LE(std::abs(d.image_part.dot(d.kernel_part)), 1e-10 * z.squaredNorm());
    EXPECT_LT((x.transpose() * d.kernel_part).norm(), 1e-10);
  }
}

TEST(OrthDecompose, RankDeficientThrows) {
  MatrixXd x(4, 2);
  x.col(0) = VectorXd::Ones(4);
  x.col(1) = 2.0 * VectorXd::Ones(4);
  EXPECT_THROW(orth_decompose(x, VectorXd::Zero(4)), std::invalid_argument);
}

TEST(MinkowskiInner, TimeUnitVector) {
  const MinkowskiForm form(3, 1);
  VectorXd u = VectorXd::Zero(4);
  u(3) = 1.0;
  EXPECT_DOUBLE_EQ(minkowski_inner(u, u, form), -1.0);
}

TEST(MinkowskiInner, SpatialAndTimeUnitsAreOrthogonal) {
  const MinkowskiForm form(3, 1);
  VectorXd u = VectorXd::Zero(4), v = VectorXd::Zero(4);
  u(0) = 1.0;
  v(3) = 1.0;
  EXPECT_DOUBLE_EQ(minkowski_inner(u, v, form), 0.0);
}

TEST(MinkowskiInner, MatchesSignedEntrywiseSum) {
  const MinkowskiForm form(4, 1);
  CounterRng rng(7);
  for (int t = 0; t < 100; ++t) {
    const VectorXd u = rng.gaussian_vector(5);
    const VectorXd v = rng.gaussian_vector(5);
    EXPECT_NEAR(minkowski_inner(u, v, form), minkowski_entrywise(u, v, form), 1e-13);
  }
}

TEST(MinkowskiInner, DimensionMismatchThrows) {
  const MinkowskiForm form(3, 1);
  EXPECT_THROW(minkowski_inner(VectorXd::Zero(3), VectorXd::Zero(3), form),
               std::invalid_argument);
}

TEST(MatrixExp, ZeroGivesIdentity) {
  EXPECT_LT((matrix_exp(MatrixXd::Zero(3, 3)) - MatrixXd::Identity(3, 3)).norm(), 1e-15);
}

TEST(MatrixExp, QuarterTurnRotationGenerator) {
  MatrixXd a(2, 2);
  const double theta = std::numbers::pi / 2.0;
  a << 0.0, -theta, theta, 0.0;
  MatrixXd expected(2, 2);
  expected << 0.0, -1.0, 1.0, 0.0;
  EXPECT_LT((matrix_exp(a) - expected).norm(), 1e-14);
}

TEST(MatrixExp, SkewInputGivesOrthogonalOutput) {
  CounterRng rng(8);
  for (int t = 0; t < 25; ++t) {
    MatrixXd a = rng.gaussian(5, 5);
    a = 0.5 * (a - a.transpose().eval());
    const MatrixXd q = matrix_exp(a);
    EXPECT_LT((q.transpose() * q - MatrixXd::Identity(5, 5)).norm(), 1e-12);
  }
}

TEST(MatrixExp, InverseIsExpOfNegation) {
  CounterRng rng(9);
  for (int t = 0; t < 25; ++t) {
    MatrixXd a = rng.gaussian(4, 4);
    if (a.norm() > 5.0) a *= 5.0 / a.norm();
    EXPECT_LT((matrix_exp(a) * matrix_exp(-a) - MatrixXd::Identity(4, 4)).norm(), 1e-10);
  }
}

TEST(ThinSvdTest, OrthonormalFrameHasUnitSingularValues) {
  CounterRng rng(10);
  const MatrixXd x = detail::polar_orthonormalize(rng.gaussian(6, 3));
  const ThinSvd svd = thin_svd(x);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(svd.singular_values(i), 1.0, 1e-13);
}

TEST(ThinSvdTest, RankOneOuterProduct) {
  CounterRng rng(11);
  const VectorXd u = rng.gaussian_vector(5);
  const VectorXd v = rng.gaussian_vector(3);
  const ThinSvd svd = thin_svd(u * v.transpose());
  EXPECT_NEAR(svd.singular_values(0), u.norm() * v.norm(), 1e-12);
  EXPECT_LT(svd.singular_values(1), 1e-12);
}

TEST(ThinSvdTest, ReconstructionResidual) {
  CounterRng rng(12);
  for (int t = 0; t < 25; ++t) {
    const MatrixXd x = rng.gaussian(6, 4);
    const ThinSvd svd = thin_svd(x);
    const MatrixXd rebuilt =
        svd.u * svd.singular_values.asDiagonal() * svd.v.transpose();
    EXPECT_LE((rebuilt - x).norm(), 1e-12 * x.norm());
    EXPECT_LT((svd.u.transpose() * svd.u - MatrixXd::Identity(4, 4)).norm(), 1e-12);
  }
}

TEST(Realification, UnitaryBecomesOrthogonalAndCommutesWithJ) {
  CounterRng rng(13);
  const MatrixXcd t = random_unitary(rng, 4);
  const MatrixXd tr = realify_operator(t);
  EXPECT_LT((tr.transpose() * tr - MatrixXd::Identity(8, 8)).norm(), 1e-12);

  const MatrixXcd x = rng.gaussian_complex(4, 2);
  // realify(T x) == realify_operator(T) * realify(x)
  EXPECT_LT((realify(t * x) - tr * realify(x)).norm(), 1e-12);
  // J (T x) == T (J x): multiplication by i commutes with complex-linear maps
  EXPECT_LT((apply_complex_structure(tr * realify(x)) - tr * apply_complex_structure(realify(x)))
                .norm(),
            1e-12);
}
