#include "hqmm/error.hpp"
#include "hqmm/stiefel.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hqmm;

namespace {

CMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return complex_gaussian(rows, cols, rng);
}

/// Central difference of the retraction curve at 0.
CMatrix curve_derivative(const StiefelPoint& x, const CMatrix& g, double h) {
  return (cayley_retract(x, g, h).matrix() - cayley_retract(x, g, -h).matrix()) / (2 * h);
}

}  // namespace

TEST(SkewGenerator, IsSkewHermitian) {
  const auto x = random_stiefel(3, 4, 1);
  const CMatrix a = skew_generator(x.matrix(), random_matrix(12, 3, 2));
  EXPECT_LT((a + a.adjoint()).norm(), 1e-14);
}

TEST(CayleyRetract, ZeroStepReturnsStart) {
  const auto x = random_stiefel(4, 6, 3);
  const CMatrix g = random_matrix(24, 4, 4);
  EXPECT_EQ(cayley_retract(x, g, 0.0).matrix(), x.matrix());
  EXPECT_EQ(cayley_retract_smw(x, g, 0.0).matrix(), x.matrix());
}

TEST(CayleyRetract, ZeroGradientReturnsStart) {
  const auto x = random_stiefel(3, 5, 5);
  const CMatrix g = CMatrix::Zero(15, 3);
  for (double tau : {0.1, 1.0, 50.0}) {
    EXPECT_LT((cayley_retract(x, g, tau).matrix() - x.matrix()).norm(), 1e-15);
    EXPECT_LT((cayley_retract_smw(x, g, tau).matrix() - x.matrix()).norm(), 1e-15);
  }
}

TEST(CayleyRetract, LowRankFormAgreesWithFullSolve) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto x = random_stiefel(4, 6, 100 + i);
    const CMatrix g = random_matrix(24, 4, 200 + i);
    for (double tau : {0.01, 0.75, 10.0}) {
      const CMatrix d = cayley_retract(x, g, tau).matrix() - cayley_retract_smw(x, g, tau).matrix();
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(CayleyRetract, LargeStepsStayFeasible) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto x = random_stiefel(4, 6, 300 + i);
    const CMatrix g = random_matrix(24, 4, 400 + i);
    EXPECT_LT(cayley_retract_smw(x, g, 10.0).residual(), 1e-10);
    EXPECT_LT(cayley_retract(x, g, 10.0).residual(), 1e-10);
  }
}

TEST(CayleyRetract, CurveDerivativeAtZero) {
  // gamma'(0) = -A X; halving h must cut the error about fourfold.
  const auto x = random_stiefel(3, 4, 7);
  const CMatrix g = random_matrix(12, 3, 8);
  const CMatrix expected = -skew_generator(x.matrix(), g) * x.matrix();
  const double e1 = (curve_derivative(x, g, 1e-3) - expected).norm();
  const double e2 = (curve_derivative(x, g, 5e-4) - expected).norm();
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(CayleyRetract, CurveDerivativeIsMinusGForHorizontalGradients) {
  const auto x = random_stiefel(3, 4, 9);
  const CMatrix& k = x.matrix();
  const CMatrix z = random_matrix(12, 3, 10);
  const CMatrix g = z - k * (k.adjoint() * z);
  ASSERT_LT((g.adjoint() * k).norm(), 1e-13);
  const double e1 = (curve_derivative(x, g, 1e-3) + g).norm();
  const double e2 = (curve_derivative(x, g, 5e-4) + g).norm();
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(CayleyRetract, ShapeMismatchThrows) {
  const auto x = random_stiefel(3, 4, 1);
  EXPECT_THROW(cayley_retract(x, CMatrix::Zero(11, 3), 0.5), DimensionError);
  EXPECT_THROW(cayley_retract_smw(x, CMatrix::Zero(12, 2), 0.5), DimensionError);
  CMatrix bad = CMatrix::Zero(12, 3);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(cayley_retract_smw(x, bad, 0.5), NumericalError);
}

TEST(MomentumDirection, FirstStepNormalizesRaw) {
  MomentumDirection m(0.9);
  const CMatrix raw = random_matrix(6, 2, 1);
  const auto r = m.next(raw);
  EXPECT_FALSE(r.converged);
  EXPECT_LT((r.direction - raw / raw.norm()).norm(), 1e-14);
}

TEST(MomentumDirection, FixedPointOfMixing) {
  MomentumDirection m(0.9);
  const CMatrix raw = random_matrix(6, 2, 2);
  const CMatrix d1 = m.next(raw).direction;
  const CMatrix d2 = m.next(d1).direction;
  EXPECT_LT((d2 - d1).norm(), 1e-14);
}

TEST(MomentumDirection, OutputHasUnitNorm) {
  MomentumDirection m(0.9);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const CMatrix raw = random_matrix(8, 2, 10 + i) * std::pow(10.0, static_cast<double>(i % 7) - 3.0);
    ASSERT_NEAR(m.next(raw).direction.norm(), 1.0, 1e-12);
  }
}

TEST(MomentumDirection, MixesNormalizedGradients) {
  MomentumDirection m(0.5);
  CMatrix a = CMatrix::Zero(2, 1), b = CMatrix::Zero(2, 1);
  a(0, 0) = 10.0;
  b(1, 0) = 0.1;
  m.next(a);
  const CMatrix d = m.next(b).direction;
  // momentum = 0.5 * 0.5 e0 + 0.5 e1 -> direction (1, 2) / sqrt(5)
  EXPECT_NEAR(d(0, 0).real(), 1.0 / std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(d(1, 0).real(), 2.0 / std::sqrt(5.0), 1e-14);
}

TEST(MomentumDirection, ZeroGradientReusesMomentum) {
  MomentumDirection m(0.9);
  const CMatrix raw = random_matrix(4, 2, 3);
  const CMatrix d1 = m.next(raw).direction;
  const auto r = m.next(CMatrix::Zero(4, 2));
  EXPECT_FALSE(r.converged);
  EXPECT_LT((r.direction - d1).norm(), 1e-14);
}

TEST(MomentumDirection, ZeroEverywhereSignalsConvergence) {
  MomentumDirection m(0.9);
  const auto r = m.next(CMatrix::Zero(4, 2));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.direction.norm(), 0.0);
}

TEST(MomentumDirection, RejectsBadBeta) {
  EXPECT_THROW(MomentumDirection(1.0), InvalidArgument);
  EXPECT_THROW(MomentumDirection(-0.1), InvalidArgument);
}
