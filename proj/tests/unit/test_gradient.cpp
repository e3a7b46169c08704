#include "hqmm/error.hpp"
#include "hqmm/gradient.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hqmm;
using hqmm::testing::for_each_sequence;
using hqmm::testing::random_sequence;

namespace {

std::vector<ObservationSequence> sampled_batch(const Hqmm& m, std::size_t count, std::size_t len, std::uint64_t seed) {
  std::vector<ObservationSequence> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(m, len, derive_seed(seed, i)));
  return out;
}

}  // namespace

TEST(LossGradient, LossIsMeanNegativeLogLikelihood) {
  const Hqmm m = random_hqmm(3, 3, 2, 1);
  const auto batch = sampled_batch(m, 4, 12, 2);
  double expected = 0.0;
  for (const auto& seq : batch) expected -= log_likelihood(m, seq, 3);
  EXPECT_NEAR(loss_gradient(m, batch, 3).loss, expected / 4.0, 1e-12);
}

TEST(LossGradient, MatchesFiniteDifferencesOnRandomModels) {
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 4, s = 1 + (trial / 4) % 4, w = 1 + (trial / 16) % 2;
    const Hqmm m = random_hqmm(n, s, w, 7000 + trial);
    const auto batch = sampled_batch(m, 1 + trial % 3, 1 + trial % 10, trial);
    const auto analytic = loss_gradient(m, batch, 0).gradient;
    const auto reference = finite_difference_gradient(m, batch, 0, 1e-5);
    worst = std::max(worst, compare_gradients(analytic, reference, n).relative_error);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(LossGradient, MatchesFiniteDifferencesWithBurnIn) {
  const Hqmm m = random_hqmm(3, 3, 2, 8);
  const auto batch = sampled_batch(m, 3, 10, 4);
  const auto analytic = loss_gradient(m, batch, 4).gradient;
  const auto reference = finite_difference_gradient(m, batch, 4, 1e-5);
  EXPECT_LT(compare_gradients(analytic, reference, 3).relative_error, 1e-6);
}

TEST(LossGradient, SingleStepClosedForm) {
  const Hqmm m = random_hqmm(3, 4, 1, 12);
  const Symbol y = 2;
  const std::vector<ObservationSequence> batch{ObservationSequence{y}};
  const CMatrix g = loss_gradient(m, batch, 0).gradient;
  const CMatrix& k = m.kraus(y, 0);
  const CMatrix& rho = m.rho0().matrix();
  const double p = (k * rho * k.adjoint()).trace().real();
  for (Index b = 0; b < 4; ++b) {
    const CMatrix block = g.middleRows(b * 3, 3);
    if (b == static_cast<Index>(y))
      EXPECT_LT((block + k * rho / p).norm(), 1e-13);
    else
      EXPECT_EQ(block.norm(), 0.0);
  }
}

TEST(LossGradient, UnobservedSymbolBlocksVanishForSingleSteps) {
  const Hqmm m = random_hqmm(2, 4, 3, 5);
  const std::vector<ObservationSequence> batch{ObservationSequence{0}, ObservationSequence{2}};
  const CMatrix g = loss_gradient(m, batch, 0).gradient;
  for (Index w = 0; w < 3; ++w) {
    EXPECT_EQ(g.middleRows((1 * 3 + w) * 2, 2).norm(), 0.0);
    EXPECT_EQ(g.middleRows((3 * 3 + w) * 2, 2).norm(), 0.0);
    EXPECT_GT(g.middleRows((0 * 3 + w) * 2, 2).norm(), 0.0);
  }
}

TEST(LossGradient, StationaryAtUniformModelOnBalancedData) {
  // Every length-2 sequence once: the empirical distribution is exactly uniform.
  const Index s = 3;
  const Hqmm m = Hqmm::iid_uniform(2, s);
  std::vector<ObservationSequence> batch;
  for_each_sequence(s, 2, [&](const ObservationSequence& seq) { batch.push_back(seq); });
  const auto lg = loss_gradient(m, batch, 0);
  const CMatrix kappa = m.stiefel().matrix();

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix z = complex_gaussian(kappa.rows(), kappa.rows(), rng);
    const CMatrix tangent = (z - z.adjoint()) * kappa;
    const double analytic = 2.0 * (lg.gradient.adjoint() * tangent).trace().real();
    EXPECT_NEAR(analytic, 0.0, 1e-12);

    const double h = 1e-5;
    auto loss_at = [&](const CMatrix& x) {
      std::vector<CMatrix> ops;
      for (Index b = 0; b < s; ++b) ops.push_back(x.middleRows(2 * b, 2));
      double total = 0.0;
      for (const auto& seq : batch) total += detail::sequence_nll(ops, 1, m.rho0().matrix(), seq, 0);
      return total / static_cast<double>(batch.size());
    };
    const double fd = (loss_at(kappa + h * tangent) - loss_at(kappa - h * tangent)) / (2 * h);
    EXPECT_NEAR(fd, 0.0, 1e-8);
  }
}

TEST(LossGradient, BatchLinearity) {
  const Hqmm m = random_hqmm(3, 3, 2, 6);
  const auto a = sampled_batch(m, 3, 9, 1);
  const auto b = sampled_batch(m, 5, 7, 2);
  std::vector<ObservationSequence> both(a);
  both.insert(both.end(), b.begin(), b.end());
  const CMatrix ga = loss_gradient(m, a, 0).gradient;
  const CMatrix gb = loss_gradient(m, b, 0).gradient;
  const CMatrix gab = loss_gradient(m, both, 0).gradient;
  EXPECT_LT((gab - (3.0 * ga + 5.0 * gb) / 8.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LossGradient, ThreadCountDoesNotChangeBits) {
  const Hqmm m = random_hqmm(3, 4, 2, 2);
  const auto batch = sampled_batch(m, 17, 30, 9);
  const auto one = loss_gradient(m, batch, 5, GradientOptions{1});
  const auto four = loss_gradient(m, batch, 5, GradientOptions{4});
  EXPECT_EQ(one.loss, four.loss);
  EXPECT_EQ(one.gradient, four.gradient);
}

TEST(LossGradient, Errors) {
  const Hqmm m = random_hqmm(2, 2, 1, 1);
  EXPECT_THROW(loss_gradient(m, std::vector<ObservationSequence>{}, 0), InvalidArgument);
  EXPECT_THROW(loss_gradient(m, std::vector<ObservationSequence>{ObservationSequence{0, 1}}, 2), InvalidArgument);
  EXPECT_THROW(loss_gradient(m, std::vector<ObservationSequence>{ObservationSequence{0, 2}}, 0), InvalidArgument);
}

TEST(LossGradient, ZeroProbabilityNamesSequence) {
  const Hmm h(RMatrix::Identity(2, 2), RMatrix::Identity(2, 2), (RVector(2) << 1.0, 0.0).finished());
  const Hqmm q = encode_hmm(h);
  const std::vector<ObservationSequence> batch{ObservationSequence{0, 0}, ObservationSequence{0, 0, 1}};
  try {
    loss_gradient(q, batch, 0);
    FAIL();
  } catch (const ZeroProbabilityError& e) {
    EXPECT_EQ(e.sequence(), 1u);
    EXPECT_EQ(e.step(), 2u);
    EXPECT_EQ(e.symbol(), 1u);
  }
}

TEST(FiniteDifference, QuadraticFunctionalIsExact) {
  Rng rng(1);
  const CMatrix center = complex_gaussian(6, 2, rng);
  const CMatrix at = complex_gaussian(6, 2, rng);
  const CMatrix g = finite_difference_gradient([&](const CMatrix& x) { return (x - center).squaredNorm(); }, at, 1e-3);
  EXPECT_LT((g - (at - center)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FiniteDifference, SecondOrderConvergence) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Hqmm m = random_hqmm(3, 3, 2, 40 + seed);
    const auto batch = sampled_batch(m, 1, 8, seed);
    const CMatrix g = loss_gradient(m, batch, 0).gradient;
    const double coarse = (finite_difference_gradient(m, batch, 0, 1e-4) - g).norm();
    const double fine = (finite_difference_gradient(m, batch, 0, 1e-5) - g).norm();
    EXPECT_GT(coarse / fine, 50.0);
    EXPECT_LT(coarse / fine, 150.0);
  }
}

TEST(FiniteDifference, RandomThreeThreeTwo) {
  const Hqmm m = random_hqmm(3, 3, 2, 99);
  const std::vector<ObservationSequence> batch{random_sequence(3, 8, 1)};
  const auto analytic = loss_gradient(m, batch, 0).gradient;
  const auto reference = finite_difference_gradient(m, batch, 0, 1e-5);
  const auto cmp = compare_gradients(analytic, reference, 3);
  EXPECT_LT(cmp.relative_error, 1e-6);
  EXPECT_EQ(cmp.block_errors.size(), 6u);
}

TEST(FiniteDifference, RejectsNonPositiveStep) {
  EXPECT_THROW(finite_difference_gradient([](const CMatrix&) { return 0.0; }, CMatrix::Zero(2, 2), 0.0),
               InvalidArgument);
}
