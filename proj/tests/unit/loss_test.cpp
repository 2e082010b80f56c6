#include <gtest/gtest.h>

#include <cmath>

#include "../oracles.hpp"
#include "ppd/audit.hpp"
#include "ppd/errors.hpp"
#include "ppd/loss.hpp"

namespace ppd {
namespace {

DensityPair bernoulli_pair(double a, double b) {
  const auto m = ModelFamily::bernoulli();
  return {model_density(m, ParamPoint::scalar(a)), model_density(m, ParamPoint::scalar(b))};
}

DensityPair normal_pair(double m1, double s1, double m2, double s2) {
  return {model_density(ModelFamily::normal(s1), ParamPoint::scalar(m1)),
          model_density(ModelFamily::normal(s2), ParamPoint::scalar(m2))};
}

TEST(L1, Examples) {
  EXPECT_EQ(l1_distance(bernoulli_pair(0.4, 0.4)), 0.0);
  EXPECT_NEAR(l1_distance(bernoulli_pair(0.3, 0.7)), 0.8, 1e-15);
  const auto r = RefMeasure::counting({0, 1, 2, 3});
  const Density f([](double x) { return x < 2 ? 0.5 : 0.0; }, r);
  const Density g([](double x) { return x >= 2 ? 0.5 : 0.0; }, r);
  EXPECT_EQ(l1_distance(DensityPair(f, g)), 2.0);
}

TEST(Tv, Examples) {
  EXPECT_EQ(tv_distance(bernoulli_pair(0.5, 0.5)), 0.0);
  EXPECT_NEAR(tv_distance(bernoulli_pair(0.3, 0.7)), 0.4, 1e-15);
  EXPECT_NEAR(tv_distance_by_events(bernoulli_pair(0.3, 0.7)), 0.4, 1e-15);
}

TEST(Loss, KindsFromOneDistance) {
  const auto p = bernoulli_pair(0.3, 0.7);
  EXPECT_NEAR(loss(LossKind::l1, p), 0.8, 1e-15);
  EXPECT_NEAR(loss(LossKind::squared_l1, p), 0.64, 1e-15);
  EXPECT_NEAR(loss(LossKind::tv, p), 0.4, 1e-15);
  EXPECT_NEAR(loss(LossKind::squared_tv, p), 0.16, 1e-15);
  for (auto k : kAllLossKinds) EXPECT_EQ(loss(k, bernoulli_pair(0.9, 0.9)), 0.0);
}

TEST(Loss, NamesRoundTrip) {
  for (auto k : kAllLossKinds) EXPECT_EQ(parse_loss_kind(to_string(k)), k);
  EXPECT_EQ(to_string(LossKind::squared_tv), "squared-tv");
  EXPECT_THROW(parse_loss_kind("hellinger"), ConfigError);
}

TEST(Identity, TvEqualsHalfL1OnRandomDiscretePairs) {
  for (const auto& fx : identity_fixtures(200, 31)) {
    const auto p = fx.pair();
    EXPECT_NEAR(tv_distance_by_events(p), 0.5 * l1_distance(p), 1e-12);
  }
}

TEST(Properties, BoundsSymmetryTriangle) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const double ab = l1_distance(bernoulli_pair(a, b));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 2.0);
    EXPECT_EQ(ab, l1_distance(bernoulli_pair(b, a)));
    EXPECT_LE(ab, l1_distance(bernoulli_pair(a, c)) + l1_distance(bernoulli_pair(c, b)) + 1e-10);
    EXPECT_LE(loss(LossKind::squared_l1, bernoulli_pair(a, b)), 2.0 * ab + 1e-15);
  }
  for (int i = 0; i < 10; ++i) {
    const double m1 = 4 * u(rng) - 2, m2 = 4 * u(rng) - 2, m3 = 4 * u(rng) - 2;
    const double s1 = 0.3 + u(rng), s2 = 0.3 + u(rng), s3 = 0.3 + u(rng);
    const double d12 = l1_distance(normal_pair(m1, s1, m2, s2));
    EXPECT_NEAR(d12, l1_distance(normal_pair(m2, s2, m1, s1)), 1e-10);
    EXPECT_LE(d12, l1_distance(normal_pair(m1, s1, m3, s3)) + l1_distance(normal_pair(m3, s3, m2, s2)) + 1e-10);
  }
}

TEST(Normal, MatchesClosedFormOracle) {
  EXPECT_NEAR(l1_distance(normal_pair(0, 1, 0.3, 1.5)), 0.42002398343346292, 1e-10);
  EXPECT_NEAR(l1_distance(normal_pair(0, 1, 1, 1)), 0.76584984509605, 1e-10);
  Rng rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    const double m1 = 6 * u(rng) - 3, m2 = 6 * u(rng) - 3;
    const double s1 = 0.05 + 3 * u(rng), s2 = 0.05 + 3 * u(rng);
    EXPECT_NEAR(l1_distance(normal_pair(m1, s1, m2, s2)), oracle::normal_l1(m1, s1, m2, s2), 1e-9)
        << m1 << " " << s1 << " " << m2 << " " << s2;
  }
}

TEST(Errors, MismatchedMeasuresAndLargeEventSpaces) {
  EXPECT_THROW(DensityPair(model_density(ModelFamily::bernoulli(), ParamPoint::scalar(0.5)),
                           model_density(ModelFamily::normal(1), ParamPoint::scalar(0.5))),
               DomainError);
  const auto big = RefMeasure::counting({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const Density f([](double) { return 1.0 / 13; }, big);
  EXPECT_THROW(tv_distance_by_events(DensityPair(f, f)), DomainError);
}

}  // namespace
}  // namespace ppd
