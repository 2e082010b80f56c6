#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppd/density.hpp"
#include "ppd/errors.hpp"
#include "ppd/model.hpp"
#include "ppd/prior.hpp"

namespace ppd {
namespace {

TEST(RefMeasure, RejectsEmptyOrDuplicatedSupport) {
  EXPECT_THROW(RefMeasure::counting({}), DomainError);
  EXPECT_THROW(RefMeasure::counting({0.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(RefMeasure::lebesgue(1.0, 1.0), DomainError);
  EXPECT_NO_THROW(RefMeasure::lebesgue(-kInf, kInf));
}

TEST(Density, Bernoulli) {
  const auto m = ModelFamily::bernoulli();
  const auto theta = ParamPoint::scalar(0.3);
  EXPECT_DOUBLE_EQ(density(m, theta, {1.0}), 0.3);
  EXPECT_DOUBLE_EQ(density(m, theta, {0.0}), 0.7);
}

TEST(Density, StandardNormalAtZeroMatchesHighPrecisionConstant) {
  // 1/sqrt(2π) to 30 digits.
  constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
  const auto m = ModelFamily::normal(1.0);
  EXPECT_NEAR(density(m, ParamPoint::scalar(0.0), {0.0}), kInvSqrt2Pi, 1e-16);
}

TEST(Density, OutOfSupportNamesTheCoordinate) {
  const auto m = ModelFamily::bernoulli();
  try {
    density(m, ParamPoint::scalar(1.5), {1.0});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("theta[0]"), std::string::npos) << e.what();
  }
  try {
    density(m, ParamPoint::scalar(0.5), {2.0});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("observation"), std::string::npos) << e.what();
  }
  const auto c = ModelFamily::categorical(3);
  EXPECT_THROW(density(c, ParamPoint(Eigen::Vector3d(0.5, 0.5, 0.5)), {1.0}), DomainError);
}

TEST(SampleObs, EmptyAndDegenerate) {
  Rng rng(7);
  const auto m = ModelFamily::bernoulli();
  EXPECT_EQ(sample_obs(m, ParamPoint::scalar(0.4), rng, 0).size(), 0u);
  const auto ones = sample_obs(m, ParamPoint::scalar(1.0), rng, 5);
  for (auto x : ones.obs) EXPECT_EQ(x.value, 1.0);
}

TEST(SampleObs, BernoulliMeanConcentrates) {
  // sd of the mean is 0.005; 0.02 is a 4 sd bound.
  Rng rng(12345);
  const auto s = sample_obs(ModelFamily::bernoulli(), ParamPoint::scalar(0.5), rng, 10000);
  double k = 0;
  for (auto x : s.obs) k += x.value;
  EXPECT_NEAR(k / 1e4, 0.5, 0.02);
}

TEST(SampleObs, DeterministicGivenSeed) {
  const auto m = ModelFamily::normal(2.0);
  Rng a(99), b(99);
  EXPECT_EQ(sample_obs(m, ParamPoint::scalar(1.0), a, 50).obs, sample_obs(m, ParamPoint::scalar(1.0), b, 50).obs);
}

// Every registered family integrates to 1 over its reference measure at 20 random θ.
TEST(Normalization, RegisteredFamiliesIntegrateToOne) {
  Rng rng(2024);
  const std::vector<std::pair<ModelFamily, PriorSpec>> cases{
      {ModelFamily::bernoulli(), PriorSpec::beta(1, 1)},
      {ModelFamily::normal(0.7), PriorSpec::normal(0, 9)},
      {ModelFamily::poisson(), PriorSpec::gamma(2, 0.1)},
      {ModelFamily::categorical(5), PriorSpec::dirichlet(Eigen::VectorXd::Ones(5))},
  };
  for (const auto& [model, prior] : cases) {
    for (int i = 0; i < 20; ++i) {
      const auto theta = prior.sample(rng);
      EXPECT_NEAR(model_density(model, theta).total_mass(), 1.0, 1e-8) << model.name();
    }
  }
}

TEST(Summarize, PermutationInvariantBitForBit) {
  Rng rng(5);
  const auto m = ModelFamily::normal(1.0);
  auto s = sample_obs(m, ParamPoint::scalar(0.3), rng, 200);
  const Eigen::VectorXd before = m.summarize(s);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(s.obs.begin(), s.obs.end(), rng);
    const Eigen::VectorXd after = m.summarize(s);
    EXPECT_TRUE((after.array() == before.array()).all());
  }
}

TEST(LogLikelihood, MatchesSumOfLogDensities) {
  Rng rng(8);
  const std::vector<std::pair<ModelFamily, ParamPoint>> cases{
      {ModelFamily::bernoulli(), ParamPoint::scalar(0.35)},
      {ModelFamily::normal(1.3), ParamPoint::scalar(-0.4)},
      {ModelFamily::poisson(), ParamPoint::scalar(3.2)},
      {ModelFamily::categorical(3), ParamPoint(Eigen::Vector3d(0.2, 0.5, 0.3))},
  };
  for (const auto& [model, theta] : cases) {
    const auto s = model.sample(theta, rng, 40);
    double direct = 0.0;
    for (auto x : s.obs) direct += model.log_density(theta, x);
    EXPECT_NEAR(model.log_likelihood(theta, model.summarize(s)), direct, 1e-10) << model.name();
  }
}

TEST(Probability, NormalIntervalAndFullSupport) {
  const auto m = ModelFamily::normal(1.0);
  const auto theta = ParamPoint::scalar(0.0);
  EXPECT_DOUBLE_EQ(m.probability(theta, Event::everything()), 1.0);
  EXPECT_EQ(m.probability(theta, Event::nothing()), 0.0);
  EXPECT_NEAR(m.probability(theta, Event::interval(-1.0, 1.0)), 0.682689492137085897, 1e-15);
}

TEST(Prior, HyperparameterErrorsNameTheField) {
  try {
    PriorSpec::beta(-1.0, 2.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("prior.alpha"), std::string::npos);
  }
  EXPECT_THROW(PriorSpec::gamma(1.0, 0.0), DomainError);
  EXPECT_THROW(PriorSpec::normal(0.0, -1.0), DomainError);
  EXPECT_THROW(PriorSpec::dirichlet(Eigen::Vector3d(1.0, 0.0, 1.0)), DomainError);
}

TEST(Prior, CustomDensityMustBeNormalized) {
  EXPECT_THROW(PriorSpec::custom([](double) { return 2.0; }, 0.0, 1.0), ConfigError);
  const auto tri = PriorSpec::custom([](double t) { return 2.0 * t; }, 0.0, 1.0, "triangle");
  EXPECT_NEAR(tri.mean(), 2.0 / 3.0, 1e-10);
  Rng rng(3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) sum += tri.sample(rng)[0];
  // sd of θ is sqrt(1/18); 4 sd of the mean of 20000 draws is 0.0067.
  EXPECT_NEAR(sum / 20000.0, 2.0 / 3.0, 0.0067);
}

TEST(Prior, CompatibilityWithModelParameterSpace) {
  EXPECT_NO_THROW(check_compatible(ModelFamily::bernoulli(), PriorSpec::beta(2, 2)));
  EXPECT_THROW(check_compatible(ModelFamily::bernoulli(), PriorSpec::normal(0, 1)), ConfigError);
  EXPECT_THROW(check_compatible(ModelFamily::categorical(3), PriorSpec::dirichlet(Eigen::Vector4d::Ones())),
               ConfigError);
  EXPECT_THROW(check_compatible(ModelFamily::bernoulli(), PriorSpec::point_mass(1.5)), ConfigError);
}

}  // namespace
}  // namespace ppd
