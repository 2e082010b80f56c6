#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ppd/conjugate.hpp"
#include "ppd/errors.hpp"

namespace ppd {
namespace {

using boost::math::quadrature::gauss_kronrod;

std::vector<Observation> obs_of(std::initializer_list<double> xs) {
  std::vector<Observation> out;
  for (double x : xs) out.push_back({x});
  return out;
}

// Unnormalized posterior ∝ prior × likelihood, normalized by quadrature.
double quadrature_posterior_mean(const ModelFamily& m, const PriorSpec& prior, ObsSpan obs, double lo, double hi) {
  const auto stats = m.summarize(obs);
  auto kernel = [&](double t) {
    const auto th = ParamPoint::scalar(t);
    return std::exp(prior.log_density(th) + m.log_likelihood(th, stats));
  };
  const double z = gauss_kronrod<double, 61>::integrate(kernel, lo, hi, 15, 1e-14);
  const double m1 = gauss_kronrod<double, 61>::integrate([&](double t) { return t * kernel(t); }, lo, hi, 15, 1e-14);
  return m1 / z;
}

TEST(Update, BetaBernoulli) {
  const ConjugatePair pair(ModelFamily::bernoulli(), PriorSpec::beta(1, 1));
  const auto obs = obs_of({1, 0, 1});
  const auto post = conjugate_posterior(pair, obs);
  ASSERT_TRUE(post.is<BetaPrior>());
  EXPECT_EQ(post.as<BetaPrior>().alpha, 3.0);
  EXPECT_EQ(post.as<BetaPrior>().beta, 2.0);
  EXPECT_NEAR(post.mean(), quadrature_posterior_mean(pair.model(), pair.prior(), obs, 0, 1), 1e-10);
}

TEST(Update, EmptySampleKeepsPrior) {
  const ConjugatePair pair(ModelFamily::bernoulli(), PriorSpec::beta(2, 5));
  const auto post = conjugate_posterior(pair, {});
  EXPECT_EQ(post.as<BetaPrior>().alpha, 2.0);
  EXPECT_EQ(post.as<BetaPrior>().beta, 5.0);
}

TEST(Update, NormalNormal) {
  const ConjugatePair pair(ModelFamily::normal(1.0), PriorSpec::normal(0, 1));
  const auto obs = obs_of({2});
  const auto post = conjugate_posterior(pair, obs);
  EXPECT_NEAR(post.as<NormalPrior>().mean, 1.0, 1e-15);
  EXPECT_NEAR(post.as<NormalPrior>().variance, 0.5, 1e-15);
  EXPECT_NEAR(post.mean(), quadrature_posterior_mean(pair.model(), pair.prior(), obs, -12, 12), 1e-10);
}

TEST(Update, GammaPoisson) {
  const ConjugatePair pair(ModelFamily::poisson(), PriorSpec::gamma(2, 0.5));
  const auto obs = obs_of({3, 0, 5, 2});
  const auto post = conjugate_posterior(pair, obs);
  EXPECT_DOUBLE_EQ(post.as<GammaPrior>().shape, 12.0);
  EXPECT_DOUBLE_EQ(post.as<GammaPrior>().rate, 4.5);
  EXPECT_NEAR(post.mean(), quadrature_posterior_mean(pair.model(), pair.prior(), obs, 0, 60), 1e-10);
}

TEST(Update, PermutationInvariant) {
  const ConjugatePair pair(ModelFamily::normal(0.8), PriorSpec::normal(1, 2));
  Rng rng(11);
  auto s = pair.model().sample(ParamPoint::scalar(0.4), rng, 100);
  const auto a = conjugate_posterior(pair, s).as<NormalPrior>();
  std::reverse(s.obs.begin(), s.obs.end());
  const auto b = conjugate_posterior(pair, s).as<NormalPrior>();
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(Update, SequentialEqualsBatch) {
  const ConjugatePair pair(ModelFamily::categorical(4), PriorSpec::dirichlet(Eigen::Vector4d(0.5, 1, 2, 3)));
  const auto obs = obs_of({1, 4, 4, 2, 1, 3});
  const auto batch = conjugate_posterior(pair, obs);
  auto step = pair.prior();
  for (const auto& x : obs) step = pair.update(step, ObsSpan(&x, 1));
  EXPECT_TRUE(step.as<DirichletPrior>().alpha.isApprox(batch.as<DirichletPrior>().alpha, 1e-15));
}

TEST(Ppd, LaplaceRule) {
  const ConjugatePair pair(ModelFamily::bernoulli(), PriorSpec::beta(1, 1));
  const auto post = conjugate_posterior(pair, obs_of({1, 1, 1}));
  EXPECT_NEAR(conjugate_ppd(pair, post, {1.0}), 0.8, 1e-15);
  // ∫θ·Beta(4,1)(θ) dθ by quadrature.
  const double q = gauss_kronrod<double, 61>::integrate([](double t) { return t * 4 * t * t * t; }, 0, 1);
  EXPECT_NEAR(conjugate_ppd(pair, post, {1.0}), q, 1e-12);
}

TEST(Ppd, DirichletCategoricalAgainstMonteCarlo) {
  const ConjugatePair pair(ModelFamily::categorical(3), PriorSpec::dirichlet(Eigen::Vector3d::Ones()));
  const auto obs = obs_of({1, 1, 3});
  const auto post = conjugate_posterior(pair, obs);
  EXPECT_NEAR(conjugate_ppd(pair, post, {1.0}), 0.5, 1e-15);

  // E[θ₁] under Dirichlet(3,1,2) by sampling; sd of θ₁ is sqrt(3·3/(36·7)).
  Rng rng(77);
  double sum = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) sum += post.sample(rng)[0];
  EXPECT_NEAR(sum / draws, 0.5, 4 * std::sqrt(9.0 / 252.0 / draws));
}

TEST(Ppd, NegativeBinomialMatchesQuadrature) {
  const ConjugatePair pair(ModelFamily::poisson(), PriorSpec::gamma(2.5, 0.7));
  const auto post = conjugate_posterior(pair, obs_of({1, 4, 2}));
  const auto& g = post.as<GammaPrior>();
  for (double x : {0.0, 1.0, 3.0, 10.0}) {
    auto integrand = [&](double t) {
      return std::exp(g.shape * std::log(g.rate) - std::lgamma(g.shape) + (g.shape - 1) * std::log(t) - g.rate * t +
                      x * std::log(t) - t - std::lgamma(x + 1));
    };
    const double q = gauss_kronrod<double, 61>::integrate(integrand, 0, 80, 15, 1e-14);
    EXPECT_NEAR(conjugate_ppd(pair, post, {x}), q, 1e-12) << x;
  }
}

TEST(Ppd, PointMassCollapsesToModelDensity) {
  const ConjugatePair pair(ModelFamily::normal(2.0), PriorSpec::point_mass(0.7));
  const auto post = conjugate_posterior(pair, obs_of({5, -3, 1}));
  for (double x : {-2.0, 0.7, 3.1})
    EXPECT_EQ(conjugate_ppd(pair, post, {x}), density(pair.model(), ParamPoint::scalar(0.7), {x}));
}

TEST(Ppd, NormalizesForEveryPair) {
  Rng rng(4);
  const std::vector<ConjugatePair> pairs{
      {ModelFamily::bernoulli(), PriorSpec::beta(0.5, 3)},
      {ModelFamily::normal(1.5), PriorSpec::normal(-1, 4)},
      {ModelFamily::poisson(), PriorSpec::gamma(3, 1)},
      {ModelFamily::categorical(4), PriorSpec::dirichlet(Eigen::Vector4d(1, 2, 0.5, 1))},
      {ModelFamily::bernoulli(), PriorSpec::point_mass(0.2)},
  };
  for (const auto& pair : pairs) {
    const auto theta = pair.prior().sample(rng);
    const auto s = pair.model().sample(theta, rng, 25);
    const auto pred = conjugate_predictive(pair, conjugate_posterior(pair, s));
    EXPECT_EQ(pred.provenance(), Provenance::conjugate_closed);
    EXPECT_NEAR(pred.total_mass(), 1.0, 1e-8) << pair.name();
  }
}

TEST(Pair, UnregisteredCombinationIsAConfigError) {
  EXPECT_FALSE(ConjugatePair::registered(ModelFamily::poisson(), PriorSpec::normal(0, 1)));
  EXPECT_THROW(ConjugatePair(ModelFamily::normal(1), PriorSpec::gamma(1, 1)), ConfigError);
  const auto custom = PriorSpec::custom([](double) { return 1.0; }, 0.0, 1.0);
  EXPECT_THROW(ConjugatePair(ModelFamily::bernoulli(), custom), ConfigError);
}

}  // namespace
}  // namespace ppd
