#include "ppd/conjugate.hpp"

#include <cmath>
#include <optional>
#include <tuple>

#include <boost/math/constants/constants.hpp>
#include <fmt/format.h>

#include "ppd/errors.hpp"

namespace ppd {
namespace {

std::optional<ConjugateKind> classify(const ModelFamily& model, const PriorSpec& prior) {
  if (prior.is_point_mass()) return ConjugateKind::point_mass;
  if (model.is<BernoulliFamily>() && prior.is<BetaPrior>()) return ConjugateKind::beta_bernoulli;
  if (model.is<NormalFamily>() && prior.is<NormalPrior>()) return ConjugateKind::normal_normal;
  if (model.is<PoissonFamily>() && prior.is<GammaPrior>()) return ConjugateKind::gamma_poisson;
  if (model.is<CategoricalFamily>() && prior.is<DirichletPrior>() &&
      prior.as<DirichletPrior>().alpha.size() == model.as<CategoricalFamily>().categories)
    return ConjugateKind::dirichlet_categorical;
  return std::nullopt;
}

}  // namespace

ConjugatePair::ConjugatePair(ModelFamily model, PriorSpec prior)
    : model_(std::move(model)), prior_(std::move(prior)), kind_(ConjugateKind::point_mass) {
  const auto k = classify(model_, prior_);
  if (!k)
    throw ConfigError(fmt::format("no conjugate pair registered for model {} with prior {}", model_.name(),
                                  prior_.name()));
  check_compatible(model_, prior_);
  kind_ = *k;
}

bool ConjugatePair::registered(const ModelFamily& model, const PriorSpec& prior) noexcept {
  return classify(model, prior).has_value();
}

std::string ConjugatePair::name() const { return fmt::format("{} / {}", model_.name(), prior_.name()); }

void ConjugatePair::check_posterior(const PriorSpec& posterior) const {
  if (posterior.kind().index() != prior_.kind().index() || posterior.dim() != prior_.dim())
    throw ConfigError(fmt::format("posterior {} was not produced by the pair {}", posterior.name(), name()));
}

PriorSpec ConjugatePair::update(const PriorSpec& from, ObsSpan obs) const {
  check_posterior(from);
  const Eigen::VectorXd stats = model_.summarize(obs);
  const double n = stats[0];
  switch (kind_) {
    case ConjugateKind::beta_bernoulli: {
      const auto& p = from.as<BetaPrior>();
      return PriorSpec::beta(p.alpha + stats[1], p.beta + n - stats[1]);
    }
    case ConjugateKind::normal_normal: {
      const auto& p = from.as<NormalPrior>();
      const double s2 = model_.as<NormalFamily>().sigma * model_.as<NormalFamily>().sigma;
      const double precision = 1.0 / p.variance + n / s2;
      return PriorSpec::normal((p.mean / p.variance + stats[1] / s2) / precision, 1.0 / precision);
    }
    case ConjugateKind::gamma_poisson: {
      const auto& p = from.as<GammaPrior>();
      return PriorSpec::gamma(p.shape + stats[1], p.rate + n);
    }
    case ConjugateKind::dirichlet_categorical:
      return PriorSpec::dirichlet(from.as<DirichletPrior>().alpha + stats.tail(stats.size() - 1));
    case ConjugateKind::point_mass:
      return from;
  }
  throw ConfigError("unreachable conjugate kind");
}

double ConjugatePair::ppd_closed(const PriorSpec& posterior, Observation x) const {
  check_posterior(posterior);
  model_.check_obs(x);
  switch (kind_) {
    case ConjugateKind::beta_bernoulli: {
      const auto& p = posterior.as<BetaPrior>();
      return (x.value == 1.0 ? p.alpha : p.beta) / (p.alpha + p.beta);
    }
    case ConjugateKind::normal_normal: {
      const auto& p = posterior.as<NormalPrior>();
      const double sigma = model_.as<NormalFamily>().sigma;
      const double var = sigma * sigma + p.variance;
      const double d = x.value - p.mean;
      return boost::math::constants::one_div_root_two_pi<double>() * std::exp(-0.5 * d * d / var) / std::sqrt(var);
    }
    case ConjugateKind::gamma_poisson: {
      // Negative binomial with size a and success probability b / (b + 1).
      const auto& p = posterior.as<GammaPrior>();
      const double a = p.shape, b = p.rate, k = x.value;
      return std::exp(std::lgamma(a + k) - std::lgamma(a) - std::lgamma(k + 1.0) + a * std::log(b / (b + 1.0)) -
                      k * std::log1p(b));
    }
    case ConjugateKind::dirichlet_categorical: {
      const auto& alpha = posterior.as<DirichletPrior>().alpha;
      return alpha[static_cast<Eigen::Index>(x.value) - 1] / alpha.sum();
    }
    case ConjugateKind::point_mass:
      return model_.density(posterior.as<PointMassPrior>().theta, x);
  }
  throw ConfigError("unreachable conjugate kind");
}

PriorSpec conjugate_posterior(const ConjugatePair& pair, ObsSpan obs) { return pair.update(pair.prior(), obs); }

double conjugate_ppd(const ConjugatePair& pair, const PriorSpec& posterior, Observation x) {
  return pair.ppd_closed(posterior, x);
}

PredictiveDensity conjugate_predictive(const ConjugatePair& pair, const PriorSpec& posterior) {
  double center = 0.0, scale = 1.0;
  switch (pair.kind()) {
    case ConjugateKind::beta_bernoulli:
      center = posterior.mean();
      scale = std::sqrt(center * (1.0 - center));
      break;
    case ConjugateKind::normal_normal: {
      const double sigma = pair.model().as<NormalFamily>().sigma;
      center = posterior.mean();
      scale = std::sqrt(sigma * sigma + posterior.as<NormalPrior>().variance);
      break;
    }
    case ConjugateKind::gamma_poisson: {
      const auto& p = posterior.as<GammaPrior>();
      center = p.shape / p.rate;
      scale = std::sqrt(center * (1.0 + 1.0 / p.rate));
      break;
    }
    case ConjugateKind::dirichlet_categorical: {
      const auto& alpha = posterior.as<DirichletPrior>().alpha;
      std::tie(center, scale) = pair.model().location_scale(ParamPoint(alpha / alpha.sum()));
      break;
    }
    case ConjugateKind::point_mass:
      std::tie(center, scale) = pair.model().location_scale(posterior.as<PointMassPrior>().theta);
      break;
  }
  return PredictiveDensity(
      Density([pair, posterior](double x) { return pair.ppd_closed(posterior, Observation{x}); },
              pair.model().obs_measure(), center, scale),
      Provenance::conjugate_closed);
}

}  // namespace ppd
