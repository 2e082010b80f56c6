#pragma once

#include <string>

#include "ppd/density.hpp"
#include "ppd/model.hpp"
#include "ppd/prior.hpp"

namespace ppd {

/// Registered closed-form model/prior combinations. A point-mass prior is
/// conjugate to every family (the posterior never moves).
enum class ConjugateKind { beta_bernoulli, normal_normal, gamma_poisson, dirichlet_categorical, point_mass };

/// A model/prior pair with exact posterior updates and posterior predictive.
/// Closed-form posteriors are represented as PriorSpec values of the prior's kind.
class ConjugatePair {
 public:
  /// Throws ConfigError when the combination is not registered.
  ConjugatePair(ModelFamily model, PriorSpec prior);

  static bool registered(const ModelFamily& model, const PriorSpec& prior) noexcept;

  const ModelFamily& model() const noexcept { return model_; }
  const PriorSpec& prior() const noexcept { return prior_; }
  ConjugateKind kind() const noexcept { return kind_; }
  std::string name() const;

  /// Posterior hyperparameters after observing `obs`, starting from `from`.
  /// Depends on obs only through permutation-invariant sufficient statistics.
  PriorSpec update(const PriorSpec& from, ObsSpan obs) const;
  /// ∫ p_θ(x) dP(θ) for a distribution P of this pair's prior kind.
  double ppd_closed(const PriorSpec& posterior, Observation x) const;

 private:
  void check_posterior(const PriorSpec& posterior) const;

  ModelFamily model_;
  PriorSpec prior_;
  ConjugateKind kind_;
};

/// P*_{ω(n),n} in closed form.
PriorSpec conjugate_posterior(const ConjugatePair& pair, ObsSpan obs);

/// p*_{ω(n),n}(x) in closed form.
double conjugate_ppd(const ConjugatePair& pair, const PriorSpec& posterior, Observation x);

/// The closed-form posterior predictive as an evaluatable density.
PredictiveDensity conjugate_predictive(const ConjugatePair& pair, const PriorSpec& posterior);

}  // namespace ppd
