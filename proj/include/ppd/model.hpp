#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ppd/measure.hpp"
#include "ppd/rng.hpp"

namespace ppd {

/// A point θ of the parameter space. One coordinate for the line families,
/// one per category (summing to 1) for the categorical family.
struct ParamPoint {
  Eigen::VectorXd coords;

  ParamPoint() = default;
  explicit ParamPoint(Eigen::VectorXd c) : coords(std::move(c)) {}
  static ParamPoint scalar(double v) { return ParamPoint(Eigen::VectorXd::Constant(1, v)); }

  Eigen::Index dim() const noexcept { return coords.size(); }
  double operator[](Eigen::Index i) const { return coords[i]; }
};

/// A single outcome ω′. Discrete families carry their exact support values.
struct Observation {
  double value = 0.0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

using ObsSpan = std::span<const Observation>;

/// ω_(n) = (ω₁,…,ω_n). Harness code passes prefixes around as ObsSpan.
struct SampleSequence {
  std::vector<Observation> obs;

  std::size_t size() const noexcept { return obs.size(); }
  ObsSpan prefix(std::size_t n) const { return ObsSpan(obs).first(n); }
  operator ObsSpan() const noexcept { return obs; }
};

struct BernoulliFamily {};

struct NormalFamily {
  double sigma = 1.0;  // known observation sd
};

/// Poisson counts. The observation space is truncated to {0, …, max_count};
/// densities are only normalized for rates well below max_count.
struct PoissonFamily {
  int max_count = 1000;
};

/// Categories are labelled 1, …, categories.
struct CategoricalFamily {
  int categories = 3;
};

/// A dominated parametric family {P_θ} with its reference measure μ.
class ModelFamily {
 public:
  using Kind = std::variant<BernoulliFamily, NormalFamily, PoissonFamily, CategoricalFamily>;

  static ModelFamily bernoulli();
  static ModelFamily normal(double sigma = 1.0);
  static ModelFamily poisson(int max_count = 1000);
  static ModelFamily categorical(int categories);

  const Kind& kind() const noexcept { return kind_; }
  template <class F>
  bool is() const noexcept {
    return std::holds_alternative<F>(kind_);
  }
  template <class F>
  const F& as() const {
    return std::get<F>(kind_);
  }

  std::string name() const;
  const RefMeasure& obs_measure() const noexcept { return obs_measure_; }
  const ParamSupport& param_support() const noexcept { return param_support_; }
  bool discrete() const noexcept { return obs_measure_.is_counting(); }

  /// Throws DomainError naming the offending coordinate.
  void check_param(const ParamPoint& theta) const;
  void check_obs(Observation x) const;

  /// p_θ(ω′) with respect to obs_measure().
  double density(const ParamPoint& theta, Observation x) const;
  double log_density(const ParamPoint& theta, Observation x) const;
  /// P_θ(event), exact (sum over support or closed-form CDF).
  double probability(const ParamPoint& theta, const Event& event) const;
  /// Mean and standard deviation of P_θ; used as a location/scale hint by the quadrature.
  std::pair<double, double> location_scale(const ParamPoint& theta) const;

  Observation sample(const ParamPoint& theta, Rng& rng) const;
  SampleSequence sample(const ParamPoint& theta, Rng& rng, std::size_t n) const;

  /// Sufficient statistics of a sample. The first entry is always n.
  /// Permutation invariant bit for bit.
  Eigen::VectorXd summarize(ObsSpan obs) const;
  /// Σ_j log p_θ(ω_j) evaluated from summarize() output.
  double log_likelihood(const ParamPoint& theta, const Eigen::VectorXd& stats) const;

 private:
  ModelFamily(Kind kind, RefMeasure obs, ParamSupport params)
      : kind_(std::move(kind)), obs_measure_(std::move(obs)), param_support_(params) {}

  Kind kind_;
  RefMeasure obs_measure_;
  ParamSupport param_support_;
};

/// p_θ(ω′); free-function spelling of ModelFamily::density.
inline double density(const ModelFamily& model, const ParamPoint& theta, Observation x) {
  return model.density(theta, x);
}

/// n i.i.d. draws from P_θ, deterministic given the rng state.
inline SampleSequence sample_obs(const ModelFamily& model, const ParamPoint& theta, Rng& rng, std::size_t n) {
  return model.sample(theta, rng, n);
}

/// Names accepted by make_model().
std::vector<std::string> registered_models();

}  // namespace ppd
