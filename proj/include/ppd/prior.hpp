#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "ppd/measure.hpp"
#include "ppd/model.hpp"
#include "ppd/rng.hpp"

namespace ppd {

struct BetaPrior {
  double alpha = 1.0;
  double beta = 1.0;
};

struct NormalPrior {
  double mean = 0.0;
  double variance = 1.0;
};

/// Shape/rate parameterization.
struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

struct DirichletPrior {
  Eigen::VectorXd alpha;
};

struct PointMassPrior {
  ParamPoint theta;
};

/// Arbitrary 1-D prior density on [lo, hi]. Sampling inverts a tabulated CDF.
struct CustomPrior {
  std::function<double(double)> density;
  double lo = 0.0;
  double hi = 1.0;
  std::string label = "custom";
  std::shared_ptr<const Eigen::VectorXd> cdf_table;  // filled by PriorSpec::custom
};

/// The prior Q on Θ. Also used as the closed-form posterior of a conjugate pair.
class PriorSpec {
 public:
  using Kind = std::variant<BetaPrior, NormalPrior, GammaPrior, DirichletPrior, PointMassPrior, CustomPrior>;

  /// Factories validate hyperparameters and throw DomainError naming the field.
  static PriorSpec beta(double alpha, double beta);
  static PriorSpec normal(double mean, double variance);
  static PriorSpec gamma(double shape, double rate);
  static PriorSpec dirichlet(Eigen::VectorXd alpha);
  static PriorSpec point_mass(ParamPoint theta);
  static PriorSpec point_mass(double theta) { return point_mass(ParamPoint::scalar(theta)); }
  /// Throws ConfigError unless the density integrates to 1 over [lo, hi] within 1e-8.
  static PriorSpec custom(std::function<double(double)> density, double lo, double hi, std::string label = "custom");

  const Kind& kind() const noexcept { return kind_; }
  template <class P>
  bool is() const noexcept {
    return std::holds_alternative<P>(kind_);
  }
  template <class P>
  const P& as() const {
    return std::get<P>(kind_);
  }

  std::string name() const;
  Eigen::Index dim() const;
  ParamSupport support() const;
  bool is_point_mass() const noexcept { return is<PointMassPrior>(); }

  /// Lebesgue density on Θ (for the simplex: density of the first dim-1 coordinates).
  /// Undefined for point masses (throws DomainError).
  double log_density(const ParamPoint& theta) const;
  double density(const ParamPoint& theta) const;
  /// log Q([a, b]) for 1-D priors with a closed-form CDF (beta, normal, gamma); empty otherwise.
  std::optional<double> log_mass(double a, double b) const;

  ParamPoint sample(Rng& rng) const;

  /// Mean and standard deviation of a 1-D prior.
  double mean() const;
  double sd() const;

 private:
  explicit PriorSpec(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Throws ConfigError when the prior's support is not contained in the model's parameter space.
void check_compatible(const ModelFamily& model, const PriorSpec& prior);

}  // namespace ppd
