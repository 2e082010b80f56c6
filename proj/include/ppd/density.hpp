#pragma once

#include <functional>
#include <memory>

#include "ppd/measure.hpp"
#include "ppd/model.hpp"

namespace ppd {

/// An evaluatable density with respect to a reference measure, plus a
/// location/scale hint that tells the quadrature where the mass sits.
class Density {
 public:
  Density(std::function<double(double)> eval, RefMeasure ref, double center = 0.0, double scale = 1.0);

  double operator()(double x) const { return eval_(x); }
  double operator()(Observation x) const { return eval_(x.value); }

  const RefMeasure& ref() const noexcept { return ref_; }
  double center() const noexcept { return center_; }
  double scale() const noexcept { return scale_; }

  /// ∫ f d(ref): exact sum for counting measures, adaptive quadrature otherwise.
  double total_mass() const;
  /// |total_mass() - 1| <= tol.
  bool normalized(double tol = 1e-6) const;

 private:
  std::function<double(double)> eval_;
  RefMeasure ref_;
  double center_;
  double scale_;
};

enum class Provenance { conjugate_closed, weighted_posterior };

/// The estimator p*_{ω(n),n}(·) together with how it was produced.
class PredictiveDensity : public Density {
 public:
  PredictiveDensity(Density d, Provenance p) : Density(std::move(d)), provenance_(p) {}
  Provenance provenance() const noexcept { return provenance_; }

 private:
  Provenance provenance_;
};

/// The sampling density p_θ(·) as a Density.
Density model_density(const ModelFamily& model, const ParamPoint& theta);

}  // namespace ppd
