#include "ppd/density.hpp"

#include <cmath>

#include "ppd/quadrature.hpp"

namespace ppd {

Density::Density(std::function<double(double)> eval, RefMeasure ref, double center, double scale)
    : eval_(std::move(eval)), ref_(std::move(ref)), center_(center), scale_(scale > 0.0 ? scale : 1.0) {}

double Density::total_mass() const {
  if (ref_.is_counting()) {
    double s = 0.0;
    for (double x : ref_.support()) s += eval_(x);
    return s;
  }
  const auto& iv = ref_.interval();
  return quadrature::integrate(eval_, iv.lo, iv.hi, quadrature::scale_breakpoints(iv.lo, iv.hi, center_, scale_))
      .value;
}

bool Density::normalized(double tol) const { return std::abs(total_mass() - 1.0) <= tol; }

Density model_density(const ModelFamily& model, const ParamPoint& theta) {
  model.check_param(theta);
  const auto [loc, scale] = model.location_scale(theta);
  return Density([model, theta](double x) { return model.density(theta, Observation{x}); }, model.obs_measure(), loc,
                 scale);
}

}  // namespace ppd
