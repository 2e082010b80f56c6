#include "ppd/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <fmt/format.h>

#include "ppd/errors.hpp"
#include "ppd/quadrature.hpp"

namespace ppd {

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::l1:
      return "l1";
    case LossKind::squared_l1:
      return "squared-l1";
    case LossKind::tv:
      return "tv";
    case LossKind::squared_tv:
      return "squared-tv";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name) {
  for (auto k : kAllLossKinds)
    if (to_string(k) == name) return k;
  throw ConfigError(fmt::format("unknown loss kind '{}' (expected l1, squared-l1, tv or squared-tv)", name));
}

bool is_squared(LossKind kind) noexcept { return kind == LossKind::squared_l1 || kind == LossKind::squared_tv; }

double loss_bound(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::l1:
      return 2.0;
    case LossKind::squared_l1:
      return 4.0;
    default:
      return 1.0;
  }
}

DensityPair::DensityPair(Density f, Density g) : f_(std::move(f)), g_(std::move(g)) {
  if (!(f_.ref() == g_.ref()))
    throw DomainError(fmt::format("density pair must share a reference measure: {} vs {}", f_.ref().describe(),
                                  g_.ref().describe()));
}

double l1_distance(const DensityPair& pair) {
  const auto& f = pair.f();
  const auto& g = pair.g();
  if (pair.ref().is_counting()) {
    double s = 0.0;
    for (double x : pair.ref().support()) s += std::abs(f(x) - g(x));
    return std::clamp(s, 0.0, 2.0);
  }

  const auto& iv = pair.ref().interval();
  const double center = 0.5 * (f.center() + g.center());
  const double scale = std::max(f.scale(), g.scale()) + 0.5 * std::abs(f.center() - g.center());
  const auto diff = [&](double x) { return f(x) - g(x); };

  auto cuts = quadrature::sign_changes(diff, iv.lo, iv.hi, center, scale);
  for (const auto& d : {&f, &g}) {
    const auto b = quadrature::scale_breakpoints(iv.lo, iv.hi, d->center(), d->scale());
    cuts.insert(cuts.end(), b.begin(), b.end());
  }
  const auto r = quadrature::integrate([&](double x) { return std::abs(diff(x)); }, iv.lo, iv.hi, std::move(cuts));
  if (!(r.error <= quadrature::kAbsTol))
    throw NumericalError(fmt::format("L1 quadrature did not converge: error estimate {:.3g}", r.error), r.error);
  return std::clamp(r.value, 0.0, 2.0);
}

double tv_distance(const DensityPair& pair) { return 0.5 * l1_distance(pair); }

double tv_distance_by_events(const DensityPair& pair) {
  if (!pair.ref().is_counting()) throw DomainError("event-sup total variation needs a counting measure");
  const auto support = pair.ref().support();
  const auto k = support.size();
  if (k > 12) throw DomainError(fmt::format("event-sup total variation capped at 12 support points, got {}", k));
  std::vector<double> diff(k);
  for (std::size_t i = 0; i < k; ++i) diff[i] = pair.f()(support[i]) - pair.g()(support[i]);

  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    double d = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) d += diff[i];
    best = std::max(best, std::abs(d));
  }
  return best;
}

double loss_from_l1(LossKind kind, double l1) noexcept {
  switch (kind) {
    case LossKind::l1:
      return l1;
    case LossKind::squared_l1:
      return l1 * l1;
    case LossKind::tv:
      return 0.5 * l1;
    case LossKind::squared_tv:
      return 0.25 * l1 * l1;
  }
  return l1;
}

double loss(LossKind kind, const DensityPair& pair) { return loss_from_l1(kind, l1_distance(pair)); }

}  // namespace ppd
