#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ppd/density.hpp"

namespace ppd {

enum class LossKind { l1, squared_l1, tv, squared_tv };

inline constexpr std::array<LossKind, 4> kAllLossKinds{LossKind::l1, LossKind::squared_l1, LossKind::tv,
                                                       LossKind::squared_tv};

std::string_view to_string(LossKind kind) noexcept;
/// Throws ConfigError for unknown names.
LossKind parse_loss_kind(std::string_view name);
bool is_squared(LossKind kind) noexcept;
/// Upper bound of the loss over all density pairs (2, 4, 1, 1).
double loss_bound(LossKind kind) noexcept;

/// Two densities sharing one reference measure.
class DensityPair {
 public:
  /// Throws DomainError when the reference measures differ.
  DensityPair(Density f, Density g);

  const Density& f() const noexcept { return f_; }
  const Density& g() const noexcept { return g_; }
  const RefMeasure& ref() const noexcept { return f_.ref(); }

 private:
  Density f_;
  Density g_;
};

/// ∫|f - g| dμ. Exact sum on counting measures; on Lebesgue measures adaptive
/// Gauss–Kronrod split at the crossings of f - g, throwing NumericalError
/// when the error estimate exceeds 1e-8. Clamped to [0, 2].
double l1_distance(const DensityPair& pair);

/// sup_A |F(A) - G(A)|, computed as ½·l1_distance.
double tv_distance(const DensityPair& pair);

/// Brute-force sup over all 2^k events of a counting measure with k <= 12 points.
/// Throws DomainError otherwise.
double tv_distance_by_events(const DensityPair& pair);

/// Loss of the given kind from an already computed L1 distance.
double loss_from_l1(LossKind kind, double l1) noexcept;

double loss(LossKind kind, const DensityPair& pair);

}  // namespace ppd
