#include "ppd/measure.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ppd/errors.hpp"

namespace ppd {

RefMeasure RefMeasure::counting(std::vector<double> support) {
  if (support.empty()) throw DomainError("counting measure needs a non-empty support");
  std::sort(support.begin(), support.end());
  if (std::adjacent_find(support.begin(), support.end()) != support.end())
    throw DomainError("counting measure support contains duplicates");
  for (double x : support)
    if (!std::isfinite(x)) throw DomainError("counting measure support must be finite values");
  return RefMeasure(CountingMeasure{std::move(support)});
}

RefMeasure RefMeasure::lebesgue(double lo, double hi) {
  if (!(lo < hi)) throw DomainError(fmt::format("lebesgue interval needs lo < hi, got ({}, {})", lo, hi));
  return RefMeasure(LebesgueMeasure{lo, hi});
}

std::span<const double> RefMeasure::support() const {
  if (const auto* c = std::get_if<CountingMeasure>(&kind_)) return c->support;
  throw DomainError("support() requested on a lebesgue measure");
}

const LebesgueMeasure& RefMeasure::interval() const {
  if (const auto* l = std::get_if<LebesgueMeasure>(&kind_)) return *l;
  throw DomainError("interval() requested on a counting measure");
}

bool RefMeasure::contains(double x) const noexcept {
  if (const auto* c = std::get_if<CountingMeasure>(&kind_))
    return std::binary_search(c->support.begin(), c->support.end(), x);
  const auto& l = std::get<LebesgueMeasure>(kind_);
  return x >= l.lo && x <= l.hi && std::isfinite(x);
}

std::string RefMeasure::describe() const {
  if (const auto* c = std::get_if<CountingMeasure>(&kind_)) {
    if (c->support.size() <= 6) return fmt::format("counting{{{}}}", fmt::join(c->support, ","));
    return fmt::format("counting{{{},...,{}}} ({} points)", c->support.front(), c->support.back(),
                       c->support.size());
  }
  const auto& l = std::get<LebesgueMeasure>(kind_);
  return fmt::format("lebesgue({}, {})", l.lo, l.hi);
}

Event Event::interval(double lo, double hi) {
  Event e;
  e.is_interval_ = true;
  e.lo_ = lo;
  e.hi_ = hi;
  return e;
}

Event Event::subset(std::vector<double> values) {
  Event e;
  e.is_interval_ = false;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  e.values_ = std::move(values);
  return e;
}

bool Event::contains(double x) const noexcept {
  if (is_interval_) return x >= lo_ && x <= hi_;
  return std::binary_search(values_.begin(), values_.end(), x);
}

std::string ParamSupport::describe() const {
  if (kind == Kind::simplex) return fmt::format("simplex({})", dim);
  return fmt::format("[{}, {}]", lo, hi);
}

}  // namespace ppd
