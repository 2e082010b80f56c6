#pragma once

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ppd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Counting measure on a finite, duplicate-free set of outcome values (kept sorted).
struct CountingMeasure {
  std::vector<double> support;
  friend bool operator==(const CountingMeasure&, const CountingMeasure&) = default;
};

/// Lebesgue measure restricted to (lo, hi); either end may be infinite.
struct LebesgueMeasure {
  double lo = -kInf;
  double hi = kInf;
  friend bool operator==(const LebesgueMeasure&, const LebesgueMeasure&) = default;
};

/// Reference (dominating) measure of an observation space.
class RefMeasure {
 public:
  /// Throws DomainError on an empty or duplicated support.
  static RefMeasure counting(std::vector<double> support);
  /// Throws DomainError unless lo < hi.
  static RefMeasure lebesgue(double lo, double hi);

  bool is_counting() const noexcept { return std::holds_alternative<CountingMeasure>(kind_); }
  bool is_lebesgue() const noexcept { return std::holds_alternative<LebesgueMeasure>(kind_); }

  /// Support points; only valid for counting measures.
  std::span<const double> support() const;
  const LebesgueMeasure& interval() const;

  bool contains(double x) const noexcept;
  std::string describe() const;

  friend bool operator==(const RefMeasure&, const RefMeasure&) = default;

 private:
  explicit RefMeasure(std::variant<CountingMeasure, LebesgueMeasure> kind) : kind_(std::move(kind)) {}
  std::variant<CountingMeasure, LebesgueMeasure> kind_;
};

/// A measurable set of observations: an interval or an explicit subset of outcome values.
class Event {
 public:
  static Event interval(double lo, double hi);
  static Event subset(std::vector<double> values);
  static Event everything() { return interval(-kInf, kInf); }
  static Event nothing() { return subset({}); }

  bool contains(double x) const noexcept;
  bool is_interval() const noexcept { return is_interval_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  Event() = default;
  bool is_interval_ = true;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> values_;
};

/// Parameter space of a family: a (possibly unbounded) interval, or the
/// probability simplex with `dim` coordinates.
struct ParamSupport {
  enum class Kind { interval, simplex };
  Kind kind = Kind::interval;
  double lo = -kInf;
  double hi = kInf;
  int dim = 1;

  static ParamSupport line(double lo, double hi) { return {Kind::interval, lo, hi, 1}; }
  static ParamSupport simplex(int dim) { return {Kind::simplex, 0.0, 1.0, dim}; }

  bool bounded() const noexcept { return kind == Kind::simplex || (lo > -kInf && hi < kInf); }
  std::string describe() const;
};

}  // namespace ppd
