#pragma once

#include <functional>
#include <vector>

#include "ppd/measure.hpp"

namespace ppd::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;  // summed Gauss–Kronrod error estimates
};

/// Absolute tolerance every Lebesgue integral in the library must reach.
inline constexpr double kAbsTol = 1e-8;

/// Globally adaptive 31-point Gauss–Kronrod over (lo, hi) cut at `breakpoints`:
/// the piece with the largest error is bisected until the summed error is below
/// max(1e-13, 1e-13·|value|) or 4000 pieces are in use. Infinite ends are mapped
/// onto finite intervals first.
Result integrate(const std::function<double(double)>& f, double lo, double hi, std::vector<double> breakpoints);

/// Breakpoints center ± {3, 10, 40}·scale clipped to (lo, hi): keeps narrow peaks on
/// long or infinite intervals from being stepped over.
std::vector<double> scale_breakpoints(double lo, double hi, double center, double scale);

/// Zeros of g on (lo, hi): sign changes on a `scan_points` grid (denser near
/// `center` when an end is infinite), each refined by bisection.
std::vector<double> sign_changes(const std::function<double(double)>& g, double lo, double hi, double center,
                                 double scale, int scan_points = 1024);

}  // namespace ppd::quadrature
