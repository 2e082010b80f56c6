#include "ppd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ppd::quadrature {
namespace {

// Maps t ∈ (-1, 1) onto (lo, hi).
double from_unit(double t, double lo, double hi, double center, double scale) {
  const bool lo_inf = !std::isfinite(lo);
  const bool hi_inf = !std::isfinite(hi);
  if (!lo_inf && !hi_inf) return lo + (hi - lo) * 0.5 * (t + 1.0);
  if (lo_inf && hi_inf) return center + scale * t / (1.0 - t * t);
  if (!lo_inf) return lo + scale * (1.0 + t) / (1.0 - t);
  return hi - scale * (1.0 - t) / (1.0 + t);
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double lo, double hi, std::vector<double> breakpoints) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr double kTarget = 1e-13;
  constexpr std::size_t kMaxPieces = 4000;

  breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(),
                                   [&](double b) { return !(b > lo && b < hi) || !std::isfinite(b); }),
                    breakpoints.end());
  if (!std::isfinite(lo) && !std::isfinite(hi) && breakpoints.empty()) breakpoints.push_back(0.0);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(lo);
  cuts.insert(cuts.end(), breakpoints.begin(), breakpoints.end());
  cuts.push_back(hi);

  // Every piece is integrated over a finite u-interval; infinite ends use
  // x = a + u/(1-u) on [0, 1) and x = b - (1-u)/u on (0, 1].
  using Fn = std::function<double(double)>;
  struct Piece {
    const Fn* g;
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::vector<Fn> maps;
  maps.reserve(cuts.size());
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (std::isfinite(a) && std::isfinite(b)) {
      maps.emplace_back(f);
      spans.emplace_back(a, b);
    } else if (std::isfinite(a)) {
      maps.emplace_back([&f, a](double u) {
        const double d = 1.0 - u;
        return f(a + u / d) / (d * d);
      });
      spans.emplace_back(0.0, 1.0);
    } else {
      maps.emplace_back([&f, b](double u) { return f(b - (1.0 - u) / u) / (u * u); });
      spans.emplace_back(0.0, 1.0);
    }
  }

  const auto eval = [](const Fn* g, double a, double b) {
    double err = 0.0;
    const double v = Rule::integrate(*g, a, b, 0, 0.0, &err);
    return Piece{g, a, b, v, err};
  };
  std::priority_queue<Piece> heap;
  for (std::size_t i = 0; i < maps.size(); ++i) heap.push(eval(&maps[i], spans[i].first, spans[i].second));
  const auto totals = [&heap] {
    auto copy = heap;
    Result t;
    while (!copy.empty()) {
      t.value += copy.top().value;
      t.error += copy.top().error;
      copy.pop();
    }
    return t;
  };
  Result r = totals();
  while (r.error > std::max(kTarget, kTarget * std::abs(r.value)) && heap.size() < kMaxPieces) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Piece left = eval(worst.g, worst.a, mid);
    const Piece right = eval(worst.g, mid, worst.b);
    r.value += left.value + right.value - worst.value;
    r.error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  return totals();
}

std::vector<double> scale_breakpoints(double lo, double hi, double center, double scale) {
  std::vector<double> b;
  if (!(scale > 0.0) || !std::isfinite(center)) return b;
  for (double k : {-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0}) {
    const double x = center + k * scale;
    if (x > lo && x < hi) b.push_back(x);
  }
  return b;
}

std::vector<double> sign_changes(const std::function<double(double)>& g, double lo, double hi, double center,
                                 double scale, int scan_points) {
  std::vector<double> roots;
  if (!(scale > 0.0)) scale = 1.0;
  double prev_x = from_unit(-1.0 + 2.0 / (scan_points + 1), lo, hi, center, scale);
  double prev_g = g(prev_x);
  for (int i = 2; i <= scan_points; ++i) {
    const double x = from_unit(-1.0 + 2.0 * i / (scan_points + 1), lo, hi, center, scale);
    const double gx = g(x);
    if ((prev_g < 0.0 && gx > 0.0) || (prev_g > 0.0 && gx < 0.0)) {
      double a = prev_x, b = x, ga = prev_g;
      for (int it = 0; it < 200 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if ((ga < 0.0) == (gm < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_g = gx;
  }
  return roots;
}

}  // namespace ppd::quadrature
