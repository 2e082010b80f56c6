#include "ppd/prior.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "ppd/errors.hpp"

namespace ppd {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kCustomTableSize = 4097;

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(fmt::format("{} must be > 0, got {}", field, v));
}

double gamma_draw(double shape, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

template <class F>
double integrate(F f, double lo, double hi, double* error) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-12, error);
}

}  // namespace

PriorSpec PriorSpec::beta(double alpha, double beta) {
  require_positive(alpha, "prior.alpha");
  require_positive(beta, "prior.beta");
  return PriorSpec(BetaPrior{alpha, beta});
}

PriorSpec PriorSpec::normal(double mean, double variance) {
  if (!std::isfinite(mean)) throw DomainError("prior.mean must be finite");
  require_positive(variance, "prior.variance");
  return PriorSpec(NormalPrior{mean, variance});
}

PriorSpec PriorSpec::gamma(double shape, double rate) {
  require_positive(shape, "prior.shape");
  require_positive(rate, "prior.rate");
  return PriorSpec(GammaPrior{shape, rate});
}

PriorSpec PriorSpec::dirichlet(Eigen::VectorXd alpha) {
  if (alpha.size() < 2) throw DomainError("prior.alpha needs at least 2 coordinates");
  for (Eigen::Index j = 0; j < alpha.size(); ++j)
    require_positive(alpha[j], fmt::format("prior.alpha[{}]", j).c_str());
  return PriorSpec(DirichletPrior{std::move(alpha)});
}

PriorSpec PriorSpec::point_mass(ParamPoint theta) {
  if (theta.dim() < 1) throw DomainError("prior.theta must have at least one coordinate");
  for (Eigen::Index j = 0; j < theta.dim(); ++j)
    if (!std::isfinite(theta[j])) throw DomainError(fmt::format("prior.theta[{}] must be finite", j));
  return PriorSpec(PointMassPrior{std::move(theta)});
}

PriorSpec PriorSpec::custom(std::function<double(double)> density, double lo, double hi, std::string label) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError(fmt::format("custom prior support must be a finite interval, got [{}, {}]", lo, hi));
  double err = 0.0;
  const double mass = integrate(density, lo, hi, &err);
  if (std::abs(mass - 1.0) > 1e-8)
    throw ConfigError(fmt::format("custom prior '{}' integrates to {} over [{}, {}], expected 1", label, mass, lo, hi));

  // Trapezoidal CDF table, renormalized so the last entry is exactly 1.
  Eigen::VectorXd cdf(kCustomTableSize);
  const double h = (hi - lo) / (kCustomTableSize - 1);
  cdf[0] = 0.0;
  double prev = density(lo);
  for (int i = 1; i < kCustomTableSize; ++i) {
    const double cur = density(lo + i * h);
    if (!(cur >= 0.0)) throw ConfigError(fmt::format("custom prior '{}' is negative at {}", label, lo + i * h));
    cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  cdf /= cdf[kCustomTableSize - 1];
  return PriorSpec(CustomPrior{std::move(density), lo, hi, std::move(label),
                               std::make_shared<const Eigen::VectorXd>(std::move(cdf))});
}

std::string PriorSpec::name() const {
  return std::visit(overloaded{
                        [](const BetaPrior& p) { return fmt::format("beta({},{})", p.alpha, p.beta); },
                        [](const NormalPrior& p) { return fmt::format("normal({},{})", p.mean, p.variance); },
                        [](const GammaPrior& p) { return fmt::format("gamma({},{})", p.shape, p.rate); },
                        [](const DirichletPrior& p) {
                          return fmt::format("dirichlet({})",
                                             fmt::join(p.alpha.data(), p.alpha.data() + p.alpha.size(), ","));
                        },
                        [](const PointMassPrior& p) {
                          return fmt::format(
                              "point-mass({})",
                              fmt::join(p.theta.coords.data(), p.theta.coords.data() + p.theta.dim(), ","));
                        },
                        [](const CustomPrior& p) { return fmt::format("{}[{},{}]", p.label, p.lo, p.hi); },
                    },
                    kind_);
}

Eigen::Index PriorSpec::dim() const {
  if (const auto* d = std::get_if<DirichletPrior>(&kind_)) return d->alpha.size();
  if (const auto* p = std::get_if<PointMassPrior>(&kind_)) return p->theta.dim();
  return 1;
}

ParamSupport PriorSpec::support() const {
  return std::visit(overloaded{
                        [](const BetaPrior&) { return ParamSupport::line(0.0, 1.0); },
                        [](const NormalPrior&) { return ParamSupport::line(-kInf, kInf); },
                        [](const GammaPrior&) { return ParamSupport::line(0.0, kInf); },
                        [](const DirichletPrior& p) { return ParamSupport::simplex(static_cast<int>(p.alpha.size())); },
                        [](const PointMassPrior& p) {
                          if (p.theta.dim() == 1) return ParamSupport::line(p.theta[0], p.theta[0]);
                          return ParamSupport::simplex(static_cast<int>(p.theta.dim()));
                        },
                        [](const CustomPrior& p) { return ParamSupport::line(p.lo, p.hi); },
                    },
                    kind_);
}

double PriorSpec::log_density(const ParamPoint& theta) const {
  return std::visit(
      overloaded{
          [&](const BetaPrior& p) {
            const double t = theta[0];
            if (t < 0.0 || t > 1.0) return -kInf;
            return xlogy(p.alpha - 1.0, t) + xlogy(p.beta - 1.0, 1.0 - t) - std::log(boost::math::beta(p.alpha, p.beta));
          },
          [&](const NormalPrior& p) {
            const double d = theta[0] - p.mean;
            return -0.5 * d * d / p.variance - 0.5 * std::log(2.0 * M_PI * p.variance);
          },
          [&](const GammaPrior& p) {
            const double t = theta[0];
            if (t < 0.0) return -kInf;
            return p.shape * std::log(p.rate) - std::lgamma(p.shape) + xlogy(p.shape - 1.0, t) - p.rate * t;
          },
          [&](const DirichletPrior& p) {
            if (theta.dim() != p.alpha.size()) throw DomainError("theta dimension does not match the dirichlet prior");
            if ((theta.coords.array() < 0.0).any()) return -kInf;
            double ld = std::lgamma(p.alpha.sum());
            for (Eigen::Index j = 0; j < p.alpha.size(); ++j)
              ld += xlogy(p.alpha[j] - 1.0, theta[j]) - std::lgamma(p.alpha[j]);
            return ld;
          },
          [&](const PointMassPrior&) -> double { throw DomainError("a point-mass prior has no Lebesgue density"); },
          [&](const CustomPrior& p) {
            const double t = theta[0];
            if (t < p.lo || t > p.hi) return -kInf;
            return std::log(p.density(t));
          },
      },
      kind_);
}

double PriorSpec::density(const ParamPoint& theta) const { return std::exp(log_density(theta)); }

std::optional<double> PriorSpec::log_mass(double a, double b) const {
  // (lower CDF, upper tail) at x; the difference is taken in whichever tail keeps precision.
  std::function<std::pair<double, double>(double)> tails;
  if (const auto* p = std::get_if<BetaPrior>(&kind_)) {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    tails = [p](double x) {
      return std::pair{boost::math::ibeta(p->alpha, p->beta, x), boost::math::ibetac(p->alpha, p->beta, x)};
    };
  } else if (const auto* p = std::get_if<NormalPrior>(&kind_)) {
    const double s = std::sqrt(2.0 * p->variance);
    tails = [p, s](double x) {
      const double z = (x - p->mean) / s;
      return std::pair{0.5 * std::erfc(-z), 0.5 * std::erfc(z)};
    };
  } else if (const auto* p = std::get_if<GammaPrior>(&kind_)) {
    a = std::max(a, 0.0);
    tails = [p](double x) {
      return std::pair{boost::math::gamma_p(p->shape, p->rate * x), boost::math::gamma_q(p->shape, p->rate * x)};
    };
  } else {
    return std::nullopt;
  }
  if (!(a < b)) return -kInf;
  const auto [fa, sa] = tails(a);
  const auto [fb, sb] = tails(b);
  const double mass = fb <= 0.5 ? fb - fa : sa - sb;
  return mass > 0.0 ? std::log(mass) : -kInf;
}

ParamPoint PriorSpec::sample(Rng& rng) const {
  return std::visit(overloaded{
                        [&](const BetaPrior& p) {
                          const double x = gamma_draw(p.alpha, rng);
                          const double y = gamma_draw(p.beta, rng);
                          return ParamPoint::scalar(x / (x + y));
                        },
                        [&](const NormalPrior& p) {
                          std::normal_distribution<double> z(p.mean, std::sqrt(p.variance));
                          return ParamPoint::scalar(z(rng));
                        },
                        [&](const GammaPrior& p) { return ParamPoint::scalar(gamma_draw(p.shape, rng) / p.rate); },
                        [&](const DirichletPrior& p) {
                          Eigen::VectorXd g(p.alpha.size());
                          for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = gamma_draw(p.alpha[j], rng);
                          return ParamPoint(g / g.sum());
                        },
                        [&](const PointMassPrior& p) { return p.theta; },
                        [&](const CustomPrior& p) {
                          std::uniform_real_distribution<double> u(0.0, 1.0);
                          const double target = u(rng);
                          const auto& cdf = *p.cdf_table;
                          const auto* it = std::upper_bound(cdf.data(), cdf.data() + cdf.size(), target);
                          const auto hi = std::clamp<Eigen::Index>(it - cdf.data(), 1, cdf.size() - 1);
                          const double frac = (target - cdf[hi - 1]) / std::max(cdf[hi] - cdf[hi - 1], 1e-300);
                          const double h = (p.hi - p.lo) / (cdf.size() - 1);
                          return ParamPoint::scalar(p.lo + h * (static_cast<double>(hi - 1) + frac));
                        },
                    },
                    kind_);
}

double PriorSpec::mean() const {
  return std::visit(overloaded{
                        [](const BetaPrior& p) { return p.alpha / (p.alpha + p.beta); },
                        [](const NormalPrior& p) { return p.mean; },
                        [](const GammaPrior& p) { return p.shape / p.rate; },
                        [](const DirichletPrior&) -> double { throw DomainError("mean() needs a 1-D prior"); },
                        [](const PointMassPrior& p) {
                          if (p.theta.dim() != 1) throw DomainError("mean() needs a 1-D prior");
                          return p.theta[0];
                        },
                        [](const CustomPrior& p) {
                          double err = 0.0;
                          return integrate([&](double t) { return t * p.density(t); }, p.lo, p.hi, &err);
                        },
                    },
                    kind_);
}

double PriorSpec::sd() const {
  return std::visit(overloaded{
                        [](const BetaPrior& p) {
                          const double s = p.alpha + p.beta;
                          return std::sqrt(p.alpha * p.beta / (s * s * (s + 1.0)));
                        },
                        [](const NormalPrior& p) { return std::sqrt(p.variance); },
                        [](const GammaPrior& p) { return std::sqrt(p.shape) / p.rate; },
                        [](const DirichletPrior&) -> double { throw DomainError("sd() needs a 1-D prior"); },
                        [](const PointMassPrior&) { return 0.0; },
                        [this](const CustomPrior& p) {
                          const double m = mean();
                          double err = 0.0;
                          return std::sqrt(integrate([&](double t) { return (t - m) * (t - m) * p.density(t); },
                                                     p.lo, p.hi, &err));
                        },
                    },
                    kind_);
}

void check_compatible(const ModelFamily& model, const PriorSpec& prior) {
  const auto& ms = model.param_support();
  if (prior.is_point_mass()) {
    try {
      model.check_param(prior.as<PointMassPrior>().theta);
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("point-mass prior incompatible with {}: {}", model.name(), e.what()));
    }
    return;
  }
  const auto ps = prior.support();
  const bool ok = ps.kind == ms.kind && ps.dim == ms.dim && ps.lo >= ms.lo && ps.hi <= ms.hi;
  if (!ok)
    throw ConfigError(fmt::format("prior {} with support {} does not fit the parameter space {} of {}", prior.name(),
                                  ps.describe(), ms.describe(), model.name()));
}

}  // namespace ppd
