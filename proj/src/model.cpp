#include "ppd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/constants/constants.hpp>
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

constexpr double kSimplexTol = 1e-9;

// x·log(y) with the convention 0·log 0 = 0.
double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(y);
}

std::vector<double> iota_support(int first, int last) {
  std::vector<double> s(static_cast<std::size_t>(last - first + 1));
  std::iota(s.begin(), s.end(), static_cast<double>(first));
  return s;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / boost::math::constants::root_two<double>()); }

}  // namespace

ModelFamily ModelFamily::bernoulli() {
  return ModelFamily(BernoulliFamily{}, RefMeasure::counting({0.0, 1.0}), ParamSupport::line(0.0, 1.0));
}

ModelFamily ModelFamily::normal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError(fmt::format("model.sigma must be > 0, got {}", sigma));
  return ModelFamily(NormalFamily{sigma}, RefMeasure::lebesgue(-kInf, kInf), ParamSupport::line(-kInf, kInf));
}

ModelFamily ModelFamily::poisson(int max_count) {
  if (max_count < 16) throw DomainError(fmt::format("model.max_count must be >= 16, got {}", max_count));
  return ModelFamily(PoissonFamily{max_count}, RefMeasure::counting(iota_support(0, max_count)),
                     ParamSupport::line(0.0, kInf));
}

ModelFamily ModelFamily::categorical(int categories) {
  if (categories < 2) throw DomainError(fmt::format("model.categories must be >= 2, got {}", categories));
  return ModelFamily(CategoricalFamily{categories}, RefMeasure::counting(iota_support(1, categories)),
                     ParamSupport::simplex(categories));
}

std::vector<std::string> registered_models() { return {"bernoulli", "normal", "poisson", "categorical"}; }

std::string ModelFamily::name() const {
  return std::visit(overloaded{
                        [](const BernoulliFamily&) { return std::string("bernoulli"); },
                        [](const NormalFamily& f) { return fmt::format("normal(sigma={})", f.sigma); },
                        [](const PoissonFamily&) { return std::string("poisson"); },
                        [](const CategoricalFamily& f) { return fmt::format("categorical({})", f.categories); },
                    },
                    kind_);
}

void ModelFamily::check_param(const ParamPoint& theta) const {
  const auto& ps = param_support_;
  if (theta.dim() != ps.dim)
    throw DomainError(fmt::format("theta has dimension {}, {} expects {}", theta.dim(), name(), ps.dim));
  for (Eigen::Index i = 0; i < theta.dim(); ++i) {
    const double v = theta[i];
    if (!std::isfinite(v) || v < ps.lo || v > ps.hi)
      throw DomainError(fmt::format("theta[{}]={} outside parameter support {} of {}", i, v, ps.describe(), name()));
  }
  if (ps.kind == ParamSupport::Kind::simplex && std::abs(theta.coords.sum() - 1.0) > kSimplexTol)
    throw DomainError(fmt::format("theta coordinates sum to {}, expected 1 for {}", theta.coords.sum(), name()));
}

void ModelFamily::check_obs(Observation x) const {
  if (!obs_measure_.contains(x.value))
    throw DomainError(fmt::format("observation={} not in support {} of {}", x.value, obs_measure_.describe(), name()));
}

double ModelFamily::log_density(const ParamPoint& theta, Observation x) const {
  check_param(theta);
  check_obs(x);
  const double w = x.value;
  return std::visit(overloaded{
                        [&](const BernoulliFamily&) { return w == 1.0 ? std::log(theta[0]) : std::log1p(-theta[0]); },
                        [&](const NormalFamily& f) {
                          const double z = (w - theta[0]) / f.sigma;
                          return -0.5 * z * z - std::log(f.sigma) -
                                 boost::math::constants::log_root_two_pi<double>();
                        },
                        [&](const PoissonFamily&) { return xlogy(w, theta[0]) - theta[0] - std::lgamma(w + 1.0); },
                        [&](const CategoricalFamily&) { return std::log(theta[static_cast<Eigen::Index>(w) - 1]); },
                    },
                    kind_);
}

double ModelFamily::density(const ParamPoint& theta, Observation x) const {
  check_param(theta);
  check_obs(x);
  const double w = x.value;
  return std::visit(overloaded{
                        [&](const BernoulliFamily&) { return w == 1.0 ? theta[0] : 1.0 - theta[0]; },
                        [&](const NormalFamily& f) {
                          const double z = (w - theta[0]) / f.sigma;
                          return boost::math::constants::one_div_root_two_pi<double>() * std::exp(-0.5 * z * z) /
                                 f.sigma;
                        },
                        [&](const PoissonFamily&) {
                          if (theta[0] == 0.0) return w == 0.0 ? 1.0 : 0.0;
                          return std::exp(w * std::log(theta[0]) - theta[0] - std::lgamma(w + 1.0));
                        },
                        [&](const CategoricalFamily&) { return theta[static_cast<Eigen::Index>(w) - 1]; },
                    },
                    kind_);
}

double ModelFamily::probability(const ParamPoint& theta, const Event& event) const {
  check_param(theta);
  if (const auto* f = std::get_if<NormalFamily>(&kind_)) {
    if (!event.is_interval() || !(event.lo() < event.hi())) return 0.0;
    return normal_cdf((event.hi() - theta[0]) / f->sigma) - normal_cdf((event.lo() - theta[0]) / f->sigma);
  }
  double p = 0.0;
  for (double x : obs_measure_.support())
    if (event.contains(x)) p += density(theta, Observation{x});
  return p;
}

std::pair<double, double> ModelFamily::location_scale(const ParamPoint& theta) const {
  return std::visit(overloaded{
                        [&](const BernoulliFamily&) {
                          return std::pair{theta[0], std::sqrt(theta[0] * (1.0 - theta[0]))};
                        },
                        [&](const NormalFamily& f) { return std::pair{theta[0], f.sigma}; },
                        [&](const PoissonFamily&) { return std::pair{theta[0], std::sqrt(theta[0])}; },
                        [&](const CategoricalFamily& f) {
                          const Eigen::ArrayXd labels = Eigen::ArrayXd::LinSpaced(f.categories, 1.0, f.categories);
                          const double mean = (labels * theta.coords.array()).sum();
                          const double var = ((labels - mean).square() * theta.coords.array()).sum();
                          return std::pair{mean, std::sqrt(var)};
                        },
                    },
                    kind_);
}

Observation ModelFamily::sample(const ParamPoint& theta, Rng& rng) const {
  check_param(theta);
  return std::visit(overloaded{
                        [&](const BernoulliFamily&) {
                          std::uniform_real_distribution<double> u(0.0, 1.0);
                          return Observation{u(rng) < theta[0] ? 1.0 : 0.0};
                        },
                        [&](const NormalFamily& f) {
                          std::normal_distribution<double> z(theta[0], f.sigma);
                          return Observation{z(rng)};
                        },
                        [&](const PoissonFamily& f) {
                          if (theta[0] == 0.0) return Observation{0.0};
                          std::poisson_distribution<int> p(theta[0]);
                          return Observation{static_cast<double>(std::min(p(rng), f.max_count))};
                        },
                        [&](const CategoricalFamily& f) {
                          std::uniform_real_distribution<double> u(0.0, 1.0);
                          const double target = u(rng);
                          double cum = 0.0;
                          for (int j = 0; j < f.categories - 1; ++j) {
                            cum += theta[j];
                            if (target < cum) return Observation{static_cast<double>(j + 1)};
                          }
                          return Observation{static_cast<double>(f.categories)};
                        },
                    },
                    kind_);
}

SampleSequence ModelFamily::sample(const ParamPoint& theta, Rng& rng, std::size_t n) const {
  SampleSequence seq;
  seq.obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) seq.obs.push_back(sample(theta, rng));
  return seq;
}

Eigen::VectorXd ModelFamily::summarize(ObsSpan obs) const {
  for (auto x : obs) check_obs(x);
  const auto n = static_cast<double>(obs.size());
  return std::visit(
      overloaded{
          [&](const BernoulliFamily&) {
            double k = 0.0;
            for (auto x : obs) k += x.value;
            return Eigen::VectorXd{{n, k}};
          },
          [&](const NormalFamily&) {
            // Sorting makes the floating-point sums independent of observation order.
            std::vector<double> v(obs.size());
            std::transform(obs.begin(), obs.end(), v.begin(), [](Observation o) { return o.value; });
            std::sort(v.begin(), v.end());
            const double sum = std::accumulate(v.begin(), v.end(), 0.0);
            const double mean = v.empty() ? 0.0 : sum / n;
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            return Eigen::VectorXd{{n, sum, ss}};
          },
          [&](const PoissonFamily&) {
            double sum = 0.0;
            double log_fact = 0.0;
            for (auto x : obs) {
              sum += x.value;
              log_fact += std::lgamma(x.value + 1.0);
            }
            return Eigen::VectorXd{{n, sum, log_fact}};
          },
          [&](const CategoricalFamily& f) {
            Eigen::VectorXd stats = Eigen::VectorXd::Zero(f.categories + 1);
            stats[0] = n;
            for (auto x : obs) stats[static_cast<Eigen::Index>(x.value)] += 1.0;
            return stats;
          },
      },
      kind_);
}

double ModelFamily::log_likelihood(const ParamPoint& theta, const Eigen::VectorXd& stats) const {
  const double n = stats[0];
  return std::visit(overloaded{
                        [&](const BernoulliFamily&) {
                          return xlogy(stats[1], theta[0]) + xlogy(n - stats[1], 1.0 - theta[0]);
                        },
                        [&](const NormalFamily& f) {
                          if (n == 0.0) return 0.0;
                          const double mean = stats[1] / n;
                          const double dev = mean - theta[0];
                          return -n * (std::log(f.sigma) + boost::math::constants::log_root_two_pi<double>()) -
                                 (stats[2] + n * dev * dev) / (2.0 * f.sigma * f.sigma);
                        },
                        [&](const PoissonFamily&) { return xlogy(stats[1], theta[0]) - n * theta[0] - stats[2]; },
                        [&](const CategoricalFamily& f) {
                          double ll = 0.0;
                          for (int j = 0; j < f.categories; ++j) ll += xlogy(stats[j + 1], theta[j]);
                          return ll;
                        },
                    },
                    kind_);
}

}  // namespace ppd
