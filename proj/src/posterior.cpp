#include "ppd/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <fmt/format.h>

#include "ppd/errors.hpp"

namespace ppd {
namespace {

constexpr Eigen::Index kMaxGridNodes = Eigen::Index{1} << 24;

struct Normalized {
  Eigen::VectorXd weights;
  double ess;  // (Σu)²/Σu² on the unnormalized u, exact for equal weights
};

// exp(l - max l) normalized; throws when nothing survives.
Normalized normalize_log_weights(const Eigen::VectorXd& log_w) {
  const double top = log_w.size() ? log_w.maxCoeff() : -kInf;
  if (std::isnan(top) || top == -kInf)
    throw DegeneratePosteriorError("every posterior weight underflowed (likelihood is zero on all nodes)");
  if (top == kInf) throw NumericalError("unbounded prior or likelihood density at a posterior node", kInf);
  Eigen::VectorXd w = (log_w.array() - top).exp().matrix();
  const double total = pairwise_sum(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
  const double ess = total * total / w.squaredNorm();
  w /= total;
  return {std::move(w), ess};
}

double ess(const Eigen::VectorXd& w) { return 1.0 / w.squaredNorm(); }

std::pair<double, double> theta_range(const ModelFamily& model, const PriorSpec& prior, const GridOptions& options) {
  const auto ps = prior.support();
  const auto& ms = model.param_support();
  double lo = std::max(ps.lo, ms.lo);
  double hi = std::min(ps.hi, ms.hi);
  if (options.truncation) {
    lo = std::max(lo, options.truncation->first);
    hi = std::min(hi, options.truncation->second);
  } else if (!std::isfinite(lo) || !std::isfinite(hi)) {
    const double m = prior.mean();
    const double s = prior.sd();
    lo = std::max(lo, m - 10.0 * s);
    hi = std::min(hi, m + 10.0 * s);
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ConfigError(fmt::format("empty or unbounded grid range [{}, {}] for prior {}", lo, hi, prior.name()));
  return {lo, hi};
}

// Trapezoid weights on a uniform grid of r nodes spanning a width of `width`.
Eigen::VectorXd trapezoid(int r, double width) {
  Eigen::VectorXd cell = Eigen::VectorXd::Constant(r, width / (r - 1));
  cell[0] *= 0.5;
  cell[r - 1] *= 0.5;
  return cell;
}

WeightedPosterior single_node(const ParamPoint& theta, PosteriorMethod method) {
  WeightedPosterior post;
  post.nodes = theta.coords;
  post.weights = Eigen::VectorXd::Ones(1);
  post.method = method;
  post.effective_sample_size = 1.0;
  return post;
}

WeightedPosterior grid_line(const ModelFamily& model, const PriorSpec& prior, const Eigen::VectorXd& stats,
                            const GridOptions& options) {
  const auto [lo, hi] = theta_range(model, prior, options);
  const int r = options.resolution;
  const Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(r, lo, hi);
  const Eigen::VectorXd cell = trapezoid(r, hi - lo);

  // Node i carries the prior mass of its cell [θ_i - h/2, θ_i + h/2] ∩ [lo, hi]; this stays
  // accurate when the prior density is singular or steep at an end of Θ. Priors without a
  // closed-form CDF fall back to density × trapezoid width.
  const double half = 0.5 * (hi - lo) / (r - 1);
  Eigen::VectorXd log_w(r);
  for (int i = 0; i < r; ++i) {
    const auto point = ParamPoint::scalar(theta[i]);
    const auto mass = prior.log_mass(std::max(lo, theta[i] - half), std::min(hi, theta[i] + half));
    log_w[i] = (mass ? *mass : prior.log_density(point) + std::log(cell[i])) + model.log_likelihood(point, stats);
  }
  WeightedPosterior post;
  post.nodes = theta.transpose();
  auto norm = normalize_log_weights(log_w);
  post.weights = std::move(norm.weights);
  post.effective_sample_size = norm.ess;
  return post;
}

// Simplex-3 via stick breaking: θ = (u, (1-u)v, (1-u)(1-v)), Jacobian (1-u).
WeightedPosterior grid_simplex3(const ModelFamily& model, const PriorSpec& prior, const Eigen::VectorXd& stats,
                                const GridOptions& options) {
  const int r = options.resolution;
  if (Eigen::Index{r} * r > kMaxGridNodes)
    throw DomainError(fmt::format("grid resolution {} per axis exceeds the 2-D node budget", r));
  const Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(r, 0.0, 1.0);
  const Eigen::VectorXd cell = trapezoid(r, 1.0);

  std::vector<double> log_w;
  std::vector<Eigen::Vector3d> points;
  log_w.reserve(static_cast<std::size_t>(r) * r);
  points.reserve(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r - 1; ++i) {  // u = 1 has zero Jacobian
    const double u = axis[i];
    for (int j = 0; j < r; ++j) {
      const double v = axis[j];
      const Eigen::Vector3d t(u, (1.0 - u) * v, (1.0 - u) * (1.0 - v));
      const ParamPoint point{Eigen::VectorXd(t)};
      const double lw = prior.log_density(point) + model.log_likelihood(point, stats) +
                        std::log(cell[i] * cell[j] * (1.0 - u));
      if (lw == -kInf) continue;
      log_w.push_back(lw);
      points.push_back(t);
    }
  }
  WeightedPosterior post;
  post.nodes.resize(3, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) post.nodes.col(static_cast<Eigen::Index>(k)) = points[k];
  auto norm = normalize_log_weights(Eigen::Map<const Eigen::VectorXd>(log_w.data(), static_cast<Eigen::Index>(log_w.size())));
  post.weights = std::move(norm.weights);
  post.effective_sample_size = norm.ess;
  return post;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

WeightedPosterior grid_posterior(const ModelFamily& model, const PriorSpec& prior, ObsSpan obs,
                                 const GridOptions& options) {
  if (options.resolution < 16)
    throw DomainError(fmt::format("grid resolution must be >= 16, got {}", options.resolution));
  check_compatible(model, prior);
  const Eigen::VectorXd stats = model.summarize(obs);
  if (prior.is_point_mass()) return single_node(prior.as<PointMassPrior>().theta, PosteriorMethod::grid_quadrature);
  const auto support = prior.support();
  if (support.kind == ParamSupport::Kind::interval) return grid_line(model, prior, stats, options);
  if (support.dim == 3) return grid_simplex3(model, prior, stats, options);
  throw UnsupportedError(
      fmt::format("grid posterior supports at most two free parameter dimensions; {} has {}", prior.name(),
                  support.dim - 1));
}

WeightedPosterior importance_posterior(const ModelFamily& model, const PriorSpec& prior, ObsSpan obs, int draws,
                                       Rng& rng) {
  if (draws < 100) throw DomainError(fmt::format("importance sampling needs draws >= 100, got {}", draws));
  check_compatible(model, prior);
  const Eigen::VectorXd stats = model.summarize(obs);

  WeightedPosterior post;
  post.method = PosteriorMethod::importance_sampling;
  post.nodes.resize(prior.dim(), draws);
  Eigen::VectorXd log_w(draws);
  for (int i = 0; i < draws; ++i) {
    const ParamPoint theta = prior.sample(rng);
    post.nodes.col(i) = theta.coords;
    log_w[i] = model.log_likelihood(theta, stats);
  }
  auto norm = normalize_log_weights(log_w);
  post.weights = std::move(norm.weights);
  post.effective_sample_size = norm.ess;
  post.unreliable = post.effective_sample_size < WeightedPosterior::kMinReliableEss;
  return post;
}

double ppd_eval(const WeightedPosterior& posterior, const ModelFamily& model, Observation x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < posterior.size(); ++i) {
    const double w = posterior.weights[i];
    if (w == 0.0) continue;
    total += w * model.density(posterior.node(i), x);
  }
  return total;
}

double ppd_event_prob(const WeightedPosterior& posterior, const ModelFamily& model, const Event& event) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < posterior.size(); ++i) {
    const double w = posterior.weights[i];
    if (w == 0.0) continue;
    total += w * model.probability(posterior.node(i), event);
  }
  return std::clamp(total, 0.0, 1.0);
}

PredictiveDensity weighted_predictive(const WeightedPosterior& posterior, const ModelFamily& model, double prune) {
  struct Mixture {
    std::vector<ParamPoint> nodes;
    std::vector<double> weights;
  };
  auto mixture = std::make_shared<Mixture>();
  const double cutoff = prune * posterior.weights.maxCoeff();
  double center = 0.0, second = 0.0;
  for (Eigen::Index i = 0; i < posterior.size(); ++i) {
    const double w = posterior.weights[i];
    if (w == 0.0 || w < cutoff) continue;
    mixture->nodes.push_back(posterior.node(i));
    mixture->weights.push_back(w);
    const auto [loc, scale] = model.location_scale(mixture->nodes.back());
    center += w * loc;
    second += w * (scale * scale + loc * loc);
  }
  const double scale = std::sqrt(std::max(second - center * center, 0.0));
  return PredictiveDensity(Density(
                               [mixture, model](double x) {
                                 double total = 0.0;
                                 for (std::size_t i = 0; i < mixture->nodes.size(); ++i)
                                   total += mixture->weights[i] * model.density(mixture->nodes[i], Observation{x});
                                 return total;
                               },
                               model.obs_measure(), center, scale),
                           Provenance::weighted_posterior);
}

WeightedPosterior mix(const WeightedPosterior& a, const WeightedPosterior& b, double lambda) {
  if (a.nodes.rows() != b.nodes.rows()) throw DomainError("cannot mix posteriors of different dimension");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError(fmt::format("mixing weight {} outside [0, 1]", lambda));
  WeightedPosterior out;
  out.method = a.method;
  out.nodes.resize(a.nodes.rows(), a.size() + b.size());
  out.nodes << a.nodes, b.nodes;
  out.weights.resize(a.size() + b.size());
  out.weights << lambda * a.weights, (1.0 - lambda) * b.weights;
  out.effective_sample_size = ess(out.weights);
  return out;
}

}  // namespace ppd
