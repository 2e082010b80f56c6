#include "ppd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "ppd/errors.hpp"

namespace ppd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags so θ/observation draws never share a stream with estimator draws.
constexpr std::uint64_t kJointStream = 0;
constexpr std::uint64_t kEstimatorStream = 1;

void require_increasing(std::span<const std::size_t> ns) {
  if (ns.empty()) throw DomainError("ns must be non-empty");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw DomainError("ns must be strictly increasing");
}

// Runs body(r) for r in [0, count) on `threads` workers. Each index is written by
// exactly one worker, so the caller's reduction order stays fixed.
template <class Body>
void parallel_for(int count, int threads, Body body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int r = 0; r < count; ++r) body(r);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    workers.emplace_back([&, t] {
      for (int r = t; r < count; r += threads) body(r);
    });
}

}  // namespace

std::string_view to_string(Engine engine) noexcept {
  switch (engine) {
    case Engine::conjugate:
      return "conjugate";
    case Engine::grid:
      return "grid";
    case Engine::importance:
      return "importance";
  }
  return "?";
}

Engine parse_engine(std::string_view name) {
  for (auto e : {Engine::conjugate, Engine::grid, Engine::importance})
    if (to_string(e) == name) return e;
  throw ConfigError(fmt::format("unknown engine '{}' (expected conjugate, grid or importance)", name));
}

Engine default_engine(const PriorSpec& prior) noexcept {
  return prior.dim() > 1 ? Engine::importance : Engine::grid;
}

PredictiveDensity build_predictive(const ModelFamily& model, const PriorSpec& prior, ObsSpan obs, Engine engine,
                                   const EngineOptions& options, Rng& rng) {
  switch (engine) {
    case Engine::conjugate: {
      const ConjugatePair pair(model, prior);
      return conjugate_predictive(pair, conjugate_posterior(pair, obs));
    }
    case Engine::grid:
      return weighted_predictive(grid_posterior(model, prior, obs, options.grid), model);
    case Engine::importance:
      return weighted_predictive(importance_posterior(model, prior, obs, options.importance_draws, rng), model);
  }
  throw ConfigError("unreachable engine");
}

Estimator make_estimator(const ModelFamily& model, const PriorSpec& prior, Engine engine,
                         const EngineOptions& options) {
  check_compatible(model, prior);
  switch (engine) {
    case Engine::conjugate: {
      const ConjugatePair pair(model, prior);
      return [pair](ObsSpan obs, Rng&) -> Density { return conjugate_predictive(pair, conjugate_posterior(pair, obs)); };
    }
    case Engine::grid:
      return [model, prior, options](ObsSpan obs, Rng&) -> Density {
        return weighted_predictive(grid_posterior(model, prior, obs, options.grid), model);
      };
    case Engine::importance:
      return [model, prior, options](ObsSpan obs, Rng& rng) -> Density {
        const auto post = importance_posterior(model, prior, obs, options.importance_draws, rng);
        if (post.unreliable)
          throw DegeneratePosteriorError(
              fmt::format("unreliable importance posterior: ESS {:.3g} below {}", post.effective_sample_size,
                          WeightedPosterior::kMinReliableEss));
        return weighted_predictive(post, model);
      };
  }
  throw ConfigError("unreachable engine");
}

JointSampler::JointSampler(ModelFamily model, PriorSpec prior, std::uint64_t base_seed)
    : model_(std::move(model)), prior_(std::move(prior)), base_seed_(base_seed) {
  check_compatible(model_, prior_);
}

JointSampler::Draw JointSampler::draw(std::uint64_t replication, std::size_t n) const {
  Rng rng = make_rng(split_seed(base_seed_, replication), kJointStream);
  ParamPoint theta = prior_.sample(rng);
  SampleSequence obs = model_.sample(theta, rng, n);
  return {std::move(theta), std::move(obs)};
}

Rng JointSampler::estimator_rng(std::uint64_t replication, std::size_t n) const {
  return make_rng(split_seed(split_seed(base_seed_, replication), kEstimatorStream), n);
}

std::vector<RiskCurve> risk_curves(const JointSampler& sampler, std::span<const std::size_t> ns,
                                   std::span<const LossKind> kinds, const Estimator& estimator,
                                   std::string_view estimator_label, int replications, const RiskOptions& options) {
  require_increasing(ns);
  if (replications < 30) throw DomainError(fmt::format("replications must be >= 30, got {}", replications));
  if (kinds.empty()) throw DomainError("at least one loss kind is required");

  const auto points = static_cast<Eigen::Index>(ns.size());
  Eigen::MatrixXd l1(points, replications);
  std::vector<std::optional<std::string>> first_error(ns.size());
  std::mutex error_mutex;

  parallel_for(replications, options.threads, [&](int r) {
    const auto draw = sampler.draw(static_cast<std::uint64_t>(r), ns.back());
    const Density truth = model_density(sampler.model(), draw.theta);
    for (Eigen::Index i = 0; i < points; ++i) {
      const std::size_t n = ns[static_cast<std::size_t>(i)];
      try {
        Rng rng = sampler.estimator_rng(static_cast<std::uint64_t>(r), n);
        l1(i, r) = l1_distance(DensityPair(estimator(draw.obs.prefix(n), rng), truth));
      } catch (const std::runtime_error& e) {  // NumericalError, DegeneratePosteriorError
        l1(i, r) = kNaN;
        std::lock_guard lock(error_mutex);
        auto& slot = first_error[static_cast<std::size_t>(i)];
        if (!slot) slot = fmt::format("replication {} (seed {}): {}", r, split_seed(sampler.base_seed(), r), e.what());
      }
    }
  });

  std::vector<RiskCurve> curves;
  for (auto kind : kinds) {
    RiskCurve curve;
    curve.model = sampler.model().name();
    curve.prior = sampler.prior().name();
    curve.engine = std::string(estimator_label);
    curve.base_seed = sampler.base_seed();
    curve.loss_kind = kind;
    curve.losses = l1.unaryExpr([kind](double x) { return std::isnan(x) ? x : loss_from_l1(kind, x); });
    for (Eigen::Index i = 0; i < points; ++i) {
      RiskEstimate est;
      est.n = ns[static_cast<std::size_t>(i)];
      est.loss_kind = kind;
      double sum = 0.0;
      for (int r = 0; r < replications; ++r) {
        const double x = curve.losses(i, r);
        if (std::isnan(x)) {
          ++est.aborted;
          continue;
        }
        sum += x;
        ++est.replications;
      }
      if (est.aborted > options.max_abort_fraction * replications)
        throw NumericalError(fmt::format("{} of {} replications aborted at n={}; first failure: {}", est.aborted,
                                         replications, est.n, first_error[static_cast<std::size_t>(i)].value_or("?")),
                             kNaN);
      est.mean = sum / est.replications;
      double ss = 0.0;
      for (int r = 0; r < replications; ++r) {
        const double x = curve.losses(i, r);
        if (!std::isnan(x)) ss += (x - est.mean) * (x - est.mean);
      }
      const double sd = est.replications > 1 ? std::sqrt(ss / (est.replications - 1)) : 0.0;
      est.std_err = sd / std::sqrt(static_cast<double>(est.replications));
      curve.points.push_back(est);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<RiskCurve> risk_curves(const JointSampler& sampler, std::span<const std::size_t> ns,
                                   std::span<const LossKind> kinds, Engine engine, int replications,
                                   const EngineOptions& engine_options, const RiskOptions& options) {
  const auto estimator = make_estimator(sampler.model(), sampler.prior(), engine, engine_options);
  return risk_curves(sampler, ns, kinds, estimator, to_string(engine), replications, options);
}

RiskCurve risk_curve(const JointSampler& sampler, std::span<const std::size_t> ns, LossKind kind, Engine engine,
                     int replications, const EngineOptions& engine_options, const RiskOptions& options) {
  const LossKind kinds[] = {kind};
  return std::move(risk_curves(sampler, ns, kinds, engine, replications, engine_options, options).front());
}

RiskEstimate bayes_risk(const JointSampler& sampler, std::size_t n, LossKind kind, Engine engine, int replications,
                        const EngineOptions& engine_options, const RiskOptions& options) {
  const std::size_t ns[] = {n};
  return risk_curve(sampler, ns, kind, engine, replications, engine_options, options).points.front();
}

double max_increase_in_pooled_se(const RiskCurve& curve) {
  double worst = -kInf;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& a = curve.points[i];
    const auto& b = curve.points[i + 1];
    const double pooled = std::hypot(a.std_err, b.std_err);
    const double rise = b.mean - a.mean;
    if (pooled == 0.0) {
      worst = std::max(worst, rise > 0.0 ? kInf : (rise < 0.0 ? -kInf : 0.0));
    } else {
      worst = std::max(worst, rise / pooled);
    }
  }
  return worst;
}

ConsistencyTrace consistency_stream(const ModelFamily& model, const PriorSpec& prior, const ParamPoint& theta_true,
                                    std::span<const Observation> probes, std::span<const std::size_t> ns, Engine engine,
                                    Rng& rng, const EngineOptions& options) {
  require_increasing(ns);
  model.check_param(theta_true);
  for (auto p : probes) model.check_obs(p);
  check_compatible(model, prior);

  ConsistencyTrace trace;
  trace.theta_true = theta_true;
  trace.probes.assign(probes.begin(), probes.end());
  trace.ns.assign(ns.begin(), ns.end());
  trace.values.resize(static_cast<Eigen::Index>(ns.size()), static_cast<Eigen::Index>(probes.size()));
  trace.truth.resize(static_cast<Eigen::Index>(probes.size()));
  for (std::size_t j = 0; j < probes.size(); ++j)
    trace.truth[static_cast<Eigen::Index>(j)] = model.density(theta_true, probes[j]);

  Rng engine_rng(rng());
  SampleSequence stream;
  stream.obs.reserve(ns.back());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    while (stream.size() < ns[i]) stream.obs.push_back(model.sample(theta_true, rng));
    try {
      const auto ppd = build_predictive(model, prior, stream, engine, options, engine_rng);
      for (std::size_t j = 0; j < probes.size(); ++j)
        trace.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ppd(probes[j]);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("consistency stream failed at n={}: {}", ns[i], e.what()),
                           e.achieved_tolerance());
    } catch (const DegeneratePosteriorError& e) {
      throw DegeneratePosteriorError(fmt::format("consistency stream failed at n={}: {}", ns[i], e.what()));
    }
  }
  return trace;
}

double martingale_check(const ConjugatePair& pair, ObsSpan obs, Observation probe) {
  const auto& model = pair.model();
  if (!model.discrete())
    throw UnsupportedError(fmt::format("tower identity check needs a discrete observation space, {} is continuous",
                                       model.name()));
  const auto posterior = conjugate_posterior(pair, obs);
  const double current = conjugate_ppd(pair, posterior, probe);

  std::vector<Observation> extended(obs.begin(), obs.end());
  extended.push_back(Observation{});
  std::vector<double> terms;
  terms.reserve(model.obs_measure().support().size());
  for (double x : model.obs_measure().support()) {
    extended.back() = Observation{x};
    const auto next = conjugate_posterior(pair, extended);
    terms.push_back(conjugate_ppd(pair, posterior, Observation{x}) * conjugate_ppd(pair, next, probe));
  }
  return std::abs(pairwise_sum(terms) - current);
}

BoundedSquareReport bounded_square_check(const RiskCurve& base, const RiskCurve& squared) {
  const bool kinds_ok = (base.loss_kind == LossKind::l1 && squared.loss_kind == LossKind::squared_l1) ||
                        (base.loss_kind == LossKind::tv && squared.loss_kind == LossKind::squared_tv);
  if (!kinds_ok)
    throw ConfigError(fmt::format("bounded-square check pairs l1 with squared-l1 or tv with squared-tv, got {} and {}",
                                  to_string(base.loss_kind), to_string(squared.loss_kind)));
  const bool same_shape = base.points.size() == squared.points.size() && base.engine == squared.engine &&
                          base.base_seed == squared.base_seed && base.model == squared.model &&
                          base.prior == squared.prior && base.losses.rows() == squared.losses.rows() &&
                          base.losses.cols() == squared.losses.cols();
  if (!same_shape) throw ConfigError("bounded-square check needs curves sharing ns, seeds, engine and replications");
  for (std::size_t i = 0; i < base.points.size(); ++i)
    if (base.points[i].n != squared.points[i].n)
      throw ConfigError("bounded-square check needs curves sharing ns, seeds, engine and replications");

  BoundedSquareReport report;
  report.bound = base.loss_kind == LossKind::l1 ? 2.0 : 1.0;
  for (Eigen::Index i = 0; i < base.losses.rows(); ++i) {
    for (Eigen::Index r = 0; r < base.losses.cols(); ++r) {
      const double x = base.losses(i, r);
      if (std::isnan(x)) continue;
      report.max_abs_violation = std::max(report.max_abs_violation, std::abs(x) - report.bound);
      report.max_square_mismatch = std::max(report.max_square_mismatch, std::abs(x * x - squared.losses(i, r)));
    }
    const auto& p = base.points[static_cast<std::size_t>(i)];
    const auto& q = squared.points[static_cast<std::size_t>(i)];
    report.max_mean_violation = std::max(report.max_mean_violation, q.mean - report.bound * p.mean);
  }
  return report;
}

}  // namespace ppd
