#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ppd/conjugate.hpp"
#include "ppd/density.hpp"
#include "ppd/loss.hpp"
#include "ppd/model.hpp"
#include "ppd/posterior.hpp"
#include "ppd/prior.hpp"
#include "ppd/rng.hpp"

namespace ppd {

enum class Engine { conjugate, grid, importance };

std::string_view to_string(Engine engine) noexcept;
/// Throws ConfigError for unknown names.
Engine parse_engine(std::string_view name);
/// Grid for 1-D Θ, importance sampling for simplex Θ.
Engine default_engine(const PriorSpec& prior) noexcept;

struct EngineOptions {
  GridOptions grid;
  int importance_draws = 4096;
};

/// p*_{ω(n),n} built by the chosen engine. `rng` is only consumed by importance sampling.
PredictiveDensity build_predictive(const ModelFamily& model, const PriorSpec& prior, ObsSpan obs, Engine engine,
                                   const EngineOptions& options, Rng& rng);

/// Any density estimator of p_θ from a sample: the harness scores these.
using Estimator = std::function<Density(ObsSpan obs, Rng& rng)>;

/// build_predictive wrapped as an Estimator. Importance posteriors whose ESS drops
/// below the reliability floor throw DegeneratePosteriorError, so the harness counts
/// them as aborted replications instead of averaging them in.
Estimator make_estimator(const ModelFamily& model, const PriorSpec& prior, Engine engine,
                         const EngineOptions& options = {});

/// Draws from the joint law Π of (θ, ω): θ ~ Q, then ω₁, ω₂, … ~ P_θ.
/// Replication r is a pure function of (base_seed, r).
class JointSampler {
 public:
  JointSampler(ModelFamily model, PriorSpec prior, std::uint64_t base_seed);

  struct Draw {
    ParamPoint theta;
    SampleSequence obs;
  };

  /// θ and the first n observations of replication r. Prefixes agree across n.
  Draw draw(std::uint64_t replication, std::size_t n) const;
  /// Independent stream for the estimator at (replication, n).
  Rng estimator_rng(std::uint64_t replication, std::size_t n) const;

  const ModelFamily& model() const noexcept { return model_; }
  const PriorSpec& prior() const noexcept { return prior_; }
  std::uint64_t base_seed() const noexcept { return base_seed_; }

 private:
  ModelFamily model_;
  PriorSpec prior_;
  std::uint64_t base_seed_;
};

struct RiskEstimate {
  std::size_t n = 0;
  LossKind loss_kind = LossKind::l1;
  double mean = 0.0;
  double std_err = 0.0;  // sample sd / sqrt(replications)
  int replications = 0;  // successful replications
  int aborted = 0;
};

/// Bayes-risk estimates over increasing n. `losses(i, r)` is replication r's loss
/// at points[i].n (NaN when aborted); all entries share loss kind, engine and seeds.
struct RiskCurve {
  std::vector<RiskEstimate> points;
  std::string model;
  std::string prior;
  std::string engine;
  std::uint64_t base_seed = 0;
  LossKind loss_kind = LossKind::l1;
  Eigen::MatrixXd losses;
};

struct RiskOptions {
  int threads = 0;                  // 0: hardware concurrency
  double max_abort_fraction = 0.01;  // more aborted replications than this fails the run
};

/// One curve per loss kind from a single coupled simulation: replication r keeps
/// its θ and extends its sample prefix across ns. Throws DomainError for
/// replications < 30 or ns not strictly increasing, NumericalError when too many
/// replications abort.
std::vector<RiskCurve> risk_curves(const JointSampler& sampler, std::span<const std::size_t> ns,
                                   std::span<const LossKind> kinds, const Estimator& estimator,
                                   std::string_view estimator_label, int replications, const RiskOptions& options = {});

std::vector<RiskCurve> risk_curves(const JointSampler& sampler, std::span<const std::size_t> ns,
                                   std::span<const LossKind> kinds, Engine engine, int replications,
                                   const EngineOptions& engine_options = {}, const RiskOptions& options = {});

RiskCurve risk_curve(const JointSampler& sampler, std::span<const std::size_t> ns, LossKind kind, Engine engine,
                     int replications, const EngineOptions& engine_options = {}, const RiskOptions& options = {});

RiskEstimate bayes_risk(const JointSampler& sampler, std::size_t n, LossKind kind, Engine engine, int replications,
                        const EngineOptions& engine_options = {}, const RiskOptions& options = {});

/// Largest consecutive increase of a curve measured in pooled standard errors,
/// (mean[i+1] - mean[i]) / sqrt(se[i]² + se[i+1]²). Negative when strictly decreasing.
double max_increase_in_pooled_se(const RiskCurve& curve);

/// p*_{ω(n),n}(probe) along one lazily sampled stream from P_{θ_true}.
struct ConsistencyTrace {
  ParamPoint theta_true;
  std::vector<Observation> probes;
  std::vector<std::size_t> ns;
  Eigen::MatrixXd values;  // values(i, j): estimate at ns[i], probes[j]
  Eigen::VectorXd truth;   // p_{θ_true}(probes[j])

  Eigen::MatrixXd abs_error() const { return (values.rowwise() - truth.transpose()).cwiseAbs(); }
  double max_error(Eigen::Index row) const { return abs_error().row(row).maxCoeff(); }
};

ConsistencyTrace consistency_stream(const ModelFamily& model, const PriorSpec& prior, const ParamPoint& theta_true,
                                    std::span<const Observation> probes, std::span<const std::size_t> ns, Engine engine,
                                    Rng& rng, const EngineOptions& options = {});

/// |Σ_x p*(x | ω_(n))·p*(probe | ω_(n) ⧺ x) - p*(probe | ω_(n))| over the discrete
/// support: the one-step tower identity of the predictive martingale.
/// Throws UnsupportedError for continuous observation spaces.
double martingale_check(const ConjugatePair& pair, ObsSpan obs, Observation probe);

struct BoundedSquareReport {
  double bound = 2.0;               // a: per-replication |X| <= a
  double max_abs_violation = 0.0;   // max over replications of |X| - a, floored at 0
  double max_mean_violation = 0.0;  // max over n of mean(X²) - a·mean(|X|), floored at 0
  double max_square_mismatch = 0.0; // max |X² - squared-curve entry|
  bool ok(double tol = 1e-12) const noexcept {
    return max_abs_violation <= tol && max_mean_violation <= tol && max_square_mismatch <= tol;
  }
};

/// Checks 0 <= ∫X² <= a·∫|X| on two curves simulated together: (l1, squared-l1)
/// with a = 2 or (tv, squared-tv) with a = 1. Throws ConfigError when the curves
/// do not share ns, seeds, engine and replications.
BoundedSquareReport bounded_square_check(const RiskCurve& base, const RiskCurve& squared);

}  // namespace ppd
