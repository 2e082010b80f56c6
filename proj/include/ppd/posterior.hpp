#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "ppd/density.hpp"
#include "ppd/model.hpp"
#include "ppd/prior.hpp"
#include "ppd/rng.hpp"

namespace ppd {

enum class PosteriorMethod { grid_quadrature, importance_sampling };

/// Numerical representation of P*_{ω(n),n}: weighted parameter nodes.
/// nodes.col(i) is the i-th ParamPoint; weights sum to 1 within 1e-12.
struct WeightedPosterior {
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;
  PosteriorMethod method = PosteriorMethod::grid_quadrature;
  double effective_sample_size = 0.0;
  /// Set when the importance sampler's ESS fell below kMinReliableEss.
  bool unreliable = false;

  static constexpr double kMinReliableEss = 10.0;

  Eigen::Index size() const noexcept { return weights.size(); }
  ParamPoint node(Eigen::Index i) const { return ParamPoint(nodes.col(i)); }
  /// Σ w_i θ_i, accumulated as offsets from the first node (exact when all nodes coincide).
  Eigen::VectorXd mean() const {
    const Eigen::VectorXd base = nodes.col(0);
    return base + (nodes.colwise() - base) * weights;
  }
};

struct GridOptions {
  int resolution = 4096;  // nodes per parameter axis
  /// Overrides the Θ range for unbounded supports; default is prior mean ± 10 prior sd.
  std::optional<std::pair<double, double>> truncation;
};

/// Grid posterior, weights ∝ Q(cell_i)·Π_j p_{θ_i}(ω_j), normalized in log space. Q(cell_i) is the
/// exact prior mass of node i's cell when the prior has a closed-form CDF, otherwise the
/// trapezoid approximation prior(θ_i)·width_i.
/// 1-D Θ uses a uniform grid; simplex-3 Θ uses a stick-breaking tensor grid.
/// Throws DegeneratePosteriorError when every weight underflows, DomainError for resolution < 16,
/// UnsupportedError for Θ of more than two free dimensions.
WeightedPosterior grid_posterior(const ModelFamily& model, const PriorSpec& prior, ObsSpan obs,
                                 const GridOptions& options = {});

/// Self-normalized importance sampling with the prior as proposal: θ_i ~ Q,
/// w_i ∝ Π_j p_{θ_i}(ω_j). Requires draws >= 100.
WeightedPosterior importance_posterior(const ModelFamily& model, const PriorSpec& prior, ObsSpan obs, int draws,
                                       Rng& rng);

/// Σ_i w_i p_{θ_i}(x).
double ppd_eval(const WeightedPosterior& posterior, const ModelFamily& model, Observation x);

/// Σ_i w_i P_{θ_i}(event).
double ppd_event_prob(const WeightedPosterior& posterior, const ModelFamily& model, const Event& event);

/// The weighted posterior's predictive as a density. Nodes whose weight is below
/// `prune` times the largest weight are dropped before evaluation.
PredictiveDensity weighted_predictive(const WeightedPosterior& posterior, const ModelFamily& model,
                                      double prune = 1e-17);

/// Convex combination λ·a + (1-λ)·b of two posteriors (nodes concatenated).
WeightedPosterior mix(const WeightedPosterior& a, const WeightedPosterior& b, double lambda);

/// Pairwise (cascade) sum; order-fixed so results are bit-stable.
double pairwise_sum(std::span<const double> values);

}  // namespace ppd
