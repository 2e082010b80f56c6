#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppd/errors.hpp"
#include "ppd/harness.hpp"
#include "ppd/loss.hpp"

namespace ppd {

enum class ExperimentKind { risk_curve, consistency, martingale_audit, identity_audit };

std::string_view to_string(ExperimentKind kind) noexcept;

struct ModelConfig {
  std::string name = "bernoulli";
  double sigma = 1.0;    // normal
  int max_count = 1000;  // poisson
  int categories = 3;    // categorical
};

struct PriorConfig {
  std::string kind = "beta";
  double alpha = 1.0;  // beta
  double beta = 1.0;
  double mean = 0.0;  // normal
  double variance = 1.0;
  double shape = 1.0;  // gamma
  double rate = 1.0;
  std::vector<double> concentration;  // dirichlet "alpha"
  std::vector<double> theta;          // point-mass
};

struct ConsistencyConfig {
  std::vector<double> theta;
  std::vector<double> probes;
};

/// A validated experiment description. Every field carries its documented default.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::risk_curve;
  ModelConfig model;
  PriorConfig prior;
  Engine engine = Engine::conjugate;
  int grid_resolution = 4096;
  std::optional<std::pair<double, double>> grid_truncation;
  int importance_draws = 4096;
  std::vector<LossKind> losses{kAllLossKinds.begin(), kAllLossKinds.end()};
  std::vector<std::size_t> ns{1, 2, 4, 8, 16, 32, 64, 128, 256};
  int replications = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output = "results";
  ConsistencyConfig consistency;
  int fixtures = 100;

  EngineOptions engine_options() const;
};

/// All validation failures of one parse, each prefixed with its field path.
class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates a JSON config document. Throws ConfigValidationError.
ExperimentConfig parse_config_text(std::string_view text);
/// Throws IoError when the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Re-checks a config (e.g. after CLI overrides). Throws ConfigValidationError.
void validate(const ExperimentConfig& config);

/// Canonical JSON (sorted keys, defaults filled in); parse_config_text inverts it.
std::string canonical_json(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over the canonical JSON minus `output` and `threads`,
/// which do not affect results.
std::string config_hash(const ExperimentConfig& config);

ModelFamily make_model(const ModelConfig& config);
PriorSpec make_prior(const PriorConfig& config);

}  // namespace ppd
