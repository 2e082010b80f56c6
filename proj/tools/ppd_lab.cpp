// ppd-lab: run posterior-predictive experiments from a JSON config.
//
//   ppd-lab run <config> [--out DIR] [--seed U64] [--replications N]
//   ppd-lab audit identity|martingale [--fixtures N] [--seed U64] [--out DIR]
//   ppd-lab list-models
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "ppd/config.hpp"
#include "ppd/conjugate.hpp"
#include "ppd/errors.hpp"
#include "ppd/report.hpp"

namespace {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

int finish(const ppd::ResultRecord& record, const std::optional<std::string>& out_dir) {
  for (const auto& line : record.summary) fmt::print("{}\n", line);
  if (out_dir) {
    const auto csv = ppd::emit_csv(record, *out_dir);
    const auto svg = ppd::emit_plot(record, *out_dir);
    ppd::emit_metadata(record, *out_dir);
    fmt::print("wrote {} and {} (config {}, {:.2f} s)\n", csv.string(), svg.string(), record.config_hash,
               record.wall_clock_seconds);
  }
  return record.passed ? kOk : kNumerical;
}

void list_models() {
  using namespace ppd;
  fmt::print("models:\n");
  fmt::print("  bernoulli                 counting on {{0,1}}, theta in [0,1]\n");
  fmt::print("  normal      [sigma]       lebesgue on R, theta (mean) in R, known sd sigma\n");
  fmt::print("  poisson     [max_count]   counting on {{0..max_count}}, theta (rate) >= 0\n");
  fmt::print("  categorical [categories]  counting on {{1..k}}, theta on the k-simplex\n");
  fmt::print("priors:\n");
  fmt::print("  beta(alpha, beta)  normal(mean, variance)  gamma(shape, rate)\n");
  fmt::print("  dirichlet(alpha[])  point-mass(theta)\n");
  fmt::print("conjugate pairs (engine=conjugate):\n");
  fmt::print("  bernoulli/beta  normal/normal  poisson/gamma  categorical/dirichlet  any/point-mass\n");
  fmt::print("engines: conjugate, grid (1-D and simplex-3), importance\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior predictive density experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config.output)");
  run->add_option("--seed", seed, "Base seed (overrides config.seed)");
  run->add_option("--replications", replications, "Monte Carlo replications (overrides config.replications)");

  auto* audit = app.add_subcommand("audit", "Run a built-in identity or martingale audit");
  std::string audit_kind;
  int fixtures = 200;
  std::uint64_t audit_seed = 20211;
  std::optional<std::string> audit_out;
  audit->add_option("kind", audit_kind, "identity or martingale")
      ->required()
      ->check(CLI::IsMember({"identity", "martingale"}));
  audit->add_option("--fixtures", fixtures, "Number of random fixtures")->check(CLI::PositiveNumber);
  audit->add_option("--seed", audit_seed, "Fixture seed");
  audit->add_option("--out", audit_out, "Write CSV/SVG here");

  app.add_subcommand("list-models", "List registered models, priors and engines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (app.got_subcommand("list-models")) {
      list_models();
      return kOk;
    }
    if (app.got_subcommand("audit")) {
      ppd::ExperimentConfig config;
      config.experiment = audit_kind == "identity" ? ppd::ExperimentKind::identity_audit
                                                   : ppd::ExperimentKind::martingale_audit;
      config.fixtures = fixtures;
      config.seed = audit_seed;
      return finish(ppd::run_experiment(config), audit_out);
    }

    auto config = ppd::parse_config(config_path);
    if (out_dir) config.output = *out_dir;
    if (seed) config.seed = *seed;
    if (replications) config.replications = *replications;
    ppd::validate(config);
    fmt::print("{} ({}), config hash {}\n", ppd::to_string(config.experiment), ppd::to_string(config.engine),
               ppd::config_hash(config));
    return finish(ppd::run_experiment(config), config.output);
  } catch (const ppd::ConfigError& e) {
    fmt::print(stderr, "validation error: {}\n", e.what());
    return kValidation;
  } catch (const ppd::IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumerical;
  }
}
