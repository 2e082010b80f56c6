// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../oracles.hpp"
#include "ppd/audit.hpp"
#include "ppd/harness.hpp"
#include "ppd/report.hpp"

namespace {

using namespace ppd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = budget_seconds <= 0 || secs < budget_seconds;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::string budget = budget_seconds > 0 ? fmt::format(" (limit {:g} s)", budget_seconds) : "";
  fmt::print("{} [{}] {}: {} [{:.2f} s{}]{}\n", pass ? "PASS" : "FAIL", id, title, out.detail, secs, budget,
             in_time ? "" : " over time budget");
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig decay_config(const std::string& name) {
  auto c = parse_config(fs::path(PPD_SOURCE_DIR) / "configs" / name);
  c.replications = 2000;
  return c;
}

// Criterion 3 output is reused by 4 and 8.
std::vector<std::pair<std::string, ResultRecord>> decay_runs;

}  // namespace

int main() {
  fmt::print("ppd acceptance suite {}\n", kVersion);

  criterion(1, "TV equals half L1 on 200 discrete pairs", 5, [] {
    const auto audit = identity_audit(200, 20211);
    return Outcome{audit.max_abs_diff <= 1e-12, fmt::format("max |tv - l1/2| = {:.3g}", audit.max_abs_diff)};
  });

  criterion(2, "Beta-Bernoulli L1 risk matches exact oracle and beats the MLE", 30, [] {
    const JointSampler sampler(ModelFamily::bernoulli(), PriorSpec::beta(1, 1), 2);
    const std::size_t ns[] = {1, 4, 16};
    const LossKind kinds[] = {LossKind::l1};
    const auto bayes = risk_curve(sampler, ns, LossKind::l1, Engine::conjugate, 10000);
    const Estimator mle = [](ObsSpan obs, Rng&) {
      double k = 0;
      for (auto x : obs) k += x.value;
      return model_density(ModelFamily::bernoulli(), ParamPoint::scalar(obs.empty() ? 0.5 : k / obs.size()));
    };
    const auto plug_in = risk_curves(sampler, ns, kinds, mle, "mle", 10000).front();
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& p = bayes.points[i];
      const double exact = oracle::beta_bernoulli_l1_risk(static_cast<int>(p.n), oracle::laplace_rule);
      const double z = (p.mean - exact) / p.std_err;
      ok = ok && std::abs(z) <= 3.0;
      detail += fmt::format("n={} mc={:.5f} exact={:.5f} z={:+.2f}; ", p.n, p.mean, exact, z);
      if (p.n >= 4) {
        ok = ok && p.mean <= plug_in.points[i].mean;
        detail += fmt::format("mle={:.5f}; ", plug_in.points[i].mean);
      }
    }
    return Outcome{ok, detail};
  });

  criterion(3, "Risk decays for all losses (Beta-Bernoulli, Normal-Normal)", 120, [] {
    bool ok = true;
    std::string detail;
    for (const auto* name : {"beta_bernoulli.json", "normal_normal.json"}) {
      auto rec = run_experiment(decay_config(name));
      for (const auto& c : rec.curves) {
        const double rise = max_increase_in_pooled_se(c);
        const double ratio = c.points.back().mean / c.points.front().mean;
        ok = ok && rise <= 2.0 && ratio < 0.2;
        detail += fmt::format("{}/{}: max rise {:+.2f} se, last/first {:.4f}; ", c.model, to_string(c.loss_kind), rise,
                              ratio);
      }
      decay_runs.emplace_back(name, std::move(rec));
    }
    return Outcome{ok, detail};
  });

  criterion(4, "Squared-loss bound on every criterion 3 run", 0, [] {
    if (decay_runs.size() != 2) return Outcome{false, "criterion 3 did not produce its runs"};
    bool ok = true;
    std::string detail;
    for (const auto& [name, rec] : decay_runs) {
      for (const auto& r : rec.bounded_square) {
        ok = ok && r.ok(1e-12);
        detail += fmt::format("{} a={}: |X|-a {:.2g}, mean(X^2)-a*mean|X| {:.2g}; ", name, r.bound,
                              r.max_abs_violation, r.max_mean_violation);
      }
      ok = ok && rec.bounded_square.size() == 2;
    }
    return Outcome{ok, detail};
  });

  criterion(5, "Strong consistency over 100 seeds to n = 10^4", 60, [] {
    const std::size_t ns[] = {1, 10, 100, 1000, 10000};
    const Observation bern_probe[] = {{1.0}};
    const Observation normal_probes[] = {{-1}, {0}, {0.5}, {1}, {2}};
    int bern_close = 0, bern_better = 0, norm_close = 0, norm_better = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng a = make_rng(seed, 0);
      const auto b = consistency_stream(ModelFamily::bernoulli(), PriorSpec::beta(1, 1), ParamPoint::scalar(0.3),
                                        bern_probe, ns, Engine::conjugate, a);
      bern_close += b.max_error(4) <= 0.02;
      bern_better += b.max_error(4) < b.max_error(0);
      Rng c = make_rng(seed, 1);
      const auto n = consistency_stream(ModelFamily::normal(1), PriorSpec::normal(0, 1), ParamPoint::scalar(0.5),
                                        normal_probes, ns, Engine::conjugate, c);
      norm_close += n.max_error(4) <= 0.01;
      norm_better += n.max_error(4) < n.max_error(0);
    }
    const bool ok = bern_close >= 95 && bern_better >= 95 && norm_close >= 95 && norm_better >= 95;
    return Outcome{ok, fmt::format("bernoulli within 0.02: {}/100, improved: {}/100; normal within 0.01: {}/100, "
                                   "improved: {}/100",
                                   bern_close, bern_better, norm_close, norm_better)};
  });

  criterion(6, "Martingale tower identity on 100 discrete fixtures", 1, [] {
    const auto audit = martingale_audit(100, 20211);
    return Outcome{audit.max_residual <= 1e-12, fmt::format("max residual {:.3g}", audit.max_residual)};
  });

  criterion(7, "Grid engine matches closed form on 50 fixtures", 10, [] {
    Rng rng = make_rng(777, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      ModelFamily model = ModelFamily::bernoulli();
      PriorSpec prior = PriorSpec::beta(1, 1);
      switch (i % 3) {
        case 0:
          prior = PriorSpec::beta(1 + 4 * u(rng), 1 + 4 * u(rng));
          break;
        case 1:
          model = ModelFamily::normal(0.5 + u(rng));
          prior = PriorSpec::normal(4 * u(rng) - 2, 0.25 + 3 * u(rng));
          break;
        default:
          model = ModelFamily::poisson(200);
          prior = PriorSpec::gamma(1 + 4 * u(rng), 0.5 + u(rng));
      }
      const ConjugatePair pair(model, prior);
      const auto theta = prior.sample(rng);
      const auto obs = model.sample(theta, rng, static_cast<std::size_t>(i));
      const auto exact = conjugate_predictive(pair, conjugate_posterior(pair, obs));
      const auto grid = weighted_predictive(grid_posterior(model, prior, obs, {.resolution = 4096}), model);
      worst = std::max(worst, l1_distance(DensityPair(exact, grid)));
    }
    return Outcome{worst <= 1e-5, fmt::format("max L1 gap {:.3g}", worst)};
  });

  criterion(8, "Criterion 3 configs reproduce their CSVs byte for byte", 0, [] {
    if (decay_runs.size() != 2) return Outcome{false, "criterion 3 did not produce its runs"};
    const auto root = fs::temp_directory_path() / "ppd_acceptance";
    fs::remove_all(root);
    bool ok = true;
    std::string detail;
    for (const auto& [name, first] : decay_runs) {
      const auto a = emit_csv(first, root / "first" / name);
      const auto b = emit_csv(run_experiment(decay_config(name)), root / "second" / name);
      const auto bytes = slurp(a);
      const bool same = !bytes.empty() && bytes == slurp(b);
      ok = ok && same;
      detail += fmt::format("{}: {} bytes {}; ", name, bytes.size(), same ? "identical" : "DIFFER");
    }
    return Outcome{ok, detail};
  });

  fmt::print("{}\n", failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures));
  return failures == 0 ? 0 : 1;
}
