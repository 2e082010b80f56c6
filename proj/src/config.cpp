#include "ppd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace ppd {
namespace {

using nlohmann::json;

const std::vector<std::string> kPriorKinds{"beta", "normal", "gamma", "dirichlet", "point-mass"};

class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& message) { errors.push_back(fmt::format("{}: {}", path, message)); }

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(path.empty() ? key : path + "." + key, "unknown field");
    }
  }

  bool is_object(const json& obj, const std::string& path) {
    if (obj.is_object()) return true;
    fail(path, "must be a table");
    return false;
  }

  void number(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number()) return fail(path, "must be a number");
    out = v.get<double>();
  }

  template <class Int>
  void integer(const json& obj, const char* key, const std::string& path, Int& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) return fail(path, "must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = v.get<Int>();
      } else if (v.get<std::int64_t>() < 0) {
        fail(path, "must be non-negative");
      } else {
        out = static_cast<Int>(v.get<std::int64_t>());
      }
    } else {
      out = v.get<Int>();
    }
  }

  void string(const json& obj, const char* key, const std::string& path, std::string& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_string()) return fail(path, "must be a string");
    out = v.get<std::string>();
  }

  // A number or an array of numbers.
  void numbers(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number()) {
      out = {v.get<double>()};
      return;
    }
    if (!v.is_array()) return fail(path, "must be a number or an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) return fail(path, "must contain only numbers");
      out.push_back(e.get<double>());
    }
  }
};

ExperimentKind parse_kind(std::string_view s, Reader& rd) {
  for (auto k : {ExperimentKind::risk_curve, ExperimentKind::consistency, ExperimentKind::martingale_audit,
                 ExperimentKind::identity_audit})
    if (to_string(k) == s) return k;
  rd.fail("experiment", fmt::format("unknown experiment '{}' (expected risk-curve, consistency, martingale-audit or identity-audit)", s));
  return ExperimentKind::risk_curve;
}

// Semantic checks shared by parsing and CLI overrides.
void check(const ExperimentConfig& c, Reader& rd, bool engine_given) {
  std::optional<ModelFamily> model;
  std::optional<PriorSpec> prior;

  const auto& names = registered_models();
  if (std::find(names.begin(), names.end(), c.model.name) == names.end()) {
    rd.fail("model.name", fmt::format("unknown model '{}' (registered: {})", c.model.name, fmt::join(names, ", ")));
  } else {
    try {
      model = make_model(c.model);
    } catch (const DomainError& e) {
      rd.fail(std::string(e.what()).substr(0, std::string(e.what()).find(' ')), e.what());
    }
  }

  if (std::find(kPriorKinds.begin(), kPriorKinds.end(), c.prior.kind) == kPriorKinds.end()) {
    rd.fail("prior.kind", fmt::format("unknown prior '{}' (registered: {})", c.prior.kind, fmt::join(kPriorKinds, ", ")));
  } else {
    try {
      prior = make_prior(c.prior);
    } catch (const DomainError& e) {
      const std::string what = e.what();
      rd.fail(what.substr(0, what.find(' ')), what);
    }
  }

  if (model && prior) {
    try {
      check_compatible(*model, *prior);
      if (engine_given && c.engine == Engine::conjugate && !ConjugatePair::registered(*model, *prior))
        rd.fail("engine", fmt::format("no conjugate pair registered for {} with {}", model->name(), prior->name()));
    } catch (const ConfigError& e) {
      rd.fail("prior", e.what());
    }
  }

  if (c.ns.empty()) rd.fail("ns", "ns must be non-empty");
  for (std::size_t i = 1; i < c.ns.size(); ++i)
    if (c.ns[i] <= c.ns[i - 1]) {
      rd.fail("ns", "ns must be strictly increasing");
      break;
    }
  if (c.experiment == ExperimentKind::risk_curve && c.replications < 30)
    rd.fail("replications", fmt::format("replications must be >= 30 for risk experiments, got {}", c.replications));
  if (c.losses.empty()) rd.fail("losses", "at least one loss kind is required");
  if (c.grid_resolution < 16) rd.fail("grid.resolution", "must be >= 16");
  if (c.grid_truncation && !(c.grid_truncation->first < c.grid_truncation->second))
    rd.fail("grid.truncation", "must be [lo, hi] with lo < hi");
  if (c.importance_draws < 100) rd.fail("importance.draws", "must be >= 100");
  if (c.fixtures < 1) rd.fail("fixtures", "must be >= 1");
  if (c.threads < 0) rd.fail("threads", "must be >= 0");

  if (c.experiment == ExperimentKind::consistency && model) {
    if (c.consistency.theta.empty()) rd.fail("consistency.theta", "required for consistency experiments");
    if (c.consistency.probes.empty()) rd.fail("consistency.probes", "required for consistency experiments");
    if (!c.consistency.theta.empty()) {
      try {
        model->check_param(ParamPoint(Eigen::Map<const Eigen::VectorXd>(c.consistency.theta.data(),
                                                                          static_cast<Eigen::Index>(c.consistency.theta.size()))));
      } catch (const DomainError& e) {
        rd.fail("consistency.theta", e.what());
      }
    }
    for (double p : c.consistency.probes)
      if (!model->obs_measure().contains(p)) rd.fail("consistency.probes", fmt::format("probe {} is outside the observation support", p));
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  json m{{"name", c.model.name}};
  if (c.model.name == "normal") m["sigma"] = c.model.sigma;
  if (c.model.name == "poisson") m["max_count"] = c.model.max_count;
  if (c.model.name == "categorical") m["categories"] = c.model.categories;
  j["model"] = m;

  json p{{"kind", c.prior.kind}};
  if (c.prior.kind == "beta") {
    p["alpha"] = c.prior.alpha;
    p["beta"] = c.prior.beta;
  } else if (c.prior.kind == "normal") {
    p["mean"] = c.prior.mean;
    p["variance"] = c.prior.variance;
  } else if (c.prior.kind == "gamma") {
    p["shape"] = c.prior.shape;
    p["rate"] = c.prior.rate;
  } else if (c.prior.kind == "dirichlet") {
    p["alpha"] = c.prior.concentration;
  } else if (c.prior.kind == "point-mass") {
    p["theta"] = c.prior.theta;
  }
  j["prior"] = p;

  j["engine"] = std::string(to_string(c.engine));
  json grid{{"resolution", c.grid_resolution}};
  if (c.grid_truncation) grid["truncation"] = {c.grid_truncation->first, c.grid_truncation->second};
  j["grid"] = grid;
  j["importance"] = {{"draws", c.importance_draws}};
  json losses = json::array();
  for (auto k : c.losses) losses.push_back(std::string(to_string(k)));
  j["losses"] = losses;
  j["ns"] = c.ns;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["fixtures"] = c.fixtures;
  if (c.experiment == ExperimentKind::consistency)
    j["consistency"] = {{"theta", c.consistency.theta}, {"probes", c.consistency.probes}};
  return j;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::risk_curve:
      return "risk-curve";
    case ExperimentKind::consistency:
      return "consistency";
    case ExperimentKind::martingale_audit:
      return "martingale-audit";
    case ExperimentKind::identity_audit:
      return "identity-audit";
  }
  return "?";
}

EngineOptions ExperimentConfig::engine_options() const {
  EngineOptions o;
  o.grid.resolution = grid_resolution;
  o.grid.truncation = grid_truncation;
  o.importance_draws = importance_draws;
  return o;
}

ConfigValidationError::ConfigValidationError(std::vector<std::string> errors)
    : ConfigError(fmt::format("invalid config:\n  {}", fmt::join(errors, "\n  "))), errors_(std::move(errors)) {}

ModelFamily make_model(const ModelConfig& c) {
  if (c.name == "bernoulli") return ModelFamily::bernoulli();
  if (c.name == "normal") return ModelFamily::normal(c.sigma);
  if (c.name == "poisson") return ModelFamily::poisson(c.max_count);
  if (c.name == "categorical") return ModelFamily::categorical(c.categories);
  throw ConfigError(fmt::format("unknown model '{}'", c.name));
}

PriorSpec make_prior(const PriorConfig& c) {
  if (c.kind == "beta") return PriorSpec::beta(c.alpha, c.beta);
  if (c.kind == "normal") return PriorSpec::normal(c.mean, c.variance);
  if (c.kind == "gamma") return PriorSpec::gamma(c.shape, c.rate);
  if (c.kind == "dirichlet")
    return PriorSpec::dirichlet(
        Eigen::Map<const Eigen::VectorXd>(c.concentration.data(), static_cast<Eigen::Index>(c.concentration.size())));
  if (c.kind == "point-mass")
    return PriorSpec::point_mass(
        ParamPoint(Eigen::Map<const Eigen::VectorXd>(c.theta.data(), static_cast<Eigen::Index>(c.theta.size()))));
  throw ConfigError(fmt::format("unknown prior '{}'", c.kind));
}

ExperimentConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigValidationError({fmt::format("<document>: malformed JSON: {}", e.what())});
  }
  Reader rd;
  ExperimentConfig c;
  if (!rd.is_object(j, "<document>")) throw ConfigValidationError(rd.errors);
  rd.reject_unknown(j, "", {"experiment", "model", "prior", "engine", "grid", "importance", "losses", "ns",
                            "replications", "seed", "threads", "output", "consistency", "fixtures"});

  std::string kind = "risk-curve";
  rd.string(j, "experiment", "experiment", kind);
  c.experiment = parse_kind(kind, rd);

  if (j.contains("model") && rd.is_object(j["model"], "model")) {
    const auto& m = j["model"];
    rd.reject_unknown(m, "model", {"name", "sigma", "max_count", "categories"});
    rd.string(m, "name", "model.name", c.model.name);
    rd.number(m, "sigma", "model.sigma", c.model.sigma);
    rd.integer(m, "max_count", "model.max_count", c.model.max_count);
    rd.integer(m, "categories", "model.categories", c.model.categories);
  }

  if (j.contains("prior") && rd.is_object(j["prior"], "prior")) {
    const auto& p = j["prior"];
    rd.string(p, "kind", "prior.kind", c.prior.kind);
    if (c.prior.kind == "beta") {
      rd.reject_unknown(p, "prior", {"kind", "alpha", "beta"});
      rd.number(p, "alpha", "prior.alpha", c.prior.alpha);
      rd.number(p, "beta", "prior.beta", c.prior.beta);
    } else if (c.prior.kind == "normal") {
      rd.reject_unknown(p, "prior", {"kind", "mean", "variance"});
      rd.number(p, "mean", "prior.mean", c.prior.mean);
      rd.number(p, "variance", "prior.variance", c.prior.variance);
    } else if (c.prior.kind == "gamma") {
      rd.reject_unknown(p, "prior", {"kind", "shape", "rate"});
      rd.number(p, "shape", "prior.shape", c.prior.shape);
      rd.number(p, "rate", "prior.rate", c.prior.rate);
    } else if (c.prior.kind == "dirichlet") {
      rd.reject_unknown(p, "prior", {"kind", "alpha"});
      c.prior.concentration.assign(static_cast<std::size_t>(c.model.categories), 1.0);
      rd.numbers(p, "alpha", "prior.alpha", c.prior.concentration);
    } else if (c.prior.kind == "point-mass") {
      rd.reject_unknown(p, "prior", {"kind", "theta"});
      rd.numbers(p, "theta", "prior.theta", c.prior.theta);
      if (c.prior.theta.empty()) rd.fail("prior.theta", "required for a point-mass prior");
    }
  }

  bool engine_given = false;
  if (j.contains("engine")) {
    std::string e;
    rd.string(j, "engine", "engine", e);
    try {
      c.engine = parse_engine(e);
      engine_given = true;
    } catch (const ConfigError& err) {
      rd.fail("engine", err.what());
    }
  }

  if (j.contains("grid") && rd.is_object(j["grid"], "grid")) {
    const auto& g = j["grid"];
    rd.reject_unknown(g, "grid", {"resolution", "truncation"});
    rd.integer(g, "resolution", "grid.resolution", c.grid_resolution);
    std::vector<double> t;
    rd.numbers(g, "truncation", "grid.truncation", t);
    if (g.contains("truncation")) {
      if (t.size() == 2)
        c.grid_truncation = std::pair{t[0], t[1]};
      else
        rd.fail("grid.truncation", "must be [lo, hi]");
    }
  }
  if (j.contains("importance") && rd.is_object(j["importance"], "importance")) {
    rd.reject_unknown(j["importance"], "importance", {"draws"});
    rd.integer(j["importance"], "draws", "importance.draws", c.importance_draws);
  }

  if (j.contains("losses")) {
    if (!j["losses"].is_array()) {
      rd.fail("losses", "must be an array of loss names");
    } else {
      c.losses.clear();
      for (const auto& l : j["losses"]) {
        try {
          if (!l.is_string()) throw ConfigError("loss names must be strings");
          c.losses.push_back(parse_loss_kind(l.get<std::string>()));
        } catch (const ConfigError& e) {
          rd.fail("losses", e.what());
        }
      }
    }
  }

  if (j.contains("ns")) {
    if (!j["ns"].is_array()) {
      rd.fail("ns", "must be an array of sample sizes");
    } else {
      c.ns.clear();
      for (const auto& n : j["ns"]) {
        if (!n.is_number_integer() || n.get<std::int64_t>() < 0) {
          rd.fail("ns", "sample sizes must be non-negative integers");
          break;
        }
        c.ns.push_back(n.get<std::size_t>());
      }
    }
  }

  rd.integer(j, "replications", "replications", c.replications);
  rd.integer(j, "seed", "seed", c.seed);
  rd.integer(j, "threads", "threads", c.threads);
  rd.string(j, "output", "output", c.output);
  rd.integer(j, "fixtures", "fixtures", c.fixtures);

  if (j.contains("consistency") && rd.is_object(j["consistency"], "consistency")) {
    const auto& s = j["consistency"];
    rd.reject_unknown(s, "consistency", {"theta", "probes"});
    rd.numbers(s, "theta", "consistency.theta", c.consistency.theta);
    rd.numbers(s, "probes", "consistency.probes", c.consistency.probes);
  }

  if (!engine_given) {
    try {
      const auto model = make_model(c.model);
      const auto prior = make_prior(c.prior);
      c.engine = ConjugatePair::registered(model, prior) ? Engine::conjugate : default_engine(prior);
    } catch (const std::exception&) {
      // reported by check()
    }
  }

  check(c, rd, true);
  if (!rd.errors.empty()) throw ConfigValidationError(rd.errors);
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate(const ExperimentConfig& config) {
  Reader rd;
  check(config, rd, true);
  if (!rd.errors.empty()) throw ConfigValidationError(rd.errors);
}

std::string canonical_json(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output");
  j.erase("threads");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace ppd
