#include "ppd/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "ppd/audit.hpp"

namespace ppd {
namespace {

constexpr double kAuditTolerance = 1e-12;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

ResultRecord run_risk_curve(const ExperimentConfig& config) {
  ResultRecord rec;
  const JointSampler sampler(make_model(config.model), make_prior(config.prior), config.seed);
  RiskOptions options;
  options.threads = config.threads;
  rec.curves = risk_curves(sampler, config.ns, config.losses, config.engine, config.replications,
                           config.engine_options(), options);

  rec.columns = {"n", "loss_kind", "mean", "std_err", "replications"};
  rec.plot = {fmt::format("Bayes risk of the posterior predictive: {} / {}", sampler.model().name(),
                          sampler.prior().name()),
              "n", "Bayes risk (error bars ±2 std err)", true, {}};
  for (const auto& curve : rec.curves) {
    Series s{std::string(to_string(curve.loss_kind)), {}, {}, {}};
    for (const auto& p : curve.points) {
      rec.rows.push_back({static_cast<std::int64_t>(p.n), std::string(to_string(p.loss_kind)), p.mean, p.std_err,
                          static_cast<std::int64_t>(p.replications)});
      s.x.push_back(static_cast<double>(p.n));
      s.y.push_back(p.mean);
      s.err.push_back(2.0 * p.std_err);
      rec.summary.push_back(fmt::format("{:>10}  n={:<6} risk={:.6f} ± {:.6f}  ({} reps, {} aborted)",
                                        to_string(p.loss_kind), p.n, p.mean, p.std_err, p.replications, p.aborted));
    }
    rec.plot.series.push_back(std::move(s));
  }

  const auto find = [&](LossKind k) -> const RiskCurve* {
    for (const auto& c : rec.curves)
      if (c.loss_kind == k) return &c;
    return nullptr;
  };
  for (auto [base, sq] : {std::pair{LossKind::l1, LossKind::squared_l1}, std::pair{LossKind::tv, LossKind::squared_tv}}) {
    const auto* b = find(base);
    const auto* s = find(sq);
    if (!b || !s) continue;
    const auto report = bounded_square_check(*b, *s);
    rec.bounded_square.push_back(report);
    rec.passed = rec.passed && report.ok();
    rec.summary.push_back(fmt::format("bounded-square ({} vs {}, a={}): max |X|-a = {:.3g}, max mean(X²)-a·mean|X| = {:.3g} -> {}",
                                      to_string(base), to_string(sq), report.bound, report.max_abs_violation,
                                      report.max_mean_violation, report.ok() ? "ok" : "VIOLATED"));
  }
  return rec;
}

ResultRecord run_consistency(const ExperimentConfig& config) {
  ResultRecord rec;
  const auto model = make_model(config.model);
  const auto prior = make_prior(config.prior);
  const ParamPoint theta(Eigen::Map<const Eigen::VectorXd>(config.consistency.theta.data(),
                                                           static_cast<Eigen::Index>(config.consistency.theta.size())));
  std::vector<Observation> probes;
  for (double p : config.consistency.probes) probes.push_back(Observation{p});
  Rng rng = make_rng(config.seed, 0);
  rec.trace = consistency_stream(model, prior, theta, probes, config.ns, config.engine, rng, config.engine_options());
  const auto& trace = *rec.trace;
  const Eigen::MatrixXd err = trace.abs_error();

  rec.columns = {"n", "probe", "estimate", "truth", "abs_error"};
  rec.plot = {fmt::format("Pointwise error of the posterior predictive: {} / {}", model.name(), prior.name()), "n",
              "|p*(probe) - p_theta(probe)|", true, {}};
  for (std::size_t j = 0; j < probes.size(); ++j) rec.plot.series.push_back({fmt::format("probe {}", probes[j].value), {}, {}, {}});
  for (std::size_t i = 0; i < trace.ns.size(); ++i) {
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      rec.rows.push_back({static_cast<std::int64_t>(trace.ns[i]), probes[j].value, trace.values(ii, jj), trace.truth[jj],
                          err(ii, jj)});
      rec.plot.series[j].x.push_back(static_cast<double>(trace.ns[i]));
      rec.plot.series[j].y.push_back(err(ii, jj));
    }
    rec.summary.push_back(fmt::format("n={:<8} max abs error over probes = {:.6g}", trace.ns[i],
                                      trace.max_error(static_cast<Eigen::Index>(i))));
  }
  return rec;
}

ResultRecord run_martingale(const ExperimentConfig& config) {
  ResultRecord rec;
  const auto audit = martingale_audit(config.fixtures, config.seed);
  rec.columns = {"fixture", "pair", "n", "probe", "residual"};
  rec.plot = {"One-step tower identity residuals", "fixture", "residual", false, {{"residual", {}, {}, {}}}};
  for (const auto& r : audit.rows) {
    rec.rows.push_back({static_cast<std::int64_t>(r.fixture), r.pair, static_cast<std::int64_t>(r.n), r.probe, r.residual});
    rec.plot.series[0].x.push_back(r.fixture);
    rec.plot.series[0].y.push_back(r.residual);
  }
  rec.passed = audit.max_residual <= kAuditTolerance;
  rec.summary.push_back(fmt::format("martingale audit: {} fixtures, max residual {:.3g} (tolerance {:.0e}) -> {}",
                                    audit.rows.size(), audit.max_residual, kAuditTolerance, rec.passed ? "ok" : "FAILED"));
  return rec;
}

ResultRecord run_identity(const ExperimentConfig& config) {
  ResultRecord rec;
  const auto audit = identity_audit(config.fixtures, config.seed);
  rec.columns = {"fixture", "support_size", "tv_sup", "half_l1", "abs_diff"};
  rec.plot = {"Event-sup total variation vs half L1", "fixture", "|tv - l1/2|", false, {{"abs_diff", {}, {}, {}}}};
  for (const auto& r : audit.rows) {
    rec.rows.push_back({static_cast<std::int64_t>(r.fixture), static_cast<std::int64_t>(r.support_size), r.tv_sup,
                        r.half_l1, r.abs_diff});
    rec.plot.series[0].x.push_back(r.fixture);
    rec.plot.series[0].y.push_back(r.abs_diff);
  }
  rec.passed = audit.max_abs_diff <= kAuditTolerance;
  rec.summary.push_back(fmt::format("identity audit: {} fixtures, max |tv - l1/2| = {:.3g} (tolerance {:.0e}) -> {}",
                                    audit.rows.size(), audit.max_abs_diff, kAuditTolerance, rec.passed ? "ok" : "FAILED"));
  return rec;
}

}  // namespace

ResultRecord run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  switch (config.experiment) {
    case ExperimentKind::risk_curve:
      rec = run_risk_curve(config);
      break;
    case ExperimentKind::consistency:
      rec = run_consistency(config);
      break;
    case ExperimentKind::martingale_audit:
      rec = run_martingale(config);
      break;
    case ExperimentKind::identity_audit:
      rec = run_identity(config);
      break;
  }
  rec.kind = config.experiment;
  rec.config_hash = config_hash(config);
  rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", value);
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_number(v);
        else if constexpr (std::is_same_v<T, std::string>)
          return csv_escape(v);
        else
          return fmt::format("{}", v);
      },
      cell);
}

std::string render_csv(const ResultRecord& record) {
  std::string out = fmt::format("{}\n", fmt::join(record.columns, ","));
  for (const auto& row : record.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::filesystem::path emit_csv(const ResultRecord& record, const std::filesystem::path& dir) {
  if (record.rows.empty()) throw DomainError("cannot emit a CSV for a record without rows");
  const auto path = dir / fmt::format("{}.csv", to_string(record.kind));
  write_file(path, render_csv(record));
  return path;
}

std::string render_svg(const PlotSpec& plot) {
  constexpr double W = 820, H = 520, left = 80, right = 180, top = 50, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  const auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
  const auto usable = [&](double x) { return std::isfinite(x) && (!plot.log_x || x > 0.0); };

  double x0 = kInf, x1 = -kInf, y0 = 0.0, y1 = -kInf;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double e = s.err.empty() ? 0.0 : s.err[i];
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i] - e);
      y1 = std::max(y1, s.y[i] + e);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (x0 == x1) x0 -= 0.5, x1 += 0.5;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  y1 += 0.05 * (y1 - y0);
  const auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W, H);
  svg += fmt::format("<text x=\"{}\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", left + pw / 2,
                     xml_escape(plot.title));
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                     pw, ph);

  // x ticks: decades on a log axis, five even steps otherwise
  std::vector<double> xticks;
  if (plot.log_x) {
    for (double d = std::floor(x0); d <= std::ceil(x1); d += 1.0)
      if (d >= x0 - 1e-9 && d <= x1 + 1e-9) xticks.push_back(std::pow(10.0, d));
    if (xticks.size() < 2) xticks = {std::pow(10.0, x0), std::pow(10.0, x1)};
  } else {
    for (int i = 0; i <= 5; ++i) xticks.push_back(x0 + (x1 - x0) * i / 5.0);
  }
  for (double t : xticks)
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ccc\"/>"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4:.4g}</text>\n",
        px(t), top, top + ph, top + ph + 18, t);
  for (int i = 0; i <= 5; ++i) {
    const double t = y0 + (y1 - y0) * i / 5.0;
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#ccc\"/>"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.3g}</text>\n",
        left, py(t), left + pw, left - 6, py(t) + 4, t);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}{}</text>\n", left + pw / 2, H - 15,
                     xml_escape(plot.x_label), plot.log_x ? " (log scale)" : "");
  svg += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                     top + ph / 2, xml_escape(plot.y_label));

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = palette[k % std::size(palette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
      if (!s.err.empty() && s.err[i] > 0.0)
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\"/>\n",
                           px(s.x[i]), py(s.y[i] - s.err[i]), py(s.y[i] + s.err[i]), color);
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(s.x[i]), py(s.y[i]), color);
    }
    if (!points.empty())
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", points, color);
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>"
        "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        left + pw + 15, ly, left + pw + 40, color, left + pw + 46, ly + 4, xml_escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::filesystem::path emit_plot(const ResultRecord& record, const std::filesystem::path& dir) {
  if (record.rows.empty()) throw DomainError("cannot plot a record without rows");
  const auto path = dir / fmt::format("{}.svg", to_string(record.kind));
  write_file(path, render_svg(record.plot));
  return path;
}

std::filesystem::path emit_metadata(const ResultRecord& record, const std::filesystem::path& dir) {
  nlohmann::json j{{"config_hash", record.config_hash},
                   {"experiment", std::string(to_string(record.kind))},
                   {"version", record.version},
                   {"wall_clock_seconds", record.wall_clock_seconds},
                   {"passed", record.passed},
                   {"rows", record.rows.size()},
                   {"summary", record.summary}};
  const auto path = dir / "record.json";
  write_file(path, j.dump(2) + "\n");
  return path;
}

}  // namespace ppd
