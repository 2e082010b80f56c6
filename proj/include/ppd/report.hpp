#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ppd/config.hpp"
#include "ppd/harness.hpp"

namespace ppd {

inline constexpr std::string_view kVersion = "1.0.0";

using Cell = std::variant<std::int64_t, double, std::string>;

/// One plotted line: y against x with optional ± error bars.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // half-width of the error bar, empty for none
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

/// Output of one experiment run. Rows follow `columns`; wall-clock time is kept
/// out of the CSV so reruns are byte-identical.
struct ResultRecord {
  std::string config_hash;
  ExperimentKind kind = ExperimentKind::risk_curve;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  double wall_clock_seconds = 0.0;
  std::string version{kVersion};

  std::vector<RiskCurve> curves;
  std::optional<ConsistencyTrace> trace;
  std::vector<BoundedSquareReport> bounded_square;
  PlotSpec plot;
  std::vector<std::string> summary;  // human-readable lines
  bool passed = true;                // audit thresholds and bounded-square checks
};

/// Dispatches to the harness. Harness errors propagate.
ResultRecord run_experiment(const ExperimentConfig& config);

/// Shortest-lossless rendering: 17 significant digits.
std::string format_number(double value);
std::string format_cell(const Cell& cell);

/// `<dir>/<experiment>.csv`; throws IoError when unwritable, DomainError for empty records.
std::filesystem::path emit_csv(const ResultRecord& record, const std::filesystem::path& dir);
/// `<dir>/<experiment>.svg`.
std::filesystem::path emit_plot(const ResultRecord& record, const std::filesystem::path& dir);
/// `<dir>/record.json`: hash, kind, version, wall clock and summary.
std::filesystem::path emit_metadata(const ResultRecord& record, const std::filesystem::path& dir);

std::string render_csv(const ResultRecord& record);
std::string render_svg(const PlotSpec& plot);

}  // namespace ppd
