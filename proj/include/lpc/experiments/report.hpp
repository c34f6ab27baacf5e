#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lpc/experiments/config.hpp"

namespace lpc::experiments {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

/// One cell of the long-format report. `seed` is the seed number, or "mean"
/// for the average over seeds.
struct ReportRow {
  std::string experiment;
  std::string variant;
  double grid = 0.0;
  std::string seed;
  std::string metric;
  double empirical = 0.0;
  /// Absent where no asymptotic prediction exists (BCE, multiclass, real data).
  std::optional<double> theory;

  std::optional<double> gap() const;
};

struct RunReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::string config_echo;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::string plot_svg;
  /// Additional files written next to report.csv (name, contents).
  std::vector<std::pair<std::string, std::string>> extras;
  /// Human-readable summary printed by the CLI.
  std::string summary;
};

inline constexpr const char* kReportHeader = "experiment,variant,grid,seed,metric,empirical,theory,gap";

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);

/// Writes report.csv, config.echo, plot.svg and any extras into dir.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

/// Adds a "mean" row per (variant, grid, metric) averaging the per-seed rows.
void append_seed_means(std::vector<ReportRow>& rows);

/// Orders rows by experiment, grid, variant, metric and numeric seed, with
/// "mean" after the seeds, so emission does not depend on scheduling.
void sort_rows(std::vector<ReportRow>& rows);

} // namespace lpc::experiments
