// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "satdash/metrics/aggregate.hpp"

namespace satdash::metrics {

struct CellReport {
  std::string scheme;  // e.g. "TCP-CUBIC"
  std::size_t n_users = 0;
  std::vector<RunResult> runs;
  RunAggregate summary;
};

/// Fixed-precision number formatting shared by every report file, so equal
/// inputs always produce identical bytes. Missing values print as "nan".
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

/// One row per (run, user).
std::string per_run_csv(const CellReport& cell);
/// One row per cell, mirroring the interruption/latency/fairness table.
std::string summary_csv(const std::vector<CellReport>& cells);
std::string summary_json(const std::vector<CellReport>& cells);
/// `value,cumulative_probability` pairs.
std::string cdf_csv(const Cdf& cdf);
/// scheme,min,q1,median,q3,max for playback duration.
std::string boxplot_csv(const std::vector<CellReport>& cells);

/// Writes summary.csv, summary.json, per_run_<scheme>.csv,
/// cdf/<metric>_<scheme>.csv and playback_duration_boxplot.csv under `dir`.
void write_reports(const std::filesystem::path& dir, const std::vector<CellReport>& cells);

}  // namespace satdash::metrics
