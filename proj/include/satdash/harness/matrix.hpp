// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "satdash/harness/scenario.hpp"
#include "satdash/metrics/report.hpp"

namespace satdash::harness {

struct Cell {
  transport::TransportMode mode;
  cc::Algorithm algorithm;

  /// "TCP-CUBIC", "QUIC-BBR", ...
  std::string name() const;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// TCP with BBR, NewReno and CUBIC; QUIC with BBR and NewReno.
std::vector<Cell> default_matrix();
/// The transport and algorithm named in the scenario.
std::vector<Cell> single_matrix(const ScenarioConfig& cfg);

/// Seed for run `run` of `cell`. Depends only on the cell's name, so adding
/// cells never changes another cell's results.
std::uint64_t run_seed(std::uint64_t base_seed, const Cell& cell, std::uint32_t run);

struct MatrixOptions {
  unsigned workers = 1;
};

/// Runs cfg.run_count simulations per cell on a pool of worker threads.
/// Results are ordered by (cell, run) whatever the completion order. A run
/// that throws is recorded as failed.
std::vector<metrics::CellReport> run_matrix(const ScenarioConfig& cfg, const std::vector<Cell>& cells,
                                            const MatrixOptions& opts = {});

/// run_matrix() plus every output file under `out_dir`, including
/// resolved_config.txt. Returns false if some cell had no successful run.
bool run_and_report(const ScenarioConfig& cfg, const std::vector<Cell>& cells, const std::filesystem::path& out_dir,
                    const MatrixOptions& opts = {});

}  // namespace satdash::harness
