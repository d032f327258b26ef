// SPDX-License-Identifier: Apache-2.0
#include "satdash/harness/matrix.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "satdash/harness/simulation.hpp"

namespace satdash::harness {

std::string Cell::name() const {
  return std::string(transport::to_string(mode)) + "-" + std::string(cc::to_string(algorithm));
}

std::vector<Cell> default_matrix() {
  using transport::TransportMode;
  return {{TransportMode::TcpLike, cc::Algorithm::Bbr},
          {TransportMode::TcpLike, cc::Algorithm::NewReno},
          {TransportMode::TcpLike, cc::Algorithm::Cubic},
          {TransportMode::QuicLike, cc::Algorithm::Bbr},
          {TransportMode::QuicLike, cc::Algorithm::NewReno}};
}

std::vector<Cell> single_matrix(const ScenarioConfig& cfg) { return {{cfg.transport_mode, cfg.cc_algorithm}}; }

std::uint64_t run_seed(std::uint64_t base_seed, const Cell& cell, std::uint32_t run) {
  return base_seed ^ engine::derive_seed(engine::fnv1a(cell.name()), run);
}

std::vector<metrics::CellReport> run_matrix(const ScenarioConfig& cfg, const std::vector<Cell>& cells,
                                            const MatrixOptions& opts) {
  cfg.validate();
  const std::size_t runs = cfg.run_count;
  std::vector<metrics::CellReport> reports(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    reports[c].scheme = cells[c].name();
    reports[c].n_users = cfg.n_users;
    reports[c].runs.resize(runs);
  }

  // Each task writes only its own (cell, run) slot.
  std::atomic<std::size_t> next{0};
  const std::size_t total = cells.size() * runs;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t c = task / runs;
      const auto r = static_cast<std::uint32_t>(task % runs);
      metrics::RunResult& slot = reports[c].runs[r];
      slot.run = r;
      slot.seed = run_seed(cfg.base_seed, cells[c], r);
      try {
        SimulationResult sim = run_simulation(cfg, cells[c], slot.seed);
        slot.users = std::move(sim.users);
        slot.fairness = sim.fairness;
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(total)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  for (auto& report : reports) {
    bool any_ok = false;
    for (const auto& r : report.runs) any_ok = any_ok || r.ok();
    if (any_ok) {
      report.summary = metrics::aggregate(report.runs);
    } else {
      report.summary.runs = report.runs.size();
      report.summary.failed_runs = report.runs.size();
    }
  }
  return reports;
}

bool run_and_report(const ScenarioConfig& cfg, const std::vector<Cell>& cells, const std::filesystem::path& out_dir,
                    const MatrixOptions& opts) {
  const auto reports = run_matrix(cfg, cells, opts);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "resolved_config.txt", std::ios::binary | std::ios::trunc);
    out << to_text(cfg);
    if (!out) throw std::runtime_error("cannot write resolved_config.txt");
  }
  metrics::write_reports(out_dir, reports);
  bool all_cells_ok = true;
  for (const auto& r : reports) all_cells_ok = all_cells_ok && r.summary.failed_runs < r.summary.runs;
  return all_cells_ok;
}

}  // namespace satdash::harness
