// SPDX-License-Identifier: Apache-2.0
// simulate <scenario-file> [--matrix default|single] [--runs N] [--seed S] [--workers W] [--out DIR]
#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "satdash/harness/matrix.hpp"
#include "satdash/harness/scenario.hpp"

int main(int argc, char** argv) {
  using namespace satdash;

  CLI::App app{"DASH over a satellite-backhauled IAB path: transport and congestion control comparison"};
  std::string scenario_file;
  std::string matrix = "default";
  std::optional<std::uint32_t> runs;
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> out_dir;

  app.add_option("scenario", scenario_file, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
  app.add_option("--matrix", matrix, "Cells to run: default (all five) or single (the scenario's transport/cc)")
      ->check(CLI::IsMember({"default", "single"}));
  app.add_option("--runs", runs, "Runs per cell (overrides run_count)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base seed (overrides base_seed)");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  CLI11_PARSE(app, argc, argv);

  try {
    harness::ScenarioConfig cfg = harness::load_scenario(scenario_file);
    if (runs) cfg.run_count = *runs;
    if (seed) cfg.base_seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    const auto cells = matrix == "single" ? harness::single_matrix(cfg) : harness::default_matrix();

    std::fprintf(stderr, "%zu cell(s) x %u run(s), %u worker(s) -> %s\n", cells.size(), cfg.run_count, workers,
                 cfg.output_dir.c_str());
    const bool ok = harness::run_and_report(cfg, cells, cfg.output_dir, {workers});
    if (!ok) {
      std::fprintf(stderr, "error: at least one cell had no successful run\n");
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
