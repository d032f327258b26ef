// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "satdash/dash/playback.hpp"
#include "satdash/harness/matrix.hpp"
#include "satdash/harness/scenario.hpp"
#include "satdash/metrics/aggregate.hpp"
#include "satdash/transport/connection.hpp"

namespace satdash::harness {

struct SimulationResult {
  std::vector<metrics::SessionMetrics> users;
  metrics::FairnessReport fairness;
  std::vector<dash::PlaybackLog> playback_logs;
  std::vector<transport::ConnectionStats> server_stats;
  std::vector<double> access_rate_factors;
  std::uint64_t events = 0;
  engine::SimTime end_time{};
};

/// One full simulation: n_users DASH clients, each on its own connection to
/// the server across the shared backhaul, from t = 0 until every session has
/// ended or the session limit is reached. Deterministic in (cfg, cell, seed).
SimulationResult run_simulation(const ScenarioConfig& cfg, const Cell& cell, std::uint64_t seed);

}  // namespace satdash::harness
