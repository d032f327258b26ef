// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "satdash/cc/congestion_controller.hpp"
#include "satdash/dash/client.hpp"
#include "satdash/netpath/path.hpp"
#include "satdash/transport/config.hpp"

namespace satdash::harness {

/// Parse or validation failure. `line()` is 0 for errors that are not tied
/// to one line (cross-field checks).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string source, std::size_t line, const std::string& msg);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Complete description of one experiment. Every field has a default, so an
/// empty scenario file is valid.
struct ScenarioConfig {
  netpath::PathConfig path = default_path();
  /// Rate-trace files per link ("backhaul_down", ...), as written.
  std::map<std::string, std::string> trace_files;
  /// Each user's access rates are scaled by a factor drawn uniformly from
  /// [1 - jitter, 1 + jitter] per run.
  double access_rate_jitter = 0.3;
  std::uint32_t n_users = 4;

  transport::TransportMode transport_mode = transport::TransportMode::TcpLike;
  cc::Algorithm cc_algorithm = cc::Algorithm::Cubic;
  transport::TransportConfig transport;

  dash::Manifest manifest;
  dash::FdashConfig fdash;
  engine::Duration resume_threshold = std::chrono::seconds(4);
  std::uint64_t buffer_bytes = 512ull << 20;
  engine::Duration estimation_window = std::chrono::milliseconds(50);
  double estimate_alpha = 0.3;
  /// Hard stop for one simulation; sessions still running are cut here.
  engine::Duration session_limit = std::chrono::seconds(120);
  /// RTT samples from the first part of each session are left out of latency.
  engine::Duration latency_warmup{0};

  std::uint32_t run_count = 30;
  std::uint64_t base_seed = 1;
  std::string output_dir = "results";

  static netpath::PathConfig default_path();

  /// Throws ScenarioError (line 0) on a cross-field violation.
  void validate() const;
  dash::ClientConfig client_config() const;
  cc::CcParams cc_params() const;
};

/// `key = value` lines; `#` starts a comment. Keys for a link direction
/// (`backhaul_down.rate`) take precedence over keys for both directions
/// (`backhaul.rate`) regardless of order. `trace` paths are resolved
/// relative to `base_dir`.
ScenarioConfig parse_scenario(std::istream& in, const std::string& source = "<scenario>",
                              const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Every key with its resolved value; parse_scenario() reads it back to an
/// equal configuration.
std::string to_text(const ScenarioConfig& cfg);

/// Names of all accepted keys, in canonical order.
std::vector<std::string> scenario_keys();

}  // namespace satdash::harness
