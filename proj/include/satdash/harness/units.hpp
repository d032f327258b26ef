// SPDX-License-Identifier: Apache-2.0
// Quantities with unit suffixes as written in scenario files.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "satdash/engine/sim_time.hpp"

namespace satdash::harness {

/// "25ms", "1.5s", "2min", "100us", "10ns"; a bare number is seconds.
engine::Duration parse_duration(std::string_view text);
/// "10Mbps", "750kbps", "2.5Gbit/s", "400k"; a bare number is bit/s.
double parse_rate(std::string_view text);
/// "1500B", "64KB", "512MiB"; KB/MB/GB are decimal, KiB/MiB/GiB binary. A bare
/// number is bytes.
std::uint64_t parse_bytes(std::string_view text);
double parse_real(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

/// Shortest exact spelling in the largest whole unit, e.g. "30s", "25ms".
std::string format_duration(engine::Duration d);
std::string format_rate(double bps);
std::string format_bytes(std::uint64_t bytes);
std::string format_real(double v);

}  // namespace satdash::harness
