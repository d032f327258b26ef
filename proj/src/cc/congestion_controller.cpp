// SPDX-License-Identifier: Apache-2.0
#include "satdash/cc/congestion_controller.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "satdash/cc/bbr.hpp"
#include "satdash/cc/cubic.hpp"
#include "satdash/cc/newreno.hpp"

namespace satdash::cc {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NewReno: return "NewReno";
    case Algorithm::Cubic: return "CUBIC";
    case Algorithm::Bbr: return "BBR";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "newreno") return Algorithm::NewReno;
  if (lower == "cubic") return Algorithm::Cubic;
  if (lower == "bbr") return Algorithm::Bbr;
  return std::nullopt;
}

std::unique_ptr<CongestionController> make_controller(Algorithm a, const CcParams& params, engine::SeededRng rng) {
  switch (a) {
    case Algorithm::NewReno: return std::make_unique<NewReno>(params);
    case Algorithm::Cubic: return std::make_unique<Cubic>(params);
    case Algorithm::Bbr: return std::make_unique<Bbr>(params, rng);
  }
  return nullptr;
}

}  // namespace satdash::cc
