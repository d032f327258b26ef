// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>

#include "satdash/dash/manifest.hpp"

namespace satdash::dash {

struct FdashConfig {
  double target_buffer_s = 30.0;
  /// Buffer slope (media seconds per second) at which "falling" and "rising"
  /// are fully true.
  double delta_saturation = 1.0;
  /// Output singletons: decrease, small decrease, hold, small increase,
  /// increase.
  std::array<double, 5> outputs{0.5, 0.75, 1.0, 1.25, 1.5};
  /// Look-ahead used by hold_or_switch(); 0 disables the check.
  double horizon_s = 60.0;

  void validate() const;
};

/// Degrees of membership in the three linguistic terms of one input.
struct Terms {
  double low = 0.0;   // short / falling
  double mid = 0.0;   // close / steady
  double high = 0.0;  // long / rising
};

/// Fuzzy controller over buffer level and its rate of change.
///
/// Buffer terms: short is 1 below 2/3 of the target and fades out at the
/// target; close is a triangle from 2/3 to 4/3 of the target peaking at it;
/// long mirrors short. Delta terms are the same shape over
/// [-saturation, +saturation] centred at 0.
///
/// Rules combine with the product t-norm. A rule's output term is the sum of
/// the two input term offsets (-1, 0, +1), so short+falling is "decrease",
/// close+steady is "hold" and long+rising is "increase". Centroid
/// defuzzification over the output singletons gives the scaling factor.
class FdashController {
 public:
  explicit FdashController(FdashConfig cfg = {});

  Terms buffer_terms(double buffer_s) const;
  Terms delta_terms(double delta_s_per_s) const;
  /// Scaling factor for the throughput estimate. Requires buffer_s >= 0.
  double decide(double buffer_s, double delta_s_per_s) const;

  const FdashConfig& config() const { return cfg_; }

 private:
  FdashConfig cfg_;
};

inline double fdash_decide(const FdashController& ctrl, double buffer_s, double delta_s_per_s) {
  return ctrl.decide(buffer_s, delta_s_per_s);
}

/// Highest rung with bitrate <= factor * estimate; the lowest rung when
/// nothing fits or there is no estimate yet.
Representation select_representation(const Ladder& ladder, double factor, std::optional<double> estimate_bps);

/// Buffer level expected `horizon_s` from now if segments of `bitrate_bps`
/// keep arriving at `estimate_bps`.
double projected_buffer(double buffer_s, double estimate_bps, double bitrate_bps, double horizon_s);

/// Filters a switch by the buffer trend. Moving up goes to the highest rung
/// between `current` and `candidate` whose projection reaches the target, or
/// stays put if none does. Moving down is skipped while the projection at the
/// current bitrate stays above the target.
Representation hold_or_switch(const Ladder& ladder, const Representation& current, const Representation& candidate,
                              double buffer_s, double estimate_bps, const FdashConfig& cfg);

}  // namespace satdash::dash
