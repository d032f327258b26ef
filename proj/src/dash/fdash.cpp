// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/fdash.hpp"

#include <cmath>
#include <stdexcept>

namespace satdash::dash {

void FdashConfig::validate() const {
  if (!(target_buffer_s > 0.0)) throw std::invalid_argument("fdash: target buffer must be positive");
  if (!(delta_saturation > 0.0)) throw std::invalid_argument("fdash: delta saturation must be positive");
  if (!(horizon_s >= 0.0)) throw std::invalid_argument("fdash: horizon must not be negative");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!(outputs[i] > 0.0)) throw std::invalid_argument("fdash: output factors must be positive");
    if (i > 0 && !(outputs[i] > outputs[i - 1])) throw std::invalid_argument("fdash: output factors must increase");
  }
}

FdashController::FdashController(FdashConfig cfg) : cfg_(cfg) { cfg_.validate(); }

Terms FdashController::buffer_terms(double buffer_s) const {
  const double target = cfg_.target_buffer_s;
  const double lo = target * 2.0 / 3.0;
  const double hi = target * 4.0 / 3.0;
  Terms t;
  if (buffer_s <= lo) {
    t.low = 1.0;
  } else if (buffer_s < target) {
    t.low = (target - buffer_s) / (target - lo);
  }
  if (buffer_s >= hi) {
    t.high = 1.0;
  } else if (buffer_s > target) {
    t.high = (buffer_s - target) / (hi - target);
  }
  t.mid = 1.0 - t.low - t.high;
  return t;
}

Terms FdashController::delta_terms(double delta) const {
  const double s = cfg_.delta_saturation;
  Terms t;
  if (delta < 0.0) t.low = std::min(1.0, -delta / s);
  if (delta > 0.0) t.high = std::min(1.0, delta / s);
  t.mid = 1.0 - t.low - t.high;
  return t;
}

double FdashController::decide(double buffer_s, double delta) const {
  if (!(buffer_s >= 0.0)) throw std::invalid_argument("fdash: buffer level must be non-negative");
  const Terms b = buffer_terms(buffer_s);
  const Terms d = delta_terms(delta);
  const double bw[3] = {b.low, b.mid, b.high};
  const double dw[3] = {d.low, d.mid, d.high};
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double w = bw[i] * dw[j];
      num += w * cfg_.outputs[static_cast<std::size_t>(i + j)];
      den += w;
    }
  }
  return num / den;
}

Representation select_representation(const Ladder& ladder, double factor, std::optional<double> estimate_bps) {
  if (!estimate_bps) return ladder.lowest();
  const double budget = factor * *estimate_bps;
  Representation best = ladder.lowest();
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder.bitrates()[i] <= budget) best = ladder.at(i);
  }
  return best;
}

double projected_buffer(double buffer_s, double estimate_bps, double bitrate_bps, double horizon_s) {
  return buffer_s + (estimate_bps / bitrate_bps - 1.0) * horizon_s;
}

Representation hold_or_switch(const Ladder& ladder, const Representation& current, const Representation& candidate,
                              double buffer_s, double estimate_bps, const FdashConfig& cfg) {
  if (cfg.horizon_s <= 0.0 || candidate.index == current.index) return candidate;
  if (candidate.index > current.index) {
    for (std::size_t i = candidate.index; i > current.index; --i) {
      const Representation r = ladder.at(i);
      if (projected_buffer(buffer_s, estimate_bps, r.bitrate_bps, cfg.horizon_s) >= cfg.target_buffer_s) return r;
    }
    return current;
  }
  const double ahead = projected_buffer(buffer_s, estimate_bps, current.bitrate_bps, cfg.horizon_s);
  return ahead > cfg.target_buffer_s ? current : candidate;
}

}  // namespace satdash::dash
