// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/throughput.hpp"

#include <stdexcept>

namespace satdash::dash {

ThroughputEstimator::ThroughputEstimator(engine::Duration granularity, double alpha)
    : granularity_(granularity), alpha_(alpha) {
  if (granularity <= engine::Duration::zero()) throw std::invalid_argument("estimator granularity must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("estimator alpha must be in (0, 1]");
}

double ThroughputEstimator::on_segment(std::uint64_t bytes, engine::Duration download_time) {
  const auto steps = std::max<std::int64_t>(1, (download_time.count() + granularity_.count() - 1) / granularity_.count());
  const double seconds = engine::to_seconds(granularity_ * steps);
  const double sample = static_cast<double>(bytes) * 8.0 / seconds;
  estimate_ = estimate_ ? alpha_ * sample + (1.0 - alpha_) * *estimate_ : sample;
  last_ = sample;
  ++samples_;
  return sample;
}

}  // namespace satdash::dash
