// SPDX-License-Identifier: Apache-2.0
#include "satdash/metrics/fairness.hpp"

#include <algorithm>
#include <cmath>

namespace satdash::metrics {

double jain_index(std::span<const double> values) {
  if (values.empty()) throw JainUndefined("jain_index: no values");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("jain_index: values must be finite and non-negative");
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) throw JainUndefined("jain_index: all values are zero");
  const double j = sum * sum / (static_cast<double>(values.size()) * sum_sq);
  // Rounding can push an all-equal vector a hair above 1.
  return std::min(1.0, j);
}

std::optional<double> try_jain_index(std::span<const double> values) {
  try {
    return jain_index(values);
  } catch (const JainUndefined&) {
    return std::nullopt;
  }
}

}  // namespace satdash::metrics
