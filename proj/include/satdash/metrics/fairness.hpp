// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <stdexcept>

namespace satdash::metrics {

class JainUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Jain's fairness index (sum x)^2 / (N * sum x^2). Throws JainUndefined for
/// an empty or all-zero input and std::invalid_argument for a negative or
/// non-finite value.
double jain_index(std::span<const double> values);

/// Same, but empty/all-zero inputs yield nullopt instead of throwing.
std::optional<double> try_jain_index(std::span<const double> values);

}  // namespace satdash::metrics
