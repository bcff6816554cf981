#pragma once

#include <cstddef>
#include <span>

namespace gpc {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact (Clopper-Pearson) binomial interval for k successes in n trials at
/// the given two-sided confidence level.
Interval clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(count); 0 for a single value
  std::size_t count = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

}  // namespace gpc
