#include "gpc/stats.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>
#include <stdexcept>

namespace gpc {

Interval clopper_pearson(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) throw std::invalid_argument("clopper_pearson: no trials");
  if (k > n) throw std::invalid_argument("clopper_pearson: more successes than trials");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence must lie in (0, 1)");
  using boost::math::binomial_distribution;
  const double tail = (1.0 - confidence) / 2.0;
  const auto trials = static_cast<double>(n), succ = static_cast<double>(k);
  Interval out;
  out.low = k == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(trials, succ, tail);
  out.high = k == n ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(trials, succ, tail);
  return out;
}

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate e;
  e.count = values.size();
  if (values.empty()) return e;
  double s = 0.0;
  for (double v : values) s += v;
  e.mean = s / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

}  // namespace gpc
