#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gpc/dynamics.hpp"

namespace gpc {

/// Uniform probability measure on n atoms in R^d (duplicates allowed).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  /// `atoms` is row-major n x d.
  EmpiricalMeasure(std::vector<double> atoms, std::size_t dim);

  std::size_t size() const { return dim_ ? atoms_.size() / dim_ : 0; }
  std::size_t dim() const { return dim_; }
  std::span<const double> atom(std::size_t i) const {
    return {atoms_.data() + i * dim_, dim_};
  }
  const std::vector<double>& atoms() const { return atoms_; }

 private:
  std::vector<double> atoms_;
  std::size_t dim_ = 0;
};

/// One measure per grid time, all with the same atom count.
using MeasureFlow = std::vector<EmpiricalMeasure>;

namespace detail {
// Fixed argument order for the solvers, so that d(a, b) == d(b, a) bit for bit.
inline bool precedes(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.atoms() < b.atoms();
}
}  // namespace detail

enum class Metric { W1, W2, BoundedLipschitz };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

EmpiricalMeasure empirical_at(const PathArray& paths, std::size_t step);
MeasureFlow measure_flow(const PathArray& paths);

/// W1 between equal-size clouds on the line: mean gap of the order
/// statistics.
double w1_sorted_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// Exact W_p on the line for clouds of any sizes, integrating
/// |F^{-1} - G^{-1}|^p over the merged quantile breakpoints.
double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                      int p);

inline constexpr std::size_t kMaxAssignmentSize = 4096;

/// Exact W_p (p in {1, 2}) between equal-size clouds by solving the
/// assignment problem with cost |x_i - y_j|^p.
double wasserstein_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                         int p);

/// W_p for any pair the library can solve exactly: the quantile formula on
/// the line, the assignment problem otherwise (atoms of the smaller cloud are
/// replicated when one size divides the other).
double wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p);

inline constexpr std::size_t kMaxBoundedLipschitzSupport = 1024;

/// Bounded-Lipschitz distance sup { int f d(a - b) : 2(|f|_inf + |f|_Lip) <= 1 }
/// computed exactly as a linear program over the values of f on the union
/// support.
double bounded_lipschitz(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

double distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                Metric metric);

/// Per-step distances between two flows on the same grid.
std::vector<double> distance_profile(const MeasureFlow& a, const MeasureFlow& b,
                                     Metric metric);
/// Max over grid steps of the per-step distance.
double sup_distance(const MeasureFlow& a, const MeasureFlow& b, Metric metric);

/// The alpha_{p,q}(n) rate for empirical measures of independent samples.
/// Throws std::domain_error when (p, q, d) hits an excluded boundary.
double fournier_guillin_rate(double p, double q, std::size_t d, std::size_t n);

}  // namespace gpc
