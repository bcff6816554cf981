#include "gpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "gpc/assignment.hpp"

namespace gpc {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms, std::size_t dim)
    : atoms_(std::move(atoms)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("empirical measure: dimension must be positive");
  if (atoms_.empty() || atoms_.size() % dim_ != 0)
    throw std::invalid_argument("empirical measure: need n >= 1 atoms of dimension d");
  for (double v : atoms_)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical measure: non-finite atom");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::W1: return "W1";
    case Metric::W2: return "W2";
    case Metric::BoundedLipschitz: return "BL";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  if (s == "W1") return Metric::W1;
  if (s == "W2") return Metric::W2;
  if (s == "BL" || s == "dBL") return Metric::BoundedLipschitz;
  throw std::invalid_argument("unknown metric '" + s + "' (expected W1, W2 or BL)");
}

EmpiricalMeasure empirical_at(const PathArray& paths, std::size_t step) {
  if (step >= paths.points()) throw std::out_of_range("empirical_at: step out of range");
  auto s = paths.state(step);
  return EmpiricalMeasure(std::vector<double>(s.begin(), s.end()), paths.dim());
}

MeasureFlow measure_flow(const PathArray& paths) {
  MeasureFlow flow;
  flow.reserve(paths.points());
  for (std::size_t m = 0; m < paths.points(); ++m) flow.push_back(empirical_at(paths, m));
  return flow;
}

namespace {

void require_same_dim(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("distance: empty measure");
  if (a.dim() != b.dim()) throw std::invalid_argument("distance: dimension mismatch");
}

void require_order(int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("wasserstein order must be 1 or 2");
}

std::vector<double> sorted_line(const EmpiricalMeasure& m) {
  std::vector<double> v = m.atoms();
  std::sort(v.begin(), v.end());
  return v;
}

EmpiricalMeasure replicate(const EmpiricalMeasure& m, std::size_t times) {
  std::vector<double> atoms;
  atoms.reserve(m.atoms().size() * times);
  for (std::size_t r = 0; r < times; ++r)
    atoms.insert(atoms.end(), m.atoms().begin(), m.atoms().end());
  return EmpiricalMeasure(std::move(atoms), m.dim());
}

}  // namespace

double w1_sorted_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  require_same_dim(a, b);
  if (a.dim() != 1 || a.size() != b.size())
    throw std::invalid_argument("w1_sorted_1d: need equal-size clouds on the line");
  const auto x = sorted_line(a), y = sorted_line(b);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p) {
  require_same_dim(a, b);
  require_order(p);
  if (a.dim() != 1) throw std::invalid_argument("wasserstein_1d: measures must be on the line");
  const auto x = sorted_line(a), y = sorted_line(b);
  // Atom i of a covers [i*m, (i+1)*m) and atom j of b covers [j*n, (j+1)*n)
  // in units of 1/(n*m).
  const std::uint64_t n = x.size(), m = y.size();
  std::uint64_t pos = 0;
  std::size_t i = 0, j = 0;
  double acc = 0.0;
  while (i < n && j < m) {
    const std::uint64_t end_a = (i + 1) * m, end_b = (j + 1) * n;
    const std::uint64_t end = std::min(end_a, end_b);
    const double gap = std::abs(x[i] - y[j]);
    acc += static_cast<double>(end - pos) * (p == 1 ? gap : gap * gap);
    pos = end;
    if (end == end_a) ++i;
    if (end == end_b) ++j;
  }
  const double mean = acc / (static_cast<double>(n) * static_cast<double>(m));
  return p == 1 ? mean : std::sqrt(mean);
}

double wasserstein_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p) {
  require_same_dim(a, b);
  require_order(p);
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein_exact: clouds must have equal size");
  if (detail::precedes(b, a)) return wasserstein_exact(b, a, p);
  const std::size_t n = a.size(), d = a.dim();
  if (n > kMaxAssignmentSize)
    throw std::length_error("wasserstein_exact: more than " +
                            std::to_string(kMaxAssignmentSize) + " atoms");
  Matrix cost(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = a.atom(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto yj = b.atom(j);
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) sq += (xi[k] - yj[k]) * (xi[k] - yj[k]);
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p == 1 ? std::sqrt(sq) : sq;
    }
  }
  const double mean = solve_assignment(cost).cost / static_cast<double>(n);
  return p == 1 ? mean : std::sqrt(std::max(mean, 0.0));
}

double wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p) {
  require_same_dim(a, b);
  if (a.dim() == 1) return wasserstein_1d(a, b, p);
  if (a.size() == b.size()) return wasserstein_exact(a, b, p);
  const bool a_small = a.size() < b.size();
  const EmpiricalMeasure& small = a_small ? a : b;
  const EmpiricalMeasure& large = a_small ? b : a;
  if (large.size() % small.size() != 0)
    throw std::invalid_argument(
        "wasserstein: in dimension > 1 one cloud size must divide the other (" +
        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  const EmpiricalMeasure expanded = replicate(small, large.size() / small.size());
  return a_small ? wasserstein_exact(expanded, large, p) : wasserstein_exact(large, expanded, p);
}

double distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, Metric metric) {
  switch (metric) {
    case Metric::W1: return wasserstein(a, b, 1);
    case Metric::W2: return wasserstein(a, b, 2);
    case Metric::BoundedLipschitz: return bounded_lipschitz(a, b);
  }
  throw std::invalid_argument("distance: unknown metric");
}

std::vector<double> distance_profile(const MeasureFlow& a, const MeasureFlow& b, Metric metric) {
  if (a.size() != b.size())
    throw std::invalid_argument("distance_profile: flows are on different grids (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                " points)");
  std::vector<double> out(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) out[m] = distance(a[m], b[m], metric);
  return out;
}

double sup_distance(const MeasureFlow& a, const MeasureFlow& b, Metric metric) {
  const auto prof = distance_profile(a, b, metric);
  double s = 0.0;
  for (double v : prof) s = std::max(s, v);
  return s;
}

double fournier_guillin_rate(double p, double q, std::size_t d, std::size_t n) {
  if (!(p > 0.0) || !(q > p) || d == 0 || n == 0)
    throw std::domain_error("rate: need 0 < p < q, d >= 1, n >= 1");
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  const double tail = std::pow(nn, -(q - p) / q);
  if (2.0 * p > dd) {
    if (q == 2.0 * p) throw std::domain_error("rate: excluded boundary q = 2p");
    return std::pow(nn, -0.5) + tail;
  }
  if (2.0 * p == dd) {
    if (q == 2.0 * p) throw std::domain_error("rate: excluded boundary q = 2p");
    return std::pow(nn, -0.5) * std::log(1.0 + nn) + tail;
  }
  if (q == dd / (dd - p)) throw std::domain_error("rate: excluded boundary q = d/(d-p)");
  return std::pow(nn, -p / dd) + tail;
}

}  // namespace gpc
