#pragma once

// Hand-rolled generators shared by the unit and acceptance tests. Every
// generator draws from a StreamRng on the Test stream, so a failing case can
// be replayed from its seed alone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gpc/graphon.hpp"
#include "gpc/metrics.hpp"
#include "gpc/rng.hpp"

namespace gpc::testing {

inline StreamRng test_rng(std::uint64_t seed, std::uint64_t index = 0) {
  return StreamRng(seed, index, Stream::Test);
}

inline std::size_t uniform_size(StreamRng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline double uniform_real(StreamRng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

/// n atoms in R^d, mixing Gaussian spread with occasional duplicates so that
/// ties are exercised too.
inline EmpiricalMeasure random_cloud(StreamRng& rng, std::size_t n, std::size_t d,
                                     double scale = 1.0) {
  std::vector<double> atoms(n * d);
  for (auto& v : atoms) v = scale * rng.normal();
  if (n > 2 && rng.bernoulli(0.2)) {
    const std::size_t i = uniform_size(rng, 0, n - 1), j = uniform_size(rng, 0, n - 1);
    for (std::size_t k = 0; k < d; ++k) atoms[j * d + k] = atoms[i * d + k];
  }
  return EmpiricalMeasure(std::move(atoms), d);
}

inline Matrix random_gaussian_matrix(StreamRng& rng, std::size_t rows, std::size_t cols) {
  Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rng.normal();
  return A;
}

inline Matrix random_nonnegative_matrix(StreamRng& rng, std::size_t rows, std::size_t cols) {
  Matrix A = random_gaussian_matrix(rng, rows, cols);
  return A.cwiseAbs();
}

/// Euclidean distance between atom i of a and atom j of b.
inline double atom_distance(const EmpiricalMeasure& a, std::size_t i, const EmpiricalMeasure& b,
                            std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double g = a.atom(i)[k] - b.atom(j)[k];
    s += g * g;
  }
  return std::sqrt(s);
}

/// W_p by enumerating every permutation. Only for n <= 8.
inline double brute_force_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = atom_distance(a, i, b, perm[i]);
      s += p == 1 ? dist : dist * dist;
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double mean = best / static_cast<double>(n);
  return p == 1 ? mean : std::sqrt(mean);
}

}  // namespace gpc::testing
