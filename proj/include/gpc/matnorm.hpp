#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gpc/graphon.hpp"
#include "gpc/rng.hpp"

namespace gpc {

/// Correctly rounded sum of a list of doubles (Shewchuk partials).
double exact_sum(std::span<const double> terms);

inline constexpr std::size_t kExactNormMaxDim = 22;
inline constexpr int kDefaultHeuristicRestarts = 50;

/// max over sign vectors x, y of <x, A y>, by Gray-code enumeration over the
/// smaller side. The returned value is the correctly rounded exact value of an
/// optimal sign pair, so norm(A) == norm(A^T) bit for bit.
/// Throws std::length_error when min(rows, cols) > kExactNormMaxDim.
double norm_inf_to_1_exact(const Matrix& A);

/// Alternating sign ascent from random starts. Never exceeds the exact value.
double norm_inf_to_1_heuristic(const Matrix& A, int restarts, StreamRng& rng);

/// A^T A with both triangles filled from the same sums.
Matrix gram_matrix(const Matrix& A);

/// ||A^T A||_{inf->1}: exact when A has at most kExactNormMaxDim columns,
/// otherwise the heuristic (which then needs `rng`).
double gram_norm(const Matrix& A, StreamRng* rng = nullptr,
                 int restarts = kDefaultHeuristicRestarts);

struct BoundParams {
  double delta = 1.0;
  double bigK = 1.0;
  void validate() const;
};

enum class TheoremBound { T3_7, T3_9_W1, T3_9_BL, T3_10, T3_13_sparse, T3_13_dense };

std::string to_string(TheoremBound b);
TheoremBound theorem_bound_from_string(const std::string& s);

/// exp(-eta^2 n^2 p / (2 + eta/3)), clamped to [0, 1]. Needs 0 < eta <= n.
double cutnorm_tail_bound(double eta, std::size_t n, double p);

/// 3 n^2 exp(-2 eta^2 n p^4 / (9 + 4 eta)). Not clamped; can exceed 1.
double gram_tail_bound(double eta, std::size_t n, double p);

double theorem_tail_bound(TheoremBound which, double a, std::size_t n,
                          std::optional<double> p, const BoundParams& params);

/// exp(-u^2 / (2 (v + b u / 3))).
double bernstein_bound(double u, double v, double b);

struct BoundCurvePoint {
  double x = 0.0;
  double bound = 0.0;
};

/// CSV with columns bound,n,p_n,x,value (one row per point).
void write_bound_curve_csv(std::ostream& os, const std::string& label,
                           std::size_t n, double p_n,
                           const std::vector<BoundCurvePoint>& points,
                           bool header = true);

}  // namespace gpc
