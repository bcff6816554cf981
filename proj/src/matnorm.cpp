#include "gpc/matnorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace gpc {

double exact_sum(std::span<const double> terms) {
  // Non-overlapping partials, as in Python's math.fsum.
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round-half-even correction when the remaining partials push past a tie.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

namespace {

// Rows are the enumerated side. Values are indexed [row][col].
struct SignProblem {
  std::size_t rows, cols;
  std::vector<double> a;  // row-major
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

SignProblem orient(const Matrix& A) {
  SignProblem sp;
  const auto r = static_cast<std::size_t>(A.rows()), c = static_cast<std::size_t>(A.cols());
  const bool transpose = c < r;
  sp.rows = transpose ? c : r;
  sp.cols = transpose ? r : c;
  sp.a.resize(r * c);
  for (std::size_t i = 0; i < sp.rows; ++i)
    for (std::size_t j = 0; j < sp.cols; ++j)
      sp.a[i * sp.cols + j] = transpose ? A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))
                                        : A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return sp;
}

// Exact value of max_y <x, A y> for a fixed sign vector x.
double exact_value(const SignProblem& sp, const std::vector<signed char>& x,
                   std::vector<double>& scratch, std::vector<double>& all) {
  all.clear();
  scratch.resize(sp.rows);
  for (std::size_t j = 0; j < sp.cols; ++j) {
    for (std::size_t i = 0; i < sp.rows; ++i) scratch[i] = x[i] * sp.at(i, j);
    const double s = exact_sum(scratch);
    if (s == 0.0) continue;
    const double sign = s > 0.0 ? 1.0 : -1.0;
    for (double t : scratch) all.push_back(sign * t);
  }
  return exact_sum(all);
}

void column_sums(const SignProblem& sp, const std::vector<signed char>& x, std::vector<double>& s) {
  std::fill(s.begin(), s.end(), 0.0);
  for (std::size_t i = 0; i < sp.rows; ++i)
    for (std::size_t j = 0; j < sp.cols; ++j) s[j] += x[i] * sp.at(i, j);
}

double abs_total(const std::vector<double>& s) {
  double v = 0.0;
  for (double t : s) v += std::abs(t);
  return v;
}

// Visits every x with x_0 = +1 in Gray-code order, calling f(x, approx_value).
template <class F>
void enumerate_signs(const SignProblem& sp, F&& f) {
  std::vector<signed char> x(sp.rows, 1);
  std::vector<double> s(sp.cols);
  column_sums(sp, x, s);
  f(x, abs_total(s));
  if (sp.rows <= 1) return;
  const std::uint64_t count = std::uint64_t{1} << (sp.rows - 1);
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto bit = static_cast<std::size_t>(__builtin_ctzll(k)) + 1;
    x[bit] = static_cast<signed char>(-x[bit]);
    if ((k & 4095u) == 0) {
      column_sums(sp, x, s);
    } else {
      const double twice = 2.0 * x[bit];
      for (std::size_t j = 0; j < sp.cols; ++j) s[j] += twice * sp.at(bit, j);
    }
    f(x, abs_total(s));
  }
}

double magnitude(const SignProblem& sp) {
  double t = 0.0;
  for (double v : sp.a) t += std::abs(v);
  return t;
}

}  // namespace

double norm_inf_to_1_exact(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  const SignProblem sp = orient(A);
  if (sp.rows > kExactNormMaxDim)
    throw std::length_error("exact inf->1 norm supports at most " +
                            std::to_string(kExactNormMaxDim) +
                            " rows or columns; use norm_inf_to_1_heuristic");
  double best = -1.0;
  enumerate_signs(sp, [&](const std::vector<signed char>&, double v) { best = std::max(best, v); });
  const double tol = 1e-9 * magnitude(sp) + std::numeric_limits<double>::min();
  double exact = 0.0;
  std::vector<double> scratch, all;
  enumerate_signs(sp, [&](const std::vector<signed char>& x, double v) {
    if (v >= best - tol) exact = std::max(exact, exact_value(sp, x, scratch, all));
  });
  return exact;
}

double norm_inf_to_1_heuristic(const Matrix& A, int restarts, StreamRng& rng) {
  if (restarts < 1) throw std::invalid_argument("heuristic needs at least one restart");
  if (A.size() == 0) return 0.0;
  const SignProblem sp = orient(A);
  std::vector<signed char> x(sp.rows), y(sp.cols);
  std::vector<double> s(sp.cols), r(sp.rows), scratch, all;
  double best = 0.0;
  for (int rep = 0; rep < restarts; ++rep) {
    for (auto& xi : x) xi = rng.bernoulli(0.5) ? 1 : -1;
    double prev = -1.0;
    for (int sweep = 0; sweep < 1000; ++sweep) {
      column_sums(sp, x, s);
      for (std::size_t j = 0; j < sp.cols; ++j) y[j] = s[j] >= 0.0 ? 1 : -1;
      std::fill(r.begin(), r.end(), 0.0);
      for (std::size_t i = 0; i < sp.rows; ++i)
        for (std::size_t j = 0; j < sp.cols; ++j) r[i] += sp.at(i, j) * y[j];
      for (std::size_t i = 0; i < sp.rows; ++i) x[i] = r[i] >= 0.0 ? 1 : -1;
      column_sums(sp, x, s);
      const double v = abs_total(s);
      if (v <= prev) break;
      prev = v;
    }
    best = std::max(best, exact_value(sp, x, scratch, all));
  }
  return best;
}

Matrix gram_matrix(const Matrix& A) {
  const Eigen::Index c = A.cols();
  Matrix G(c, c);
  for (Eigen::Index i = 0; i < c; ++i)
    for (Eigen::Index j = i; j < c; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < A.rows(); ++k) s += A(k, i) * A(k, j);
      G(i, j) = s;
      G(j, i) = s;
    }
  return G;
}

double gram_norm(const Matrix& A, StreamRng* rng, int restarts) {
  const Matrix G = gram_matrix(A);
  if (static_cast<std::size_t>(G.rows()) <= kExactNormMaxDim) return norm_inf_to_1_exact(G);
  if (!rng) throw std::invalid_argument("gram_norm: heuristic backend needs a random stream");
  return norm_inf_to_1_heuristic(G, restarts, *rng);
}

void BoundParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("bound parameter delta must be positive");
  if (!(bigK > 0.0) || !std::isfinite(bigK))
    throw std::invalid_argument("bound parameter K must be positive");
}

std::string to_string(TheoremBound b) {
  switch (b) {
    case TheoremBound::T3_7: return "T3_7";
    case TheoremBound::T3_9_W1: return "T3_9_W1";
    case TheoremBound::T3_9_BL: return "T3_9_BL";
    case TheoremBound::T3_10: return "T3_10";
    case TheoremBound::T3_13_sparse: return "T3_13_sparse";
    case TheoremBound::T3_13_dense: return "T3_13_dense";
  }
  return "?";
}

TheoremBound theorem_bound_from_string(const std::string& s) {
  for (auto b : {TheoremBound::T3_7, TheoremBound::T3_9_W1, TheoremBound::T3_9_BL,
                 TheoremBound::T3_10, TheoremBound::T3_13_sparse, TheoremBound::T3_13_dense})
    if (to_string(b) == s) return b;
  throw std::invalid_argument("unknown bound variant '" + s + "'");
}

namespace {

void require_p(double p) {
  if (!(p > 0.0) || p > 1.0) throw std::domain_error("p must lie in (0, 1]");
}

}  // namespace

double cutnorm_tail_bound(double eta, std::size_t n, double p) {
  if (n == 0) throw std::domain_error("n must be positive");
  const double nn = static_cast<double>(n);
  if (!(eta > 0.0) || eta > nn) throw std::domain_error("cutnorm bound needs 0 < eta <= n");
  require_p(p);
  const double v = std::exp(-eta * eta * nn * nn * p / (2.0 + eta / 3.0));
  return std::clamp(v, 0.0, 1.0);
}

double gram_tail_bound(double eta, std::size_t n, double p) {
  if (n == 0) throw std::domain_error("n must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::domain_error("gram bound needs eta > 0");
  require_p(p);
  const double nn = static_cast<double>(n);
  const double p4 = p * p * p * p;
  return 3.0 * nn * nn * std::exp(-2.0 * eta * eta * nn * p4 / (9.0 + 4.0 * eta));
}

double theorem_tail_bound(TheoremBound which, double a, std::size_t n,
                          std::optional<double> p, const BoundParams& params) {
  if (!(a > 0.0)) throw std::domain_error("theorem bound needs a > 0");
  if (n == 0) throw std::domain_error("n must be positive");
  params.validate();
  const double nn = static_cast<double>(n), d = params.delta, a2 = a * a;
  switch (which) {
    case TheoremBound::T3_7:
    case TheoremBound::T3_10:
      return 2.0 * std::exp(-d * a2 * nn / 4.0);
    case TheoremBound::T3_9_W1:
    case TheoremBound::T3_9_BL:
      return 3.0 * std::exp(-d * a2 * nn / 16.0);
    case TheoremBound::T3_13_sparse: {
      if (!p) throw std::invalid_argument("T3_13_sparse needs the sparsity p(n)");
      require_p(*p);
      const double K = params.bigK, p4 = *p * *p * *p * *p;
      return 4.0 * nn * nn * std::exp(-a2 * a2 * nn * p4 / (72.0 * K * K + 8.0 * a2 * K));
    }
    case TheoremBound::T3_13_dense:
      return std::exp(-d * a2 * a2 * nn / (a2 + d));
  }
  throw std::invalid_argument("unknown bound variant");
}

double bernstein_bound(double u, double v, double b) {
  if (!(u > 0.0) || !(v >= 0.0) || !(b > 0.0))
    throw std::domain_error("bernstein bound needs u > 0, v >= 0, b > 0");
  return std::exp(-u * u / (2.0 * (v + b * u / 3.0)));
}

void write_bound_curve_csv(std::ostream& os, const std::string& label, std::size_t n,
                           double p_n, const std::vector<BoundCurvePoint>& points, bool header) {
  if (header) os << "bound,n,p_n,x,value\n";
  char buf[96];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p_n, pt.x, pt.bound);
    os << label << ',' << n << ',' << buf << '\n';
  }
}

}  // namespace gpc
