// Bounded-Lipschitz distance between uniform atom clouds.
//
// The primal program over the merged support x_1..x_K with signed masses w_k
// is
//
//   max  sum_k w_k f_k
//   s.t. f_k - f_l <= L |x_k - x_l|     (arcs k -> l)
//        |f_k| <= s,  s + L <= 1/2,  s, L >= 0.
//
// We solve its dual with a revised simplex method. Dual variables: a flow
// pi_kl >= 0 on every arc, slacks alpha_k, beta_k >= 0 for the two sides of
// |f_k| <= s, and t >= 0 for s + L <= 1/2:
//
//   min  t / 2
//   s.t. sum_l pi_kl - sum_l pi_lk + alpha_k - beta_k = w_k   (k = 1..K)
//        t - sum (alpha + beta) - e1 = 0
//        t - sum pi_kl |x_k - x_l| - e2 = 0
//
// with surplus variables e1, e2 >= 0. Picking alpha_k or beta_k by the sign
// of w_k, plus t and e2, gives a feasible starting basis, so no phase one is
// needed.
//
// On the line only arcs between neighbours in sorted order are kept; the
// Lipschitz constraints on the other pairs follow from these.

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gpc/metrics.hpp"

namespace gpc {

namespace {

struct Arc {
  int from, to;
  double length;
};

struct Entry {
  int row;
  double value;
};

class BoundedLipschitzProgram {
 public:
  BoundedLipschitzProgram(std::vector<double> weights, std::vector<Arc> arcs)
      : w_(std::move(weights)), arcs_(std::move(arcs)) {
    K_ = static_cast<int>(w_.size());
    rows_ = K_ + 2;
    A_ = static_cast<int>(arcs_.size());
    cols_ = A_ + 2 * K_ + 3;
  }

  double solve() {
    initial_basis();
    initial_inverse();
    const long max_iter = 50L * (rows_ + cols_) + 1000;
    int degenerate_run = 0;
    // Product-form updates stay accurate here; refactoring costs O(m^3).
    const long refactor_every = std::max<long>(kRefactorEvery, rows_);
    for (long iter = 0; iter < max_iter; ++iter) {
      if (iter % refactor_every == 0 && iter > 0) refactor();
      const bool bland = degenerate_run > rows_;
      const Eigen::VectorXd y = duals();
      const int entering = price(y, bland);
      if (entering < 0) {
        refactor();
        // Re-price on the fresh factorization before declaring optimality.
        const Eigen::VectorXd y2 = duals();
        if (price(y2, false) < 0) return objective();
        continue;
      }
      const Eigen::VectorXd u = direction(entering);
      const int leave = ratio_test(u);
      if (leave < 0)
        throw std::runtime_error("bounded-Lipschitz program reported unbounded");
      const double step = x_(leave) / u(leave);
      degenerate_run = step <= kZero ? degenerate_run + 1 : 0;
      pivot(leave, entering, u);
    }
    throw std::runtime_error("bounded-Lipschitz program: iteration limit reached");
  }

 private:
  static constexpr double kPriceTol = 1e-12;
  static constexpr double kPivotTol = 1e-11;
  static constexpr double kZero = 1e-15;
  static constexpr int kRefactorEvery = 64;

  int alpha(int k) const { return A_ + k; }
  int beta(int k) const { return A_ + K_ + k; }
  int t_col() const { return A_ + 2 * K_; }
  int e1_col() const { return A_ + 2 * K_ + 1; }
  int e2_col() const { return A_ + 2 * K_ + 2; }
  int row_a() const { return K_; }
  int row_b() const { return K_ + 1; }

  double cost(int j) const { return j == t_col() ? 0.5 : 0.0; }

  int column(int j, Entry* out) const {
    if (j < A_) {
      const Arc& a = arcs_[static_cast<std::size_t>(j)];
      out[0] = {a.from, 1.0};
      out[1] = {a.to, -1.0};
      out[2] = {row_b(), -a.length};
      return 3;
    }
    if (j < A_ + K_) {
      out[0] = {j - A_, 1.0};
      out[1] = {row_a(), -1.0};
      return 2;
    }
    if (j < A_ + 2 * K_) {
      out[0] = {j - A_ - K_, -1.0};
      out[1] = {row_a(), -1.0};
      return 2;
    }
    if (j == t_col()) {
      out[0] = {row_a(), 1.0};
      out[1] = {row_b(), 1.0};
      return 2;
    }
    if (j == e1_col()) {
      out[0] = {row_a(), -1.0};
      return 1;
    }
    out[0] = {row_b(), -1.0};
    return 1;
  }

  void initial_basis() {
    basis_.assign(static_cast<std::size_t>(rows_), 0);
    in_basis_.assign(static_cast<std::size_t>(cols_), 0);
    for (int k = 0; k < K_; ++k)
      basis_[static_cast<std::size_t>(k)] = w_[static_cast<std::size_t>(k)] >= 0.0 ? alpha(k) : beta(k);
    basis_[static_cast<std::size_t>(row_a())] = t_col();
    basis_[static_cast<std::size_t>(row_b())] = e2_col();
    for (int j : basis_) in_basis_[static_cast<std::size_t>(j)] = 1;
  }

  // The starting basis has a closed-form inverse: x_k = s_k w_k,
  // t = sum_k s_k w_k and e2 = t, with s_k = +1 for alpha_k, -1 for beta_k.
  void initial_inverse() {
    binv_ = Eigen::MatrixXd::Zero(rows_, rows_);
    for (int k = 0; k < K_; ++k) {
      const double sk = basis_[static_cast<std::size_t>(k)] == alpha(k) ? 1.0 : -1.0;
      binv_(k, k) = sk;
      binv_(row_a(), k) = sk;
      binv_(row_b(), k) = sk;
    }
    binv_(row_a(), row_a()) = 1.0;
    binv_(row_b(), row_a()) = 1.0;
    binv_(row_b(), row_b()) = -1.0;
    x_ = Eigen::VectorXd::Zero(rows_);
    for (int k = 0; k < K_; ++k) x_(k) = std::abs(w_[static_cast<std::size_t>(k)]);
    x_(row_a()) = x_(row_b()) = x_.head(K_).sum();
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rows_, rows_);
    Entry e[3];
    for (int r = 0; r < rows_; ++r) {
      const int cnt = column(basis_[static_cast<std::size_t>(r)], e);
      for (int q = 0; q < cnt; ++q) B(e[q].row, r) = e[q].value;
    }
    binv_ = B.partialPivLu().inverse();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows_);
    for (int k = 0; k < K_; ++k) rhs(k) = w_[static_cast<std::size_t>(k)];
    x_ = binv_ * rhs;
    for (int r = 0; r < rows_; ++r)
      if (x_(r) < 0.0 && x_(r) > -1e-12) x_(r) = 0.0;
  }

  // y = B^{-T} c_B; only t has a nonzero cost.
  Eigen::VectorXd duals() const {
    for (int r = 0; r < rows_; ++r)
      if (basis_[static_cast<std::size_t>(r)] == t_col()) return 0.5 * binv_.row(r).transpose();
    return Eigen::VectorXd::Zero(rows_);
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    Entry e[3];
    const int cnt = column(j, e);
    double rc = cost(j);
    for (int q = 0; q < cnt; ++q) rc -= y(e[q].row) * e[q].value;
    return rc;
  }

  // Dantzig pricing, or Bland's rule (first improving column) while stalled.
  int price(const Eigen::VectorXd& y, bool bland) const {
    int best = -1;
    double best_rc = -kPriceTol;
    for (int j = 0; j < cols_; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)]) continue;
      const double rc = reduced_cost(j, y);
      if (rc < best_rc) {
        best = j;
        best_rc = rc;
        if (bland) break;
      }
    }
    return best;
  }

  Eigen::VectorXd direction(int j) const {
    Entry e[3];
    const int cnt = column(j, e);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(rows_);
    for (int q = 0; q < cnt; ++q) u += e[q].value * binv_.col(e[q].row);
    return u;
  }

  int ratio_test(const Eigen::VectorXd& u) const {
    int leave = -1;
    double best = 0.0;
    for (int r = 0; r < rows_; ++r) {
      if (u(r) <= kPivotTol) continue;
      const double ratio = std::max(x_(r), 0.0) / u(r);
      if (leave < 0 || ratio < best - kZero ||
          (ratio <= best + kZero &&
           basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
        leave = r;
        best = ratio;
      }
    }
    return leave;
  }

  void pivot(int r, int entering, const Eigen::VectorXd& u) {
    const double theta = std::max(x_(r), 0.0) / u(r);
    x_ -= theta * u;
    x_(r) = theta;
    const Eigen::RowVectorXd pivot_row = binv_.row(r) / u(r);
    binv_.noalias() -= u * pivot_row;
    binv_.row(r) = pivot_row;
    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    basis_[static_cast<std::size_t>(r)] = entering;
    in_basis_[static_cast<std::size_t>(entering)] = 1;
  }

  double objective() const {
    double v = 0.0;
    for (int r = 0; r < rows_; ++r) v += cost(basis_[static_cast<std::size_t>(r)]) * x_(r);
    return std::max(v, 0.0);
  }

  std::vector<double> w_;
  std::vector<Arc> arcs_;
  int K_ = 0, rows_ = 0, A_ = 0, cols_ = 0;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_;
};

}  // namespace

double bounded_lipschitz(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("bounded_lipschitz: empty measure");
  if (a.dim() != b.dim())
    throw std::invalid_argument("bounded_lipschitz: dimension mismatch");
  if (detail::precedes(b, a)) return bounded_lipschitz(b, a);
  const std::size_t d = a.dim();
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());

  // Merge identical atoms; masses as exact integers over na * nb.
  struct Point {
    std::span<const double> x;
    std::int64_t mass;
  };
  std::vector<Point> pts;
  pts.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) pts.push_back({a.atom(i), nb});
  for (std::size_t j = 0; j < b.size(); ++j) pts.push_back({b.atom(j), -na});
  std::stable_sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) {
    return std::lexicographical_compare(p.x.begin(), p.x.end(), q.x.begin(), q.x.end());
  });
  std::vector<std::span<const double>> support;
  std::vector<double> weights;
  const double denom = static_cast<double>(na) * static_cast<double>(nb);
  for (std::size_t s = 0; s < pts.size();) {
    std::size_t e = s;
    std::int64_t mass = 0;
    while (e < pts.size() && std::equal(pts[e].x.begin(), pts[e].x.end(), pts[s].x.begin())) {
      mass += pts[e].mass;
      ++e;
    }
    if (mass != 0) {
      support.push_back(pts[s].x);
      weights.push_back(static_cast<double>(mass) / denom);
    }
    s = e;
  }
  if (support.empty()) return 0.0;
  if (support.size() > kMaxBoundedLipschitzSupport)
    throw std::length_error("bounded_lipschitz: merged support exceeds " +
                            std::to_string(kMaxBoundedLipschitzSupport) + " points");

  auto dist = [d](std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
  };
  std::vector<Arc> arcs;
  const int K = static_cast<int>(support.size());
  if (d == 1) {
    for (int k = 0; k + 1 < K; ++k) {
      const double len = support[static_cast<std::size_t>(k + 1)][0] - support[static_cast<std::size_t>(k)][0];
      arcs.push_back({k, k + 1, len});
      arcs.push_back({k + 1, k, len});
    }
  } else {
    arcs.reserve(static_cast<std::size_t>(K) * static_cast<std::size_t>(K - 1));
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < K; ++l)
        if (k != l)
          arcs.push_back({k, l, dist(support[static_cast<std::size_t>(k)], support[static_cast<std::size_t>(l)])});
  }
  return BoundedLipschitzProgram(std::move(weights), std::move(arcs)).solve();
}

}  // namespace gpc
