#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpc/rng.hpp"

namespace gpc {

using Matrix = Eigen::MatrixXd;

/// A symmetric kernel G : [0,1]^2 -> [0,1].
class Graphon {
 public:
  enum class Kind { Constant, Product, Min, Grid, Custom };
  using Kernel = std::function<double(double, double)>;

  static Graphon constant(double c);
  static Graphon product();
  static Graphon min();
  /// Piecewise constant on an m x m partition of [0,1]^2. Cells are left
  /// closed; u = 1 falls in the last cell.
  static Graphon grid(std::vector<std::vector<double>> values);
  /// The kernel is trusted to be symmetric and [0,1]-valued; evaluate()
  /// still rejects outputs outside [0,1].
  static Graphon custom(Kernel kernel, std::string name,
                        std::optional<double> lipschitz = std::nullopt);

  double operator()(double u, double v) const;

  Kind kind() const { return kind_; }
  double constant_value() const { return value_; }
  const std::vector<std::vector<double>>& grid_values() const { return grid_; }
  std::optional<double> lipschitz_constant() const { return lipschitz_; }
  std::string name() const;

 private:
  Graphon() = default;

  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::vector<std::vector<double>> grid_;
  Kernel kernel_;
  std::string custom_name_;
  std::optional<double> lipschitz_;
};

double evaluate(const Graphon& g, double u, double v);

/// Global edge-retention sequence p(n).
struct SparsityRule {
  enum class Form { Dense, PowerLaw };

  Form form = Form::Dense;
  double gamma = 0.0;

  static SparsityRule dense() { return {}; }
  static SparsityRule power_law(double gamma);

  double p(std::size_t n) const;
  /// n p(n) -> infinity.
  bool degree_diverges() const;
  /// Dense, or p(n) -> 0 with n p(n)^2 -> infinity.
  bool squared_degree_condition() const;
  std::string name() const;
};

struct AdjacencySample {
  std::size_t n = 0;
  double p = 1.0;
  Matrix xi;  // symmetric, entries in {0, 1}
};

/// P = xi / (n p), Pbar = G(i/n, j/n) / n, D = P - Pbar.
struct InteractionMatrices {
  Matrix P;
  Matrix Pbar;
  Matrix D;
};

/// Entry (i, j), zero based, is G((i+1)/n, (j+1)/n) / n.
Matrix weight_matrix(const Graphon& g, std::size_t n);

/// Draws the upper triangle (diagonal included) row by row from rng as
/// independent Bernoulli(p G(i/n, j/n)) and mirrors it.
AdjacencySample sample_adjacency(const Graphon& g, std::size_t n, double p,
                                 StreamRng& rng);

InteractionMatrices interaction_matrices(const AdjacencySample& a,
                                         const Graphon& g);

/// Dense 0/1 CSV, one row per line.
void write_adjacency_csv(std::ostream& os, const AdjacencySample& a);

}  // namespace gpc
