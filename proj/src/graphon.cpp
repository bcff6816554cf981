#include "gpc/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gpc {

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "graphon argument " << what << " = " << x << " outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

std::size_t cell_of(double u, std::size_t m) {
  const auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(m)));
  return std::min(k, m - 1);
}

}  // namespace

Graphon Graphon::constant(double c) {
  if (!(c >= 0.0 && c <= 1.0))
    throw std::invalid_argument("constant graphon value must lie in [0, 1]");
  Graphon g;
  g.kind_ = Kind::Constant;
  g.value_ = c;
  g.lipschitz_ = 0.0;
  return g;
}

Graphon Graphon::product() {
  Graphon g;
  g.kind_ = Kind::Product;
  g.lipschitz_ = 1.0;
  return g;
}

Graphon Graphon::min() {
  Graphon g;
  g.kind_ = Kind::Min;
  g.lipschitz_ = 1.0;
  return g;
}

Graphon Graphon::grid(std::vector<std::vector<double>> values) {
  const std::size_t m = values.size();
  if (m == 0) throw std::invalid_argument("grid graphon needs at least one cell");
  for (std::size_t i = 0; i < m; ++i) {
    if (values[i].size() != m)
      throw std::invalid_argument("grid graphon values must be square");
    for (std::size_t j = 0; j < m; ++j) {
      const double x = values[i][j];
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("grid graphon values must lie in [0, 1]");
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (values[i][j] != values[j][i])
        throw std::invalid_argument("grid graphon values must be symmetric");
  Graphon g;
  g.kind_ = Kind::Grid;
  g.grid_ = std::move(values);
  // Constant on blocks, so Lipschitz (constant 0) within each block pair.
  g.lipschitz_ = 0.0;
  return g;
}

Graphon Graphon::custom(Kernel kernel, std::string name,
                        std::optional<double> lipschitz) {
  if (!kernel) throw std::invalid_argument("custom graphon needs a kernel");
  Graphon g;
  g.kind_ = Kind::Custom;
  g.kernel_ = std::move(kernel);
  g.custom_name_ = std::move(name);
  g.lipschitz_ = lipschitz;
  return g;
}

double Graphon::operator()(double u, double v) const {
  check_unit(u, "u");
  check_unit(v, "v");
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Product:
      return u * v;
    case Kind::Min:
      return std::min(u, v);
    case Kind::Grid:
      return grid_[cell_of(u, grid_.size())][cell_of(v, grid_.size())];
    case Kind::Custom: {
      const double x = kernel_(u, v);
      if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("custom graphon returned a value outside [0, 1]");
      return x;
    }
  }
  return 0.0;
}

std::string Graphon::name() const {
  switch (kind_) {
    case Kind::Constant: {
      std::ostringstream s;
      s << "constant(" << value_ << ")";
      return s.str();
    }
    case Kind::Product:
      return "product";
    case Kind::Min:
      return "min";
    case Kind::Grid:
      return "grid(" + std::to_string(grid_.size()) + ")";
    case Kind::Custom:
      return custom_name_;
  }
  return {};
}

double evaluate(const Graphon& g, double u, double v) { return g(u, v); }

SparsityRule SparsityRule::power_law(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("power-law sparsity exponent must be positive");
  return {Form::PowerLaw, gamma};
}

double SparsityRule::p(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("p(n) needs n >= 1");
  if (form == Form::Dense) return 1.0;
  return std::pow(static_cast<double>(n), -gamma);
}

bool SparsityRule::degree_diverges() const {
  return form == Form::Dense || gamma < 1.0;
}

bool SparsityRule::squared_degree_condition() const {
  return form == Form::Dense || gamma < 0.5;
}

std::string SparsityRule::name() const {
  if (form == Form::Dense) return "dense";
  std::ostringstream s;
  s << "power_law(" << gamma << ")";
  return s.str();
}

Matrix weight_matrix(const Graphon& g, std::size_t n) {
  if (n == 0) throw std::invalid_argument("weight_matrix needs n >= 1");
  const double dn = static_cast<double>(n);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i + 1) / dn;
    for (std::size_t j = i; j < n; ++j) {
      const double v = static_cast<double>(j + 1) / dn;
      const double x = g(u, v) / dn;
      w(i, j) = x;
      w(j, i) = x;
    }
  }
  return w;
}

AdjacencySample sample_adjacency(const Graphon& g, std::size_t n, double p,
                                 StreamRng& rng) {
  if (n == 0) throw std::invalid_argument("sample_adjacency needs n >= 1");
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("edge probability p must lie in (0, 1]");
  const double dn = static_cast<double>(n);
  AdjacencySample a{n, p, Matrix::Zero(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i + 1) / dn;
    for (std::size_t j = i; j < n; ++j) {
      const double v = static_cast<double>(j + 1) / dn;
      const double x = rng.bernoulli(p * g(u, v)) ? 1.0 : 0.0;
      a.xi(i, j) = x;
      a.xi(j, i) = x;
    }
  }
  return a;
}

InteractionMatrices interaction_matrices(const AdjacencySample& a,
                                         const Graphon& g) {
  if (static_cast<std::size_t>(a.xi.rows()) != a.n ||
      static_cast<std::size_t>(a.xi.cols()) != a.n)
    throw std::invalid_argument("adjacency sample has inconsistent dimensions");
  InteractionMatrices m;
  m.P = a.xi / (static_cast<double>(a.n) * a.p);
  m.Pbar = weight_matrix(g, a.n);
  m.D = m.P - m.Pbar;
  return m;
}

void write_adjacency_csv(std::ostream& os, const AdjacencySample& a) {
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) {
      if (j) os << ',';
      os << (a.xi(i, j) != 0.0 ? '1' : '0');
    }
    os << '\n';
  }
}

}  // namespace gpc
