#include "gpc/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gpc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

Matrix scalar_sigma(std::size_t dim, double sigma) {
  return sigma * Matrix::Identity(static_cast<Eigen::Index>(dim),
                                  static_cast<Eigen::Index>(dim));
}

bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

void apply_sigma(const Matrix& sigma, std::size_t n, std::size_t d,
                 std::span<const double> dB, std::span<double> noise) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c)
        s += sigma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
             dB[i * d + c];
      noise[i * d + r] = s;
    }
  }
}

}  // namespace

// --- FourierInteraction ----------------------------------------------------

FourierInteraction::FourierInteraction(std::size_t dim,
                                       std::vector<FourierAtom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim_ == 0) throw std::invalid_argument("Fourier interaction needs dim >= 1");
  for (const auto& a : atoms_) {
    if (a.z.size() != 2 * dim_)
      throw std::invalid_argument("Fourier atom frequency must have length 2d");
    total_mass_ += std::abs(a.weight.real()) + std::abs(a.weight.imag());
  }
}

FourierInteraction FourierInteraction::kuramoto(double coupling) {
  const double f = 1.0 / kTwoPi;
  // K/(2i) = -iK/2.
  const std::complex<double> w(0.0, -coupling / 2.0);
  return FourierInteraction(1, {{{-f, f}, w}, {{f, -f}, -w}});
}

FourierInteraction FourierInteraction::kuramoto_unscaled(double coupling) {
  const std::complex<double> w(0.0, -coupling / 2.0);
  return FourierInteraction(1, {{{-1.0, 1.0}, w}, {{1.0, -1.0}, w}});
}

std::complex<double> FourierInteraction::evaluate_complex(
    std::span<const double> x, std::span<const double> y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw std::invalid_argument("Fourier evaluation: dimension mismatch");
  std::complex<double> acc(0.0, 0.0);
  for (const auto& a : atoms_) {
    const double phase =
        kTwoPi * (dot(x, a.z.data()) + dot(y, a.z.data() + dim_));
    acc += a.weight * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

double fourier_evaluate(const FourierInteraction& fi, std::span<const double> x,
                        std::span<const double> y) {
  const auto v = fi.evaluate_complex(x, y);
  if (std::abs(v.imag()) > FourierInteraction::kImaginaryTolerance) {
    std::ostringstream msg;
    msg << "Fourier interaction has imaginary residue " << v.imag()
        << "; the measure does not represent a real function";
    throw std::domain_error(msg.str());
  }
  return v.real();
}

// --- InteractionModel ------------------------------------------------------

InteractionModel InteractionModel::kuramoto(double coupling, double sigma) {
  InteractionModel m;
  m.name = "kuramoto";
  m.dim = 1;
  m.phi = [coupling](std::span<const double> x, std::span<const double> y,
                     std::span<double> out) {
    out[0] = coupling * std::sin(y[0] - x[0]);
  };
  m.psi = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  m.sigma = scalar_sigma(1, sigma);
  m.lipschitz_K = std::abs(coupling);
  m.phi_bound = std::abs(coupling);
  m.fourier = std::vector<FourierInteraction>{FourierInteraction::kuramoto(coupling)};
  return m;
}

InteractionModel InteractionModel::linear_attraction(std::size_t dim,
                                                     double sigma) {
  InteractionModel m;
  m.name = "linear_attraction";
  m.dim = dim;
  m.phi = [](std::span<const double> x, std::span<const double> y,
             std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = y[k] - x[k];
  };
  m.psi = [](std::span<const double>, std::span<double> out) {
    for (double& o : out) o = 0.0;
  };
  m.sigma = scalar_sigma(dim, sigma);
  m.lipschitz_K = 1.0;
  m.phi_bound = std::numeric_limits<double>::infinity();
  return m;
}

InteractionModel InteractionModel::zero(std::size_t dim, double sigma) {
  InteractionModel m;
  m.name = "zero";
  m.dim = dim;
  m.phi = [](std::span<const double>, std::span<const double>,
             std::span<double> out) {
    for (double& o : out) o = 0.0;
  };
  m.psi = [](std::span<const double>, std::span<double> out) {
    for (double& o : out) o = 0.0;
  };
  m.sigma = scalar_sigma(dim, sigma);
  m.lipschitz_K = 0.0;
  m.phi_bound = 0.0;
  m.fourier = std::vector<FourierInteraction>(dim, FourierInteraction(dim, {}));
  return m;
}

InteractionModel InteractionModel::with_ou(double theta) const {
  InteractionModel m = *this;
  m.psi = [theta](std::span<const double> x, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -theta * x[k];
  };
  m.lipschitz_K += std::abs(theta);
  return m;
}

LipschitzReport spot_check(const InteractionModel& model, std::size_t pairs,
                           std::uint64_t seed) {
  const std::size_t d = model.dim;
  StreamRng rng(seed, 0, Stream::Test);
  std::vector<double> x1(d), y1(d), x2(d), y2(d), p1(d), p2(d), s1(d), s2(d);
  LipschitzReport report;
  for (std::size_t t = 0; t < pairs; ++t) {
    // Mix of nearby and far-apart pairs at several scales.
    const double scale = (t % 3 == 0) ? 0.1 : (t % 3 == 1 ? 1.0 : 5.0);
    for (std::size_t k = 0; k < d; ++k) {
      x1[k] = 3.0 * rng.normal();
      y1[k] = 3.0 * rng.normal();
      x2[k] = x1[k] + scale * rng.normal();
      y2[k] = y1[k] + scale * rng.normal();
    }
    model.phi(x1, y1, p1);
    model.phi(x2, y2, p2);
    model.psi(x1, s1);
    model.psi(x2, s2);
    std::vector<double> dphi(d), dpsi(d), dx(d), dy(d);
    for (std::size_t k = 0; k < d; ++k) {
      dphi[k] = p1[k] - p2[k];
      dpsi[k] = s1[k] - s2[k];
      dx[k] = x1[k] - x2[k];
      dy[k] = y1[k] - y2[k];
    }
    const double lhs = norm(dphi) + norm(dpsi);
    const double rhs = model.lipschitz_K * (norm(dx) + norm(dy));
    if (rhs > 0.0) report.worst_ratio = std::max(report.worst_ratio, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-12) report.lipschitz_ok = false;
    const double mag = norm(p1);
    report.max_phi = std::max(report.max_phi, mag);
    if (mag > model.phi_bound * (1.0 + 1e-12) + 1e-12) report.bounded_ok = false;
  }
  if (!std::isfinite(model.phi_bound)) report.bounded_ok = false;
  return report;
}

// --- InitialLaw ------------------------------------------------------------

InitialLaw InitialLaw::gaussian(std::vector<double> mean, Matrix covariance) {
  const auto d = static_cast<Eigen::Index>(mean.size());
  if (d == 0) throw std::invalid_argument("Gaussian initial law needs dim >= 1");
  if (covariance.rows() != d || covariance.cols() != d)
    throw std::invalid_argument("covariance must be d x d");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
    throw std::invalid_argument("covariance must be positive semidefinite");
  InitialLaw law;
  law.kind_ = Kind::Gaussian;
  law.location_ = std::move(mean);
  law.covariance_ = covariance;
  law.factor_ = eig.eigenvectors() *
                eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return law;
}

InitialLaw InitialLaw::standard_gaussian(std::size_t dim, double stddev) {
  const auto d = static_cast<Eigen::Index>(dim);
  return gaussian(std::vector<double>(dim, 0.0),
                  stddev * stddev * Matrix::Identity(d, d));
}

InitialLaw InitialLaw::point_mass(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("point mass needs dim >= 1");
  InitialLaw law;
  law.kind_ = Kind::PointMass;
  law.location_ = std::move(x);
  return law;
}

InitialLaw InitialLaw::uniform_box(std::vector<double> lo,
                                   std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("uniform box corners must have equal dim >= 1");
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (!(lo[k] <= hi[k]))
      throw std::invalid_argument("uniform box needs lo <= hi");
  InitialLaw law;
  law.kind_ = Kind::UniformBox;
  law.location_ = std::move(lo);
  law.upper_ = std::move(hi);
  return law;
}

InitialLaw InitialLaw::with_mean_slope(std::vector<double> slope) const {
  if (!slope.empty() && slope.size() != dim())
    throw std::invalid_argument("mean slope must have the law's dimension");
  InitialLaw law = *this;
  law.slope_ = std::move(slope);
  return law;
}

void InitialLaw::sample(double u, std::uint64_t key, std::uint64_t particle,
                        std::span<double> out) const {
  const std::size_t d = dim();
  switch (kind_) {
    case Kind::PointMass:
      for (std::size_t k = 0; k < d; ++k) out[k] = location_[k];
      break;
    case Kind::UniformBox:
      for (std::size_t k = 0; k < d; ++k) {
        const double w = uniform_at(key, particle, 0u, static_cast<std::uint32_t>(k));
        out[k] = location_[k] + (upper_[k] - location_[k]) * w;
      }
      break;
    case Kind::Gaussian: {
      std::vector<double> z(d);
      for (std::size_t k = 0; k < d; ++k)
        z[k] = normal_at(key, particle, 0u, static_cast<std::uint32_t>(k));
      for (std::size_t r = 0; r < d; ++r) {
        double s = location_[r];
        for (std::size_t c = 0; c < d; ++c)
          s += factor_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * z[c];
        out[r] = s;
      }
      break;
    }
  }
  if (!slope_.empty())
    for (std::size_t k = 0; k < d; ++k) out[k] += slope_[k] * u;
}

// --- TimeGrid --------------------------------------------------------------

TimeGrid::TimeGrid(double horizon, std::size_t steps) : T(horizon), M(steps) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("time horizon must be positive");
  if (M < 1) throw std::invalid_argument("time grid needs at least one step");
}

// --- Drift -----------------------------------------------------------------

DriftEvaluator::DriftEvaluator(const InteractionModel& model,
                               const Matrix& weights, bool use_fourier)
    : model_(model), weights_(weights),
      use_fourier_(use_fourier && model.fourier.has_value()) {
  if (weights.rows() != weights.cols())
    throw std::invalid_argument("weight matrix must be square");
  if (model.fourier && model.fourier->size() != model.dim)
    throw std::invalid_argument("Fourier representation needs one entry per component");
}

void DriftEvaluator::operator()(std::span<const double> state,
                                std::span<double> out) const {
  const std::size_t n = static_cast<std::size_t>(weights_.rows());
  const std::size_t d = model_.dim;
  if (state.size() != n * d || out.size() != n * d)
    throw std::invalid_argument("drift: state has inconsistent dimensions");
  std::fill(out.begin(), out.end(), 0.0);
  if (use_fourier_)
    interaction_fourier(state, out);
  else
    interaction_direct(state, out);
  std::vector<double> site(d);
  for (std::size_t i = 0; i < n; ++i) {
    model_.psi(state.subspan(i * d, d), site);
    for (std::size_t k = 0; k < d; ++k) out[i * d + k] += site[k];
  }
}

void DriftEvaluator::interaction_direct(std::span<const double> state,
                                        std::span<double> out) const {
  const std::size_t n = static_cast<std::size_t>(weights_.rows());
  const std::size_t d = model_.dim;
  std::vector<double> pair(d);
  for (std::size_t j = 0; j < n; ++j) {
    const auto xj = state.subspan(j * d, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w == 0.0) continue;
      model_.phi(state.subspan(i * d, d), xj, pair);
      for (std::size_t k = 0; k < d; ++k) out[i * d + k] += w * pair[k];
    }
  }
}

void DriftEvaluator::interaction_fourier(std::span<const double> state,
                                         std::span<double> out) const {
  const std::size_t n = static_cast<std::size_t>(weights_.rows());
  const std::size_t d = model_.dim;
  struct Term {
    std::size_t component;
    const FourierAtom* atom;
  };
  std::vector<Term> terms;
  for (std::size_t c = 0; c < d; ++c)
    for (const auto& a : (*model_.fourier)[c].atoms()) terms.push_back({c, &a});
  if (terms.empty()) return;

  // Columns 2a, 2a+1 hold cos and sin of 2 pi <x_j, z_y> for atom a.
  const auto cols = static_cast<Eigen::Index>(2 * terms.size());
  Matrix waves(static_cast<Eigen::Index>(n), cols);
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const double* zy = terms[a].atom->z.data() + d;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = kTwoPi * dot(state.subspan(j * d, d), zy);
      waves(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(2 * a)) = std::cos(phase);
      waves(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(2 * a + 1)) = std::sin(phase);
    }
  }
  const Matrix mixed = weights_ * waves;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const double* zx = terms[a].atom->z.data();
    const std::complex<double> w = terms[a].atom->weight;
    const std::size_t c = terms[a].component;
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = kTwoPi * dot(state.subspan(i * d, d), zx);
      const std::complex<double> v(
          mixed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * a)),
          mixed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * a + 1)));
      out[i * d + c] +=
          (w * std::complex<double>(std::cos(phase), std::sin(phase)) * v).real();
    }
  }
}

void drift_sparse(const InteractionModel& model, const InteractionMatrices& m,
                  std::span<const double> state, std::span<double> out) {
  DriftEvaluator(model, m.P)(state, out);
}

void drift_weight(const InteractionModel& model, const InteractionMatrices& m,
                  std::span<const double> state, std::span<double> out) {
  DriftEvaluator(model, m.Pbar)(state, out);
}

// --- Integration -----------------------------------------------------------

IncrementSource brownian_increments(std::uint64_t key, std::size_t n,
                                    std::size_t dim, const TimeGrid& grid) {
  const double root_h = std::sqrt(grid.h());
  return [key, n, dim, root_h](std::size_t step, std::span<double> dB) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        dB[i * dim + k] = root_h * normal_at(key, i, static_cast<std::uint32_t>(step),
                                             static_cast<std::uint32_t>(k + 1));
  };
}

std::vector<double> initial_states(const InitialLaw& law, std::size_t n,
                                   std::uint64_t key) {
  const std::size_t d = law.dim();
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i)
    law.sample(static_cast<double>(i + 1) / static_cast<double>(n), key, i,
               std::span<double>(x).subspan(i * d, d));
  return x;
}

IntegrationResult integrate_system(const InteractionModel& model,
                                   const Matrix& weights,
                                   std::span<const double> initial,
                                   const TimeGrid& grid,
                                   const IncrementSource& increments) {
  const std::size_t n = static_cast<std::size_t>(weights.rows());
  const std::size_t d = model.dim;
  if (initial.size() != n * d)
    throw std::invalid_argument("initial state has inconsistent dimensions");
  IntegrationResult res;
  res.paths = PathArray(n, grid.points(), d);
  std::copy(initial.begin(), initial.end(), res.paths.state(0).begin());
  const DriftEvaluator drift(model, weights);
  const double h = grid.h();
  std::vector<double> b(n * d), dB(n * d), noise(n * d);
  for (std::size_t m = 0; m < grid.M; ++m) {
    const auto cur = res.paths.state(m);
    auto next = res.paths.state(m + 1);
    drift(cur, b);
    increments(m, dB);
    apply_sigma(model.sigma, n, d, dB, noise);
    for (std::size_t r = 0; r < n * d; ++r) next[r] = cur[r] + b[r] * h + noise[r];
    if (!all_finite(next)) {
      res.overflow = true;
      res.failed_step = m + 1;
      res.diagnostic = "non-finite state at step " + std::to_string(m + 1);
      break;
    }
  }
  return res;
}

AdjacencySample replication_adjacency(const Graphon& g,
                                      const SparsityRule& sparsity,
                                      std::size_t n, std::uint64_t master_seed,
                                      std::uint64_t replication) {
  StreamRng rng(master_seed, replication, Stream::Adjacency);
  return sample_adjacency(g, n, sparsity.p(n), rng);
}

CoupledPaths simulate_coupled(const InteractionModel& model,
                              const InitialLaw& initial, const Graphon& graphon,
                              const SparsityRule& sparsity, std::size_t n,
                              const TimeGrid& grid, std::uint64_t master_seed,
                              std::uint64_t replication) {
  if (n == 0) throw std::invalid_argument("simulate_coupled needs n >= 1");
  if (initial.dim() != model.dim)
    throw std::invalid_argument("initial law and model dimensions differ");
  const std::size_t d = model.dim;

  const auto adjacency =
      replication_adjacency(graphon, sparsity, n, master_seed, replication);
  const auto mats = interaction_matrices(adjacency, graphon);

  CoupledPaths out;
  out.n = n;
  out.p = adjacency.p;
  out.grid = grid;
  out.x_sparse = PathArray(n, grid.points(), d);
  out.x_weight = PathArray(n, grid.points(), d);

  const auto x0 = initial_states(
      initial, n, stream_key(master_seed, replication, Stream::Initial));
  std::copy(x0.begin(), x0.end(), out.x_sparse.state(0).begin());
  std::copy(x0.begin(), x0.end(), out.x_weight.state(0).begin());

  const DriftEvaluator drift_s(model, mats.P);
  const DriftEvaluator drift_w(model, mats.Pbar);
  const auto increments = brownian_increments(
      stream_key(master_seed, replication, Stream::Brownian), n, d, grid);

  const double h = grid.h();
  std::vector<double> bs(n * d), bw(n * d), dB(n * d), noise(n * d);
  for (std::size_t m = 0; m < grid.M; ++m) {
    const auto cs = out.x_sparse.state(m);
    const auto cw = out.x_weight.state(m);
    auto ns = out.x_sparse.state(m + 1);
    auto nw = out.x_weight.state(m + 1);
    drift_s(cs, bs);
    drift_w(cw, bw);
    increments(m, dB);
    apply_sigma(model.sigma, n, d, dB, noise);
    for (std::size_t r = 0; r < n * d; ++r) {
      ns[r] = cs[r] + bs[r] * h + noise[r];
      nw[r] = cw[r] + bw[r] * h + noise[r];
    }
    if (!all_finite(ns) || !all_finite(nw)) {
      out.overflow = true;
      out.failed_step = m + 1;
      out.diagnostic = "non-finite state at step " + std::to_string(m + 1) +
                       " (n = " + std::to_string(n) + ", replication " +
                       std::to_string(replication) + ")";
      break;
    }
  }
  return out;
}

ReferenceEnsemble simulate_reference(const InteractionModel& model,
                                     const InitialLaw& initial,
                                     const Graphon& graphon, std::size_t n_ref,
                                     const TimeGrid& grid,
                                     std::uint64_t master_seed) {
  if (n_ref < 2) throw std::invalid_argument("reference ensemble needs N_ref >= 2");
  if (initial.dim() != model.dim)
    throw std::invalid_argument("initial law and model dimensions differ");
  // Replication index all-ones keeps the reference keys apart from every
  // replication key even for equal stream tags.
  constexpr std::uint64_t kReferenceSlot = ~std::uint64_t{0};
  const Matrix weights = weight_matrix(graphon, n_ref);
  const auto x0 = initial_states(
      initial, n_ref, stream_key(master_seed, kReferenceSlot, Stream::ReferenceInitial));
  auto res = integrate_system(
      model, weights, x0, grid,
      brownian_increments(
          stream_key(master_seed, kReferenceSlot, Stream::ReferenceBrownian),
          n_ref, model.dim, grid));
  if (res.overflow)
    throw std::runtime_error("reference ensemble overflowed: " + res.diagnostic);
  return {n_ref, grid, std::move(res.paths)};
}

std::vector<double> circular_variance(const PathArray& paths) {
  if (paths.dim() != 1)
    throw std::invalid_argument("circular variance needs one-dimensional phases");
  std::vector<double> out(paths.points());
  const double n = static_cast<double>(paths.particles());
  for (std::size_t m = 0; m < paths.points(); ++m) {
    double c = 0.0, s = 0.0;
    for (double x : paths.state(m)) {
      c += std::cos(x);
      s += std::sin(x);
    }
    out[m] = 1.0 - std::hypot(c / n, s / n);
  }
  return out;
}

void write_paths_csv(std::ostream& os, const PathArray& paths,
                     std::uint64_t replication, bool header) {
  if (header) os << "replication,particle,step,coordinate,value\n";
  char buf[32];
  for (std::size_t i = 0; i < paths.particles(); ++i)
    for (std::size_t m = 0; m < paths.points(); ++m)
      for (std::size_t k = 0; k < paths.dim(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", paths.at(i, m, k));
        os << replication << ',' << i << ',' << m << ',' << k << ',' << buf << '\n';
      }
}

}  // namespace gpc
