#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpc/graphon.hpp"

namespace gpc {

// ---------------------------------------------------------------------------
// L1-Fourier representation of a pairwise interaction.
//
// f(x, y) = sum_k w_k exp(2 pi i <(x, y), z_k>) for a finite atomic measure
// sum_k w_k delta_{z_k} on R^{2d}. The first d coordinates of z_k pair with x.
// ---------------------------------------------------------------------------

struct FourierAtom {
  std::vector<double> z;  // length 2d
  std::complex<double> weight;
};

class FourierInteraction {
 public:
  static constexpr double kImaginaryTolerance = 1e-10;

  FourierInteraction() = default;
  FourierInteraction(std::size_t dim, std::vector<FourierAtom> atoms);

  /// K sin(y - x) on R x R: atoms +-(-1, 1) / (2 pi) with weights
  /// +-K / (2i).
  static FourierInteraction kuramoto(double coupling);
  /// Atoms (-1, 1) and (1, -1) both weighted K / (2i), without the 1/(2 pi)
  /// frequency scaling. Kept for comparison only; it does not reproduce
  /// K sin(y - x).
  static FourierInteraction kuramoto_unscaled(double coupling);

  std::size_t dim() const { return dim_; }
  const std::vector<FourierAtom>& atoms() const { return atoms_; }
  /// m_r^+ + m_r^- + m_i^+ + m_i^-, i.e. sum of |Re w| + |Im w|.
  double total_mass() const { return total_mass_; }

  std::complex<double> evaluate_complex(std::span<const double> x,
                                        std::span<const double> y) const;

 private:
  std::size_t dim_ = 0;
  std::vector<FourierAtom> atoms_;
  double total_mass_ = 0.0;
};

/// Real part of the Fourier integral; throws std::domain_error when the
/// imaginary part exceeds FourierInteraction::kImaginaryTolerance.
double fourier_evaluate(const FourierInteraction& fi, std::span<const double> x,
                        std::span<const double> y);

// ---------------------------------------------------------------------------
// Interaction model (phi, psi, sigma).
// ---------------------------------------------------------------------------

struct InteractionModel {
  using PairFn = std::function<void(std::span<const double> x,
                                    std::span<const double> y,
                                    std::span<double> out)>;
  using SiteFn =
      std::function<void(std::span<const double> x, std::span<double> out)>;

  std::string name;
  std::size_t dim = 1;
  PairFn phi;
  SiteFn psi;
  Matrix sigma;              // dim x dim
  double lipschitz_K = 0.0;  // joint constant for phi and psi
  double phi_bound = 0.0;    // sup |phi|, +inf when unbounded
  /// One entry per output component of phi, when phi has a finite atomic
  /// Fourier representation. Enables the O(n^2) matrix-product drift.
  std::optional<std::vector<FourierInteraction>> fourier;

  static InteractionModel kuramoto(double coupling, double sigma);
  static InteractionModel linear_attraction(std::size_t dim, double sigma);
  static InteractionModel zero(std::size_t dim, double sigma);

  /// Replaces psi with the Ornstein-Uhlenbeck pull psi(x) = -theta x.
  InteractionModel with_ou(double theta) const;
};

struct LipschitzReport {
  bool lipschitz_ok = true;
  bool bounded_ok = true;
  double worst_ratio = 0.0;  // max observed |delta f| / (K |delta arg|)
  double max_phi = 0.0;
};

/// Random spot check of the Lipschitz and boundedness constants claimed by
/// the model.
LipschitzReport spot_check(const InteractionModel& model,
                           std::size_t pairs = 1000, std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Initial law mu_{u,0}.
// ---------------------------------------------------------------------------

class InitialLaw {
 public:
  enum class Kind { Gaussian, PointMass, UniformBox };

  static InitialLaw gaussian(std::vector<double> mean, Matrix covariance);
  static InitialLaw standard_gaussian(std::size_t dim, double stddev = 1.0);
  static InitialLaw point_mass(std::vector<double> x);
  static InitialLaw uniform_box(std::vector<double> lo, std::vector<double> hi);

  /// Location shift slope * u, so that u -> mu_{u,0} is W2-Lipschitz.
  InitialLaw with_mean_slope(std::vector<double> slope) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return location_.size(); }
  const std::vector<double>& location() const { return location_; }
  const Matrix& covariance() const { return covariance_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<double>& mean_slope() const { return slope_; }

  /// Draws X_u(0) for one particle from the addressable stream `key`.
  void sample(double u, std::uint64_t key, std::uint64_t particle,
              std::span<double> out) const;

 private:
  Kind kind_ = Kind::PointMass;
  std::vector<double> location_;  // mean, atom, or lower corner
  Matrix covariance_;
  Matrix factor_;  // covariance = factor * factor^T
  std::vector<double> upper_;
  std::vector<double> slope_;
};

// ---------------------------------------------------------------------------
// Time grid and path storage.
// ---------------------------------------------------------------------------

struct TimeGrid {
  double T = 1.0;
  std::size_t M = 100;

  TimeGrid() = default;
  TimeGrid(double horizon, std::size_t steps);

  double h() const { return T / static_cast<double>(M); }
  double time(std::size_t m) const {
    return T * static_cast<double>(m) / static_cast<double>(M);
  }
  std::size_t points() const { return M + 1; }
};

/// n particles x (M+1) grid points x d coordinates, stored time major so that
/// the full state at one grid point is contiguous.
class PathArray {
 public:
  PathArray() = default;
  PathArray(std::size_t particles, std::size_t points, std::size_t dim)
      : n_(particles), points_(points), d_(dim),
        data_(particles * points * dim, 0.0) {}

  std::size_t particles() const { return n_; }
  std::size_t points() const { return points_; }
  std::size_t dim() const { return d_; }

  double& at(std::size_t i, std::size_t m, std::size_t k) {
    return data_[(m * n_ + i) * d_ + k];
  }
  double at(std::size_t i, std::size_t m, std::size_t k) const {
    return data_[(m * n_ + i) * d_ + k];
  }
  std::span<double> state(std::size_t m) {
    return {data_.data() + m * n_ * d_, n_ * d_};
  }
  std::span<const double> state(std::size_t m) const {
    return {data_.data() + m * n_ * d_, n_ * d_};
  }

  bool operator==(const PathArray&) const = default;

 private:
  std::size_t n_ = 0, points_ = 0, d_ = 0;
  std::vector<double> data_;
};

struct CoupledPaths {
  std::size_t n = 0;
  double p = 1.0;
  TimeGrid grid;
  PathArray x_sparse;  // X^n, random-graph weights P
  PathArray x_weight;  // Xbar^n, deterministic weights Pbar
  bool overflow = false;
  std::size_t failed_step = 0;
  std::string diagnostic;
};

struct ReferenceEnsemble {
  std::size_t n_ref = 0;
  TimeGrid grid;
  PathArray paths;
};

// ---------------------------------------------------------------------------
// Drift and integration.
// ---------------------------------------------------------------------------

/// Evaluates row i = sum_j W[i][j] phi(x_i, x_j) + psi(x_i) for a fixed
/// weight matrix W.
class DriftEvaluator {
 public:
  DriftEvaluator(const InteractionModel& model, const Matrix& weights,
                 bool use_fourier = true);

  void operator()(std::span<const double> state, std::span<double> out) const;

 private:
  void interaction_direct(std::span<const double> state,
                          std::span<double> out) const;
  void interaction_fourier(std::span<const double> state,
                           std::span<double> out) const;

  const InteractionModel& model_;
  const Matrix& weights_;
  bool use_fourier_;
};

void drift_sparse(const InteractionModel& model, const InteractionMatrices& m,
                  std::span<const double> state, std::span<double> out);
void drift_weight(const InteractionModel& model, const InteractionMatrices& m,
                  std::span<const double> state, std::span<double> out);

/// Fills the n*d raw Brownian increments for the step [t_m, t_{m+1}].
using IncrementSource =
    std::function<void(std::size_t step, std::span<double> increments)>;

struct IntegrationResult {
  PathArray paths;
  bool overflow = false;
  std::size_t failed_step = 0;
  std::string diagnostic;
};

/// Euler-Maruyama for a single system with weights W:
/// x_{m+1} = x_m + drift(x_m) h + sigma dB_m.
IntegrationResult integrate_system(const InteractionModel& model,
                                   const Matrix& weights,
                                   std::span<const double> initial,
                                   const TimeGrid& grid,
                                   const IncrementSource& increments);

/// Standard normal increments scaled by sqrt(h), addressed by
/// (key, particle, step, coordinate).
IncrementSource brownian_increments(std::uint64_t key, std::size_t n,
                                    std::size_t dim, const TimeGrid& grid);

/// Initial states X_{i/n}(0), i = 1..n, as an n*d row-major block.
std::vector<double> initial_states(const InitialLaw& law, std::size_t n,
                                   std::uint64_t key);

/// The adjacency sample used by replication `replication` of a run.
AdjacencySample replication_adjacency(const Graphon& g,
                                      const SparsityRule& sparsity,
                                      std::size_t n, std::uint64_t master_seed,
                                      std::uint64_t replication);

/// Simulates the random-graph and deterministic-weight systems on shared
/// initial states and Brownian increments. The adjacency is sampled once and
/// frozen for the whole path. A non-finite state stops both systems and sets
/// `overflow`.
CoupledPaths simulate_coupled(const InteractionModel& model,
                              const InitialLaw& initial, const Graphon& graphon,
                              const SparsityRule& sparsity, std::size_t n,
                              const TimeGrid& grid, std::uint64_t master_seed,
                              std::uint64_t replication = 0);

/// Large deterministic-weight system used as a proxy for the averaged law of
/// the graphon system. Draws from streams disjoint from every replication.
/// Throws std::invalid_argument for n_ref < 2 and std::runtime_error on
/// overflow.
ReferenceEnsemble simulate_reference(const InteractionModel& model,
                                     const InitialLaw& initial,
                                     const Graphon& graphon, std::size_t n_ref,
                                     const TimeGrid& grid,
                                     std::uint64_t master_seed);

/// 1 - |mean exp(i x)| at every grid point (d = 1 only).
std::vector<double> circular_variance(const PathArray& paths);

/// Columns: replication, particle, step, coordinate, value.
void write_paths_csv(std::ostream& os, const PathArray& paths,
                     std::uint64_t replication, bool header = true);

}  // namespace gpc
