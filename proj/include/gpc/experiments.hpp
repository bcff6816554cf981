#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpc/dynamics.hpp"
#include "gpc/graphon.hpp"
#include "gpc/matnorm.hpp"
#include "gpc/metrics.hpp"
#include "gpc/stats.hpp"

namespace gpc {

inline constexpr const char* kVersion = "0.1.0";

enum class Comparison { SparseVsWeight, WeightVsReference, SparseVsReference };

std::string to_string(Comparison c);
Comparison comparison_from_string(const std::string& s);

struct ModelSpec {
  std::string name = "kuramoto";  // kuramoto | linear_attraction | zero
  double coupling = 1.0;          // K of kuramoto
  std::size_t dim = 1;            // ignored by kuramoto (always 1)
  std::string psi = "zero";       // zero | ou
  double theta = 0.0;             // OU rate
  double sigma = 1.0;             // diffusion = sigma * I

  bool operator==(const ModelSpec&) const = default;
};

struct InitialSpec {
  std::string law = "gaussian";  // gaussian | point_mass | uniform_box
  std::vector<double> mean{0.0};
  std::vector<std::vector<double>> covariance{{1.0}};
  std::vector<double> point{0.0};
  std::vector<double> lower{0.0};
  std::vector<double> upper{1.0};
  std::vector<double> mean_slope;  // empty: no dependence on u

  bool operator==(const InitialSpec&) const = default;
};

struct GraphonSpec {
  std::string name = "product";  // constant | product | min | grid
  double value = 0.5;            // constant level
  std::vector<std::vector<double>> grid;

  bool operator==(const GraphonSpec&) const = default;
};

struct BoundsSpec {
  double delta = 1.0;  // illustrative; only existence is known
  double bigK = 1.0;   // illustrative
  std::vector<std::string> variants{"T3_7",  "T3_9_W1",      "T3_9_BL",
                                    "T3_10", "T3_13_sparse", "T3_13_dense"};
  std::vector<double> a_grid{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
  std::vector<double> eta{0.4};
  std::size_t norm_n = 12;
  std::size_t norm_replications = 2000;
  double confidence = 0.99;  // interval used for bound verdicts
  bool gram_check = false;   // a squared-degree sparsity theorem will be checked

  bool operator==(const BoundsSpec&) const = default;
};

struct ExperimentConfig {
  ModelSpec model;
  InitialSpec initial;
  GraphonSpec graphon;
  SparsityRule sparsity;
  double T = 1.0;
  std::size_t M = 100;

  std::string run_id = "run";
  std::vector<std::size_t> n_values{25, 50, 100, 200};
  std::size_t n_ref = 2000;
  std::vector<Metric> metrics{Metric::W2};
  Comparison comparison = Comparison::WeightVsReference;
  std::vector<double> thresholds;
  std::size_t replications = 100;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  bool record_norm = false;
  double confidence = 0.95;  // tail-estimate intervals

  BoundsSpec bounds;

  TimeGrid grid() const { return TimeGrid(T, M); }
  bool uses_reference() const { return comparison != Comparison::SparseVsWeight; }
  bool operator==(const ExperimentConfig& o) const;
};

InteractionModel build_model(const ExperimentConfig& c);
InitialLaw build_initial(const ExperimentConfig& c);
Graphon build_graphon(const ExperimentConfig& c);

/// Hard constraints that make a config unusable. Throws ConfigError.
void check_structure(const ExperimentConfig& c);

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), field(path) {}
  std::string field;
};

/// One finding of the modelling-assumption checks.
struct AssumptionFinding {
  std::string assumption;  // short tag, e.g. "bounded-lipschitz-interaction"
  std::string message;
  bool fatal_in_strict = true;
};

/// Checks the standing assumptions of the convergence theory: bounded and
/// Lipschitz interaction, sub-Gaussian initial law, piecewise-Lipschitz
/// graphon, diverging mean degree and, when a Gram check is requested,
/// diverging n p(n)^2.
std::vector<AssumptionFinding> check_assumptions(const ExperimentConfig& c);

unsigned resolve_threads(unsigned requested);

/// Runs f(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& f);

struct ReplicationRecord {
  std::size_t n = 0;
  double p_n = 1.0;
  std::uint64_t replication = 0;
  std::vector<double> sup_values;  // one per configured metric; +inf on overflow
  bool overflow = false;
  /// (1/n) sum_i max_m |X_i(t_m) - Xbar_i(t_m)|^2
  double coupling_msd = 0.0;
  std::optional<double> d_norm;  // ||D||_{inf->1} when requested and n <= 22

  bool operator==(const ReplicationRecord&) const = default;
};

class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const InteractionModel& model() const { return model_; }
  const InitialLaw& initial() const { return initial_; }
  const Graphon& graphon() const { return graphon_; }

  /// Simulated once, on first use.
  const ReferenceEnsemble& reference() const;
  const MeasureFlow& reference_flow() const;

  CoupledPaths simulate(std::size_t n, std::uint64_t replication) const;
  ReplicationRecord record_from_paths(const CoupledPaths& paths,
                                      std::uint64_t replication) const;
  ReplicationRecord run_replication(std::size_t n, std::uint64_t replication) const;

  /// The first R replications at n (cached).
  const std::vector<ReplicationRecord>& records(std::size_t n) const;
  std::vector<ReplicationRecord> run_batch(std::size_t n, std::uint64_t first,
                                           std::size_t count) const;

  std::size_t metric_index(Metric m) const;

 private:
  ExperimentConfig config_;
  InteractionModel model_;
  InitialLaw initial_;
  Graphon graphon_;
  unsigned threads_;

  mutable std::once_flag reference_once_;
  mutable std::unique_ptr<ReferenceEnsemble> reference_;
  mutable MeasureFlow reference_flow_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::size_t, std::vector<ReplicationRecord>> cache_;
};

struct TailEstimate {
  std::size_t n = 0;
  Metric metric = Metric::W1;
  double a = 0.0;
  std::size_t R = 0;
  std::size_t exceed_count = 0;  // includes overflows
  std::size_t overflow_count = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.95;
  std::optional<double> analytic_bound;

  bool operator==(const TailEstimate&) const = default;
};

/// Exceedance is sup_value > a, or an overflowed replication.
TailEstimate tail_from_records(const std::vector<ReplicationRecord>& records,
                               std::size_t metric_index, Metric metric, double a,
                               double confidence = 0.95);

TailEstimate estimate_tail(const Experiment& e, std::size_t n, double a,
                           Metric metric);
MeanEstimate estimate_mean_sup(const Experiment& e, std::size_t n, Metric metric);
/// Needs comparison = sparse_vs_weight.
MeanEstimate coupling_msd(const Experiment& e, std::size_t n);

struct RateRow {
  std::size_t n = 0;
  double p_n = 1.0;
  double mean = 0.0;
  double std_error = 0.0;
};

enum class RateAxis { N, EffectiveDegree };  // log n, or log(n p(n))

struct RateTable {
  std::string statistic;
  RateAxis axis = RateAxis::N;
  std::vector<RateRow> rows;
  std::optional<double> slope;
  std::optional<double> slope_std_error;
};

struct RateFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

/// Least squares of log(mean) on log(x). Needs >= 3 rows with positive means.
RateFit fit_rate(const RateTable& table);

/// Sorts rows by n and fills slope fields when a fit is possible.
void finalize(RateTable& table);

enum class Verdict { Consistent, Violated, Flagged };
std::string to_string(Verdict v);

struct BoundComparison {
  std::string kind;  // cutnorm | gram | theorem variant name
  std::size_t n = 0;
  double p_n = 1.0;
  double threshold = 0.0;
  std::size_t R = 0;
  std::size_t exceed_count = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.99;
  double bound = 0.0;
  Verdict verdict = Verdict::Consistent;
  std::vector<std::string> warnings;
};

/// ||D||_{inf->1} / n for replications 0..R-1 at size n (exact norms only).
std::vector<double> sample_cutnorms(const ExperimentConfig& c, std::size_t n,
                                    std::size_t R, unsigned threads);
/// ||D^T D||_{inf->1} / n for replications 0..R-1.
std::vector<double> sample_gram_norms(const ExperimentConfig& c, std::size_t n,
                                      std::size_t R, unsigned threads);

/// Violated iff the interval's lower edge exceeds the bound.
BoundComparison verify_cutnorm(const ExperimentConfig& c,
                               const std::vector<double>& normalized_norms,
                               std::size_t n, double eta);
/// As verify_cutnorm, but a large-n-only bound: exceedance is Flagged.
BoundComparison verify_gram(const ExperimentConfig& c,
                            const std::vector<double>& normalized_norms,
                            std::size_t n, double eta);
/// Tail of the configured comparison against a theorem right-hand side.
/// Constants are illustrative, so exceedance is Flagged.
BoundComparison verify_theorem(const Experiment& e, std::size_t n, double a,
                               Metric metric, TheoremBound variant);

/// The theorem variant whose left-hand side matches (metric, comparison).
std::optional<TheoremBound> matching_variant(Metric metric, Comparison comparison,
                                             const SparsityRule& sparsity);

void write_records_csv(std::ostream& os, const std::string& run_id,
                       const std::vector<Metric>& metrics,
                       const std::vector<ReplicationRecord>& records);
/// Rows for scalar per-replication statistics that are not flow distances.
void write_scalar_records_csv(std::ostream& os, const std::string& run_id,
                              const std::string& statistic, std::size_t n,
                              double p_n, const std::vector<double>& values);
void write_records_header(std::ostream& os);

/// Columns: n, replication, metric, time_index, value.
void write_distances_csv(std::ostream& os, std::size_t n,
                         std::uint64_t replication, Metric metric,
                         const std::vector<double>& profile, bool header);

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_double(double v);

}  // namespace gpc
