#include "gpc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

namespace gpc {

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::SparseVsWeight: return "sparse_vs_weight";
    case Comparison::WeightVsReference: return "weight_vs_reference";
    case Comparison::SparseVsReference: return "sparse_vs_reference";
  }
  return "?";
}

Comparison comparison_from_string(const std::string& s) {
  for (auto c : {Comparison::SparseVsWeight, Comparison::WeightVsReference,
                 Comparison::SparseVsReference})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown comparison '" + s + "'");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return model == o.model && initial == o.initial && graphon == o.graphon &&
         sparsity.form == o.sparsity.form && sparsity.gamma == o.sparsity.gamma &&
         T == o.T && M == o.M && run_id == o.run_id && n_values == o.n_values &&
         n_ref == o.n_ref && metrics == o.metrics && comparison == o.comparison &&
         thresholds == o.thresholds && replications == o.replications &&
         master_seed == o.master_seed && threads == o.threads &&
         record_norm == o.record_norm && confidence == o.confidence && bounds == o.bounds;
}

// ---------------------------------------------------------------------------
// Building runtime objects.
// ---------------------------------------------------------------------------

InteractionModel build_model(const ExperimentConfig& c) {
  const ModelSpec& m = c.model;
  InteractionModel model;
  if (m.name == "kuramoto")
    model = InteractionModel::kuramoto(m.coupling, m.sigma);
  else if (m.name == "linear_attraction")
    model = InteractionModel::linear_attraction(m.dim, m.sigma);
  else if (m.name == "zero")
    model = InteractionModel::zero(m.dim, m.sigma);
  else
    throw ConfigError("model.name", "unknown model '" + m.name + "'");
  if (m.psi == "ou")
    model = model.with_ou(m.theta);
  else if (m.psi != "zero")
    throw ConfigError("model.psi", "unknown drift '" + m.psi + "'");
  return model;
}

InitialLaw build_initial(const ExperimentConfig& c) {
  const InitialSpec& s = c.initial;
  InitialLaw law = InitialLaw::point_mass({0.0});
  try {
    if (s.law == "gaussian") {
      const auto d = s.mean.size();
      Matrix cov(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      if (s.covariance.size() != d)
        throw ConfigError("model.initial.covariance", "must be a d x d matrix");
      for (std::size_t i = 0; i < d; ++i) {
        if (s.covariance[i].size() != d)
          throw ConfigError("model.initial.covariance", "must be a d x d matrix");
        for (std::size_t j = 0; j < d; ++j)
          cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.covariance[i][j];
      }
      law = InitialLaw::gaussian(s.mean, cov);
    } else if (s.law == "point_mass") {
      law = InitialLaw::point_mass(s.point);
    } else if (s.law == "uniform_box") {
      law = InitialLaw::uniform_box(s.lower, s.upper);
    } else {
      throw ConfigError("model.initial.law", "unknown initial law '" + s.law + "'");
    }
    if (!s.mean_slope.empty()) law = law.with_mean_slope(s.mean_slope);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model.initial", e.what());
  }
  return law;
}

Graphon build_graphon(const ExperimentConfig& c) {
  const GraphonSpec& g = c.graphon;
  try {
    if (g.name == "constant") return Graphon::constant(g.value);
    if (g.name == "product") return Graphon::product();
    if (g.name == "min") return Graphon::min();
    if (g.name == "grid") return Graphon::grid(g.grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("graphon", e.what());
  }
  throw ConfigError("graphon.name", "unknown graphon '" + g.name + "'");
}

namespace {

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

}  // namespace

void check_structure(const ExperimentConfig& c) {
  const auto model = build_model(c);
  const auto law = build_initial(c);
  build_graphon(c);
  require(std::isfinite(c.model.sigma) && c.model.sigma >= 0.0, "model.sigma", "must be finite and >= 0");
  require(std::isfinite(c.model.coupling), "model.coupling", "must be finite");
  require(std::isfinite(c.model.theta) && c.model.theta >= 0.0, "model.theta", "must be finite and >= 0");
  require(c.model.dim >= 1, "model.dim", "must be >= 1");
  require(law.dim() == model.dim, "model.initial",
          "initial law has dimension " + std::to_string(law.dim()) + " but the model has " +
              std::to_string(model.dim));
  if (c.sparsity.form == SparsityRule::Form::PowerLaw)
    require(c.sparsity.gamma > 0.0 && std::isfinite(c.sparsity.gamma), "sparsity.gamma", "must be > 0");
  require(std::isfinite(c.T) && c.T > 0.0, "grid.T", "must be > 0");
  require(c.M >= 1, "grid.M", "must be >= 1");

  require(!c.n_values.empty(), "experiment.n", "needs at least one size");
  for (auto n : c.n_values) require(n >= 1, "experiment.n", "sizes must be >= 1");
  const std::size_t n_max = *std::max_element(c.n_values.begin(), c.n_values.end());
  require(c.n_ref >= 2, "experiment.n_ref", "must be >= 2");
  require(c.n_ref >= 4 * n_max, "experiment.n_ref",
          "must be at least 4 x the largest n (" + std::to_string(4 * n_max) + ")");
  require(!c.metrics.empty(), "experiment.metrics", "needs at least one metric");
  for (double a : c.thresholds)
    require(std::isfinite(a) && a > 0.0, "experiment.thresholds", "thresholds must be > 0");
  require(c.replications >= 1, "experiment.replications", "must be >= 1");
  require(c.confidence > 0.0 && c.confidence < 1.0, "experiment.confidence", "must lie in (0, 1)");

  for (Metric m : c.metrics) {
    if (!c.uses_reference()) break;
    for (auto n : c.n_values) {
      if (m == Metric::BoundedLipschitz)
        require(n + c.n_ref <= kMaxBoundedLipschitzSupport, "experiment.metrics",
                "BL against the reference needs n + n_ref <= " +
                    std::to_string(kMaxBoundedLipschitzSupport));
      else if (model.dim > 1)
        require(c.n_ref % n == 0 && c.n_ref <= kMaxAssignmentSize, "experiment.n_ref",
                "in dimension > 1 the reference size must be a multiple of every n and at most " +
                    std::to_string(kMaxAssignmentSize));
    }
  }
  if (!c.uses_reference() && model.dim > 1)
    for (auto n : c.n_values)
      require(n <= kMaxAssignmentSize, "experiment.n", "exact transport needs n <= 4096 when d > 1");
  if (!c.uses_reference())
    for (Metric m : c.metrics)
      if (m == Metric::BoundedLipschitz)
        for (auto n : c.n_values)
          require(2 * n <= kMaxBoundedLipschitzSupport, "experiment.n",
                  "BL needs 2n <= " + std::to_string(kMaxBoundedLipschitzSupport));

  const BoundsSpec& b = c.bounds;
  require(std::isfinite(b.delta) && b.delta > 0.0, "bounds.delta", "must be > 0");
  require(std::isfinite(b.bigK) && b.bigK > 0.0, "bounds.K", "must be > 0");
  for (const auto& v : b.variants) {
    try {
      theorem_bound_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("bounds.variants", e.what());
    }
  }
  for (double a : b.a_grid) require(std::isfinite(a) && a > 0.0, "bounds.a_grid", "values must be > 0");
  require(b.norm_n >= 1 && b.norm_n <= kExactNormMaxDim, "bounds.norm_n",
          "exact norms need 1 <= n <= " + std::to_string(kExactNormMaxDim));
  for (double e : b.eta)
    require(e > 0.0 && e <= static_cast<double>(b.norm_n), "bounds.eta", "values must lie in (0, norm_n]");
  require(b.norm_replications >= 1, "bounds.norm_replications", "must be >= 1");
  require(b.confidence > 0.0 && b.confidence < 1.0, "bounds.confidence", "must lie in (0, 1)");
}

std::vector<AssumptionFinding> check_assumptions(const ExperimentConfig& c) {
  std::vector<AssumptionFinding> out;
  const auto model = build_model(c);
  if (!std::isfinite(model.phi_bound))
    out.push_back({"bounded-interaction",
                   "interaction '" + model.name + "' is unbounded; the concentration theory needs a bounded phi",
                   true});
  const auto report = spot_check(model);
  if (!report.lipschitz_ok)
    out.push_back({"lipschitz-interaction",
                   "Lipschitz spot check failed (worst ratio " + format_double(report.worst_ratio) + ")",
                   true});
  if (!c.sparsity.degree_diverges())
    out.push_back({"diverging-degree",
                   "n p(n) does not diverge under " + c.sparsity.name(), true});
  const bool squared_needed =
      c.bounds.gram_check ||
      (c.comparison == Comparison::SparseVsReference &&
       std::find(c.metrics.begin(), c.metrics.end(), Metric::W2) != c.metrics.end());
  if (squared_needed && !c.sparsity.squared_degree_condition())
    out.push_back({"squared-degree",
                   "n p(n)^2 does not diverge under " + c.sparsity.name() +
                       "; W2 sparse-graph and Gram bounds are outside their hypotheses",
                   false});
  return out;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Experiment.
// ---------------------------------------------------------------------------

Experiment::Experiment(ExperimentConfig config)
    : config_(std::move(config)),
      model_(build_model(config_)),
      initial_(build_initial(config_)),
      graphon_(build_graphon(config_)),
      threads_(resolve_threads(config_.threads)) {
  check_structure(config_);
}

const ReferenceEnsemble& Experiment::reference() const {
  std::call_once(reference_once_, [this] {
    reference_ = std::make_unique<ReferenceEnsemble>(simulate_reference(
        model_, initial_, graphon_, config_.n_ref, config_.grid(), config_.master_seed));
    reference_flow_ = measure_flow(reference_->paths);
  });
  return *reference_;
}

const MeasureFlow& Experiment::reference_flow() const {
  reference();
  return reference_flow_;
}

CoupledPaths Experiment::simulate(std::size_t n, std::uint64_t replication) const {
  return simulate_coupled(model_, initial_, graphon_, config_.sparsity, n, config_.grid(),
                          config_.master_seed, replication);
}

ReplicationRecord Experiment::record_from_paths(const CoupledPaths& paths,
                                                std::uint64_t replication) const {
  ReplicationRecord r;
  r.n = paths.n;
  r.p_n = paths.p;
  r.replication = replication;
  r.overflow = paths.overflow;
  const double inf = std::numeric_limits<double>::infinity();
  if (paths.overflow) {
    r.sup_values.assign(config_.metrics.size(), inf);
    r.coupling_msd = inf;
  } else {
    const MeasureFlow sparse = measure_flow(paths.x_sparse);
    const MeasureFlow weight = measure_flow(paths.x_weight);
    for (Metric m : config_.metrics) {
      double v = 0.0;
      switch (config_.comparison) {
        case Comparison::SparseVsWeight: v = sup_distance(sparse, weight, m); break;
        case Comparison::WeightVsReference: v = sup_distance(weight, reference_flow(), m); break;
        case Comparison::SparseVsReference: v = sup_distance(sparse, reference_flow(), m); break;
      }
      r.sup_values.push_back(v);
    }
    const std::size_t n = paths.n, d = paths.x_sparse.dim();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double worst = 0.0;
      for (std::size_t m = 0; m < paths.x_sparse.points(); ++m) {
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double g = paths.x_sparse.at(i, m, k) - paths.x_weight.at(i, m, k);
          sq += g * g;
        }
        worst = std::max(worst, sq);
      }
      total += worst;
    }
    r.coupling_msd = total / static_cast<double>(n);
  }
  if (config_.record_norm && paths.n <= kExactNormMaxDim) {
    const auto adj = replication_adjacency(graphon_, config_.sparsity, paths.n,
                                           config_.master_seed, replication);
    r.d_norm = norm_inf_to_1_exact(interaction_matrices(adj, graphon_).D);
  }
  return r;
}

ReplicationRecord Experiment::run_replication(std::size_t n, std::uint64_t replication) const {
  if (config_.uses_reference()) reference();
  return record_from_paths(simulate(n, replication), replication);
}

std::vector<ReplicationRecord> Experiment::run_batch(std::size_t n, std::uint64_t first,
                                                     std::size_t count) const {
  if (config_.uses_reference()) reference();
  std::vector<ReplicationRecord> out(count);
  parallel_for(count, threads_, [&](std::size_t i) { out[i] = run_replication(n, first + i); });
  return out;
}

const std::vector<ReplicationRecord>& Experiment::records(std::size_t n) const {
  {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
  }
  auto batch = run_batch(n, 0, config_.replications);
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(n, std::move(batch)).first->second;
}

std::size_t Experiment::metric_index(Metric m) const {
  auto it = std::find(config_.metrics.begin(), config_.metrics.end(), m);
  if (it == config_.metrics.end())
    throw std::invalid_argument("metric " + to_string(m) + " is not configured");
  return static_cast<std::size_t>(it - config_.metrics.begin());
}

// ---------------------------------------------------------------------------
// Estimates.
// ---------------------------------------------------------------------------

TailEstimate tail_from_records(const std::vector<ReplicationRecord>& records,
                               std::size_t metric_index, Metric metric, double a,
                               double confidence) {
  if (records.empty()) throw std::invalid_argument("tail estimate needs at least one record");
  TailEstimate t;
  t.n = records.front().n;
  t.metric = metric;
  t.a = a;
  t.R = records.size();
  t.confidence = confidence;
  for (const auto& r : records) {
    if (r.overflow) {
      ++t.overflow_count;
      ++t.exceed_count;
    } else if (r.sup_values.at(metric_index) > a) {
      ++t.exceed_count;
    }
  }
  t.p_hat = static_cast<double>(t.exceed_count) / static_cast<double>(t.R);
  const Interval ci = clopper_pearson(t.exceed_count, t.R, confidence);
  t.ci_low = ci.low;
  t.ci_high = ci.high;
  return t;
}

std::optional<TheoremBound> matching_variant(Metric metric, Comparison comparison,
                                             const SparsityRule& sparsity) {
  if (comparison == Comparison::WeightVsReference) {
    if (metric == Metric::W1) return TheoremBound::T3_7;
    if (metric == Metric::W2) return TheoremBound::T3_10;
  } else if (comparison == Comparison::SparseVsReference) {
    if (metric == Metric::W1) return TheoremBound::T3_9_W1;
    if (metric == Metric::BoundedLipschitz) return TheoremBound::T3_9_BL;
    if (metric == Metric::W2)
      return sparsity.form == SparsityRule::Form::Dense ? TheoremBound::T3_13_dense
                                                        : TheoremBound::T3_13_sparse;
  }
  return std::nullopt;
}

TailEstimate estimate_tail(const Experiment& e, std::size_t n, double a, Metric metric) {
  const auto& c = e.config();
  TailEstimate t = tail_from_records(e.records(n), e.metric_index(metric), metric, a, c.confidence);
  if (a > 0.0) {
    if (auto v = matching_variant(metric, c.comparison, c.sparsity)) {
      BoundParams params{c.bounds.delta, c.bounds.bigK};
      t.analytic_bound = theorem_tail_bound(*v, a, n, c.sparsity.p(n), params);
    }
  }
  return t;
}

MeanEstimate estimate_mean_sup(const Experiment& e, std::size_t n, Metric metric) {
  const std::size_t idx = e.metric_index(metric);
  std::vector<double> v;
  for (const auto& r : e.records(n)) v.push_back(r.sup_values[idx]);
  return mean_estimate(v);
}

MeanEstimate coupling_msd(const Experiment& e, std::size_t n) {
  if (e.config().comparison != Comparison::SparseVsWeight)
    throw std::invalid_argument("coupling_msd needs comparison sparse_vs_weight");
  std::vector<double> v;
  for (const auto& r : e.records(n)) v.push_back(r.coupling_msd);
  return mean_estimate(v);
}

RateFit fit_rate(const RateTable& table) {
  if (table.rows.size() < 3) throw std::invalid_argument("rate fit needs at least 3 rows");
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) { return a.n < b.n; });
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (!(r.mean > 0.0) || !std::isfinite(r.mean))
      throw std::invalid_argument("rate fit: row n=" + std::to_string(r.n) + " has a non-positive mean");
    const double axis = table.axis == RateAxis::N ? static_cast<double>(r.n)
                                                  : static_cast<double>(r.n) * r.p_n;
    x.push_back(std::log(axis));
    y.push_back(std::log(r.mean));
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("rate fit: all rows share one abscissa");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - f.intercept - f.slope * x[i];
    ssr += res * res;
  }
  f.std_error = std::sqrt(ssr / (k - 2.0) / sxx);
  return f;
}

void finalize(RateTable& table) {
  std::sort(table.rows.begin(), table.rows.end(),
            [](const RateRow& a, const RateRow& b) { return a.n < b.n; });
  table.slope.reset();
  table.slope_std_error.reset();
  try {
    const RateFit f = fit_rate(table);
    table.slope = f.slope;
    table.slope_std_error = f.std_error;
  } catch (const std::invalid_argument&) {
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Violated: return "violated";
    case Verdict::Flagged: return "flagged";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Norm sampling and bound verification.
// ---------------------------------------------------------------------------

std::vector<double> sample_cutnorms(const ExperimentConfig& c, std::size_t n, std::size_t R,
                                    unsigned threads) {
  if (n > kExactNormMaxDim)
    throw std::invalid_argument("cut-norm verification needs n <= " + std::to_string(kExactNormMaxDim));
  const Graphon g = build_graphon(c);
  std::vector<double> out(R);
  parallel_for(R, resolve_threads(threads), [&](std::size_t r) {
    const auto adj = replication_adjacency(g, c.sparsity, n, c.master_seed, r);
    out[r] = norm_inf_to_1_exact(interaction_matrices(adj, g).D) / static_cast<double>(n);
  });
  return out;
}

std::vector<double> sample_gram_norms(const ExperimentConfig& c, std::size_t n, std::size_t R,
                                      unsigned threads) {
  const Graphon g = build_graphon(c);
  std::vector<double> out(R);
  parallel_for(R, resolve_threads(threads), [&](std::size_t r) {
    const auto adj = replication_adjacency(g, c.sparsity, n, c.master_seed, r);
    StreamRng rng(c.master_seed, r, Stream::Heuristic);
    out[r] = gram_norm(interaction_matrices(adj, g).D, &rng) / static_cast<double>(n);
  });
  return out;
}

namespace {

BoundComparison compare(const std::string& kind, const std::vector<double>& values, std::size_t n,
                        double p_n, double threshold, double bound, double confidence) {
  BoundComparison b;
  b.kind = kind;
  b.n = n;
  b.p_n = p_n;
  b.threshold = threshold;
  b.R = values.size();
  for (double v : values)
    if (!(v <= threshold)) ++b.exceed_count;
  b.p_hat = static_cast<double>(b.exceed_count) / static_cast<double>(b.R);
  const Interval ci = clopper_pearson(b.exceed_count, b.R, confidence);
  b.ci_low = ci.low;
  b.ci_high = ci.high;
  b.confidence = confidence;
  b.bound = bound;
  return b;
}

}  // namespace

BoundComparison verify_cutnorm(const ExperimentConfig& c, const std::vector<double>& norms,
                               std::size_t n, double eta) {
  const double p = c.sparsity.p(n);
  BoundComparison b = compare("cutnorm", norms, n, p, eta, cutnorm_tail_bound(eta, n, p),
                              c.bounds.confidence);
  b.verdict = b.ci_low > b.bound ? Verdict::Violated : Verdict::Consistent;
  return b;
}

BoundComparison verify_gram(const ExperimentConfig& c, const std::vector<double>& norms,
                            std::size_t n, double eta) {
  const double p = c.sparsity.p(n);
  BoundComparison b = compare("gram", norms, n, p, eta, gram_tail_bound(eta, n, p),
                              c.bounds.confidence);
  b.verdict = b.ci_low > b.bound ? Verdict::Flagged : Verdict::Consistent;
  if (!c.sparsity.squared_degree_condition())
    b.warnings.push_back("n p(n)^2 does not diverge under " + c.sparsity.name() +
                         "; the Gram bound's sparsity hypothesis is unmet");
  if (n > kExactNormMaxDim)
    b.warnings.push_back("Gram norms above n = 22 come from the heuristic (lower bounds)");
  return b;
}

BoundComparison verify_theorem(const Experiment& e, std::size_t n, double a, Metric metric,
                               TheoremBound variant) {
  const auto& c = e.config();
  const std::size_t idx = e.metric_index(metric);
  std::vector<double> values;
  for (const auto& r : e.records(n)) values.push_back(r.overflow ? std::numeric_limits<double>::infinity()
                                                                 : r.sup_values[idx]);
  const double p = c.sparsity.p(n);
  const BoundParams params{c.bounds.delta, c.bounds.bigK};
  BoundComparison b = compare(to_string(variant), values, n, p, a,
                              theorem_tail_bound(variant, a, n, p, params), c.bounds.confidence);
  b.verdict = b.ci_low > b.bound ? Verdict::Flagged : Verdict::Consistent;
  b.warnings.push_back("delta and K are illustrative values");
  const auto match = matching_variant(metric, c.comparison, c.sparsity);
  if (!match || *match != variant)
    b.warnings.push_back("variant " + to_string(variant) + " bounds a different comparison than " +
                         to_string(c.comparison) + " with " + to_string(metric));
  return b;
}

// ---------------------------------------------------------------------------
// Persistence.
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_records_header(std::ostream& os) {
  os << "run_id,n,p_n,replication,metric,sup_value,overflow_flag\n";
}

void write_records_csv(std::ostream& os, const std::string& run_id,
                       const std::vector<Metric>& metrics,
                       const std::vector<ReplicationRecord>& records) {
  for (const auto& r : records)
    for (std::size_t k = 0; k < metrics.size(); ++k)
      os << run_id << ',' << r.n << ',' << format_double(r.p_n) << ',' << r.replication << ','
         << to_string(metrics[k]) << ',' << format_double(r.sup_values.at(k)) << ','
         << (r.overflow ? 1 : 0) << '\n';
}

void write_scalar_records_csv(std::ostream& os, const std::string& run_id,
                              const std::string& statistic, std::size_t n, double p_n,
                              const std::vector<double>& values) {
  for (std::size_t r = 0; r < values.size(); ++r)
    os << run_id << ',' << n << ',' << format_double(p_n) << ',' << r << ',' << statistic << ','
       << format_double(values[r]) << ",0\n";
}

void write_distances_csv(std::ostream& os, std::size_t n, std::uint64_t replication,
                         Metric metric, const std::vector<double>& profile, bool header) {
  if (header) os << "n,replication,metric,time_index,value\n";
  for (std::size_t m = 0; m < profile.size(); ++m)
    os << n << ',' << replication << ',' << to_string(metric) << ',' << m << ','
       << format_double(profile[m]) << '\n';
}

}  // namespace gpc
