#include "gpc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gpc/config.hpp"
#include "gpc/experiments.hpp"

namespace gpc {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Everything one verb produces before it is persisted.
struct Output {
  std::ostringstream records;
  Json summary;
  std::map<std::string, std::string> files;
  bool violated = false;
};

// Records for every n, mean sup-distance tables per metric, the coupling
// gap table for sparse_vs_weight runs, and tail estimates at the configured
// thresholds.
void sweep(const Experiment& e, Output& o, std::ostream& out) {
  const auto& c = e.config();
  write_records_header(o.records);
  std::vector<RateTable> tables;
  for (Metric m : c.metrics) tables.push_back({"mean_sup_" + to_string(m), RateAxis::N, {}, {}, {}});
  RateTable msd{"coupling_msd", RateAxis::EffectiveDegree, {}, {}, {}};
  Json tails = Json::array();
  Json overflow = Json::object();

  out << "comparison " << to_string(c.comparison) << ", R = " << c.replications
      << ", grid T = " << c.T << " M = " << c.M;
  if (c.uses_reference()) out << ", reference size " << c.n_ref;
  out << "\n";
  out << "      n        p_n  metric        mean      stderr\n";
  for (std::size_t n : c.n_values) {
    const auto& recs = e.records(n);
    write_records_csv(o.records, c.run_id, c.metrics, recs);
    const double p = c.sparsity.p(n);
    std::size_t overflows = 0;
    for (const auto& r : recs) overflows += r.overflow ? 1 : 0;
    overflow[std::to_string(n)] = overflows;
    for (std::size_t k = 0; k < c.metrics.size(); ++k) {
      const MeanEstimate m = estimate_mean_sup(e, n, c.metrics[k]);
      tables[k].rows.push_back({n, p, m.mean, m.std_error});
      char line[128];
      std::snprintf(line, sizeof line, "%7zu %10.4g  %-6s %11.5g %11.3g\n", n, p,
                    to_string(c.metrics[k]).c_str(), m.mean, m.std_error);
      out << line;
      for (double a : c.thresholds) tails.push_back(to_json(estimate_tail(e, n, a, c.metrics[k])));
    }
    if (c.comparison == Comparison::SparseVsWeight) {
      const MeanEstimate m = coupling_msd(e, n);
      msd.rows.push_back({n, p, m.mean, m.std_error});
    }
  }
  Json rates = Json::array();
  for (auto& t : tables) {
    finalize(t);
    rates.push_back(to_json(t));
    if (t.slope) out << t.statistic << " log-log slope " << fmt("%.4f", *t.slope) << "\n";
  }
  if (!msd.rows.empty()) {
    finalize(msd);
    rates.push_back(to_json(msd));
    if (msd.slope) out << "coupling_msd slope vs n p(n) " << fmt("%.4f", *msd.slope) << "\n";
  }
  o.summary["rate_tables"] = rates;
  o.summary["tail_estimates"] = tails;
  o.summary["overflow_counts"] = overflow;
}

void verb_simulate(const Experiment& e, Output& o, std::ostream& out) {
  sweep(e, o, out);
  for (std::size_t n : e.config().n_values) {
    const CoupledPaths paths = e.simulate(n, 0);
    std::ostringstream sparse, weight;
    write_paths_csv(sparse, paths.x_sparse, 0);
    write_paths_csv(weight, paths.x_weight, 0);
    o.files["paths_sparse_n" + std::to_string(n) + ".csv"] = sparse.str();
    o.files["paths_weight_n" + std::to_string(n) + ".csv"] = weight.str();
  }
}

void verb_metrics(const Experiment& e, Output& o, std::ostream& out) {
  sweep(e, o, out);
  const auto& c = e.config();
  std::ostringstream dist;
  bool header = true;
  for (std::size_t n : c.n_values) {
    const CoupledPaths paths = e.simulate(n, 0);
    if (paths.overflow) continue;
    const MeasureFlow sparse = measure_flow(paths.x_sparse);
    const MeasureFlow weight = measure_flow(paths.x_weight);
    for (Metric m : c.metrics) {
      std::vector<double> prof;
      switch (c.comparison) {
        case Comparison::SparseVsWeight: prof = distance_profile(sparse, weight, m); break;
        case Comparison::WeightVsReference: prof = distance_profile(weight, e.reference_flow(), m); break;
        case Comparison::SparseVsReference: prof = distance_profile(sparse, e.reference_flow(), m); break;
      }
      write_distances_csv(dist, n, 0, m, prof, header);
      header = false;
    }
  }
  o.files["distances.csv"] = dist.str();
}

void verb_lln(const Experiment& e, Output& o, std::ostream& out) {
  sweep(e, o, out);
  const auto& c = e.config();
  const auto [lo, hi] = std::minmax_element(c.n_values.begin(), c.n_values.end());
  Json paired = Json::array();
  Json reference_rates = Json::array();
  for (std::size_t k = 0; k < c.metrics.size(); ++k) {
    const auto& small = e.records(*lo);
    const auto& large = e.records(*hi);
    std::size_t below = 0;
    for (std::size_t r = 0; r < small.size(); ++r)
      if (!large[r].overflow && (small[r].overflow || large[r].sup_values[k] < small[r].sup_values[k]))
        ++below;
    const double frac = static_cast<double>(below) / static_cast<double>(small.size());
    paired.push_back({{"metric", to_string(c.metrics[k])},
                      {"n_small", *lo},
                      {"n_large", *hi},
                      {"replications", small.size()},
                      {"large_below_small", below},
                      {"fraction", frac}});
    out << to_string(c.metrics[k]) << ": sup distance at n=" << *hi << " below n=" << *lo << " in "
        << below << "/" << small.size() << " paired replications\n";
    if (c.metrics[k] != Metric::BoundedLipschitz) {
      const double p = c.metrics[k] == Metric::W1 ? 1.0 : 2.0;
      Json rows = Json::array();
      for (std::size_t n : c.n_values)
        rows.push_back({{"n", n}, {"rate", fournier_guillin_rate(p, 8.0, e.model().dim, n)}});
      reference_rates.push_back({{"metric", to_string(c.metrics[k])}, {"p", p}, {"q", 8.0}, {"rows", rows}});
    }
  }
  o.summary["paired_comparison"] = paired;
  o.summary["independent_sample_rate"] = reference_rates;
}

void verb_concentration(const Experiment& e, Output& o, std::ostream& out) {
  sweep(e, o, out);
  const auto& c = e.config();
  std::vector<std::size_t> ns = c.n_values;
  std::sort(ns.begin(), ns.end());
  Json comparisons = Json::array();
  Json trends = Json::array();
  for (Metric m : c.metrics) {
    std::vector<double> thresholds = c.thresholds;
    if (thresholds.empty()) {
      const double mean = estimate_mean_sup(e, ns.back(), m).mean;
      if (std::isfinite(mean) && mean > 0.0) thresholds.push_back(1.5 * mean);
    }
    const auto variant = matching_variant(m, c.comparison, c.sparsity);
    for (double a : thresholds) {
      std::vector<double> p_hat, rate;
      for (std::size_t n : ns) {
        const TailEstimate t = estimate_tail(e, n, a, m);
        p_hat.push_back(t.p_hat);
        const double floor = 1.0 / static_cast<double>(t.R);
        rate.push_back(-std::log(std::max(t.p_hat, floor)) / static_cast<double>(n));
        if (variant) comparisons.push_back(to_json(verify_theorem(e, n, a, m, *variant)));
        out << to_string(m) << " n=" << n << " a=" << fmt("%.4g", a) << " p_hat=" << fmt("%.4g", t.p_hat)
            << " CI=[" << fmt("%.4g", t.ci_low) << ", " << fmt("%.4g", t.ci_high) << "]";
        if (t.analytic_bound) out << " bound=" << fmt("%.4g", *t.analytic_bound);
        out << "\n";
      }
      bool p_nonincreasing = true, rate_nondecreasing = true;
      for (std::size_t i = 1; i < ns.size(); ++i) {
        p_nonincreasing = p_nonincreasing && p_hat[i] <= p_hat[i - 1];
        rate_nondecreasing = rate_nondecreasing && rate[i] >= rate[i - 1];
      }
      trends.push_back({{"metric", to_string(m)},
                        {"a", a},
                        {"n", ns},
                        {"p_hat", p_hat},
                        {"rate_statistic", rate},
                        {"p_hat_nonincreasing", p_nonincreasing},
                        {"rate_statistic_nondecreasing", rate_nondecreasing}});
      out << "  trend: p_hat nonincreasing " << (p_nonincreasing ? "yes" : "no")
          << ", -(1/n) log p_hat nondecreasing " << (rate_nondecreasing ? "yes" : "no") << "\n";
    }
  }
  o.summary["bound_comparisons"] = comparisons;
  o.summary["trends"] = trends;
}

void report_comparison(const BoundComparison& b, std::ostream& out) {
  out << b.kind << " n=" << b.n << " threshold=" << fmt("%.4g", b.threshold) << " freq=" << b.exceed_count
      << "/" << b.R << " CI=[" << fmt("%.4g", b.ci_low) << ", " << fmt("%.4g", b.ci_high)
      << "] bound=" << fmt("%.4g", b.bound) << " -> " << to_string(b.verdict) << "\n";
  for (const auto& w : b.warnings) out << "  warning: " << w << "\n";
}

void verb_norm(const ExperimentConfig& c, bool gram, Output& o, std::ostream& out) {
  const std::size_t n = c.bounds.norm_n, R = c.bounds.norm_replications;
  const std::vector<double> norms =
      gram ? sample_gram_norms(c, n, R, c.threads) : sample_cutnorms(c, n, R, c.threads);
  write_records_header(o.records);
  write_scalar_records_csv(o.records, c.run_id, gram ? "gram_norm_over_n" : "cutnorm_over_n", n,
                           c.sparsity.p(n), norms);
  Json comparisons = Json::array();
  for (double eta : c.bounds.eta) {
    const BoundComparison b = gram ? verify_gram(c, norms, n, eta) : verify_cutnorm(c, norms, n, eta);
    report_comparison(b, out);
    o.violated = o.violated || b.verdict == Verdict::Violated;
    comparisons.push_back(to_json(b));
  }
  o.summary["bound_comparisons"] = comparisons;
  o.summary["norm_statistic"] = to_json(mean_estimate(norms));
}

void verb_bounds(const ExperimentConfig& c, Output& o, std::ostream& out) {
  write_records_header(o.records);
  std::ostringstream csv;
  bool header = true;
  const BoundParams params{c.bounds.delta, c.bounds.bigK};
  std::size_t rows = 0;
  for (std::size_t n : c.n_values) {
    const double p = c.sparsity.p(n);
    for (const auto& name : c.bounds.variants) {
      const TheoremBound v = theorem_bound_from_string(name);
      std::vector<BoundCurvePoint> pts;
      for (double a : c.bounds.a_grid) pts.push_back({a, theorem_tail_bound(v, a, n, p, params)});
      write_bound_curve_csv(csv, name, n, p, pts, header);
      header = false;
      rows += pts.size();
    }
    std::vector<BoundCurvePoint> cut, gram;
    for (double eta : c.bounds.a_grid) {
      if (eta <= static_cast<double>(n)) cut.push_back({eta, cutnorm_tail_bound(eta, n, p)});
      gram.push_back({eta, gram_tail_bound(eta, n, p)});
    }
    write_bound_curve_csv(csv, "cutnorm", n, p, cut, header);
    write_bound_curve_csv(csv, "gram", n, p, gram, false);
    header = false;
    rows += cut.size() + gram.size();
  }
  o.files["bounds.csv"] = csv.str();
  o.summary["bound_curves"] = {{"file", "bounds.csv"},
                               {"rows", rows},
                               {"delta", c.bounds.delta},
                               {"K", c.bounds.bigK},
                               {"note", "delta and K are illustrative; gram values are not clamped to 1"}};
  out << "wrote " << rows << " bound values to bounds.csv\n";
}

std::optional<unsigned> env_threads() {
  const char* v = std::getenv(kThreadsEnv);
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long x = std::strtoul(v, &end, 10);
  if (*end != '\0' || x > 4096) throw ConfigError(kThreadsEnv, "must be an integer in [0, 4096]");
  return static_cast<unsigned>(x);
}

}  // namespace

int dispatch(const Command& cmd, std::ostream& out, std::ostream& err) {
  if (std::find(verbs().begin(), verbs().end(), cmd.verb) == verbs().end()) {
    err << "unknown verb '" << cmd.verb << "'\n";
    return kExitSchema;
  }
  try {
    ExperimentConfig c;
    if (cmd.config_path)
      c = parse_config(read_file(*cmd.config_path));
    else if (cmd.verb == "validate-config")
      throw ConfigError("--config", "validate-config needs a config file");
    if (cmd.seed) c.master_seed = *cmd.seed;
    if (cmd.threads)
      c.threads = *cmd.threads;
    else if (auto t = env_threads())
      c.threads = *t;
    if (cmd.verb == "verify-lln") c.comparison = Comparison::SparseVsReference;
    check_structure(c);

    const auto findings = check_assumptions(c);
    bool fatal = false;
    Json assumption_json = Json::array();
    for (const auto& f : findings) {
      const bool blocks = f.fatal_in_strict && !cmd.permissive;
      fatal = fatal || blocks;
      err << (blocks ? "assumption violated" : "warning") << " [" << f.assumption << "]: " << f.message << "\n";
      assumption_json.push_back({{"assumption", f.assumption},
                                 {"message", f.message},
                                 {"blocking_in_strict_mode", f.fatal_in_strict}});
    }
    if (fatal) {
      err << "rerun with --permissive to explore outside the assumptions\n";
      return kExitAssumption;
    }
    if (cmd.verb == "validate-config") {
      out << config_to_json(c).dump(2) << "\n";
      return kExitOk;
    }

    Output o;
    o.summary["version"] = kVersion;
    o.summary["verb"] = cmd.verb;
    o.summary["run_id"] = c.run_id;
    o.summary["master_seed"] = c.master_seed;
    o.summary["mode"] = cmd.permissive ? "permissive" : "strict";
    o.summary["threads"] = resolve_threads(c.threads);
    o.summary["grid"] = {{"T", c.T}, {"M", c.M}, {"h", c.grid().h()}, {"points", c.M + 1}};
    o.summary["assumption_findings"] = assumption_json;
    o.summary["config"] = config_to_json(c);

    if (cmd.verb == "verify-cutnorm" || cmd.verb == "verify-gram") {
      verb_norm(c, cmd.verb == "verify-gram", o, out);
    } else if (cmd.verb == "bounds") {
      verb_bounds(c, o, out);
    } else {
      const Experiment e(c);
      if (c.uses_reference()) o.summary["n_ref"] = c.n_ref;
      if (cmd.verb == "simulate")
        verb_simulate(e, o, out);
      else if (cmd.verb == "metrics")
        verb_metrics(e, o, out);
      else if (cmd.verb == "verify-lln")
        verb_lln(e, o, out);
      else
        verb_concentration(e, o, out);
    }

    std::error_code ec;
    fs::create_directories(cmd.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cmd.out_dir + "': " + ec.message());
    const fs::path dir(cmd.out_dir);
    write_file(dir / "records.csv", o.records.str());
    write_file(dir / "summary.json", o.summary.dump(2) + "\n");
    for (const auto& [name, content] : o.files) write_file(dir / name, content);
    if (o.violated) {
      out << "at least one bound verdict is 'violated'\n";
      return kExitViolated;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graphon particle-system concentration experiments"};
  Command cmd;
  std::string config, seed_text;
  unsigned threads = 0;
  app.add_option("verb", cmd.verb, "simulate | metrics | verify-cutnorm | verify-gram | verify-lln | "
                                   "verify-concentration | bounds | validate-config")
      ->required()
      ->check(CLI::IsMember(verbs()));
  auto* config_opt = app.add_option("--config", config, "JSON config file");
  app.add_option("--out", cmd.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed_text, "master seed override (unsigned 64-bit)");
  app.add_flag("--permissive", cmd.permissive, "downgrade assumption failures to warnings");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 = auto")
                          ->check(CLI::Range(0u, 4096u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitSchema;
  }
  if (*config_opt) cmd.config_path = config;
  if (*seed_opt) {
    try {
      std::size_t used = 0;
      if (seed_text.empty() || seed_text[0] == '-') throw std::invalid_argument(seed_text);
      cmd.seed = std::stoull(seed_text, &used, 10);
      if (used != seed_text.size()) throw std::invalid_argument(seed_text);
    } catch (const std::exception&) {
      err << "--seed: expected an unsigned 64-bit integer, got '" << seed_text << "'\n";
      return kExitSchema;
    }
  }
  if (*threads_opt) cmd.threads = threads;
  return dispatch(cmd, out, err);
}

}  // namespace gpc
