// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, sample sizes
// and runtime budgets are fixed here and printed with every verdict.
//
//   acceptance               run every criterion
//   acceptance --criterion N run criterion N only (1..11)

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gpc/cli.hpp"
#include "gpc/experiments.hpp"
#include "support.hpp"

using namespace gpc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

Outcome coupling_identity() {
  constexpr std::size_t kN = 64, kSeeds = 10;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const auto cp = simulate_coupled(InteractionModel::kuramoto(1.0, 1.0), InitialLaw::standard_gaussian(1),
                                     Graphon::constant(1.0), SparsityRule::dense(), kN, TimeGrid(1.0, 100),
                                     seed);
    for (std::size_t m = 0; m < cp.grid.points(); ++m)
      for (std::size_t i = 0; i < kN; ++i)
        worst = std::max(worst, std::abs(cp.x_sparse.at(i, m, 0) - cp.x_weight.at(i, m, 0)));
  }
  return {worst == 0.0, "max |X - Xbar| = " + fmt(worst) + " over 10 seeds (required: exactly 0)"};
}

Outcome transport_oracle() {
  constexpr double kTol = 1e-9;
  auto rng = testing::test_rng(1002);
  double worst_perm = 0.0, worst_sorted = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t % 3);
    const std::size_t n = testing::uniform_size(rng, 1, 8);
    const auto a = testing::random_cloud(rng, n, d), b = testing::random_cloud(rng, n, d, 2.0);
    for (int p : {1, 2})
      worst_perm = std::max(worst_perm, std::abs(wasserstein_exact(a, b, p) - testing::brute_force_wasserstein(a, b, p)));
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = testing::uniform_size(rng, 1, 64);
    const auto a = testing::random_cloud(rng, n, 1), b = testing::random_cloud(rng, n, 1, 3.0);
    worst_sorted = std::max(worst_sorted, std::abs(w1_sorted_1d(a, b) - wasserstein_exact(a, b, 1)));
  }
  return {worst_perm <= kTol && worst_sorted <= kTol,
          "assignment vs permutations max err " + fmt(worst_perm) + ", sorted W1 vs assignment max err " +
              fmt(worst_sorted) + " (tol 1e-9)"};
}

Outcome metric_ordering() {
  constexpr double kTol = 1e-9;
  auto rng = testing::test_rng(1003);
  double worst = -INFINITY;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = testing::uniform_size(rng, 1, 32);
    const double scale = testing::uniform_real(rng, 0.1, 3.0);
    const auto a = testing::random_cloud(rng, n, 2, scale), b = testing::random_cloud(rng, n, 2, scale);
    const double bl = bounded_lipschitz(a, b), w1 = wasserstein(a, b, 1), w2 = wasserstein(a, b, 2);
    worst = std::max({worst, bl - w1, w1 - w2});
  }
  const double far = bounded_lipschitz(EmpiricalMeasure({0.0}, 1), EmpiricalMeasure({10.0}, 1));
  const double far_err = std::abs(far - 5.0 / 6.0);
  return {worst <= kTol && far_err <= kTol,
          "max violation of BL <= W1 <= W2 = " + fmt(worst) + ", |BL({0},{10}) - 5/6| = " + fmt(far_err) +
              " (tol 1e-9)"};
}

Outcome fourier_kuramoto() {
  constexpr double kTol = 1e-12;
  constexpr double kPi = std::numbers::pi;
  double worst = 0.0;
  for (double K : {0.5, 1.0, 2.0}) {
    const auto fi = FourierInteraction::kuramoto(K);
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double x = -kPi + 2 * kPi * i / 99.0, y = -kPi + 2 * kPi * j / 99.0;
        worst = std::max(worst, std::abs(fourier_evaluate(fi, {&x, 1}, {&y, 1}) - K * std::sin(y - x)));
      }
  }
  return {worst <= kTol, "max |Fourier - K sin(y - x)| = " + fmt(worst) + " (tol 1e-12)"};
}

Outcome cutnorm_bound() {
  ExperimentConfig c;
  c.graphon.name = "constant";
  c.graphon.value = 0.5;
  c.bounds.confidence = 0.99;
  const auto norms = sample_cutnorms(c, 12, 2000, 0);
  Outcome o{true, ""};
  for (double eta : {0.2, 0.3, 0.4}) {
    const auto b = verify_cutnorm(c, norms, 12, eta);
    const bool ok = b.ci_low <= b.bound;
    o.pass = o.pass && ok;
    o.detail += "eta=" + fmt(eta) + ": p_hat " + fmt(b.p_hat) + ", 99% CI low " + fmt(b.ci_low) + " vs bound " +
                fmt(b.bound) + (ok ? " ok" : " EXCEEDED") + "; ";
  }
  return o;
}

Outcome coupling_rate() {
  ExperimentConfig c;
  c.graphon.name = "constant";
  c.graphon.value = 0.5;
  c.comparison = Comparison::SparseVsWeight;
  c.metrics = {Metric::W1};
  c.n_values = {50, 100, 200, 400};
  c.n_ref = 1600;
  c.replications = 50;
  check_structure(c);
  Experiment e(c);
  RateTable table{"coupling_msd", RateAxis::EffectiveDegree, {}, {}, {}};
  std::string rows;
  for (std::size_t n : c.n_values) {
    const auto m = coupling_msd(e, n);
    table.rows.push_back({n, c.sparsity.p(n), m.mean, m.std_error});
    rows += "n=" + std::to_string(n) + ":" + fmt(m.mean, 4) + " ";
  }
  const double slope = fit_rate(table).slope;
  return {slope >= -1.4 && slope <= -0.6, rows + "-> slope " + fmt(slope, 4) + " (required in [-1.4, -0.6])"};
}

ExperimentConfig reference_setting(std::size_t replications) {
  ExperimentConfig c;  // Kuramoto, product graphon, dense, N_ref = 2000, T = 1, M = 100
  c.comparison = Comparison::WeightVsReference;
  c.metrics = {Metric::W2};
  c.n_values = {25, 50, 100, 200};
  c.replications = replications;
  check_structure(c);
  return c;
}

Outcome expectation_convergence() {
  Experiment e(reference_setting(50));
  std::vector<MeanEstimate> means;
  std::string rows;
  for (std::size_t n : e.config().n_values) {
    means.push_back(estimate_mean_sup(e, n, Metric::W2));
    rows += "n=" + std::to_string(n) + ":" + fmt(means.back().mean, 4) + "+-" + fmt(means.back().std_error, 2) + " ";
  }
  bool ok = true;
  for (std::size_t k = 0; k + 1 < means.size(); ++k) {
    const double drop = means[k].mean - means[k + 1].mean;
    const double se = std::hypot(means[k].std_error, means[k + 1].std_error);
    ok = ok && drop > se;
  }
  return {ok, rows + "(each step must drop by more than the combined stderr)"};
}

Outcome concentration_trend() {
  constexpr std::size_t R = 400;
  Experiment e(reference_setting(R));
  const double a = 1.5 * estimate_mean_sup(e, 200, Metric::W2).mean;
  std::vector<double> p, rate;
  std::string rows = "a=" + fmt(a, 4) + " ";
  for (std::size_t n : {25u, 50u, 100u}) {
    const auto t = estimate_tail(e, n, a, Metric::W2);
    p.push_back(t.p_hat);
    rate.push_back(0.0 - std::log(std::max(t.p_hat, 1.0 / R)) / static_cast<double>(n));
    rows += "n=" + std::to_string(n) + ": p_hat " + fmt(t.p_hat, 4) + ", rate " + fmt(rate.back(), 4) + "; ";
  }
  const bool ok = p[0] >= p[1] && p[1] >= p[2] && rate[0] <= rate[1] && rate[1] <= rate[2];
  return {ok, rows + "(p_hat nonincreasing, rate nondecreasing)"};
}

Outcome lln_sanity() {
  ExperimentConfig c;
  c.comparison = Comparison::SparseVsReference;
  c.metrics = {Metric::W1};
  c.n_values = {25, 400};
  c.replications = 100;
  check_structure(c);
  Experiment e(c);
  const auto& small = e.records(25);
  const auto& large = e.records(400);
  std::size_t wins = 0;
  for (std::size_t r = 0; r < c.replications; ++r) wins += large[r].sup_values[0] < small[r].sup_values[0];
  return {wins >= 95, "n=400 below n=25 in " + std::to_string(wins) + "/100 paired replications (required >= 95)"};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("gpc_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "c1.json";
  std::ofstream(cfg) << R"({"graphon": {"name": "constant", "value": 1.0},
    "experiment": {"n": [64], "n_ref": 256, "replications": 10, "comparison": "sparse_vs_weight",
                   "metrics": ["W1", "W2"]}})";
  const auto run = [&](const std::string& dir, const std::string& threads) {
    std::vector<std::string> args{"gpc", "simulate", "--config", cfg.string(), "--out", (root / dir).string(),
                                  "--threads", threads};
    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    std::ifstream in(root / dir / "records.csv", std::ios::binary);
    std::stringstream bytes;
    bytes << in.rdbuf();
    return std::make_pair(code, bytes.str());
  };
  const auto a = run("a", "1"), b = run("b", "1"), c = run("c", "0");
  fs::remove_all(root);
  const bool ok = a.first == 0 && b.first == 0 && c.first == 0 && !a.second.empty() && a.second == b.second &&
                  a.second == c.second;
  return {ok, "records.csv " + std::to_string(a.second.size()) + " bytes; rerun identical: " +
                  (a.second == b.second ? "yes" : "no") +
                  ", other thread count identical: " + (a.second == c.second ? "yes" : "no")};
}

Outcome bound_identities() {
  const double eps = std::numeric_limits<double>::epsilon();
  const double cut = cutnorm_tail_bound(1.0, 10, 1.0), cut_want = std::exp(-300.0 / 7.0);
  const double thm = theorem_tail_bound(TheoremBound::T3_7, 0.5, 100, std::nullopt, BoundParams{1.0, 1.0});
  const double thm_want = 2.0 * std::exp(-6.25);
  const double fg = fournier_guillin_rate(3, 4, 1, 100), fg_want = 0.1 + std::pow(10.0, -0.5);
  const double e1 = std::abs(cut - cut_want) / cut_want, e2 = std::abs(thm - thm_want) / thm_want;
  const double e3 = std::abs(fg - fg_want);
  return {e1 <= eps && e2 <= eps && e3 <= 1e-12,
          "cut-norm rel err " + fmt(e1) + ", T3_7 rel err " + fmt(e2) + " (tol 1 ulp); rate abs err " + fmt(e3) +
              " (tol 1e-12)"};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "coupling identity", 5, coupling_identity},
      {2, "transport oracle equivalence", 30, transport_oracle},
      {3, "metric ordering", 60, metric_ordering},
      {4, "Fourier-Kuramoto equivalence", 5, fourier_kuramoto},
      {5, "cut-norm tail bound", 120, cutnorm_bound},
      {6, "coupling mean-square rate", 600, coupling_rate},
      {7, "expectation convergence", 900, expectation_convergence},
      {8, "concentration trend", 1200, concentration_trend},
      {9, "LLN sanity", 600, lln_sanity},
      {10, "determinism", 60, determinism},
      {11, "bound evaluators", 1, bound_identities},
  };
  return all;
}

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = secs <= c.budget_seconds;
  const bool pass = o.pass && in_budget;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail
            << " [" << fmt(secs, 3) << " s, budget " << c.budget_seconds << " s"
            << (in_budget ? "" : ", OVER BUDGET") << "]" << std::endl;
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : criteria())
    if (only == 0 || c.id == only) failed += !run_one(c);
  return failed == 0 ? 0 : 1;
}
