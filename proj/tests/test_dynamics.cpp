#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "gpc/dynamics.hpp"
#include "gpc/experiments.hpp"
#include "support.hpp"

using namespace gpc;

namespace {

constexpr double kPi = std::numbers::pi;

InteractionModel pair_model(std::string name, std::function<double(double, double)> phi1d,
                            std::function<double(double)> psi1d, double sigma) {
  InteractionModel m;
  m.name = std::move(name);
  m.dim = 1;
  m.phi = [phi1d](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    out[0] = phi1d(x[0], y[0]);
  };
  m.psi = [psi1d](std::span<const double> x, std::span<double> out) { out[0] = psi1d(x[0]); };
  m.sigma = Matrix::Constant(1, 1, sigma);
  m.lipschitz_K = 1.0;
  m.phi_bound = INFINITY;
  return m;
}

// Row i = sum_j W(i,j) sin(x_j - x_i), evaluated term by term.
std::vector<double> naive_kuramoto_drift(const Matrix& W, const std::vector<double>& x, double K) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      out[i] += W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * K *
                std::sin(x[j] - x[i]);
  return out;
}

std::vector<double> random_state(StreamRng& rng, std::size_t n, double scale = 2.0) {
  std::vector<double> s(n);
  for (auto& v : s) v = scale * rng.normal();
  return s;
}

AdjacencySample random_adjacency(StreamRng& rng, std::size_t n, double p) {
  return sample_adjacency(Graphon::product(), n, p, rng);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("Fourier form of the Kuramoto coupling") {
  const auto fi = FourierInteraction::kuramoto(1.0);
  const double zero = 0.0, quarter = kPi / 2;
  CHECK(std::abs(fourier_evaluate(fi, {&zero, 1}, {&quarter, 1}) - 1.0) <= 1e-12);
  CHECK(std::abs(fourier_evaluate(fi, {&quarter, 1}, {&quarter, 1})) <= 1e-12);
  CHECK(fi.total_mass() == doctest::Approx(1.0));
  CHECK(FourierInteraction::kuramoto(2.5).total_mass() == doctest::Approx(2.5));

  const FourierInteraction empty(1, {});
  CHECK(fourier_evaluate(empty, {&zero, 1}, {&quarter, 1}) == 0.0);
}

TEST_CASE("unscaled Fourier atoms do not reproduce sin(y - x)") {
  const auto fi = FourierInteraction::kuramoto_unscaled(1.0);
  const double x = 0.0, y = 1.0;
  CHECK(std::abs(fi.evaluate_complex({&x, 1}, {&y, 1}).real() - std::sin(y - x)) > 0.1);
}

TEST_CASE("non-real Fourier measure is rejected") {
  const FourierInteraction lopsided(1, {FourierAtom{{0.1, 0.0}, {1.0, 0.0}}});
  const double x = 1.0, y = 0.0;
  CHECK_THROWS_AS(fourier_evaluate(lopsided, {&x, 1}, {&y, 1}), std::domain_error);
  CHECK_THROWS(FourierInteraction(1, {FourierAtom{{0.1}, {1.0, 0.0}}}));
}

TEST_CASE("Lipschitz spot check") {
  CHECK(spot_check(InteractionModel::kuramoto(1.0, 1.0)).lipschitz_ok);
  CHECK(spot_check(InteractionModel::kuramoto(1.0, 1.0)).bounded_ok);
  auto liar = pair_model("liar", [](double x, double y) { return 5.0 * (y - x); },
                         [](double) { return 0.0; }, 1.0);
  liar.phi_bound = 1.0;
  const auto report = spot_check(liar);
  CHECK_FALSE(report.lipschitz_ok);
  CHECK_FALSE(report.bounded_ok);
}

TEST_CASE("initial laws") {
  std::vector<double> out(2);
  InitialLaw::point_mass({1.0, -2.0}).sample(0.3, 5, 0, out);
  CHECK(out == std::vector<double>{1.0, -2.0});
  InitialLaw::point_mass({1.0, -2.0}).with_mean_slope({2.0, 0.0}).sample(0.5, 5, 0, out);
  CHECK(out == std::vector<double>{2.0, -2.0});
  const auto box = InitialLaw::uniform_box({0.0, 1.0}, {1.0, 3.0});
  for (std::uint64_t i = 0; i < 100; ++i) {
    box.sample(0.5, 7, i, out);
    CHECK(out[0] >= 0.0);
    CHECK(out[0] <= 1.0);
    CHECK(out[1] >= 1.0);
    CHECK(out[1] <= 3.0);
  }
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS(InitialLaw::gaussian({0.0, 0.0}, bad));
}

TEST_CASE("drift examples") {
  const std::size_t n = 4;
  const auto zero = InteractionModel::zero(1, 1.0);
  StreamRng rng(1, 0, Stream::Test);
  const auto mats = interaction_matrices(random_adjacency(rng, n, 0.8), Graphon::product());
  const auto s = random_state(rng, n);
  std::vector<double> out(n, 1.0);
  drift_sparse(zero, mats, s, out);
  CHECK(out == std::vector<double>(n, 0.0));

  const auto ou = zero.with_ou(1.0);
  drift_weight(ou, mats, s, out);
  for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == -s[i]);

  // n = 1, xi = [[1]], p = 1, phi(x, y) = y.
  const auto take_y = pair_model("y", [](double, double y) { return y; }, [](double) { return 0.0; }, 1.0);
  AdjacencySample one;
  one.n = 1;
  one.xi = Matrix::Ones(1, 1);
  const auto m1 = interaction_matrices(one, Graphon::constant(1.0));
  const double c = 0.731;
  double r = 0.0;
  drift_sparse(take_y, m1, {&c, 1}, {&r, 1});
  CHECK(r == c);
}

TEST_CASE("linear attraction under G = 1 pulls to the mean") {
  const auto attract = pair_model("attract", [](double x, double y) { return y - x; },
                                  [](double) { return 0.0; }, 1.0);
  StreamRng rng(2, 0, Stream::Test);
  const std::size_t n = 9;
  AdjacencySample a;
  a.n = n;
  a.xi = Matrix::Ones(n, n);
  const auto mats = interaction_matrices(a, Graphon::constant(1.0));
  const auto s = random_state(rng, n);
  std::vector<double> out(n);
  drift_weight(attract, mats, s, out);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out[i] - (mean - s[i])) <= 1e-14);
}

TEST_CASE("drift matches a naive double loop") {
  StreamRng rng(3, 0, Stream::Test);
  for (int t = 0; t < 50; ++t) {
    const double K = testing::uniform_real(rng, 0.1, 3.0);
    const auto model = InteractionModel::kuramoto(K, 1.0);
    for (std::size_t n : {2u, 3u}) {
      const auto mats = interaction_matrices(random_adjacency(rng, n, 0.6), Graphon::product());
      const auto s = random_state(rng, n);
      std::vector<double> sparse(n), weight(n);
      drift_sparse(model, mats, s, sparse);
      drift_weight(model, mats, s, weight);
      const auto want_sparse = naive_kuramoto_drift(mats.P, s, K);
      const auto want_weight = naive_kuramoto_drift(mats.Pbar, s, K);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(sparse[i] - want_sparse[i]) <= 1e-14);
        CHECK(std::abs(weight[i] - want_weight[i]) <= 1e-14);
      }
    }
  }
}

TEST_CASE("direct and Fourier drift paths agree") {
  StreamRng rng(4, 0, Stream::Test);
  const auto model = InteractionModel::kuramoto(1.7, 1.0);
  const std::size_t n = 30;
  const Matrix W = weight_matrix(Graphon::min(), n);
  const auto s = random_state(rng, n);
  std::vector<double> fast(n), direct(n);
  DriftEvaluator(model, W, true)(s, fast);
  DriftEvaluator(model, W, false)(s, direct);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fast[i] - direct[i]) <= 1e-13);
}

TEST_CASE("drift_weight is equivariant under relabelling") {
  StreamRng rng(5, 0, Stream::Test);
  const auto model = InteractionModel::kuramoto(1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = testing::uniform_size(rng, 2, 25);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto s = random_state(rng, n);
    std::vector<double> sp(n);
    for (std::size_t i = 0; i < n; ++i) sp[i] = s[perm[i]];

    for (const Graphon& g : {Graphon::constant(0.7), Graphon::min()}) {
      InteractionMatrices m, mp;
      m.Pbar = weight_matrix(g, n);
      mp.Pbar = Matrix(m.Pbar.rows(), m.Pbar.cols());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          mp.Pbar(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              m.Pbar(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]));
      if (g.kind() == Graphon::Kind::Constant) CHECK(mp.Pbar == m.Pbar);
      std::vector<double> out(n), outp(n);
      drift_weight(model, m, s, out);
      drift_weight(model, mp, sp, outp);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(outp[i] - out[perm[i]]) <= 1e-13);
    }
  }
}

TEST_CASE("additive noise only: Euler-Maruyama is exact") {
  const auto model = InteractionModel::zero(2, 0.8);
  const TimeGrid grid(1.0, 25);
  const std::size_t n = 6;
  const auto cp = simulate_coupled(model, InitialLaw::standard_gaussian(2), Graphon::product(),
                                   SparsityRule::dense(), n, grid, 17, 2);
  const auto inc = brownian_increments(stream_key(17, 2, Stream::Brownian), n, 2, grid);
  std::vector<double> x(cp.x_sparse.state(0).begin(), cp.x_sparse.state(0).end());
  std::vector<double> dB(n * 2);
  for (std::size_t m = 0; m < grid.M; ++m) {
    inc(m, dB);
    for (std::size_t r = 0; r < x.size(); ++r) x[r] = x[r] + 0.0 + 0.8 * dB[r];
    const auto got = cp.x_sparse.state(m + 1);
    for (std::size_t r = 0; r < x.size(); ++r) REQUIRE(got[r] == x[r]);
  }
  CHECK(cp.x_sparse == cp.x_weight);
}

TEST_CASE("noiseless Kuramoto from equal phases stays put") {
  const auto cp = simulate_coupled(InteractionModel::kuramoto(2.0, 0.0), InitialLaw::point_mass({0.4}),
                                   Graphon::product(), SparsityRule::power_law(0.3), 20,
                                   TimeGrid(1.0, 50), 3);
  for (std::size_t m = 0; m < cp.grid.points(); ++m)
    for (std::size_t i = 0; i < cp.n; ++i) {
      CHECK(cp.x_sparse.at(i, m, 0) == 0.4);
      CHECK(cp.x_weight.at(i, m, 0) == 0.4);
    }
}

TEST_CASE("dense constant-one coupling gives identical paths") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto cp = simulate_coupled(InteractionModel::kuramoto(1.0, 1.0), InitialLaw::standard_gaussian(1),
                                     Graphon::constant(1.0), SparsityRule::dense(), 32,
                                     TimeGrid(1.0, 100), seed);
    CHECK(cp.x_sparse == cp.x_weight);
  }
}

TEST_CASE("simulation is a pure function of its inputs") {
  const auto run = [] {
    return simulate_coupled(InteractionModel::kuramoto(1.0, 1.0), InitialLaw::standard_gaussian(1),
                            Graphon::product(), SparsityRule::power_law(0.3), 40, TimeGrid(1.0, 60),
                            99, 4);
  };
  const auto a = run(), b = run();
  CHECK(a.x_sparse == b.x_sparse);
  CHECK(a.x_weight == b.x_weight);
  const auto other = simulate_coupled(InteractionModel::kuramoto(1.0, 1.0),
                                      InitialLaw::standard_gaussian(1), Graphon::product(),
                                      SparsityRule::power_law(0.3), 40, TimeGrid(1.0, 60), 99, 5);
  CHECK_FALSE(other.x_sparse == a.x_sparse);
}

TEST_CASE("overflow stops the integration with a diagnostic") {
  auto blowup = pair_model("blowup", [](double, double) { return 0.0; },
                           [](double x) { return x * x * x * 1e6; }, 0.0);
  const auto cp = simulate_coupled(blowup, InitialLaw::point_mass({10.0}), Graphon::constant(1.0),
                                   SparsityRule::dense(), 3, TimeGrid(1.0, 50), 1);
  CHECK(cp.overflow);
  CHECK(cp.failed_step > 0);
  CHECK_FALSE(cp.diagnostic.empty());
}

TEST_CASE("halving the step halves the strong error") {
  // Three resolutions driven by the same fine Brownian increments; the ratio
  // of successive differences estimates 2^order.
  const auto model = InteractionModel::kuramoto(1.0, 1.0);
  const std::size_t n = 16, M = 32, R = 20;
  const Matrix W = weight_matrix(Graphon::product(), n);
  const TimeGrid fine(1.0, 4 * M);
  double e_coarse = 0.0, e_mid = 0.0;
  for (std::size_t rep = 0; rep < R; ++rep) {
    const auto x0 = initial_states(InitialLaw::standard_gaussian(1), n, stream_key(8, rep, Stream::Initial));
    const auto key = stream_key(8, rep, Stream::Brownian);
    const double sd = std::sqrt(fine.h());
    const auto run = [&](std::size_t per_step) {
      const IncrementSource src = [&](std::size_t step, std::span<double> dB) {
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (std::size_t k = 0; k < per_step; ++k)
            s += sd * normal_at(key, i, static_cast<std::uint32_t>(step * per_step + k), 0);
          dB[i] = s;
        }
      };
      return integrate_system(model, W, x0, TimeGrid(1.0, 4 * M / per_step), src).paths;
    };
    const auto h1 = run(4), h2 = run(2), h4 = run(1);
    double a = 0.0, b = 0.0;
    for (std::size_t m = 0; m <= M; ++m)
      for (std::size_t i = 0; i < n; ++i) {
        a = std::max(a, std::abs(h1.at(i, m, 0) - h2.at(i, 2 * m, 0)));
        b = std::max(b, std::abs(h2.at(i, 2 * m, 0) - h4.at(i, 4 * m, 0)));
      }
    e_coarse += a;
    e_mid += b;
  }
  const double ratio = e_coarse / e_mid;
  INFO("error ratio " << ratio);
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.5);
}

TEST_CASE("driftless reference ensemble is centred") {
  const std::size_t N = 2000;
  const TimeGrid grid(1.0, 20);
  const auto ref = simulate_reference(InteractionModel::zero(2, 1.0), InitialLaw::point_mass({0.0, 0.0}),
                                      Graphon::product(), N, grid, 5);
  for (std::size_t m = 1; m < grid.points(); ++m)
    for (std::size_t k = 0; k < 2; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) s += ref.paths.at(i, m, k);
      CHECK(std::abs(s / N) <= 4.0 * std::sqrt(grid.time(m) / N));
    }
  CHECK_THROWS(simulate_reference(InteractionModel::zero(1, 1.0), InitialLaw::point_mass({0.0}),
                                  Graphon::product(), 1, grid, 5));
}

TEST_CASE("reference streams are disjoint from replication streams") {
  const auto model = InteractionModel::kuramoto(1.0, 1.0);
  const TimeGrid grid(1.0, 10);
  const auto ref = simulate_reference(model, InitialLaw::standard_gaussian(1), Graphon::product(), 8, grid, 1);
  const auto cp = simulate_coupled(model, InitialLaw::standard_gaussian(1), Graphon::product(),
                                   SparsityRule::dense(), 8, grid, 1, 0);
  CHECK_FALSE(ref.paths == cp.x_weight);
}

TEST_CASE("Kuramoto circular variance matches the frozen trajectory") {
  // Regenerate with GPC_WRITE_GOLDEN=1 after a deliberate change to the
  // integrator or the random streams.
  const auto ref = simulate_reference(InteractionModel::kuramoto(1.0, 1.0),
                                      InitialLaw::standard_gaussian(1), Graphon::constant(1.0), 2000,
                                      TimeGrid(1.0, 100), 1);
  const auto cv = circular_variance(ref.paths);
  std::ostringstream now;
  for (std::size_t m = 0; m < cv.size(); ++m) now << m << "," << format_double(cv[m]) << "\n";

  const std::string path = std::string(GPC_TEST_DATA_DIR) + "/kuramoto_circular_variance.csv";
  if (std::getenv("GPC_WRITE_GOLDEN")) {
    std::ofstream(path) << now.str();
    MESSAGE("wrote " << path);
  }
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(golden.str() == now.str());
}

TEST_CASE("paths CSV layout") {
  PathArray p(1, 2, 1);
  p.at(0, 1, 0) = 0.5;
  std::ostringstream os;
  write_paths_csv(os, p, 3);
  CHECK(os.str() == "replication,particle,step,coordinate,value\n3,0,0,0,0\n3,0,1,0,0.5\n");
}

}
