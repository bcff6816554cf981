#include "doctest.h"

#include <cmath>
#include <sstream>

#include "gpc/graphon.hpp"
#include "gpc/stats.hpp"
#include "support.hpp"

using namespace gpc;

TEST_SUITE("graphon") {

TEST_CASE("closed-form kernels") {
  CHECK(evaluate(Graphon::constant(0.5), 0.3, 0.7) == 0.5);
  CHECK(evaluate(Graphon::min(), 0.25, 0.75) == 0.25);
  CHECK(evaluate(Graphon::product(), 0.5, 0.5) == 0.25);
  CHECK_THROWS(Graphon::constant(1.5));
  CHECK_THROWS(evaluate(Graphon::product(), 1.2, 0.5));
}

TEST_CASE("grid kernel cells are left closed and u = 1 is in the last cell") {
  const Graphon g = Graphon::grid({{0.1, 0.2}, {0.2, 0.9}});
  CHECK(g(0.0, 0.0) == 0.1);
  CHECK(g(0.49, 0.5) == 0.2);
  CHECK(g(0.5, 0.5) == 0.9);
  CHECK(g(1.0, 1.0) == 0.9);
  CHECK_THROWS(Graphon::grid({{0.1, 0.2}, {0.3, 0.9}}));
  CHECK_THROWS(Graphon::grid({{0.1, 1.2}, {1.2, 0.9}}));
}

TEST_CASE("weight matrix examples") {
  const Matrix c1 = weight_matrix(Graphon::constant(1.0), 2);
  CHECK(c1 == Matrix::Constant(2, 2, 0.5));
  Matrix prod(2, 2);
  prod << 0.125, 0.25, 0.25, 0.5;
  CHECK(weight_matrix(Graphon::product(), 2) == prod);
  CHECK(weight_matrix(Graphon::constant(0.0), 7).isZero(0.0));
}

TEST_CASE("weight matrix is symmetric with entries in [0, 1/n]") {
  auto rng = testing::test_rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = testing::uniform_size(rng, 1, 40);
    const std::size_t m = testing::uniform_size(rng, 1, 5);
    std::vector<std::vector<double>> cells(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) cells[i][j] = cells[j][i] = rng.uniform();
    for (const Graphon& g : {Graphon::product(), Graphon::min(), Graphon::grid(cells),
                             Graphon::constant(rng.uniform())}) {
      const Matrix W = weight_matrix(g, n);
      CHECK(W == W.transpose());
      CHECK(W.minCoeff() >= 0.0);
      CHECK(W.maxCoeff() <= 1.0 / static_cast<double>(n));
    }
  }
}

TEST_CASE("adjacency extremes") {
  StreamRng rng(1, 0, Stream::Test);
  CHECK(sample_adjacency(Graphon::constant(1.0), 4, 1.0, rng).xi == Matrix::Ones(4, 4));
  CHECK(sample_adjacency(Graphon::constant(0.0), 4, 1.0, rng).xi.isZero(0.0));
  CHECK_THROWS(sample_adjacency(Graphon::constant(1.0), 4, 0.0, rng));
}

TEST_CASE("adjacency is symmetric and 0/1 valued") {
  StreamRng rng(2, 0, Stream::Test);
  for (int t = 0; t < 20; ++t) {
    const auto a = sample_adjacency(Graphon::product(), 15, 0.7, rng);
    CHECK(a.xi == a.xi.transpose());
    CHECK((a.xi.array() * (1.0 - a.xi.array())).isZero(0.0));
  }
}

TEST_CASE("edge frequency matches p G within the exact binomial interval") {
  // Constant(0.6), p = 0.5: the (1,2) entry is Bernoulli(0.3).
  const Graphon g = Graphon::constant(0.6);
  const std::size_t R = 10000;
  std::size_t hits = 0;
  for (std::size_t s = 0; s < R; ++s) {
    StreamRng rng(s, 0, Stream::Test);
    hits += sample_adjacency(g, 2, 0.5, rng).xi(0, 1) == 1.0;
  }
  const Interval ci = clopper_pearson(hits, R, 0.99);
  CHECK(ci.low <= 0.30);
  CHECK(0.30 <= ci.high);
}

TEST_CASE("interaction matrix examples") {
  const Graphon one = Graphon::constant(1.0);
  StreamRng rng(3, 0, Stream::Test);
  CHECK(interaction_matrices(sample_adjacency(one, 2, 1.0, rng), one).D.isZero(0.0));

  const Graphon zero = Graphon::constant(0.0);
  const auto m0 = interaction_matrices(sample_adjacency(zero, 5, 0.3, rng), zero);
  CHECK(m0.P.isZero(0.0));
  CHECK(m0.D == -m0.Pbar);

  AdjacencySample single;
  single.n = 1;
  single.p = 1.0;
  single.xi = Matrix::Ones(1, 1);
  const auto m1 = interaction_matrices(single, Graphon::constant(0.5));
  CHECK(m1.P(0, 0) == 1.0);
  CHECK(m1.Pbar(0, 0) == 0.5);
  CHECK(m1.D(0, 0) == 0.5);
}

TEST_CASE("dense constant-one graph has D = 0 for every sample") {
  const Graphon one = Graphon::constant(1.0);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto adj = replication_adjacency(one, SparsityRule::dense(), 17, 9, rep);
    CHECK(interaction_matrices(adj, one).D.isZero(0.0));
  }
}

TEST_CASE("D has mean zero and the Bernoulli variance entrywise") {
  const Graphon g = Graphon::product();
  const std::size_t n = 4, R = 10000;
  const double p = 0.5;
  const double np = static_cast<double>(n) * p;
  const Matrix Pbar = weight_matrix(g, n);
  Matrix sum = Matrix::Zero(n, n), sq = Matrix::Zero(n, n);
  for (std::size_t r = 0; r < R; ++r) {
    StreamRng rng(r, 1, Stream::Test);
    const Matrix D = interaction_matrices(sample_adjacency(g, n, p, rng), g).D;
    sum += D;
    sq += D.cwiseProduct(D);
  }
  const double Rd = static_cast<double>(R);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      const double mean = sum(I, J) / Rd;
      const double var = (sq(I, J) - Rd * mean * mean) / (Rd - 1);  // unbiased
      CHECK(std::abs(mean) <= 4.0 * std::sqrt(var / Rd));

      const double q = p * Pbar(I, J) * static_cast<double>(n);  // p g
      const double expected = q * (1 - q) / (np * np);
      const double mu4 = q * (1 - q) * (1 - 3 * q + 3 * q * q) / std::pow(np, 4);
      // Exact standard deviation of the unbiased sample variance.
      const double var_se = std::sqrt((mu4 - expected * expected * (Rd - 3) / (Rd - 1)) / Rd);
      CHECK(std::abs(var - expected) <= 5.0 * var_se);
    }
  }
}

TEST_CASE("sparsity rules") {
  CHECK(SparsityRule::dense().p(100) == 1.0);
  const auto pl = SparsityRule::power_law(0.4);
  CHECK(pl.p(100) == doctest::Approx(std::pow(100.0, -0.4)));
  CHECK(pl.degree_diverges());
  CHECK(pl.squared_degree_condition());
  CHECK(SparsityRule::power_law(0.7).degree_diverges());
  CHECK_FALSE(SparsityRule::power_law(0.7).squared_degree_condition());
  CHECK_FALSE(SparsityRule::power_law(1.0).degree_diverges());
  CHECK(SparsityRule::dense().squared_degree_condition());
  CHECK_THROWS(SparsityRule::power_law(0.0));
}

TEST_CASE("adjacency CSV is dense 0/1 rows") {
  AdjacencySample a;
  a.n = 2;
  a.xi = Matrix::Identity(2, 2);
  std::ostringstream os;
  write_adjacency_csv(os, a);
  CHECK(os.str() == "1,0\n0,1\n");
}

}
