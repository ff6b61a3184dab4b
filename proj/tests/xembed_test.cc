// Copyright 2026 The Wikimine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.h"
#include "wikimine/util.h"
#include "wikimine/xembed.h"

namespace wikimine {
namespace {

EmbeddingSpace Read(const std::string &text, EmbeddingLoadStats *stats = nullptr) {
  std::stringstream in(text);
  return ReadEmbeddings(in, "en", stats);
}

Eigen::MatrixXd Gaussian(int rows, int cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

TEST_CASE("Embedding loader accepts well-formed text") {
  EmbeddingLoadStats stats;
  const auto space = Read("2 3\ncat 1 2 3\ndog 0.5 -1 1e-3\n", &stats);
  CHECK(space.size() == 2);
  CHECK(space.dim() == 3);
  CHECK(space.Find("dog") == 1);
  CHECK(space.Find("cow") == -1);
  CHECK(space.Vector(1)[2] == 1e-3);
  CHECK(stats.rows_read == 2);
}

TEST_CASE("Embedding loader skips a few malformed rows and first duplicates win") {
  std::string text = "200 2\n";
  for (int i = 0; i < 199; ++i) text += testing::Word("w", i) + " 1 2\n";
  text += "bad 1\n";
  text += testing::Word("w", 0) + " 9 9\n";
  EmbeddingLoadStats stats;
  const auto space = Read(text, &stats);
  CHECK(space.size() == 199);
  CHECK(stats.skipped_malformed == 1);
  CHECK(stats.skipped_duplicate == 1);
  CHECK(space.Vector(0)[0] == 1.0);
}

TEST_CASE("Embedding loader fails on bad headers and too many malformed rows") {
  CHECK_THROWS_AS(Read(""), DataError);
  CHECK_THROWS_AS(Read("two 3\n"), DataError);
  CHECK_THROWS_AS(Read("1 0\n"), DataError);
  CHECK_THROWS_AS(Read("3 2\na 1 2\nb 1\nc nan 1\n"), DataError);
  CHECK_THROWS_AS(Read("3 2\na 1 2\nb x y\nc 1 2\nd 1\n"), DataError);
  // One malformed row is always tolerated.
  CHECK(Read("2 2\na 1 2\nb 1\n").size() == 1);
}

TEST_CASE("Embedding space constructor checks its arguments") {
  RowMatrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK_THROWS_AS(EmbeddingSpace("en", {"a"}, m), std::invalid_argument);
  CHECK_THROWS_AS(EmbeddingSpace("en", {"a", "a"}, m), std::invalid_argument);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(EmbeddingSpace("en", {"a", "b"}, m), std::invalid_argument);
}

TEST_CASE("Embedding write/read round trip is exact") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd g = Gaussian(30, 7, rng);
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back(testing::Word("v", i));
  const EmbeddingSpace space("en", words, g);
  std::stringstream out;
  WriteEmbeddings(out, space);
  const auto back = Read(out.str());
  CHECK(back.words() == space.words());
  CHECK(back.vectors() == space.vectors());
}

TEST_CASE("Default CCA dimension") {
  CHECK(DefaultCcaDim(300, 300) == 150);
  CHECK(DefaultCcaDim(300, 51) == 25);
  CHECK(DefaultCcaDim(1, 1) == 1);
}

TEST_CASE("CCA argument errors") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd x = Gaussian(1, 3, rng), y = Gaussian(1, 3, rng);
  CHECK_THROWS_AS(FitCcaOnPairs(x, y, 1), DataError);
  const Eigen::MatrixXd x2 = Gaussian(20, 3, rng), y2 = Gaussian(20, 4, rng);
  CHECK_THROWS_AS(FitCcaOnPairs(x2, y2, 0), std::invalid_argument);
  CHECK_THROWS_AS(FitCcaOnPairs(x2, y2, 4), std::invalid_argument);
  CHECK_THROWS_AS(FitCcaOnPairs(x2, Gaussian(19, 4, rng), 2), std::invalid_argument);

  BilingualDictionary dict;
  dict.Add("a", "b", Provenance::kSeed);
  RowMatrix one(1, 2);
  one << 1, 2;
  const EmbeddingSpace e("en", {"a"}, one), f("xx", {"b"}, one);
  CHECK_THROWS_AS(FitCca(dict, e, f, 1), DataError);
}

// Projected training data (population covariances) must be whitened and pairwise correlated exactly by
// the reported canonical correlations.
TEST_CASE("CCA projections are whitened and diagonally correlated") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 60 + static_cast<int>(rng() % 100);
    const int de = 2 + static_cast<int>(rng() % 8), df = 2 + static_cast<int>(rng() % 8);
    const Eigen::MatrixXd z = Gaussian(n, 3, rng);
    const Eigen::MatrixXd x = z * Gaussian(3, de, rng) + Gaussian(n, de, rng);
    const Eigen::MatrixXd y = z * Gaussian(3, df, rng) + 0.5 * Gaussian(n, df, rng);
    const int k = std::min(de, df);
    const CcaProjection p = FitCcaOnPairs(x, y, k, 0.0);
    REQUIRE(p.k == k);
    const Eigen::MatrixXd u = (x.rowwise() - p.mean_e.transpose()) * p.a;
    const Eigen::MatrixXd v = (y.rowwise() - p.mean_f.transpose()) * p.b;
    const Eigen::MatrixXd cuu = u.transpose() * u / n;
    const Eigen::MatrixXd cvv = v.transpose() * v / n;
    const Eigen::MatrixXd cuv = u.transpose() * v / n;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
    CHECK((cuu - eye).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((cvv - eye).cwiseAbs().maxCoeff() < 1e-6);
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(cuv(i, i) - p.correlations[i]) < 1e-6);
      CHECK(p.correlations[i] <= 1.0 + 1e-9);
      CHECK(p.correlations[i] >= -1e-9);
      if (i > 0) CHECK(p.correlations[i] <= p.correlations[i - 1] + 1e-12);
      for (int j = 0; j < k; ++j) {
        if (i != j) CHECK(std::abs(cuv(i, j)) < 1e-6);
      }
    }
  }
}

TEST_CASE("CCA projection save/load round trip") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd x = Gaussian(40, 5, rng), y = Gaussian(40, 4, rng);
  const CcaProjection p = FitCcaOnPairs(x, y, 3);
  std::stringstream buf;
  p.Write(buf);
  const CcaProjection q = CcaProjection::Read(buf);
  CHECK(q.k == 3);
  CHECK(q.dim_e == 5);
  CHECK(q.dim_f == 4);
  CHECK(q.epsilon == p.epsilon);
  CHECK(q.a == p.a);
  CHECK(q.b == p.b);
  CHECK(q.mean_e == p.mean_e);
  CHECK(q.correlations == p.correlations);
  std::stringstream garbage("not a projection\n");
  CHECK_THROWS_AS(CcaProjection::Read(garbage), DataError);
}

TEST_CASE("Project applies the mean and matrix of the requested side") {
  CcaProjection p;
  p.dim_e = 2;
  p.dim_f = 1;
  p.k = 1;
  p.mean_e = Eigen::Vector2d(1, 1);
  p.mean_f = Eigen::VectorXd::Constant(1, 2);
  p.a = Eigen::MatrixXd(2, 1);
  p.a << 2, 3;
  p.b = Eigen::MatrixXd::Constant(1, 1, -1);
  RowMatrix ve(1, 2);
  ve << 2, 3;
  const auto pe = Project(EmbeddingSpace("en", {"w"}, ve), Side::kE, p);
  CHECK(pe.dim() == 1);
  CHECK(pe.Vector(0)[0] == 2 * 1 + 3 * 2);
  RowMatrix vf(1, 1);
  vf << 5;
  CHECK(Project(EmbeddingSpace("xx", {"w"}, vf), Side::kF, p).Vector(0)[0] == -3);
  CHECK_THROWS_AS(Project(EmbeddingSpace("xx", {"w"}, vf), Side::kE, p), std::invalid_argument);
}

TEST_CASE("Cosine") {
  const std::vector<double> a = {1, 0}, b = {0, 2}, c = {3, 0}, zero = {0, 0};
  CHECK(Cosine(a, b) == 0.0);
  CHECK(Cosine(a, c) == doctest::Approx(1.0));
  CHECK(Cosine(a, zero) == 0.0);
  const std::vector<double> d = {1, 1};
  CHECK(Cosine(a, d) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK_THROWS_AS(Cosine(a, std::vector<double>{1}), std::invalid_argument);
}

}  // namespace
}  // namespace wikimine
