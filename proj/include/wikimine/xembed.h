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

// Monolingual word embeddings and a CCA projection of two of them into a
// shared space, fitted on the word pairs of a bilingual dictionary.

#ifndef WIKIMINE_XEMBED_H_
#define WIKIMINE_XEMBED_H_

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wikimine/align.h"

namespace wikimine {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  // Throws std::invalid_argument if the sizes disagree, a word repeats, or
  // a value is not finite.
  EmbeddingSpace(std::string lang, std::vector<std::string> words, RowMatrix vectors);

  const std::string &lang() const { return lang_; }
  int dim() const { return static_cast<int>(vectors_.cols()); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }
  const RowMatrix &vectors() const { return vectors_; }

  // Row of `word`, or -1.
  int Find(std::string_view word) const;
  std::span<const double> Vector(int row) const {
    return {vectors_.data() + static_cast<std::ptrdiff_t>(row) * vectors_.cols(),
            static_cast<std::size_t>(vectors_.cols())};
  }

 private:
  std::string lang_;
  std::vector<std::string> words_;
  RowMatrix vectors_;
  std::unordered_map<std::string, int> index_;
};

struct EmbeddingLoadStats {
  std::size_t rows_read = 0;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_duplicate = 0;
};

// word2vec text format: a `N d` header, then `word v1 ... vd` rows. The
// header count is advisory. Malformed rows (wrong arity, unparsable or
// non-finite values) are skipped; loading fails with DataError when more than
// max(1, 1%) of the rows are malformed, or on a missing/corrupt header.
// Duplicate words keep their first row.
EmbeddingSpace ReadEmbeddings(std::istream &in, const std::string &lang,
                              EmbeddingLoadStats *stats = nullptr);
EmbeddingSpace LoadEmbeddings(const std::filesystem::path &path,
                              const std::string &lang,
                              EmbeddingLoadStats *stats = nullptr);
void WriteEmbeddings(std::ostream &out, const EmbeddingSpace &space);
void SaveEmbeddings(const std::filesystem::path &path, const EmbeddingSpace &space);

struct CcaProjection {
  int dim_e = 0;
  int dim_f = 0;
  int k = 0;
  double epsilon = 0.0;
  Eigen::VectorXd mean_e;
  Eigen::VectorXd mean_f;
  Eigen::MatrixXd a;  // dim_e x k
  Eigen::MatrixXd b;  // dim_f x k
  // Canonical correlations, non-increasing.
  std::vector<double> correlations;

  void Write(std::ostream &out) const;
  void Save(const std::filesystem::path &path) const;
  static CcaProjection Read(std::istream &in);
  static CcaProjection Load(const std::filesystem::path &path);
};

// Default regularizer scale: epsilon = kRelativeEpsilon * mean diagonal of
// the two covariance matrices.
inline constexpr double kRelativeEpsilon = 1e-8;

// Half the smaller input dimension, rounded down (150 for 300-d inputs).
int DefaultCcaDim(int dim_e, int dim_f);

// CCA on paired rows of x and y. `epsilon` is an absolute ridge added to both
// covariance diagonals; std::nullopt selects the relative default. The
// effective k is reduced to the numerical rank of the whitened
// cross-covariance. Throws DataError with fewer than two rows and
// std::invalid_argument when k is out of range.
CcaProjection FitCcaOnPairs(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y, int k,
                            std::optional<double> epsilon = std::nullopt);

// Builds one row pair per dictionary entry whose words both have vectors,
// then runs FitCcaOnPairs. Throws DataError("fewer than 2 usable pairs").
CcaProjection FitCca(const BilingualDictionary &dict, const EmbeddingSpace &emb_e,
                     const EmbeddingSpace &emb_f, int k,
                     std::optional<double> epsilon = std::nullopt,
                     std::size_t *usable_pairs = nullptr);

enum class Side { kE, kF };

// v -> (v - mean)^T M for the side's mean and matrix. Output has dim k and the
// same vocabulary order.
EmbeddingSpace Project(const EmbeddingSpace &space, Side side, const CcaProjection &proj);

// dot(u, v) / (|u| |v|), or 0 when either norm is zero. Throws
// std::invalid_argument on a size mismatch.
double Cosine(std::span<const double> u, std::span<const double> v);

}  // namespace wikimine

#endif  // WIKIMINE_XEMBED_H_
