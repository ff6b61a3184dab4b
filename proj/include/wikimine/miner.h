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

// Parallel sentence mining inside linked document pairs.
//
// Word similarity is 1.0 for dictionary pairs and the cosine of the projected
// embeddings otherwise (0.0 when a word has no vector). A sentence pair scores
// the mean over source words of the best similarity against any target word.
// A candidate (s, t) is accepted when t is the best target for s, s is the
// best source for t under the role-swapped score, and both scores reach tau.

#ifndef WIKIMINE_MINER_H_
#define WIKIMINE_MINER_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wikimine/align.h"
#include "wikimine/corpus.h"
#include "wikimine/seed.h"
#include "wikimine/xembed.h"

namespace wikimine {

struct MiningConfig {
  // Threshold on min(score_fwd, score_rev). Values above 1 accept nothing.
  double tau = 0.5;
  bool numeric_filter = true;
  bool include_titles = true;
  int threads = 1;

  // Candidate lengths must be within this factor of each other.
  static constexpr double kLengthRatio = 2.0;

  // Throws ValidationError if tau is not a number >= -1.
  void Validate() const;
};

// One side of the scoring: source-word vectors, target-word vectors and the
// dictionary whose pairs count as exact translations.
class WordSimilarity {
 public:
  WordSimilarity(const BilingualDictionary &dict, const EmbeddingSpace &src_space,
                 const EmbeddingSpace &tgt_space);

  double operator()(std::string_view s, std::string_view t) const;

  // Dictionary targets of a source word.
  const std::vector<std::string> *Translations(std::string_view s) const;

  const EmbeddingSpace &src_space() const { return *src_space_; }
  const EmbeddingSpace &tgt_space() const { return *tgt_space_; }

 private:
  std::unordered_map<std::string, std::vector<std::string>> dict_;
  const EmbeddingSpace *src_space_;
  const EmbeddingSpace *tgt_space_;
};

// sim(s, t) over projected spaces: 1.0 on dictionary membership, else cosine,
// else 0.0 when a word lacks a vector.
double WordSim(std::string_view s, std::string_view t, const BilingualDictionary &dict,
               const EmbeddingSpace &src_space, const EmbeddingSpace &tgt_space);

// Average over `src` of the maximum similarity against `tgt`. Throws
// std::invalid_argument when src is empty.
double SentenceScore(const std::vector<std::string> &src,
                     const std::vector<std::string> &tgt, const WordSimilarity &sim);

struct CandidatePair {
  int src_index;
  int tgt_index;

  bool operator==(const CandidatePair &) const = default;
};

// Cross product of the sentence lists, dropping empty sentences, pairs
// outside the length ratio and (if enabled) pairs with different numbers.
std::vector<CandidatePair> Candidates(const std::vector<Sentence> &src,
                                      const std::vector<Sentence> &tgt,
                                      const MiningConfig &cfg);
std::vector<CandidatePair> Candidates(const DocPair &pair, const MiningConfig &cfg);

struct MinedPair {
  Sentence src;
  Sentence tgt;
  double score_fwd = 0.0;
  double score_rev = 0.0;
  std::string src_doc;
  std::string tgt_doc;
  // Sentence positions in the documents; -1 for title pairs.
  int src_index = -1;
  int tgt_index = -1;
};

// Scores and selects mutual-best pairs. The forward direction uses `dict`
// with source words in proj_e; the reverse direction swaps roles and uses
// `rev_dict`, keyed by target-language words. Holds references to the
// dictionaries and spaces, which must outlive the Miner.
class Miner {
 public:
  Miner(const BilingualDictionary &dict, const BilingualDictionary &rev_dict,
        const EmbeddingSpace &proj_e, const EmbeddingSpace &proj_f);

  const WordSimilarity &forward() const { return forward_; }
  const WordSimilarity &reverse() const { return reverse_; }

  double ScoreForward(const Sentence &s, const Sentence &t) const {
    return SentenceScore(s.tokens, t.tokens, forward_);
  }
  double ScoreReverse(const Sentence &s, const Sentence &t) const {
    return SentenceScore(t.tokens, s.tokens, reverse_);
  }

  // Accepted pairs of one document pair, ordered by source sentence index.
  // Argmax ties go to the earliest sentence.
  std::vector<MinedPair> MutualBest(const DocPair &pair, const MiningConfig &cfg) const;

  // MutualBest over every pair, in input order, followed by the title pairs
  // when cfg.include_titles. Document pairs run in parallel.
  std::vector<MinedPair> Mine(const std::vector<DocPair> &pairs,
                              const std::vector<SeedPair> &titles,
                              const MiningConfig &cfg) const;

 private:
  WordSimilarity forward_;
  WordSimilarity reverse_;
  // Unit-length copies of the projected vectors.
  RowMatrix unit_e_;
  RowMatrix unit_f_;
};

// TSV `src_raw \t tgt_raw \t score_fwd \t score_rev \t src_doc \t tgt_doc`.
void WriteMinedCorpus(std::ostream &out, const std::vector<MinedPair> &pairs);
void SaveMinedCorpus(const std::filesystem::path &path, const std::vector<MinedPair> &pairs);
std::vector<MinedPair> ReadMinedCorpus(std::istream &in, const std::string &lang_e,
                                       const std::string &lang_f);

}  // namespace wikimine

#endif  // WIKIMINE_MINER_H_
