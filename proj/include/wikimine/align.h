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

// IBM Model 1 word alignment trained with EM, Viterbi decoding, alignment
// intersection, and bilingual dictionary induction from intersected links.

#ifndef WIKIMINE_ALIGN_H_
#define WIKIMINE_ALIGN_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wikimine {

using TokenSeq = std::vector<std::string>;

// A sentence pair in the orientation of the model being trained: `src`
// generates `tgt`.
struct SentencePair {
  TokenSeq src;
  TokenSeq tgt;
};

std::vector<SentencePair> Reversed(std::span<const SentencePair> corpus);

enum class Direction { kEtoF, kFtoE };

std::string_view DirectionName(Direction direction);

// Interns strings to dense ids in insertion order.
class Vocab {
 public:
  int Intern(std::string_view word);
  int Find(std::string_view word) const;  // -1 when absent
  const std::string &word(int id) const { return words_[static_cast<std::size_t>(id)]; }
  int size() const { return static_cast<int>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

struct Model1Options {
  int iterations = 5;
  Direction direction = Direction::kEtoF;
  // fast_align style alignment prior p(i|j) favouring the diagonal. Off by
  // default, which gives the uniform Model 1 prior 1/(l+1).
  bool favor_diagonal = false;
  double diagonal_tension = 4.0;
  double null_probability = 0.08;
  int threads = 1;
};

// Lexical translation probabilities t(tgt | src). The source vocabulary holds
// the NULL word at id 0. Only co-occurring pairs are stored; a table with
// iterations() == 0 is the uniform initialization, where every known target
// has probability 1/|V_tgt| under every source.
class TranslationTable {
 public:
  static constexpr std::string_view kNull = "<NULL>";

  TranslationTable() = default;

  double Prob(std::string_view src, std::string_view tgt) const;
  double Prob(int src_id, int tgt_id) const;

  // Sum of t(. | src) over the target vocabulary.
  double RowSum(std::string_view src) const;
  // Explicit (tgt, prob) entries of a row, in target-id order.
  std::vector<std::pair<std::string, double>> Row(std::string_view src) const;

  const Vocab &src_vocab() const { return src_vocab_; }
  const Vocab &tgt_vocab() const { return tgt_vocab_; }
  const Model1Options &options() const { return options_; }
  Direction direction() const { return options_.direction; }
  int iterations() const { return iterations_; }

  // TSV rows `src \t tgt \t prob`, preceded by one `#` metadata line.
  void Write(std::ostream &out) const;
  void Save(const std::filesystem::path &path) const;
  static TranslationTable Read(std::istream &in);

 private:
  friend class Model1Trainer;

  int Slot(int src_id, int tgt_id) const;

  Vocab src_vocab_;
  Vocab tgt_vocab_;
  // CSR rows over source ids; columns sorted by target id.
  std::vector<std::uint32_t> row_start_;
  std::vector<int> cols_;
  std::vector<double> probs_;
  Model1Options options_;
  int iterations_ = 0;
};

// EM for IBM Model 1. Expected counts are accumulated per fixed-size chunk of
// sentences and merged in chunk order, so results do not depend on the
// number of threads.
class Model1Trainer {
 public:
  // Throws DataError on an empty corpus or a sentence with no tokens.
  Model1Trainer(std::span<const SentencePair> corpus, Model1Options options);

  // One EM iteration. Returns the corpus log-likelihood under the parameters
  // in effect before the update.
  double Step();

  // log p(tgt | src) summed over the corpus under the current parameters,
  // dropping the constant sentence length term.
  double LogLikelihood() const;

  int iterations() const { return table_.iterations_; }
  const TranslationTable &table() const { return table_; }

 private:
  struct Interned {
    std::vector<int> src;  // without NULL
    std::vector<int> tgt;
  };

  double Pass(std::vector<double> *counts) const;

  std::vector<Interned> corpus_;
  TranslationTable table_;
  std::vector<std::uint32_t> row_of_slot_;
};

struct Model1Result {
  TranslationTable table;
  // log_likelihoods[k] is the corpus log-likelihood after k iterations.
  std::vector<double> log_likelihoods;
};

// Requires options.iterations >= 1.
Model1Result TrainModel1(std::span<const SentencePair> corpus,
                         const Model1Options &options);

// Word links of one sentence pair, 1-based (i over source, j over target).
// NULL links are not stored.
struct Alignment {
  int src_len = 0;
  int tgt_len = 0;
  std::vector<std::pair<int, int>> links;  // sorted

  bool operator==(const Alignment &) const = default;

  // Each source and each target position used at most once.
  bool IsOneToOne() const;
  Alignment Transposed() const;
};

// Each target position links to the source position with the highest
// alignment score, NULL (position 0) included; ties go to the smallest i and
// a NULL winner leaves the position unlinked. Unknown target words stay
// unlinked.
Alignment ViterbiAlign(const TranslationTable &table, const TokenSeq &src,
                       const TokenSeq &tgt);

// Links present in both `fwd` (e->f, i over e) and `rev` (f->e, i over f).
// Throws std::invalid_argument when the sentence lengths disagree.
Alignment Intersect(const Alignment &fwd, const Alignment &rev);

// Pharaoh format: space separated `i-j`, 0-based.
std::string FormatPharaoh(const Alignment &alignment);
Alignment ParsePharaoh(std::string_view line, int src_len, int tgt_len);

enum class Provenance { kSeed, kRelated };

std::string_view ProvenanceName(Provenance provenance);

// Set of (src word, tgt word) entries, src on the English side.
class BilingualDictionary {
 public:
  using Key = std::pair<std::string, std::string>;

  // Keeps an existing entry; a seed provenance overrides a related one.
  void Add(std::string src, std::string tgt, Provenance provenance);
  bool Contains(const std::string &src, const std::string &tgt) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<Key, Provenance> &entries() const { return entries_; }

  // Swaps the roles of src and tgt.
  BilingualDictionary Reversed() const;

  // TSV `src \t tgt \t provenance`.
  void Write(std::ostream &out) const;
  void Save(const std::filesystem::path &path) const;
  static BilingualDictionary Read(std::istream &in);
  static BilingualDictionary Load(const std::filesystem::path &path);

 private:
  std::map<Key, Provenance> entries_;
};

using LinkCounts = std::map<std::pair<std::string, std::string>, long long>;

// Counts links of the intersected Viterbi alignments over the corpus.
// `corpus` is oriented e->f; `fwd` is trained e->f and `rev` f->e.
LinkCounts CountIntersectedLinks(std::span<const SentencePair> corpus,
                                 const TranslationTable &fwd,
                                 const TranslationTable &rev);

// For every source word with at least `min_count` links in total, the most
// frequently linked target word; ties go to the lexicographically smallest.
BilingualDictionary DictionaryFromLinkCounts(const LinkCounts &counts,
                                             long long min_count,
                                             Provenance provenance);

// Throws DataError on an empty corpus.
BilingualDictionary ExtractDictionary(std::span<const SentencePair> corpus,
                                      const TranslationTable &fwd,
                                      const TranslationTable &rev,
                                      long long min_count,
                                      Provenance provenance = Provenance::kSeed);

// Union of both dictionaries; shared entries keep seed provenance.
BilingualDictionary MergeDictionaries(const BilingualDictionary &seed,
                                      const BilingualDictionary &related);

}  // namespace wikimine

#endif  // WIKIMINE_ALIGN_H_
