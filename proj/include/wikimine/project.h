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

// Annotation projection of dependency trees and POS tags through one-to-one
// word alignments, and the CoNLL-U reader/writer for partial trees.

#ifndef WIKIMINE_PROJECT_H_
#define WIKIMINE_PROJECT_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wikimine/align.h"

namespace wikimine {

// A complete dependency tree. heads[i] is the 1-based head of token i+1, 0
// for the root.
struct DepTree {
  std::vector<std::string> tokens;
  std::vector<int> heads;
  std::vector<std::string> labels;
  std::vector<std::string> pos;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const DepTree &) const = default;

  // Throws DataError unless heads are in range, h_i != i, exactly one token
  // attaches to the root and there is no cycle.
  void Validate() const;
};

enum class PosSource { kMissing, kProjected, kSupervised };

// A tree with masked positions: std::nullopt heads/labels are unknown.
struct PartialDepTree {
  std::vector<std::string> tokens;
  std::vector<std::optional<int>> heads;
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> pos;  // "_" when missing
  std::vector<PosSource> pos_source;

  std::size_t size() const { return tokens.size(); }
  std::size_t ProjectedHeads() const;
  bool operator==(const PartialDepTree &) const = default;

  // Non-masked heads form a forest: in range, no cycles, at most one explicit
  // root.
  bool IsForest() const;

  static PartialDepTree FromTree(const DepTree &tree, PosSource source);
  // Throws DataError if any head or label is masked or the result is not a
  // valid tree.
  DepTree ToTree() const;
};

struct ConlluReadStats {
  std::size_t sentences = 0;
  std::size_t skipped_multiword = 0;
  std::size_t skipped_empty_nodes = 0;
};

// Reads FORM, UPOS, HEAD, DEPREL and POSSource (MISC). `_` in HEAD or DEPREL
// is masked. UPOS provenance is taken from POSSource, else `_` is missing and
// anything else supervised. Multiword tokens and empty nodes are skipped.
// Throws DataError on a broken ID sequence, an out-of-range HEAD or a cycle.
std::vector<PartialDepTree> ReadConllu(std::istream &in, ConlluReadStats *stats = nullptr);
std::vector<PartialDepTree> LoadConllu(const std::filesystem::path &path,
                                       ConlluReadStats *stats = nullptr);

// Writes the ten CoNLL-U columns; LEMMA, XPOS, FEATS and DEPS are `_`.
void WriteConllu(std::ostream &out, const std::vector<PartialDepTree> &trees);
void WriteConllu(std::ostream &out, const std::vector<DepTree> &trees);
void SaveConllu(const std::filesystem::path &path, const std::vector<PartialDepTree> &trees);

// Projects heads, labels and POS of `src` onto `tgt_tokens` through a
// one-to-one alignment (i over source, j over target). A dependent aligned to
// m whose head is aligned to k gets h_m = k; a dependent of the root gets
// h_m = 0. Throws std::invalid_argument if the alignment is not one-to-one or
// does not match the sentence lengths.
PartialDepTree ProjectTree(const DepTree &src, const Alignment &alignment,
                           const std::vector<std::string> &tgt_tokens);

struct DensityConfig {
  double min_ratio = 0.5;
  int min_run = 5;
};

// True iff at least min_ratio of the tokens have a projected head, or some
// min_run consecutive tokens all do.
bool DensityKeep(const PartialDepTree &tree, const DensityConfig &cfg = {});

// Projected tags stay; every other token takes the supervised tag. Throws
// std::invalid_argument on a length mismatch.
PartialDepTree MergePos(const PartialDepTree &tree,
                        const std::vector<std::string> &supervised_tags);

struct ProjectionInput {
  std::vector<DepTree> src_trees;
  std::vector<std::vector<std::string>> tgt_tokens;
  std::vector<Alignment> fwd;  // src -> tgt, i over source tokens
  std::vector<Alignment> rev;  // tgt -> src, i over target tokens
  // Optional supervised target tags, one list per sentence.
  std::vector<std::vector<std::string>> supervised_pos;
};

struct ProjectionStats {
  std::size_t sentences = 0;
  std::size_t kept = 0;
  double kept_ratio = 0.0;
  // Mean over all sentences of the fraction of tokens with a projected head.
  double mean_density = 0.0;
};

struct ProjectionResult {
  std::vector<PartialDepTree> trees;
  ProjectionStats stats;
};

// Intersects, projects and filters every sentence, merging POS when
// supervised tags are given. Throws DataError when the streams differ in
// length.
ProjectionResult ProjectCorpus(const ProjectionInput &input, const DensityConfig &cfg,
                               int threads = 1);

}  // namespace wikimine

#endif  // WIKIMINE_PROJECT_H_
