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

// Seed parallel data from the structure of linked articles: first-sentence
// pairs, title pairs and captions of images shared across languages.

#ifndef WIKIMINE_SEED_H_
#define WIKIMINE_SEED_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikimine/corpus.h"

namespace wikimine {

// Two linked articles; src_doc->links[tgt_doc->lang] == tgt_doc->id. Both
// pointers refer into the stores passed to LinkedPairs.
struct DocPair {
  const Document *src_doc = nullptr;
  const Document *tgt_doc = nullptr;
};

struct LinkedPairsResult {
  std::vector<DocPair> pairs;
  // Links whose target id is absent from the target store.
  std::size_t missing_links = 0;
};

// Every (d_e, d_f) with d_e.links[f] == d_f.id, sorted by (src id, tgt id).
LinkedPairsResult LinkedPairs(const DocumentStore &store_e,
                              const DocumentStore &store_f);

enum class SeedKind { kFirstSentence = 0, kCaption = 1, kTitle = 2 };

std::string_view SeedKindName(SeedKind kind);
std::optional<SeedKind> ParseSeedKind(std::string_view name);

struct SeedPair {
  Sentence src;
  Sentence tgt;
  SeedKind kind = SeedKind::kFirstSentence;
  std::string src_doc;
  std::string tgt_doc;
  // Set iff kind == kCaption.
  std::optional<std::string> image_id;
};

std::vector<SeedPair> ExtractFirstSentences(const std::vector<DocPair> &pairs);
std::vector<SeedPair> ExtractTitles(const std::vector<DocPair> &pairs);

// Cross product of the English and target-language captions of every image
// id present in both stores, filtered by LengthRatioOk. Document links are
// not consulted. Output is ordered by image id, then by caption order in the
// stores.
std::vector<SeedPair> ExtractCaptions(const DocumentStore &store_e,
                                      const DocumentStore &store_f);

struct SeedCorpus {
  std::vector<SeedPair> pairs;
  // Indexed by SeedKind, counted after deduplication.
  std::array<std::size_t, 3> counts{};

  std::size_t size() const { return pairs.size(); }
  std::size_t count(SeedKind kind) const {
    return counts[static_cast<std::size_t>(kind)];
  }
};

// Union of the three lists in the order first sentences, captions, titles.
// A pair whose (src raw, tgt raw) was already seen is dropped.
SeedCorpus BuildSeed(std::vector<SeedPair> first_sentences,
                     std::vector<SeedPair> captions,
                     std::vector<SeedPair> titles);

// TSV columns: kind, src_doc, tgt_doc, image_id (empty when absent), src_raw,
// tgt_raw. No header line.
void WriteSeedCorpus(std::ostream &out, const SeedCorpus &corpus);
void SaveSeedCorpus(const std::filesystem::path &path, const SeedCorpus &corpus);
SeedCorpus ReadSeedCorpus(std::istream &in, const std::string &lang_e,
                          const std::string &lang_f);
SeedCorpus LoadSeedCorpus(const std::filesystem::path &path,
                          const std::string &lang_e, const std::string &lang_f);

}  // namespace wikimine

#endif  // WIKIMINE_SEED_H_
