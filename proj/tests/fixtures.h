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

// Synthetic corpora shared by the unit tests and the acceptance suite.

#ifndef WIKIMINE_TESTS_FIXTURES_H_
#define WIKIMINE_TESTS_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "wikimine/align.h"
#include "wikimine/corpus.h"
#include "wikimine/project.h"
#include "wikimine/seed.h"
#include "wikimine/xembed.h"

namespace wikimine::testing {

// Lowercase letters-only spelling of n, prefixed.
std::string Word(std::string_view prefix, int n);

// A fresh empty directory under the system temp dir.
std::filesystem::path TempDir(std::string_view name);

std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, std::string_view content);

// Random orthogonal d x d matrix.
Eigen::MatrixXd RandomRotation(int d, std::mt19937_64 &rng);

struct CipherOptions {
  int doc_pairs = 200;
  int sentences = 20;  // per document
  double planted_fraction = 0.3;
  int vocab = 1000;
  int dim = 50;
  int min_len = 6;
  int max_len = 12;
  // Rotate the target embedding space; otherwise a cipher pair shares its
  // vector.
  bool rotate = false;
  std::uint64_t seed = 1;
};

// Two languages related by a bijective word cipher. Sentence 0 of every
// document pair is a planted translation; further planted pairs sit at random
// positions. Non-planted sentences are independent random sentences. Every
// sentence is unique within its store.
struct CipherFixture {
  DocumentStore store_e{"en"};
  DocumentStore store_f{"xx"};
  BilingualDictionary cipher;
  EmbeddingSpace emb_e;
  EmbeddingSpace emb_f;
  // (e doc, e sentence index, f doc, f sentence index)
  std::set<std::tuple<std::string, int, std::string, int>> planted;

  std::vector<DocPair> Pairs() const { return LinkedPairs(store_e, store_f).pairs; }
};

CipherFixture MakeCipherFixture(const CipherOptions &options);

// store_e.jsonl, store_f.jsonl, emb_e.vec, emb_f.vec under dir.
void WriteCipherFixture(const CipherFixture &fixture, const std::filesystem::path &dir);

struct MiningOptions {
  int max_sentences = 40;
  int vocab = 200;
  int dim = 16;
  std::uint64_t seed = 1;
};

// One linked document pair with random words, a random dictionary and random
// projected spaces that omit some words. Some target sentences are noisy
// dictionary translations of source sentences; some tokens are numbers.
struct MiningInstance {
  DocumentStore store_e{"en"};
  DocumentStore store_f{"xx"};
  BilingualDictionary dict;
  EmbeddingSpace proj_e;
  EmbeddingSpace proj_f;

  std::vector<DocPair> Pairs() const { return LinkedPairs(store_e, store_f).pairs; }
};

MiningInstance MakeMiningInstance(const MiningOptions &options);

// Random tree over n tokens: a random root, each other token attached to an
// earlier token of a random permutation.
DepTree RandomTree(int n, std::mt19937_64 &rng);

// Random one-to-one alignment; each source token linked with probability p.
Alignment RandomOneToOne(int src_len, int tgt_len, double p, std::mt19937_64 &rng);

}  // namespace wikimine::testing

#endif  // WIKIMINE_TESTS_FIXTURES_H_
