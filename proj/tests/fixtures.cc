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

#include "fixtures.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wikimine/util.h"

namespace wikimine::testing {

namespace fs = std::filesystem;

namespace {

int Uniform(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool Coin(std::mt19937_64 &rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::string Capitalized(std::string text) {
  if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 32);
  return text;
}

std::string Render(const std::vector<int> &ids, std::string_view prefix,
                   const std::vector<int> *mapping) {
  std::vector<std::string> words;
  for (int id : ids) words.push_back(Word(prefix, mapping ? (*mapping)[static_cast<std::size_t>(id)] : id));
  return Capitalized(Join(words, " "));
}

std::string DocId(std::string_view prefix, int n) {
  std::string digits = std::to_string(n);
  return std::string(prefix) + std::string(5 - std::min<std::size_t>(5, digits.size()), '0') +
         digits;
}

RowMatrix Gaussian(int rows, int cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  RowMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

}  // namespace

std::string Word(std::string_view prefix, int n) {
  std::string out(prefix);
  do {
    out.push_back(static_cast<char>('a' + n % 26));
    n /= 26;
  } while (n > 0);
  return out;
}

fs::path TempDir(std::string_view name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("wikimine_" + std::string(name) + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in = OpenForRead(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void WriteFile(const fs::path &path, std::string_view content) {
  std::ofstream out = OpenForWrite(path);
  out << content;
}

Eigen::MatrixXd RandomRotation(int d, std::mt19937_64 &rng) {
  const Eigen::MatrixXd g = Gaussian(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

CipherFixture MakeCipherFixture(const CipherOptions &options) {
  std::mt19937_64 rng(options.seed);
  CipherFixture fx;
  std::vector<int> perm(static_cast<std::size_t>(options.vocab));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i < options.vocab; ++i) {
    fx.cipher.Add(Word("e", i), Word("f", perm[static_cast<std::size_t>(i)]), Provenance::kSeed);
  }

  // Sentences in e-word ids; a target sentence is rendered through the cipher.
  std::set<std::vector<int>> used;
  auto fresh = [&](int min_len, int max_len) {
    while (true) {
      std::vector<int> ids(static_cast<std::size_t>(Uniform(rng, min_len, max_len)));
      for (int &id : ids) id = Uniform(rng, 0, options.vocab - 1);
      if (used.insert(ids).second) return ids;
    }
  };
  auto e_text = [&](const std::vector<int> &ids) { return Render(ids, "e", nullptr); };
  auto f_text = [&](const std::vector<int> &ids) { return Render(ids, "f", &perm); };

  const int s = options.sentences;
  const int planted = std::max(1, static_cast<int>(std::lround(options.planted_fraction * s)));
  for (int p = 0; p < options.doc_pairs; ++p) {
    Document de;
    Document df;
    de.id = DocId("E", p);
    df.id = DocId("F", p);
    de.lang = "en";
    df.lang = "xx";
    de.links["xx"] = df.id;
    df.links["en"] = de.id;
    const std::vector<int> title = fresh(2, 3);
    de.title = e_text(title);
    df.title = f_text(title);

    std::vector<std::vector<int>> e_sent;
    for (int i = 0; i < s; ++i) e_sent.push_back(fresh(options.min_len, options.max_len));
    std::vector<int> e_slots(static_cast<std::size_t>(s - 1));
    std::vector<int> f_slots(static_cast<std::size_t>(s - 1));
    std::iota(e_slots.begin(), e_slots.end(), 1);
    std::iota(f_slots.begin(), f_slots.end(), 1);
    std::shuffle(e_slots.begin(), e_slots.end(), rng);
    std::shuffle(f_slots.begin(), f_slots.end(), rng);
    std::vector<std::vector<int>> f_sent(static_cast<std::size_t>(s));
    f_sent[0] = e_sent[0];
    fx.planted.emplace(de.id, 0, df.id, 0);
    for (int k = 0; k + 1 < planted; ++k) {
      const int i = e_slots[static_cast<std::size_t>(k)];
      const int j = f_slots[static_cast<std::size_t>(k)];
      f_sent[static_cast<std::size_t>(j)] = e_sent[static_cast<std::size_t>(i)];
      fx.planted.emplace(de.id, i, df.id, j);
    }
    for (auto &ids : f_sent) {
      if (ids.empty()) ids = fresh(options.min_len, options.max_len);
    }
    for (const auto &ids : e_sent) de.sentences.push_back(e_text(ids));
    for (const auto &ids : f_sent) df.sentences.push_back(f_text(ids));

    const std::vector<int> caption = fresh(options.min_len, options.max_len);
    const std::string image = "img" + std::to_string(p);
    de.images.push_back({image, e_text(caption)});
    df.images.push_back({image, f_text(caption)});
    fx.store_e.Add(std::move(de));
    fx.store_f.Add(std::move(df));
  }

  const RowMatrix ve = Gaussian(options.vocab, options.dim, rng);
  RowMatrix vf(options.vocab, options.dim);
  const Eigen::MatrixXd r = options.rotate ? RandomRotation(options.dim, rng)
                                           : Eigen::MatrixXd::Identity(options.dim, options.dim);
  std::vector<std::string> words_e;
  std::vector<std::string> words_f(static_cast<std::size_t>(options.vocab));
  for (int i = 0; i < options.vocab; ++i) {
    words_e.push_back(Word("e", i));
    const int k = perm[static_cast<std::size_t>(i)];
    words_f[static_cast<std::size_t>(k)] = Word("f", k);
    vf.row(k) = (r * ve.row(i).transpose()).transpose();
  }
  fx.emb_e = EmbeddingSpace("en", std::move(words_e), ve);
  fx.emb_f = EmbeddingSpace("xx", std::move(words_f), vf);
  return fx;
}

void WriteCipherFixture(const CipherFixture &fixture, const fs::path &dir) {
  SaveDocumentStore(dir / "store_e.jsonl", fixture.store_e);
  SaveDocumentStore(dir / "store_f.jsonl", fixture.store_f);
  SaveEmbeddings(dir / "emb_e.vec", fixture.emb_e);
  SaveEmbeddings(dir / "emb_f.vec", fixture.emb_f);
}

MiningInstance MakeMiningInstance(const MiningOptions &options) {
  std::mt19937_64 rng(options.seed);
  MiningInstance mi;
  const int ve = Uniform(rng, 20, options.vocab);
  const int vf = Uniform(rng, 20, options.vocab);
  for (int i = 0; i < ve; ++i) {
    if (Coin(rng, 0.3)) mi.dict.Add(Word("a", i), Word("b", Uniform(rng, 0, vf - 1)), Provenance::kSeed);
    if (Coin(rng, 0.1)) mi.dict.Add(Word("a", i), Word("b", Uniform(rng, 0, vf - 1)), Provenance::kRelated);
  }

  auto space = [&](std::string_view prefix, int n, const std::string &lang) {
    std::vector<std::string> words;
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
      if (Coin(rng, 0.9)) {
        words.push_back(Word(prefix, i));
        keep.push_back(i);
      }
    }
    RowMatrix m = Gaussian(static_cast<int>(words.size()), options.dim, rng);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (Coin(rng, 0.02)) m.row(r).setZero();
    }
    return EmbeddingSpace(lang, std::move(words), std::move(m));
  };
  mi.proj_e = space("a", ve, "en");
  mi.proj_f = space("b", vf, "xx");

  const char *numbers[] = {"1", "2", "03", "3", "1999"};
  auto token_e = [&]() -> std::string {
    if (Coin(rng, 0.05)) return numbers[Uniform(rng, 0, 4)];
    return Word("a", Uniform(rng, 0, ve - 1));
  };
  auto token_f = [&]() -> std::string {
    if (Coin(rng, 0.05)) return numbers[Uniform(rng, 0, 4)];
    return Word("b", Uniform(rng, 0, vf - 1));
  };

  Document de;
  Document df;
  de.id = "E1";
  df.id = "F1";
  de.lang = "en";
  df.lang = "xx";
  de.links["xx"] = df.id;
  de.title = Word("a", 0);
  df.title = Word("b", 0);
  std::vector<std::vector<std::string>> e_tokens;
  const int ns = Uniform(rng, 1, options.max_sentences);
  const int nt = Uniform(rng, 1, options.max_sentences);
  for (int i = 0; i < ns; ++i) {
    std::vector<std::string> tokens;
    if (!Coin(rng, 0.03)) {
      const int len = Uniform(rng, 1, 12);
      for (int k = 0; k < len; ++k) tokens.push_back(token_e());
    }
    de.sentences.push_back(Join(tokens, " "));
    e_tokens.push_back(std::move(tokens));
  }
  for (int j = 0; j < nt; ++j) {
    std::vector<std::string> tokens;
    if (Coin(rng, 0.4)) {
      // Noisy translation of a random source sentence.
      for (const std::string &word : e_tokens[static_cast<std::size_t>(Uniform(rng, 0, ns - 1))]) {
        if (Coin(rng, 0.1)) continue;
        bool translated = false;
        for (const auto &[key, provenance] : mi.dict.entries()) {
          if (key.first == word) {
            tokens.push_back(key.second);
            translated = true;
            break;
          }
        }
        if (!translated) tokens.push_back(word[0] == 'a' ? token_f() : word);
      }
    } else if (!Coin(rng, 0.03)) {
      const int len = Uniform(rng, 1, 12);
      for (int k = 0; k < len; ++k) tokens.push_back(token_f());
    }
    df.sentences.push_back(Join(tokens, " "));
  }
  mi.store_e.Add(std::move(de));
  mi.store_f.Add(std::move(df));
  return mi;
}

DepTree RandomTree(int n, std::mt19937_64 &rng) {
  static const char *kLabels[] = {"nsubj", "obj", "det", "amod", "advmod", "case", "obl"};
  static const char *kPos[] = {"NOUN", "VERB", "DET", "ADJ", "ADV", "ADP", "PRON"};
  DepTree tree;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  tree.heads.assign(static_cast<std::size_t>(n), 0);
  tree.labels.assign(static_cast<std::size_t>(n), "root");
  for (int k = 1; k < n; ++k) {
    const int token = order[static_cast<std::size_t>(k)];
    tree.heads[static_cast<std::size_t>(token - 1)] = order[static_cast<std::size_t>(Uniform(rng, 0, k - 1))];
    tree.labels[static_cast<std::size_t>(token - 1)] = kLabels[Uniform(rng, 0, 6)];
  }
  for (int i = 0; i < n; ++i) {
    tree.tokens.push_back(Word("w", i));
    tree.pos.emplace_back(kPos[Uniform(rng, 0, 6)]);
  }
  return tree;
}

Alignment RandomOneToOne(int src_len, int tgt_len, double p, std::mt19937_64 &rng) {
  Alignment a;
  a.src_len = src_len;
  a.tgt_len = tgt_len;
  std::vector<int> targets(static_cast<std::size_t>(tgt_len));
  std::iota(targets.begin(), targets.end(), 1);
  std::shuffle(targets.begin(), targets.end(), rng);
  std::size_t next = 0;
  for (int i = 1; i <= src_len && next < targets.size(); ++i) {
    if (Coin(rng, p)) a.links.emplace_back(i, targets[next++]);
  }
  std::sort(a.links.begin(), a.links.end());
  return a;
}

}  // namespace wikimine::testing
