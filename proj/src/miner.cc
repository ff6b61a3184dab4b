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

#include "wikimine/miner.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "wikimine/util.h"

namespace wikimine {

void MiningConfig::Validate() const {
  if (!std::isfinite(tau) || tau < -1.0) {
    throw ValidationError("tau must be a finite number >= -1");
  }
}

WordSimilarity::WordSimilarity(const BilingualDictionary &dict,
                               const EmbeddingSpace &src_space,
                               const EmbeddingSpace &tgt_space)
    : src_space_(&src_space), tgt_space_(&tgt_space) {
  for (const auto &[key, provenance] : dict.entries()) dict_[key.first].push_back(key.second);
}

const std::vector<std::string> *WordSimilarity::Translations(std::string_view s) const {
  auto it = dict_.find(std::string(s));
  return it == dict_.end() ? nullptr : &it->second;
}

double WordSimilarity::operator()(std::string_view s, std::string_view t) const {
  if (const auto *targets = Translations(s)) {
    if (std::find(targets->begin(), targets->end(), t) != targets->end()) return 1.0;
  }
  const int rs = src_space_->Find(s);
  const int rt = tgt_space_->Find(t);
  if (rs < 0 || rt < 0) return 0.0;
  return Cosine(src_space_->Vector(rs), tgt_space_->Vector(rt));
}

double WordSim(std::string_view s, std::string_view t, const BilingualDictionary &dict,
               const EmbeddingSpace &src_space, const EmbeddingSpace &tgt_space) {
  if (dict.Contains(std::string(s), std::string(t))) return 1.0;
  const int rs = src_space.Find(s);
  const int rt = tgt_space.Find(t);
  if (rs < 0 || rt < 0) return 0.0;
  return Cosine(src_space.Vector(rs), tgt_space.Vector(rt));
}

double SentenceScore(const std::vector<std::string> &src,
                     const std::vector<std::string> &tgt, const WordSimilarity &sim) {
  if (src.empty()) throw std::invalid_argument("score of an empty source sentence");
  double total = 0.0;
  for (const std::string &s : src) {
    double best = tgt.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
    for (const std::string &t : tgt) best = std::max(best, sim(s, t));
    total += best;
  }
  return total / static_cast<double>(src.size());
}

std::vector<CandidatePair> Candidates(const std::vector<Sentence> &src,
                                      const std::vector<Sentence> &tgt,
                                      const MiningConfig &cfg) {
  std::vector<std::vector<std::string>> tgt_numbers;
  if (cfg.numeric_filter) {
    for (const Sentence &t : tgt) tgt_numbers.push_back(NumericSignature(t.tokens));
  }
  std::vector<CandidatePair> out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].tokens.empty()) continue;
    std::vector<std::string> src_numbers;
    if (cfg.numeric_filter) src_numbers = NumericSignature(src[i].tokens);
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      if (tgt[j].tokens.empty()) continue;
      if (!LengthRatioOk(src[i].tokens.size(), tgt[j].tokens.size())) continue;
      if (cfg.numeric_filter && src_numbers != tgt_numbers[j]) continue;
      out.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
  }
  return out;
}

namespace {

std::vector<Sentence> SentencesOf(const Document &doc) {
  std::vector<Sentence> out;
  out.reserve(doc.sentences.size());
  for (const std::string &raw : doc.sentences) out.push_back(MakeSentence(raw, doc.lang));
  return out;
}

RowMatrix UnitRows(const RowMatrix &m) {
  RowMatrix out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (norm > 0.0) out.row(r) /= norm;
  }
  return out;
}

// Dense ids for the distinct words of a set of sentences.
struct LocalVocab {
  std::unordered_map<std::string, int> ids;
  std::vector<const std::string *> words;
  std::vector<std::vector<int>> sentences;

  explicit LocalVocab(const std::vector<Sentence> &list) {
    for (const Sentence &sentence : list) {
      std::vector<int> local;
      local.reserve(sentence.tokens.size());
      for (const std::string &token : sentence.tokens) {
        auto [it, inserted] = ids.emplace(token, static_cast<int>(words.size()));
        if (inserted) words.push_back(&it->first);
        local.push_back(it->second);
      }
      sentences.push_back(std::move(local));
    }
  }
  int size() const { return static_cast<int>(words.size()); }
};

// sim[a * cols + b] for a over `rows` words and b over `cols` words.
std::vector<double> SimilarityMatrix(const LocalVocab &rows, const LocalVocab &cols,
                                     const WordSimilarity &sim,
                                     const std::vector<double> &cosines, bool transpose) {
  const int nr = rows.size();
  const int nc = cols.size();
  std::vector<double> out(static_cast<std::size_t>(nr) * nc);
  for (int a = 0; a < nr; ++a) {
    for (int b = 0; b < nc; ++b) {
      out[static_cast<std::size_t>(a) * nc + b] =
          transpose ? cosines[static_cast<std::size_t>(b) * nr + a]
                    : cosines[static_cast<std::size_t>(a) * nc + b];
    }
    if (const auto *targets = sim.Translations(*rows.words[static_cast<std::size_t>(a)])) {
      for (const std::string &t : *targets) {
        auto it = cols.ids.find(t);
        if (it != cols.ids.end()) out[static_cast<std::size_t>(a) * nc + it->second] = 1.0;
      }
    }
  }
  return out;
}

double AverageMax(const std::vector<int> &src, const std::vector<int> &tgt,
                  const std::vector<double> &sim, int cols) {
  double total = 0.0;
  for (int a : src) {
    const double *row = sim.data() + static_cast<std::size_t>(a) * cols;
    double best = -std::numeric_limits<double>::infinity();
    for (int b : tgt) best = std::max(best, row[b]);
    total += best;
  }
  return total / static_cast<double>(src.size());
}

}  // namespace

std::vector<CandidatePair> Candidates(const DocPair &pair, const MiningConfig &cfg) {
  return Candidates(SentencesOf(*pair.src_doc), SentencesOf(*pair.tgt_doc), cfg);
}

Miner::Miner(const BilingualDictionary &dict, const BilingualDictionary &rev_dict,
             const EmbeddingSpace &proj_e, const EmbeddingSpace &proj_f)
    : forward_(dict, proj_e, proj_f),
      reverse_(rev_dict, proj_f, proj_e),
      unit_e_(UnitRows(proj_e.vectors())),
      unit_f_(UnitRows(proj_f.vectors())) {
  if (proj_e.dim() != proj_f.dim() && proj_e.size() > 0 && proj_f.size() > 0) {
    throw std::invalid_argument("projected spaces differ in dimension");
  }
}

std::vector<MinedPair> Miner::MutualBest(const DocPair &pair, const MiningConfig &cfg) const {
  const std::vector<Sentence> src = SentencesOf(*pair.src_doc);
  const std::vector<Sentence> tgt = SentencesOf(*pair.tgt_doc);
  const std::vector<CandidatePair> candidates = Candidates(src, tgt, cfg);
  std::vector<MinedPair> accepted;
  if (candidates.empty()) return accepted;

  const LocalVocab vocab_e(src);
  const LocalVocab vocab_f(tgt);
  const int ne = vocab_e.size();
  const int nf = vocab_f.size();
  const EmbeddingSpace &space_e = forward_.src_space();
  const EmbeddingSpace &space_f = forward_.tgt_space();

  // Cosines of unit vectors; words without a vector get 0 everywhere.
  const int dim = static_cast<int>(unit_e_.cols());
  std::vector<int> rows_e(static_cast<std::size_t>(ne)), rows_f(static_cast<std::size_t>(nf));
  for (int a = 0; a < ne; ++a) {
    rows_e[static_cast<std::size_t>(a)] = space_e.Find(*vocab_e.words[static_cast<std::size_t>(a)]);
  }
  for (int b = 0; b < nf; ++b) {
    rows_f[static_cast<std::size_t>(b)] = space_f.Find(*vocab_f.words[static_cast<std::size_t>(b)]);
  }
  std::vector<double> cosines(static_cast<std::size_t>(ne) * nf, 0.0);
  for (int a = 0; a < ne; ++a) {
    const int re = rows_e[static_cast<std::size_t>(a)];
    if (re < 0) continue;
    const double *u = unit_e_.data() + static_cast<std::ptrdiff_t>(re) * dim;
    for (int b = 0; b < nf; ++b) {
      const int rf = rows_f[static_cast<std::size_t>(b)];
      if (rf < 0) continue;
      const double *v = unit_f_.data() + static_cast<std::ptrdiff_t>(rf) * dim;
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += u[d] * v[d];
      cosines[static_cast<std::size_t>(a) * nf + b] = dot;
    }
  }
  const std::vector<double> sim_fwd =
      SimilarityMatrix(vocab_e, vocab_f, forward_, cosines, false);
  const std::vector<double> sim_rev =
      SimilarityMatrix(vocab_f, vocab_e, reverse_, cosines, true);

  const std::size_t n = candidates.size();
  std::vector<double> fwd(n), rev(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto &src_ids = vocab_e.sentences[static_cast<std::size_t>(candidates[c].src_index)];
    const auto &tgt_ids = vocab_f.sentences[static_cast<std::size_t>(candidates[c].tgt_index)];
    fwd[c] = AverageMax(src_ids, tgt_ids, sim_fwd, nf);
    rev[c] = AverageMax(tgt_ids, src_ids, sim_rev, ne);
  }

  // Candidates are ordered by (src, tgt), so strict comparisons keep the
  // earliest sentence on ties in both directions.
  std::vector<long> best_for_src(src.size(), -1), best_for_tgt(tgt.size(), -1);
  for (std::size_t c = 0; c < n; ++c) {
    long &bs = best_for_src[static_cast<std::size_t>(candidates[c].src_index)];
    if (bs < 0 || fwd[c] > fwd[static_cast<std::size_t>(bs)]) bs = static_cast<long>(c);
    long &bt = best_for_tgt[static_cast<std::size_t>(candidates[c].tgt_index)];
    if (bt < 0 || rev[c] > rev[static_cast<std::size_t>(bt)]) bt = static_cast<long>(c);
  }
  // Mutual argmax is already a matching: each sentence has one best partner.
  for (std::size_t c = 0; c < n; ++c) {
    const auto [i, j] = candidates[c];
    if (best_for_src[static_cast<std::size_t>(i)] != static_cast<long>(c) ||
        best_for_tgt[static_cast<std::size_t>(j)] != static_cast<long>(c)) {
      continue;
    }
    if (std::min(fwd[c], rev[c]) < cfg.tau) continue;
    MinedPair mined;
    mined.src = src[static_cast<std::size_t>(i)];
    mined.tgt = tgt[static_cast<std::size_t>(j)];
    mined.score_fwd = fwd[c];
    mined.score_rev = rev[c];
    mined.src_doc = pair.src_doc->id;
    mined.tgt_doc = pair.tgt_doc->id;
    mined.src_index = i;
    mined.tgt_index = j;
    accepted.push_back(std::move(mined));
  }
  return accepted;
}

std::vector<MinedPair> Miner::Mine(const std::vector<DocPair> &pairs,
                                   const std::vector<SeedPair> &titles,
                                   const MiningConfig &cfg) const {
  cfg.Validate();
  std::vector<std::vector<MinedPair>> per_pair(pairs.size());
  ParallelFor(pairs.size(), ResolveThreads(cfg.threads),
              [&](std::size_t k) { per_pair[k] = MutualBest(pairs[k], cfg); });
  std::vector<MinedPair> mined;
  for (auto &list : per_pair) {
    for (MinedPair &p : list) mined.push_back(std::move(p));
  }
  std::stable_sort(mined.begin(), mined.end(), [](const MinedPair &a, const MinedPair &b) {
    if (a.src_doc != b.src_doc) return a.src_doc < b.src_doc;
    if (a.tgt_doc != b.tgt_doc) return a.tgt_doc < b.tgt_doc;
    return a.src_index < b.src_index;
  });
  if (!cfg.include_titles) return mined;
  std::vector<MinedPair> title_pairs;
  for (const SeedPair &title : titles) {
    MinedPair p;
    p.src = title.src;
    p.tgt = title.tgt;
    p.score_fwd = ScoreForward(title.src, title.tgt);
    p.score_rev = ScoreReverse(title.src, title.tgt);
    p.src_doc = title.src_doc;
    p.tgt_doc = title.tgt_doc;
    title_pairs.push_back(std::move(p));
  }
  std::stable_sort(title_pairs.begin(), title_pairs.end(),
                   [](const MinedPair &a, const MinedPair &b) {
                     if (a.src_doc != b.src_doc) return a.src_doc < b.src_doc;
                     return a.tgt_doc < b.tgt_doc;
                   });
  for (MinedPair &p : title_pairs) mined.push_back(std::move(p));
  return mined;
}

void WriteMinedCorpus(std::ostream &out, const std::vector<MinedPair> &pairs) {
  for (const MinedPair &p : pairs) {
    out << p.src.raw << '\t' << p.tgt.raw << '\t' << FormatDouble(p.score_fwd) << '\t'
        << FormatDouble(p.score_rev) << '\t' << p.src_doc << '\t' << p.tgt_doc << '\n';
  }
}

void SaveMinedCorpus(const std::filesystem::path &path, const std::vector<MinedPair> &pairs) {
  std::ofstream out = OpenForWrite(path);
  WriteMinedCorpus(out, pairs);
}

std::vector<MinedPair> ReadMinedCorpus(std::istream &in, const std::string &lang_e,
                                       const std::string &lang_f) {
  std::vector<MinedPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = StripCr(line);
    if (view.empty()) continue;
    const auto fields = Split(view, '\t');
    MinedPair p;
    if (fields.size() != 6 || !ParseDouble(fields[2], &p.score_fwd) ||
        !ParseDouble(fields[3], &p.score_rev)) {
      throw DataError("mined corpus line " + std::to_string(line_no) + " is malformed");
    }
    p.src = MakeSentence(std::string(fields[0]), lang_e);
    p.tgt = MakeSentence(std::string(fields[1]), lang_f);
    p.src_doc = fields[4];
    p.tgt_doc = fields[5];
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace wikimine
