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

#include "wikimine/align.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wikimine/util.h"

namespace wikimine {

namespace {

// Sentences per expected-count chunk. Part of the numerical contract: the
// summation order of expected counts depends on it.
constexpr std::size_t kChunkSize = 128;

// Fills prior[i] = p(i | j) for i in [0, src_len], i == 0 being NULL.
void AlignmentPrior(const Model1Options &options, int src_len, int tgt_len, int j,
                    std::vector<double> *prior) {
  prior->assign(static_cast<std::size_t>(src_len) + 1, 0.0);
  if (!options.favor_diagonal) {
    std::fill(prior->begin(), prior->end(), 1.0 / (src_len + 1));
    return;
  }
  (*prior)[0] = options.null_probability;
  double z = 0.0;
  for (int i = 1; i <= src_len; ++i) {
    const double h = std::abs(static_cast<double>(i) / src_len -
                              static_cast<double>(j) / tgt_len);
    (*prior)[static_cast<std::size_t>(i)] = std::exp(-options.diagonal_tension * h);
    z += (*prior)[static_cast<std::size_t>(i)];
  }
  for (int i = 1; i <= src_len; ++i) {
    (*prior)[static_cast<std::size_t>(i)] *= (1.0 - options.null_probability) / z;
  }
}

}  // namespace

std::vector<SentencePair> Reversed(std::span<const SentencePair> corpus) {
  std::vector<SentencePair> out;
  out.reserve(corpus.size());
  for (const SentencePair &pair : corpus) out.push_back({pair.tgt, pair.src});
  return out;
}

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kEtoF ? "e2f" : "f2e";
}

int Vocab::Intern(std::string_view word) {
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(words_.back(), id);
  return id;
}

int Vocab::Find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? -1 : it->second;
}

int TranslationTable::Slot(int src_id, int tgt_id) const {
  const auto begin = cols_.begin() + row_start_[static_cast<std::size_t>(src_id)];
  const auto end = cols_.begin() + row_start_[static_cast<std::size_t>(src_id) + 1];
  auto it = std::lower_bound(begin, end, tgt_id);
  if (it == end || *it != tgt_id) return -1;
  return static_cast<int>(it - cols_.begin());
}

double TranslationTable::Prob(int src_id, int tgt_id) const {
  if (src_id < 0 || tgt_id < 0) return 0.0;
  if (iterations_ == 0) return 1.0 / tgt_vocab_.size();
  const int slot = Slot(src_id, tgt_id);
  return slot < 0 ? 0.0 : probs_[static_cast<std::size_t>(slot)];
}

double TranslationTable::Prob(std::string_view src, std::string_view tgt) const {
  return Prob(src_vocab_.Find(src), tgt_vocab_.Find(tgt));
}

double TranslationTable::RowSum(std::string_view src) const {
  const int s = src_vocab_.Find(src);
  if (s < 0) return 0.0;
  if (iterations_ == 0) return tgt_vocab_.size() * (1.0 / tgt_vocab_.size());
  double sum = 0.0;
  for (auto k = row_start_[static_cast<std::size_t>(s)];
       k < row_start_[static_cast<std::size_t>(s) + 1]; ++k) {
    sum += probs_[k];
  }
  return sum;
}

std::vector<std::pair<std::string, double>> TranslationTable::Row(
    std::string_view src) const {
  std::vector<std::pair<std::string, double>> row;
  const int s = src_vocab_.Find(src);
  if (s < 0) return row;
  for (auto k = row_start_[static_cast<std::size_t>(s)];
       k < row_start_[static_cast<std::size_t>(s) + 1]; ++k) {
    row.emplace_back(tgt_vocab_.word(cols_[k]), probs_[k]);
  }
  return row;
}

void TranslationTable::Write(std::ostream &out) const {
  out << "# direction=" << DirectionName(options_.direction)
      << " iterations=" << iterations_
      << " favor_diagonal=" << (options_.favor_diagonal ? 1 : 0)
      << " diagonal_tension=" << FormatDouble(options_.diagonal_tension)
      << " null_probability=" << FormatDouble(options_.null_probability) << '\n';
  for (int s = 0; s < src_vocab_.size(); ++s) {
    for (auto k = row_start_[static_cast<std::size_t>(s)];
         k < row_start_[static_cast<std::size_t>(s) + 1]; ++k) {
      out << src_vocab_.word(s) << '\t' << tgt_vocab_.word(cols_[k]) << '\t'
          << FormatDouble(probs_[k]) << '\n';
    }
  }
}

void TranslationTable::Save(const std::filesystem::path &path) const {
  std::ofstream out = OpenForWrite(path);
  Write(out);
}

TranslationTable TranslationTable::Read(std::istream &in) {
  TranslationTable table;
  table.src_vocab_.Intern(kNull);
  table.iterations_ = 1;
  struct Entry {
    int src, tgt;
    double prob;
  };
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = StripCr(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      for (std::string_view field : SplitWhitespace(view.substr(1))) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view key = field.substr(0, eq);
        const std::string_view value = field.substr(eq + 1);
        long long n = 0;
        double x = 0;
        if (key == "direction") {
          table.options_.direction = value == "f2e" ? Direction::kFtoE : Direction::kEtoF;
        } else if (key == "iterations" && ParseInt(value, &n)) {
          table.iterations_ = static_cast<int>(n);
          table.options_.iterations = static_cast<int>(n);
        } else if (key == "favor_diagonal" && ParseInt(value, &n)) {
          table.options_.favor_diagonal = n != 0;
        } else if (key == "diagonal_tension" && ParseDouble(value, &x)) {
          table.options_.diagonal_tension = x;
        } else if (key == "null_probability" && ParseDouble(value, &x)) {
          table.options_.null_probability = x;
        }
      }
      continue;
    }
    const auto fields = Split(view, '\t');
    double prob = 0;
    if (fields.size() != 3 || !ParseDouble(fields[2], &prob) || !(prob >= 0.0)) {
      throw DataError("translation table line " + std::to_string(line_no) +
                      ": expected `src \\t tgt \\t prob`");
    }
    entries.push_back({table.src_vocab_.Intern(fields[0]),
                       table.tgt_vocab_.Intern(fields[1]), prob});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
    return a.src != b.src ? a.src < b.src : a.tgt < b.tgt;
  });
  table.row_start_.assign(static_cast<std::size_t>(table.src_vocab_.size()) + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].src == entries[k - 1].src &&
        entries[k].tgt == entries[k - 1].tgt) {
      throw DataError("translation table has a duplicate entry for " +
                      table.src_vocab_.word(entries[k].src) + " -> " +
                      table.tgt_vocab_.word(entries[k].tgt));
    }
    table.cols_.push_back(entries[k].tgt);
    table.probs_.push_back(entries[k].prob);
    ++table.row_start_[static_cast<std::size_t>(entries[k].src) + 1];
  }
  for (std::size_t s = 1; s < table.row_start_.size(); ++s) {
    table.row_start_[s] += table.row_start_[s - 1];
  }
  return table;
}

Model1Trainer::Model1Trainer(std::span<const SentencePair> corpus,
                             Model1Options options) {
  if (corpus.empty()) throw DataError("cannot train an aligner on an empty corpus");
  table_.options_ = options;
  table_.src_vocab_.Intern(TranslationTable::kNull);
  corpus_.reserve(corpus.size());
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    const SentencePair &pair = corpus[n];
    if (pair.src.empty() || pair.tgt.empty()) {
      throw DataError("sentence pair " + std::to_string(n) + " has an empty side");
    }
    Interned sentence;
    for (const std::string &w : pair.src) sentence.src.push_back(table_.src_vocab_.Intern(w));
    for (const std::string &w : pair.tgt) sentence.tgt.push_back(table_.tgt_vocab_.Intern(w));
    corpus_.push_back(std::move(sentence));
  }

  // Co-occurrence support of each row, compacted as it grows.
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(table_.src_vocab_.size()));
  std::vector<std::size_t> compacted(rows.size(), 0);
  auto add = [&](int s, int t) {
    auto &row = rows[static_cast<std::size_t>(s)];
    row.push_back(t);
    if (row.size() > 2 * compacted[static_cast<std::size_t>(s)] + 64) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      compacted[static_cast<std::size_t>(s)] = row.size();
    }
  };
  for (const Interned &sentence : corpus_) {
    for (int t : sentence.tgt) {
      add(0, t);
      for (int s : sentence.src) add(s, t);
    }
  }
  table_.row_start_.assign(rows.size() + 1, 0);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    auto &row = rows[s];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    table_.row_start_[s + 1] = table_.row_start_[s] + static_cast<std::uint32_t>(row.size());
    table_.cols_.insert(table_.cols_.end(), row.begin(), row.end());
    row_of_slot_.insert(row_of_slot_.end(), row.size(), static_cast<std::uint32_t>(s));
  }
  table_.probs_.assign(table_.cols_.size(), 1.0 / table_.tgt_vocab_.size());
  table_.iterations_ = 0;
}

double Model1Trainer::Pass(std::vector<double> *counts) const {
  struct ChunkResult {
    double log_likelihood = 0.0;
    std::vector<std::pair<std::uint32_t, double>> counts;
  };
  const Model1Options &options = table_.options_;
  const bool uniform = table_.iterations_ == 0;
  auto process_chunk = [&](std::size_t chunk) {
    ChunkResult result;
    std::vector<double> prior;
    std::vector<double> score;
    std::vector<int> slots;
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t end = std::min(corpus_.size(), begin + kChunkSize);
    for (std::size_t n = begin; n < end; ++n) {
      const Interned &sentence = corpus_[n];
      const int src_len = static_cast<int>(sentence.src.size());
      const int tgt_len = static_cast<int>(sentence.tgt.size());
      double sentence_ll = 0.0;
      for (int j = 1; j <= tgt_len; ++j) {
        const int t = sentence.tgt[static_cast<std::size_t>(j - 1)];
        AlignmentPrior(options, src_len, tgt_len, j, &prior);
        score.assign(prior.size(), 0.0);
        slots.assign(prior.size(), -1);
        double total = 0.0;
        for (int i = 0; i <= src_len; ++i) {
          const int s = i == 0 ? 0 : sentence.src[static_cast<std::size_t>(i - 1)];
          const int slot = table_.Slot(s, t);
          const double prob = uniform ? 1.0 / table_.tgt_vocab_.size()
                                      : table_.probs_[static_cast<std::size_t>(slot)];
          slots[static_cast<std::size_t>(i)] = slot;
          score[static_cast<std::size_t>(i)] = prior[static_cast<std::size_t>(i)] * prob;
          total += score[static_cast<std::size_t>(i)];
        }
        sentence_ll += std::log(total);
        if (counts == nullptr || total <= 0.0) continue;
        for (int i = 0; i <= src_len; ++i) {
          result.counts.emplace_back(static_cast<std::uint32_t>(slots[static_cast<std::size_t>(i)]),
                                     score[static_cast<std::size_t>(i)] / total);
        }
      }
      result.log_likelihood += sentence_ll;
    }
    // Sum contributions per slot, in sentence order within the slot.
    std::stable_sort(result.counts.begin(), result.counts.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    std::size_t out = 0;
    for (std::size_t k = 0; k < result.counts.size(); ++k) {
      if (out > 0 && result.counts[out - 1].first == result.counts[k].first) {
        result.counts[out - 1].second += result.counts[k].second;
      } else {
        result.counts[out++] = result.counts[k];
      }
    }
    result.counts.resize(out);
    return result;
  };

  const std::size_t num_chunks = (corpus_.size() + kChunkSize - 1) / kChunkSize;
  const int threads = ResolveThreads(options.threads);
  const std::size_t wave = static_cast<std::size_t>(threads) * 4;
  std::vector<ChunkResult> results;
  double log_likelihood = 0.0;
  for (std::size_t first = 0; first < num_chunks; first += wave) {
    const std::size_t last = std::min(num_chunks, first + wave);
    results.assign(last - first, ChunkResult());
    ParallelFor(last - first, threads,
                [&](std::size_t c) { results[c] = process_chunk(first + c); });
    for (const ChunkResult &result : results) {
      log_likelihood += result.log_likelihood;
      if (counts == nullptr) continue;
      for (const auto &[slot, value] : result.counts) (*counts)[slot] += value;
    }
  }
  return log_likelihood;
}

double Model1Trainer::LogLikelihood() const { return Pass(nullptr); }

double Model1Trainer::Step() {
  std::vector<double> counts(table_.probs_.size(), 0.0);
  const double log_likelihood = Pass(&counts);
  for (std::size_t s = 0; s + 1 < table_.row_start_.size(); ++s) {
    const auto begin = table_.row_start_[s];
    const auto end = table_.row_start_[s + 1];
    double total = 0.0;
    for (auto k = begin; k < end; ++k) total += counts[k];
    for (auto k = begin; k < end; ++k) {
      table_.probs_[k] = total > 0.0 ? counts[k] / total : 1.0 / (end - begin);
    }
  }
  ++table_.iterations_;
  table_.options_.iterations = table_.iterations_;
  return log_likelihood;
}

Model1Result TrainModel1(std::span<const SentencePair> corpus,
                         const Model1Options &options) {
  if (options.iterations < 1) {
    throw std::invalid_argument("aligner needs at least one EM iteration");
  }
  Model1Trainer trainer(corpus, options);
  Model1Result result;
  for (int k = 0; k < options.iterations; ++k) {
    result.log_likelihoods.push_back(trainer.Step());
  }
  result.log_likelihoods.push_back(trainer.LogLikelihood());
  result.table = trainer.table();
  return result;
}

bool Alignment::IsOneToOne() const {
  std::vector<char> src_used(static_cast<std::size_t>(src_len) + 1, 0);
  std::vector<char> tgt_used(static_cast<std::size_t>(tgt_len) + 1, 0);
  for (const auto &[i, j] : links) {
    if (i < 1 || i > src_len || j < 1 || j > tgt_len) return false;
    if (src_used[static_cast<std::size_t>(i)]++ || tgt_used[static_cast<std::size_t>(j)]++) {
      return false;
    }
  }
  return true;
}

Alignment Alignment::Transposed() const {
  Alignment out{tgt_len, src_len, {}};
  for (const auto &[i, j] : links) out.links.emplace_back(j, i);
  std::sort(out.links.begin(), out.links.end());
  return out;
}

Alignment ViterbiAlign(const TranslationTable &table, const TokenSeq &src,
                       const TokenSeq &tgt) {
  Alignment alignment{static_cast<int>(src.size()), static_cast<int>(tgt.size()), {}};
  std::vector<int> src_ids;
  for (const std::string &w : src) src_ids.push_back(table.src_vocab().Find(w));
  std::vector<double> prior;
  for (int j = 1; j <= alignment.tgt_len; ++j) {
    const int t = table.tgt_vocab().Find(tgt[static_cast<std::size_t>(j - 1)]);
    if (t < 0) continue;
    AlignmentPrior(table.options(), alignment.src_len, alignment.tgt_len, j, &prior);
    int best_i = 0;
    double best = prior[0] * table.Prob(0, t);
    for (int i = 1; i <= alignment.src_len; ++i) {
      const double score = prior[static_cast<std::size_t>(i)] *
                           table.Prob(src_ids[static_cast<std::size_t>(i - 1)], t);
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    if (best_i > 0) alignment.links.emplace_back(best_i, j);
  }
  std::sort(alignment.links.begin(), alignment.links.end());
  return alignment;
}

Alignment Intersect(const Alignment &fwd, const Alignment &rev) {
  if (fwd.src_len != rev.tgt_len || fwd.tgt_len != rev.src_len) {
    throw std::invalid_argument("intersecting alignments of different sentence lengths");
  }
  const Alignment oriented = rev.Transposed();
  std::vector<std::pair<int, int>> a = fwd.links;
  std::sort(a.begin(), a.end());
  Alignment out{fwd.src_len, fwd.tgt_len, {}};
  std::set_intersection(a.begin(), a.end(), oriented.links.begin(), oriented.links.end(),
                        std::back_inserter(out.links));
  out.links.erase(std::unique(out.links.begin(), out.links.end()), out.links.end());
  return out;
}

std::string FormatPharaoh(const Alignment &alignment) {
  std::string out;
  for (const auto &[i, j] : alignment.links) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i - 1);
    out += '-';
    out += std::to_string(j - 1);
  }
  return out;
}

Alignment ParsePharaoh(std::string_view line, int src_len, int tgt_len) {
  Alignment alignment{src_len, tgt_len, {}};
  for (std::string_view field : SplitWhitespace(StripCr(line))) {
    const auto dash = field.find('-');
    long long i = 0, j = 0;
    if (dash == std::string_view::npos || !ParseInt(field.substr(0, dash), &i) ||
        !ParseInt(field.substr(dash + 1), &j)) {
      throw DataError("malformed alignment link '" + std::string(field) + "'");
    }
    if (i < 0 || i >= src_len || j < 0 || j >= tgt_len) {
      throw DataError("alignment link '" + std::string(field) + "' out of range");
    }
    alignment.links.emplace_back(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
  }
  std::sort(alignment.links.begin(), alignment.links.end());
  alignment.links.erase(std::unique(alignment.links.begin(), alignment.links.end()),
                        alignment.links.end());
  return alignment;
}

std::string_view ProvenanceName(Provenance provenance) {
  return provenance == Provenance::kSeed ? "seed" : "related";
}

void BilingualDictionary::Add(std::string src, std::string tgt, Provenance provenance) {
  auto [it, inserted] = entries_.emplace(Key(std::move(src), std::move(tgt)), provenance);
  if (!inserted && provenance == Provenance::kSeed) it->second = Provenance::kSeed;
}

bool BilingualDictionary::Contains(const std::string &src, const std::string &tgt) const {
  return entries_.count(Key(src, tgt)) > 0;
}

BilingualDictionary BilingualDictionary::Reversed() const {
  BilingualDictionary out;
  for (const auto &[key, provenance] : entries_) out.Add(key.second, key.first, provenance);
  return out;
}

void BilingualDictionary::Write(std::ostream &out) const {
  for (const auto &[key, provenance] : entries_) {
    out << key.first << '\t' << key.second << '\t' << ProvenanceName(provenance) << '\n';
  }
}

void BilingualDictionary::Save(const std::filesystem::path &path) const {
  std::ofstream out = OpenForWrite(path);
  Write(out);
}

BilingualDictionary BilingualDictionary::Read(std::istream &in) {
  BilingualDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = StripCr(line);
    if (view.empty()) continue;
    const auto fields = Split(view, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        (fields[2] != "seed" && fields[2] != "related")) {
      throw DataError("dictionary line " + std::to_string(line_no) +
                      ": expected `src \\t tgt \\t seed|related`");
    }
    dict.Add(std::string(fields[0]), std::string(fields[1]),
             fields[2] == "seed" ? Provenance::kSeed : Provenance::kRelated);
  }
  return dict;
}

BilingualDictionary BilingualDictionary::Load(const std::filesystem::path &path) {
  std::ifstream in = OpenForRead(path);
  return Read(in);
}

LinkCounts CountIntersectedLinks(std::span<const SentencePair> corpus,
                                 const TranslationTable &fwd,
                                 const TranslationTable &rev) {
  LinkCounts counts;
  for (const SentencePair &pair : corpus) {
    const Alignment inter =
        Intersect(ViterbiAlign(fwd, pair.src, pair.tgt), ViterbiAlign(rev, pair.tgt, pair.src));
    for (const auto &[i, j] : inter.links) {
      ++counts[{pair.src[static_cast<std::size_t>(i - 1)],
                pair.tgt[static_cast<std::size_t>(j - 1)]}];
    }
  }
  return counts;
}

BilingualDictionary DictionaryFromLinkCounts(const LinkCounts &counts,
                                             long long min_count,
                                             Provenance provenance) {
  BilingualDictionary dict;
  auto it = counts.begin();
  while (it != counts.end()) {
    const std::string &src = it->first.first;
    long long total = 0;
    long long best_count = -1;
    const std::string *best = nullptr;
    for (; it != counts.end() && it->first.first == src; ++it) {
      total += it->second;
      // Targets arrive in lexicographic order, so strict > keeps the smallest.
      if (it->second > best_count) {
        best_count = it->second;
        best = &it->first.second;
      }
    }
    if (best != nullptr && total >= min_count) dict.Add(src, *best, provenance);
  }
  return dict;
}

BilingualDictionary ExtractDictionary(std::span<const SentencePair> corpus,
                                      const TranslationTable &fwd,
                                      const TranslationTable &rev,
                                      long long min_count, Provenance provenance) {
  if (corpus.empty()) throw DataError("cannot extract a dictionary from an empty corpus");
  return DictionaryFromLinkCounts(CountIntersectedLinks(corpus, fwd, rev), min_count,
                                  provenance);
}

BilingualDictionary MergeDictionaries(const BilingualDictionary &seed,
                                      const BilingualDictionary &related) {
  BilingualDictionary merged = seed;
  for (const auto &[key, provenance] : related.entries()) {
    merged.Add(key.first, key.second, provenance);
  }
  return merged;
}

}  // namespace wikimine
