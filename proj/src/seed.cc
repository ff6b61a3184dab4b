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

#include "wikimine/seed.h"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <utility>

#include "wikimine/util.h"

namespace wikimine {

LinkedPairsResult LinkedPairs(const DocumentStore &store_e,
                              const DocumentStore &store_f) {
  LinkedPairsResult result;
  for (const Document &doc : store_e.documents()) {
    auto link = doc.links.find(store_f.lang());
    if (link == doc.links.end()) continue;
    const Document *target = store_f.Find(link->second);
    if (target == nullptr) {
      ++result.missing_links;
      continue;
    }
    result.pairs.push_back({&doc, target});
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const DocPair &a, const DocPair &b) {
              if (a.src_doc->id != b.src_doc->id) return a.src_doc->id < b.src_doc->id;
              return a.tgt_doc->id < b.tgt_doc->id;
            });
  return result;
}

std::string_view SeedKindName(SeedKind kind) {
  switch (kind) {
    case SeedKind::kFirstSentence:
      return "first_sentence";
    case SeedKind::kCaption:
      return "caption";
    case SeedKind::kTitle:
      return "title";
  }
  return "unknown";
}

std::optional<SeedKind> ParseSeedKind(std::string_view name) {
  for (SeedKind kind : {SeedKind::kFirstSentence, SeedKind::kCaption, SeedKind::kTitle}) {
    if (SeedKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<SeedPair> ExtractFirstSentences(const std::vector<DocPair> &pairs) {
  std::vector<SeedPair> out;
  for (const DocPair &pair : pairs) {
    Sentence src = MakeSentence(std::string(pair.src_doc->FirstSentence()),
                                pair.src_doc->lang);
    Sentence tgt = MakeSentence(std::string(pair.tgt_doc->FirstSentence()),
                                pair.tgt_doc->lang);
    if (src.tokens.empty() || tgt.tokens.empty()) continue;
    if (!LengthRatioOk(src.tokens.size(), tgt.tokens.size())) continue;
    out.push_back({std::move(src), std::move(tgt), SeedKind::kFirstSentence,
                   pair.src_doc->id, pair.tgt_doc->id, std::nullopt});
  }
  return out;
}

std::vector<SeedPair> ExtractTitles(const std::vector<DocPair> &pairs) {
  std::vector<SeedPair> out;
  for (const DocPair &pair : pairs) {
    Sentence src = MakeSentence(pair.src_doc->title, pair.src_doc->lang);
    Sentence tgt = MakeSentence(pair.tgt_doc->title, pair.tgt_doc->lang);
    if (src.tokens.empty() || tgt.tokens.empty()) continue;
    out.push_back({std::move(src), std::move(tgt), SeedKind::kTitle,
                   pair.src_doc->id, pair.tgt_doc->id, std::nullopt});
  }
  return out;
}

namespace {

struct Caption {
  const Document *doc;
  Sentence sentence;
};

// image id -> non-empty captions in store order.
std::map<std::string, std::vector<Caption>> CaptionsById(const DocumentStore &store) {
  std::map<std::string, std::vector<Caption>> by_id;
  for (const Document &doc : store.documents()) {
    for (const Image &image : doc.images) {
      Sentence sentence = MakeSentence(image.caption, doc.lang);
      if (sentence.tokens.empty()) continue;
      by_id[image.id].push_back({&doc, std::move(sentence)});
    }
  }
  return by_id;
}

}  // namespace

std::vector<SeedPair> ExtractCaptions(const DocumentStore &store_e,
                                      const DocumentStore &store_f) {
  const auto captions_e = CaptionsById(store_e);
  const auto captions_f = CaptionsById(store_f);
  std::vector<SeedPair> out;
  for (const auto &[image_id, src_captions] : captions_e) {
    auto it = captions_f.find(image_id);
    if (it == captions_f.end()) continue;
    for (const Caption &src : src_captions) {
      for (const Caption &tgt : it->second) {
        if (!LengthRatioOk(src.sentence.tokens.size(), tgt.sentence.tokens.size())) {
          continue;
        }
        out.push_back({src.sentence, tgt.sentence, SeedKind::kCaption,
                       src.doc->id, tgt.doc->id, image_id});
      }
    }
  }
  return out;
}

SeedCorpus BuildSeed(std::vector<SeedPair> first_sentences,
                     std::vector<SeedPair> captions,
                     std::vector<SeedPair> titles) {
  SeedCorpus corpus;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto *list : {&first_sentences, &captions, &titles}) {
    for (SeedPair &pair : *list) {
      if (!seen.emplace(pair.src.raw, pair.tgt.raw).second) continue;
      ++corpus.counts[static_cast<std::size_t>(pair.kind)];
      corpus.pairs.push_back(std::move(pair));
    }
  }
  return corpus;
}

void WriteSeedCorpus(std::ostream &out, const SeedCorpus &corpus) {
  for (const SeedPair &pair : corpus.pairs) {
    out << SeedKindName(pair.kind) << '\t' << pair.src_doc << '\t' << pair.tgt_doc
        << '\t' << pair.image_id.value_or("") << '\t' << pair.src.raw << '\t'
        << pair.tgt.raw << '\n';
  }
}

void SaveSeedCorpus(const std::filesystem::path &path, const SeedCorpus &corpus) {
  std::ofstream out = OpenForWrite(path);
  WriteSeedCorpus(out, corpus);
}

SeedCorpus ReadSeedCorpus(std::istream &in, const std::string &lang_e,
                          const std::string &lang_f) {
  SeedCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = StripCr(line);
    if (view.empty()) continue;
    const auto fields = Split(view, '\t');
    if (fields.size() != 6) {
      throw DataError("seed line " + std::to_string(line_no) + ": expected 6 columns, got " +
                      std::to_string(fields.size()));
    }
    const auto kind = ParseSeedKind(fields[0]);
    if (!kind) {
      throw DataError("seed line " + std::to_string(line_no) + ": unknown kind '" +
                      std::string(fields[0]) + "'");
    }
    if (*kind == SeedKind::kCaption && fields[3].empty()) {
      throw DataError("seed line " + std::to_string(line_no) + ": caption without image id");
    }
    SeedPair pair;
    pair.kind = *kind;
    pair.src_doc = fields[1];
    pair.tgt_doc = fields[2];
    if (!fields[3].empty()) pair.image_id = std::string(fields[3]);
    pair.src = MakeSentence(std::string(fields[4]), lang_e);
    pair.tgt = MakeSentence(std::string(fields[5]), lang_f);
    ++corpus.counts[static_cast<std::size_t>(pair.kind)];
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

SeedCorpus LoadSeedCorpus(const std::filesystem::path &path,
                          const std::string &lang_e, const std::string &lang_f) {
  std::ifstream in = OpenForRead(path);
  return ReadSeedCorpus(in, lang_e, lang_f);
}

}  // namespace wikimine
