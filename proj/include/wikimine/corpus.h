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

// Text data model shared by seeding and mining: linked documents, tokenized
// sentences, and the cheap pair filters (numeric signature, length ratio).

#ifndef WIKIMINE_CORPUS_H_
#define WIKIMINE_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wikimine {

struct Image {
  std::string id;
  std::string caption;
};

// One article. `links` maps a language code to the id of the article on the
// same topic in that language.
struct Document {
  std::string id;
  std::string lang;
  std::string title;
  std::vector<std::string> sentences;
  std::vector<Image> images;
  std::map<std::string, std::string> links;

  // First sentence of the article, or empty.
  std::string_view FirstSentence() const {
    return sentences.empty() ? std::string_view() : sentences.front();
  }
};

struct Sentence {
  std::string raw;
  std::vector<std::string> tokens;
  std::string lang;
};

// Splits text into lowercased word tokens. Letters, combining marks, decimal
// digits and format characters (ZWJ/ZWNJ) form maximal runs; every other
// non-space codepoint is its own token. Tokens are case folded with Unicode
// simple case folding. Invalid UTF-8 bytes become U+FFFD tokens.
std::vector<std::string> Tokenize(std::string_view raw, std::string_view lang);

// Simple case folding of a whole string, without splitting it.
std::string FoldCase(std::string_view text);

Sentence MakeSentence(std::string raw, std::string lang);

// Sorted multiset of the all-ASCII-digit tokens, leading zeros stripped.
std::vector<std::string> NumericSignature(const std::vector<std::string> &tokens);

// True iff both token lists carry the same numbers.
bool NumericFilterPasses(const std::vector<std::string> &src,
                         const std::vector<std::string> &tgt);

// True iff the two lengths are within a factor of two of each other
// (inclusive). Throws std::invalid_argument on a zero length.
bool LengthRatioOk(std::size_t len_src, std::size_t len_tgt);

// The documents of one language, unique by id.
class DocumentStore {
 public:
  explicit DocumentStore(std::string lang) : lang_(std::move(lang)) {}

  // Throws DataError on a duplicate id, a language mismatch, an empty id, or
  // a tab/newline inside any text field.
  void Add(Document doc);

  const Document *Find(std::string_view id) const;

  const std::string &lang() const { return lang_; }
  const std::vector<Document> &documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

 private:
  std::string lang_;
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
};

// JSON Lines, one document per line:
//   {"id","lang","title","sentences":[...],"images":[{"id","caption"}],
//    "links":{"<lang>":"<doc_id>"}}
// Every document must carry `lang`; blank lines are ignored.
DocumentStore ReadDocumentStore(std::istream &in, const std::string &lang);
DocumentStore LoadDocumentStore(const std::filesystem::path &path,
                                const std::string &lang);
void WriteDocument(std::ostream &out, const Document &doc);
void SaveDocumentStore(const std::filesystem::path &path,
                       const DocumentStore &store);

}  // namespace wikimine

#endif  // WIKIMINE_CORPUS_H_
