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

#include "wikimine/corpus.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "wikimine/util.h"

namespace wikimine {

namespace {

enum class CharClass { kSkip, kWord, kSymbol };

CharClass Classify(UChar32 c) {
  if (c == 0xFEFF || u_isUWhiteSpace(c)) return CharClass::kSkip;
  switch (u_charType(c)) {
    case U_UPPERCASE_LETTER:
    case U_LOWERCASE_LETTER:
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
    case U_NON_SPACING_MARK:
    case U_ENCLOSING_MARK:
    case U_COMBINING_SPACING_MARK:
    case U_DECIMAL_DIGIT_NUMBER:
    case U_FORMAT_CHAR:
      return CharClass::kWord;
    case U_CONTROL_CHAR:
      return CharClass::kSkip;
    default:
      return CharClass::kSymbol;
  }
}

void AppendFolded(UChar32 c, std::string *out) {
  c = u_foldCase(c, U_FOLD_CASE_DEFAULT);
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out->append(buf, static_cast<std::size_t>(len));
}

bool HasForbiddenControl(std::string_view text) {
  return text.find_first_of("\t\n\r") != std::string_view::npos;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view raw, std::string_view /*lang*/) {
  std::vector<std::string> tokens;
  std::string current;
  const auto *bytes = reinterpret_cast<const uint8_t *>(raw.data());
  const int32_t length = static_cast<int32_t>(raw.size());
  int32_t pos = 0;
  while (pos < length) {
    UChar32 c;
    U8_NEXT(bytes, pos, length, c);
    if (c < 0) c = 0xFFFD;
    const CharClass cls = Classify(c);
    if (cls == CharClass::kWord) {
      AppendFolded(c, &current);
      continue;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
    if (cls == CharClass::kSymbol) {
      std::string symbol;
      AppendFolded(c, &symbol);
      tokens.push_back(std::move(symbol));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string FoldCase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const auto *bytes = reinterpret_cast<const uint8_t *>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t pos = 0;
  while (pos < length) {
    UChar32 c;
    U8_NEXT(bytes, pos, length, c);
    AppendFolded(c < 0 ? 0xFFFD : c, &out);
  }
  return out;
}

Sentence MakeSentence(std::string raw, std::string lang) {
  Sentence sentence;
  sentence.tokens = Tokenize(raw, lang);
  sentence.raw = std::move(raw);
  sentence.lang = std::move(lang);
  return sentence;
}

std::vector<std::string> NumericSignature(const std::vector<std::string> &tokens) {
  std::vector<std::string> numbers;
  for (const std::string &token : tokens) {
    if (token.empty()) continue;
    if (!std::all_of(token.begin(), token.end(),
                     [](char ch) { return ch >= '0' && ch <= '9'; })) {
      continue;
    }
    const std::size_t first = token.find_first_not_of('0');
    numbers.push_back(first == std::string::npos ? "0" : token.substr(first));
  }
  std::sort(numbers.begin(), numbers.end());
  return numbers;
}

bool NumericFilterPasses(const std::vector<std::string> &src,
                         const std::vector<std::string> &tgt) {
  return NumericSignature(src) == NumericSignature(tgt);
}

bool LengthRatioOk(std::size_t len_src, std::size_t len_tgt) {
  if (len_src == 0 || len_tgt == 0) {
    throw std::invalid_argument("length ratio of an empty sentence");
  }
  const std::size_t lo = std::min(len_src, len_tgt);
  const std::size_t hi = std::max(len_src, len_tgt);
  return hi <= 2 * lo;
}

void DocumentStore::Add(Document doc) {
  if (doc.id.empty()) throw DataError("document without id");
  if (doc.lang.empty()) throw DataError("document " + doc.id + " has no lang");
  if (doc.lang != lang_) {
    throw DataError("document " + doc.id + " has lang '" + doc.lang +
                    "', store expects '" + lang_ + "'");
  }
  bool bad_text = HasForbiddenControl(doc.id) || HasForbiddenControl(doc.title);
  for (const std::string &s : doc.sentences) bad_text |= HasForbiddenControl(s);
  for (const Image &image : doc.images) {
    bad_text |= HasForbiddenControl(image.id) || HasForbiddenControl(image.caption);
  }
  if (bad_text) {
    throw DataError("document " + doc.id + " contains a tab or newline in a text field");
  }
  if (!index_.emplace(doc.id, docs_.size()).second) {
    throw DataError("duplicate document id " + doc.id + " in " + lang_ + " store");
  }
  docs_.push_back(std::move(doc));
}

const Document *DocumentStore::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

namespace {

Document ParseDocument(const nlohmann::json &j) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  doc.lang = j.at("lang").get<std::string>();
  doc.title = j.value("title", std::string());
  if (j.contains("sentences")) {
    doc.sentences = j.at("sentences").get<std::vector<std::string>>();
  }
  if (j.contains("images")) {
    for (const auto &image : j.at("images")) {
      doc.images.push_back({image.at("id").get<std::string>(),
                            image.value("caption", std::string())});
    }
  }
  if (j.contains("links")) {
    doc.links = j.at("links").get<std::map<std::string, std::string>>();
  }
  return doc;
}

}  // namespace

DocumentStore ReadDocumentStore(std::istream &in, const std::string &lang) {
  DocumentStore store(lang);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = StripCr(line);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    Document doc;
    try {
      doc = ParseDocument(nlohmann::json::parse(view));
    } catch (const nlohmann::json::exception &e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    store.Add(std::move(doc));
  }
  return store;
}

DocumentStore LoadDocumentStore(const std::filesystem::path &path,
                                const std::string &lang) {
  std::ifstream in = OpenForRead(path);
  try {
    return ReadDocumentStore(in, lang);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteDocument(std::ostream &out, const Document &doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["lang"] = doc.lang;
  j["title"] = doc.title;
  j["sentences"] = doc.sentences;
  j["images"] = nlohmann::ordered_json::array();
  for (const Image &image : doc.images) {
    j["images"].push_back({{"id", image.id}, {"caption", image.caption}});
  }
  j["links"] = doc.links;
  out << j.dump() << '\n';
}

void SaveDocumentStore(const std::filesystem::path &path,
                       const DocumentStore &store) {
  std::ofstream out = OpenForWrite(path);
  for (const Document &doc : store.documents()) WriteDocument(out, doc);
}

}  // namespace wikimine
