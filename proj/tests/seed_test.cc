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

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "wikimine/seed.h"
#include "wikimine/util.h"

namespace wikimine {
namespace {

Document Doc(std::string id, std::string lang, std::string title = "",
             std::vector<std::string> sentences = {}) {
  Document d;
  d.id = std::move(id);
  d.lang = std::move(lang);
  d.title = std::move(title);
  d.sentences = std::move(sentences);
  return d;
}

std::string Words(int n, std::string_view word = "w") {
  std::vector<std::string> parts(static_cast<std::size_t>(n), std::string(word));
  return Join(parts, " ");
}

TEST_CASE("LinkedPairs follows links and counts missing targets") {
  DocumentStore e("en"), ar("ar");
  Document cat = Doc("Cat", "en");
  cat.links["ar"] = "Qit";
  e.Add(cat);
  ar.Add(Doc("Qit", "ar"));
  CHECK(LinkedPairs(e, ar).pairs.size() == 1);

  DocumentStore e2("en");
  Document dangling = Doc("Dog", "en");
  dangling.links["ar"] = "Missing";
  e2.Add(dangling);
  const auto result = LinkedPairs(e2, ar);
  CHECK(result.pairs.empty());
  CHECK(result.missing_links == 1);
}

TEST_CASE("LinkedPairs finds exactly the enumerated links") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    DocumentStore e("en"), f("kk");
    std::set<std::pair<std::string, std::string>> want;
    for (int i = 0; i < 10; ++i) f.Add(Doc("f" + std::to_string(i), "kk"));
    for (int i = 0; i < 10; ++i) {
      Document d = Doc("e" + std::to_string(9 - i), "en");
      const int r = static_cast<int>(rng() % 4);
      if (r == 0) {
        const std::string target = "f" + std::to_string(rng() % 10);
        d.links["kk"] = target;
        want.emplace(d.id, target);
      } else if (r == 1) {
        d.links["kk"] = "absent";
      } else if (r == 2) {
        d.links["de"] = "f1";
      }
      e.Add(d);
    }
    const auto got = LinkedPairs(e, f).pairs;
    REQUIRE(got.size() == want.size());
    auto it = want.begin();
    for (const DocPair &p : got) {
      CHECK(p.src_doc->id == it->first);
      CHECK(p.tgt_doc->id == it->second);
      CHECK(p.src_doc->links.at("kk") == p.tgt_doc->id);
      ++it;
    }
  }
}

TEST_CASE("First sentences obey the length ratio") {
  DocumentStore e("en"), f("xx");
  auto link = [&](std::string id, std::string fs_e, std::string fs_f) {
    Document de = Doc("e" + id, "en", "", {fs_e});
    if (fs_e.empty()) de.sentences.clear();
    de.links["xx"] = "f" + id;
    e.Add(de);
    Document df = Doc("f" + id, "xx", "", {fs_f});
    f.Add(df);
  };
  link("1", Words(12), Words(14));
  link("2", Words(4), Words(30));
  link("3", "", Words(5));
  const auto pairs = ExtractFirstSentences(LinkedPairs(e, f).pairs);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].src_doc == "e1");
  CHECK(pairs[0].kind == SeedKind::kFirstSentence);
}

TEST_CASE("Titles need tokens on both sides") {
  DocumentStore e("en"), f("xx");
  Document cat = Doc("e1", "en", "Cat");
  cat.links["xx"] = "f1";
  Document dog = Doc("e2", "en", "Dog");
  dog.links["xx"] = "f2";
  e.Add(cat);
  e.Add(dog);
  f.Add(Doc("f1", "xx", "Qit"));
  f.Add(Doc("f2", "xx", " "));
  const auto titles = ExtractTitles(LinkedPairs(e, f).pairs);
  REQUIRE(titles.size() == 1);
  CHECK(titles[0].src.raw == "Cat");
  CHECK(titles[0].tgt.raw == "Qit");
}

TEST_CASE("Captions are cross-producted by image id, links ignored") {
  DocumentStore e("en"), f("xx");
  Document de = Doc("e1", "en");
  de.images = {{"pic", "a cat on a mat"}, {"pic", "cat"}, {"solo", "only english"}};
  Document de2 = Doc("e2", "en");
  de2.images = {{"shared", "one two"}};
  Document df = Doc("f9", "xx");  // not linked to anything
  df.images = {{"pic", "qit ala mat"}, {"pic", "qit"}, {"pic", "qit qit qit qit qit qit qit qit qit"},
               {"shared", "bir eki"}};
  e.Add(de);
  e.Add(de2);
  f.Add(df);
  const auto captions = ExtractCaptions(e, f);
  // pic: 2 x 3 = 6 candidates, length filter keeps
  //   (5,3) (5,9) (1,1); "shared": 1.
  std::size_t pic = 0, shared = 0;
  for (const SeedPair &p : captions) {
    CHECK(p.kind == SeedKind::kCaption);
    REQUIRE(p.image_id.has_value());
    CHECK(LengthRatioOk(p.src.tokens.size(), p.tgt.tokens.size()));
    pic += *p.image_id == "pic";
    shared += *p.image_id == "shared";
  }
  CHECK(pic == 3);
  CHECK(shared == 1);
  CHECK(captions.front().image_id == "pic");  // ordered by image id
}

SeedPair Pair(std::string src, std::string tgt, SeedKind kind) {
  SeedPair p;
  p.src = MakeSentence(std::move(src), "en");
  p.tgt = MakeSentence(std::move(tgt), "xx");
  p.kind = kind;
  if (kind == SeedKind::kCaption) p.image_id = "img";
  return p;
}

TEST_CASE("BuildSeed deduplicates with first occurrence winning") {
  std::vector<SeedPair> f, c, t;
  for (int i = 0; i < 5; ++i) f.push_back(Pair("f" + std::to_string(i), "x", SeedKind::kFirstSentence));
  for (int i = 0; i < 3; ++i) c.push_back(Pair("c" + std::to_string(i), "x", SeedKind::kCaption));
  for (int i = 0; i < 2; ++i) t.push_back(Pair("t" + std::to_string(i), "x", SeedKind::kTitle));
  CHECK(BuildSeed(f, c, t).size() == 10);

  const SeedCorpus dup = BuildSeed({Pair("same", "same", SeedKind::kFirstSentence)}, {},
                                   {Pair("same", "same", SeedKind::kTitle)});
  REQUIRE(dup.size() == 1);
  CHECK(dup.pairs[0].kind == SeedKind::kFirstSentence);
  CHECK(dup.count(SeedKind::kFirstSentence) == 1);
  CHECK(dup.count(SeedKind::kTitle) == 0);
  CHECK(BuildSeed({}, {}, {}).size() == 0);
}

TEST_CASE("Seed corpus of the cipher fixture has known counts") {
  testing::CipherOptions options;
  options.doc_pairs = 30;
  options.sentences = 5;
  options.vocab = 200;
  options.dim = 4;
  const auto fx = testing::MakeCipherFixture(options);
  const auto pairs = fx.Pairs();
  const auto f = ExtractFirstSentences(pairs);
  const auto c = ExtractCaptions(fx.store_e, fx.store_f);
  const auto t = ExtractTitles(pairs);
  const SeedCorpus seed = BuildSeed(f, c, t);
  // Planted first sentences, one caption pair per image and one title per
  // pair, all distinct.
  CHECK(seed.count(SeedKind::kFirstSentence) == 30);
  CHECK(seed.count(SeedKind::kCaption) == 30);
  CHECK(seed.count(SeedKind::kTitle) == 30);
  CHECK(seed.size() <= f.size() + c.size() + t.size());
  std::set<std::pair<std::string, std::string>> raw;
  for (const SeedPair &p : seed.pairs) {
    CHECK(raw.emplace(p.src.raw, p.tgt.raw).second);
    CHECK(p.src.lang == "en");
    CHECK(p.tgt.lang == "xx");
  }

  // Byte-identical reruns and a lossless TSV round trip.
  std::stringstream a, b;
  WriteSeedCorpus(a, seed);
  WriteSeedCorpus(b, BuildSeed(ExtractFirstSentences(fx.Pairs()),
                               ExtractCaptions(fx.store_e, fx.store_f), ExtractTitles(fx.Pairs())));
  CHECK(a.str() == b.str());
  const SeedCorpus back = ReadSeedCorpus(a, "en", "xx");
  CHECK(back.size() == seed.size());
  CHECK(back.counts == seed.counts);
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back.pairs[k].src.tokens == seed.pairs[k].src.tokens);
    CHECK(back.pairs[k].image_id == seed.pairs[k].image_id);
  }
}

TEST_CASE("Malformed seed TSV is a data error") {
  std::stringstream few("title\ta\tb\n");
  CHECK_THROWS_AS(ReadSeedCorpus(few, "en", "xx"), DataError);
  std::stringstream kind("bogus\ta\tb\t\tx\ty\n");
  CHECK_THROWS_AS(ReadSeedCorpus(kind, "en", "xx"), DataError);
  std::stringstream caption("caption\ta\tb\t\tx\ty\n");
  CHECK_THROWS_AS(ReadSeedCorpus(caption, "en", "xx"), DataError);
}

}  // namespace
}  // namespace wikimine
