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

#include "wikimine/pipeline.h"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "wikimine/align.h"
#include "wikimine/corpus.h"
#include "wikimine/miner.h"
#include "wikimine/project.h"
#include "wikimine/seed.h"
#include "wikimine/util.h"
#include "wikimine/xembed.h"

namespace wikimine {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr Stage kAllStages[] = {Stage::kSeed, Stage::kDict, Stage::kCca, Stage::kMine,
                                Stage::kProject};

void RequireFile(const fs::path &path, std::string_view what) {
  if (path.empty()) throw ValidationError(std::string(what) + " is not configured");
  if (!fs::is_regular_file(path)) {
    throw ValidationError(std::string(what) + " '" + path.string() + "' does not exist");
  }
}

void RequireIfSet(const fs::path &path, std::string_view what) {
  if (!path.empty()) RequireFile(path, what);
}

// The stage that writes an out_dir file, for stale checks.
struct Upstream {
  Stage stage;
  std::string_view file;
};

std::vector<SentencePair> SeedSentencePairs(const SeedCorpus &seed) {
  std::vector<SentencePair> corpus;
  corpus.reserve(seed.size());
  for (const SeedPair &pair : seed.pairs) {
    if (pair.src.tokens.empty() || pair.tgt.tokens.empty()) continue;
    corpus.push_back({pair.src.tokens, pair.tgt.tokens});
  }
  return corpus;
}

// Related-language parallel data: TSV `e sentence \t g sentence`.
std::vector<SentencePair> LoadRelatedParallel(const fs::path &path, const std::string &lang_e,
                                              const std::string &lang_g) {
  std::ifstream in = OpenForRead(path);
  std::vector<SentencePair> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = StripCr(line);
    if (view.empty()) continue;
    const auto fields = Split(view, '\t');
    if (fields.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 2 tab-separated columns");
    }
    SentencePair pair{Tokenize(fields[0], lang_e), Tokenize(fields[1], lang_g)};
    if (pair.src.empty() || pair.tgt.empty()) continue;
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

BilingualDictionary InduceDictionary(const std::vector<SentencePair> &corpus,
                                     const PipelineConfig &cfg, Provenance provenance,
                                     Json *stats) {
  Model1Options options;
  options.iterations = cfg.iterations;
  options.favor_diagonal = cfg.favor_diagonal;
  options.threads = cfg.threads;
  options.direction = Direction::kEtoF;
  const Model1Result fwd = TrainModel1(corpus, options);
  options.direction = Direction::kFtoE;
  const std::vector<SentencePair> reversed = Reversed(corpus);
  const Model1Result rev = TrainModel1(reversed, options);
  (*stats)["log_likelihood_fwd"] = fwd.log_likelihoods.back();
  (*stats)["log_likelihood_rev"] = rev.log_likelihoods.back();
  return ExtractDictionary(corpus, fwd.table, rev.table, cfg.min_count, provenance);
}

std::vector<std::vector<std::string>> LoadTokenLines(const fs::path &path) {
  std::ifstream in = OpenForRead(path);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    for (std::string_view token : SplitWhitespace(StripCr(line))) tokens.emplace_back(token);
    lines.push_back(std::move(tokens));
  }
  return lines;
}

std::vector<Alignment> LoadPharaoh(const fs::path &path, std::size_t expected,
                                   const std::vector<std::vector<std::string>> &src,
                                   const std::vector<std::vector<std::string>> &tgt) {
  std::ifstream in = OpenForRead(path);
  std::vector<Alignment> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t k = out.size();
    if (k >= expected) throw DataError(path.string() + ": more lines than sentences");
    try {
      out.push_back(ParsePharaoh(StripCr(line), static_cast<int>(src[k].size()),
                                 static_cast<int>(tgt[k].size())));
    } catch (const std::invalid_argument &e) {
      throw DataError(path.string() + ":" + std::to_string(k + 1) + ": " + e.what());
    }
  }
  if (out.size() != expected) {
    throw DataError(path.string() + ": " + std::to_string(out.size()) + " lines for " +
                    std::to_string(expected) + " sentences");
  }
  return out;
}

void SavePharaoh(const fs::path &path, const std::vector<Alignment> &alignments) {
  std::ofstream out = OpenForWrite(path);
  for (const Alignment &alignment : alignments) out << FormatPharaoh(alignment) << '\n';
}

std::vector<std::string> FoldAll(const std::vector<std::string> &tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string &token : tokens) out.push_back(FoldCase(token));
  return out;
}

}  // namespace

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kSeed:
      return "seed";
    case Stage::kDict:
      return "dict";
    case Stage::kCca:
      return "cca";
    case Stage::kMine:
      return "mine";
    case Stage::kProject:
      return "project";
  }
  return "unknown";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (Stage stage : kAllStages) {
    if (StageName(stage) == name) return stage;
  }
  return std::nullopt;
}

void PipelineConfig::Validate(Stage stage) const {
  if (lang_e.empty() || lang_f.empty()) throw ValidationError("lang_e and lang_f are required");
  if (lang_e == lang_f) throw ValidationError("lang_e and lang_f must differ");
  if (!lang_g.empty() && (lang_g == lang_e || lang_g == lang_f)) {
    throw ValidationError("lang_g must differ from lang_e and lang_f");
  }
  if (out_dir.empty()) throw ValidationError("out_dir is required");
  if (iterations < 1) throw ValidationError("iterations must be >= 1");
  if (min_count < 1) throw ValidationError("min_count must be >= 1");
  if (cca_k < 0) throw ValidationError("cca_k must be >= 0");
  if (!std::isfinite(cca_epsilon)) throw ValidationError("cca_epsilon must be finite");
  MiningConfig{tau}.Validate();
  if (!(min_density >= 0.0 && min_density <= 1.0)) {
    throw ValidationError("min_density must lie in [0, 1]");
  }
  if (min_run < 1) throw ValidationError("min_run must be >= 1");
  if (threads < 0) throw ValidationError("threads must be >= 0");

  switch (stage) {
    case Stage::kSeed:
    case Stage::kMine:
      RequireFile(store_e, "store_e");
      RequireFile(store_f, "store_f");
      break;
    case Stage::kDict:
      RequireIfSet(related_parallel, "related_parallel");
      if (!related_parallel.empty() && lang_g.empty()) {
        throw ValidationError("related_parallel requires lang_g");
      }
      break;
    case Stage::kCca:
      RequireFile(emb_e, "emb_e");
      RequireFile(emb_f, "emb_f");
      break;
    case Stage::kProject:
      RequireFile(treebank, "treebank");
      RequireFile(bitext, "bitext");
      if (fwd_align.empty() != rev_align.empty()) {
        throw ValidationError("fwd_align and rev_align must be given together");
      }
      RequireIfSet(fwd_align, "fwd_align");
      RequireIfSet(rev_align, "rev_align");
      RequireIfSet(target_pos, "target_pos");
      break;
  }
}

Json PipelineConfig::ToJson() const {
  return Json{{"store_e", store_e.string()},
              {"store_f", store_f.string()},
              {"emb_e", emb_e.string()},
              {"emb_f", emb_f.string()},
              {"related_parallel", related_parallel.string()},
              {"out_dir", out_dir.string()},
              {"treebank", treebank.string()},
              {"bitext", bitext.string()},
              {"fwd_align", fwd_align.string()},
              {"rev_align", rev_align.string()},
              {"target_pos", target_pos.string()},
              {"lang_e", lang_e},
              {"lang_f", lang_f},
              {"lang_g", lang_g},
              {"iterations", iterations},
              {"favor_diagonal", favor_diagonal},
              {"min_count", min_count},
              {"cca_k", cca_k},
              {"cca_epsilon", cca_epsilon},
              {"tau", tau},
              {"numeric_filter", numeric_filter},
              {"include_titles", include_titles},
              {"min_density", min_density},
              {"min_run", min_run},
              {"seed", seed},
              {"threads", threads}};
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  const fs::path path = Out(kManifestFile);
  if (fs::exists(path)) {
    std::ifstream in = OpenForRead(path);
    try {
      manifest_ = Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  if (!manifest_.is_object()) manifest_ = Json::object();
  if (!manifest_.contains("stages") || !manifest_["stages"].is_object()) {
    manifest_["stages"] = Json::object();
  }
}

fs::path Pipeline::Out(std::string_view name) const { return config_.out_dir / name; }

Json Pipeline::Params(Stage stage) const {
  const PipelineConfig &c = config_;
  switch (stage) {
    case Stage::kSeed:
      return Json{{"lang_e", c.lang_e}, {"lang_f", c.lang_f}};
    case Stage::kDict:
      return Json{{"lang_e", c.lang_e},
                  {"lang_f", c.lang_f},
                  {"lang_g", c.lang_g},
                  {"iterations", c.iterations},
                  {"favor_diagonal", c.favor_diagonal},
                  {"min_count", c.min_count}};
    case Stage::kCca:
      return Json{{"cca_k", c.cca_k}, {"cca_epsilon", c.cca_epsilon}};
    case Stage::kMine:
      return Json{{"lang_e", c.lang_e},
                  {"lang_f", c.lang_f},
                  {"tau", c.tau},
                  {"numeric_filter", c.numeric_filter},
                  {"include_titles", c.include_titles}};
    case Stage::kProject:
      return Json{{"iterations", c.iterations},
                  {"favor_diagonal", c.favor_diagonal},
                  {"min_density", c.min_density},
                  {"min_run", c.min_run}};
  }
  return Json::object();
}

Json Pipeline::InputHashes(Stage stage) const {
  const PipelineConfig &c = config_;
  Json inputs = Json::object();
  auto external = [&](std::string_view role, const fs::path &path) {
    if (!path.empty()) inputs[std::string(role)] = Sha256File(path);
  };
  auto upstream = [&](Upstream up) {
    const fs::path path = Out(up.file);
    if (!fs::is_regular_file(path)) {
      throw DataError("missing " + path.string() + "; run the " +
                      std::string(StageName(up.stage)) + " stage first");
    }
    const std::string hash = Sha256File(path);
    const Json &stages = manifest_["stages"];
    const std::string name(StageName(up.stage));
    const bool recorded = stages.contains(name) && stages[name].contains("outputs") &&
                          stages[name]["outputs"].contains(std::string(up.file)) &&
                          stages[name]["outputs"][std::string(up.file)] == hash;
    if (!recorded) {
      if (!c.force) {
        throw ValidationError(path.string() + " does not match the manifest entry of the " +
                              name + " stage; rerun it or pass --force");
      }
      spdlog::warn("{} is stale, continuing because of --force", path.string());
    }
    inputs[std::string(up.file)] = hash;
  };
  switch (stage) {
    case Stage::kSeed:
      external("store_e", c.store_e);
      external("store_f", c.store_f);
      break;
    case Stage::kDict:
      upstream({Stage::kSeed, kSeedFile});
      external("related_parallel", c.related_parallel);
      break;
    case Stage::kCca:
      upstream({Stage::kDict, kDictFile});
      external("emb_e", c.emb_e);
      external("emb_f", c.emb_f);
      break;
    case Stage::kMine:
      external("store_e", c.store_e);
      external("store_f", c.store_f);
      upstream({Stage::kDict, kDictFile});
      upstream({Stage::kCca, kProjEFile});
      upstream({Stage::kCca, kProjFFile});
      break;
    case Stage::kProject:
      external("treebank", c.treebank);
      external("bitext", c.bitext);
      external("fwd_align", c.fwd_align);
      external("rev_align", c.rev_align);
      external("target_pos", c.target_pos);
      break;
  }
  return inputs;
}

std::vector<std::string> Pipeline::Outputs(Stage stage) const {
  switch (stage) {
    case Stage::kSeed:
      return {std::string(kSeedFile)};
    case Stage::kDict:
      return {std::string(kDictFile)};
    case Stage::kCca:
      return {std::string(kCcaFile), std::string(kProjEFile), std::string(kProjFFile)};
    case Stage::kMine:
      return {std::string(kMinedFile)};
    case Stage::kProject:
      if (config_.fwd_align.empty()) {
        return {std::string(kTreebankFile), std::string(kFwdAlignFile),
                std::string(kRevAlignFile)};
      }
      return {std::string(kTreebankFile)};
  }
  return {};
}

bool Pipeline::UpToDate(Stage stage, const Json &params, const Json &inputs) const {
  const std::string name(StageName(stage));
  const Json &stages = manifest_["stages"];
  if (!stages.contains(name)) return false;
  const Json &entry = stages[name];
  if (!entry.contains("params") || entry["params"] != params) return false;
  if (!entry.contains("inputs") || entry["inputs"] != inputs) return false;
  if (!entry.contains("outputs")) return false;
  for (const std::string &file : Outputs(stage)) {
    const fs::path path = Out(file);
    if (!entry["outputs"].contains(file) || !fs::is_regular_file(path)) return false;
    if (entry["outputs"][file] != Sha256File(path)) return false;
  }
  return true;
}

void Pipeline::Record(Stage stage, const Json &params, const Json &inputs, const Json &stats,
                      double seconds) {
  Json outputs = Json::object();
  for (const std::string &file : Outputs(stage)) outputs[file] = Sha256File(Out(file));
  manifest_["stages"][std::string(StageName(stage))] = Json{{"params", params},
                                                            {"inputs", inputs},
                                                            {"outputs", outputs},
                                                            {"stats", stats},
                                                            {"seconds", seconds}};
}

void Pipeline::SaveManifest() const {
  Json manifest = manifest_;
  manifest["tool_version"] = std::string(kToolVersion);
  manifest["config"] = config_.ToJson();
  const fs::path path = Out(kManifestFile);
  const fs::path tmp = Out(std::string(kManifestFile) + ".tmp");
  {
    std::ofstream out = OpenForWrite(tmp);
    out << manifest.dump(2) << '\n';
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

Json Pipeline::Run(Stage stage) {
  config_.Validate(stage);
  const std::string name(StageName(stage));
  const Json params = Params(stage);
  const Json inputs = InputHashes(stage);
  if (!config_.force && UpToDate(stage, params, inputs)) {
    spdlog::info("{}: up to date, skipping", name);
    return manifest_["stages"][name]["stats"];
  }
  spdlog::info("{}: running", name);
  const auto start = std::chrono::steady_clock::now();
  Json stats;
  switch (stage) {
    case Stage::kSeed:
      stats = RunSeed();
      break;
    case Stage::kDict:
      stats = RunDict();
      break;
    case Stage::kCca:
      stats = RunCca();
      break;
    case Stage::kMine:
      stats = RunMine();
      break;
    case Stage::kProject:
      stats = RunProject();
      break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  Record(stage, params, inputs, stats, elapsed.count());
  SaveManifest();
  spdlog::info("{}: done in {:.3f}s", name, elapsed.count());
  return stats;
}

Json Pipeline::RunAll() {
  Json stats = Json::object();
  for (Stage stage : kAllStages) {
    if (stage == Stage::kProject && config_.treebank.empty()) {
      spdlog::info("project: no treebank configured, skipping");
      continue;
    }
    stats[std::string(StageName(stage))] = Run(stage);
  }
  return stats;
}

Json Pipeline::RunSeed() {
  const DocumentStore store_e = LoadDocumentStore(config_.store_e, config_.lang_e);
  const DocumentStore store_f = LoadDocumentStore(config_.store_f, config_.lang_f);
  if (store_e.empty() || store_f.empty()) throw DataError("empty document store");
  const LinkedPairsResult linked = LinkedPairs(store_e, store_f);
  if (linked.pairs.empty()) {
    spdlog::warn("no linked documents: no first-sentence or title pairs, captions only");
  }
  if (linked.missing_links > 0) {
    spdlog::warn("{} links point to documents absent from {}", linked.missing_links,
                 config_.store_f.string());
  }
  SeedCorpus seed = BuildSeed(ExtractFirstSentences(linked.pairs),
                              ExtractCaptions(store_e, store_f), ExtractTitles(linked.pairs));
  SaveSeedCorpus(Out(kSeedFile), seed);
  return Json{{"documents_e", store_e.size()},
              {"documents_f", store_f.size()},
              {"linked_pairs", linked.pairs.size()},
              {"missing_links", linked.missing_links},
              {"first_sentence", seed.count(SeedKind::kFirstSentence)},
              {"caption", seed.count(SeedKind::kCaption)},
              {"title", seed.count(SeedKind::kTitle)},
              {"pairs", seed.size()}};
}

Json Pipeline::RunDict() {
  const SeedCorpus seed = LoadSeedCorpus(Out(kSeedFile), config_.lang_e, config_.lang_f);
  const std::vector<SentencePair> corpus = SeedSentencePairs(seed);
  if (corpus.empty()) throw DataError("seed corpus is empty");
  Json stats = Json::object();
  stats["seed_pairs"] = corpus.size();
  Json seed_stats = Json::object();
  BilingualDictionary dict = InduceDictionary(corpus, config_, Provenance::kSeed, &seed_stats);
  stats["seed_entries"] = dict.size();
  stats["seed_model"] = seed_stats;
  if (!config_.related_parallel.empty()) {
    const std::vector<SentencePair> related =
        LoadRelatedParallel(config_.related_parallel, config_.lang_e, config_.lang_g);
    if (related.empty()) throw DataError("related-language parallel data is empty");
    Json related_stats = Json::object();
    const BilingualDictionary related_dict =
        InduceDictionary(related, config_, Provenance::kRelated, &related_stats);
    stats["related_pairs"] = related.size();
    stats["related_entries"] = related_dict.size();
    stats["related_model"] = related_stats;
    dict = MergeDictionaries(dict, related_dict);
  }
  stats["entries"] = dict.size();
  dict.Save(Out(kDictFile));
  return stats;
}

Json Pipeline::RunCca() {
  const BilingualDictionary dict = BilingualDictionary::Load(Out(kDictFile));
  EmbeddingLoadStats load_e;
  EmbeddingLoadStats load_f;
  const EmbeddingSpace emb_e = LoadEmbeddings(config_.emb_e, config_.lang_e, &load_e);
  const EmbeddingSpace emb_f = LoadEmbeddings(config_.emb_f, config_.lang_f, &load_f);
  for (const auto &[path, load] : {std::pair{&config_.emb_e, &load_e},
                                   std::pair{&config_.emb_f, &load_f}}) {
    if (load->skipped_malformed > 0) {
      spdlog::warn("{}: skipped {} malformed rows", path->string(), load->skipped_malformed);
    }
    if (load->skipped_duplicate > 0) {
      spdlog::warn("{}: skipped {} duplicate words", path->string(), load->skipped_duplicate);
    }
  }
  const int max_k = std::min(emb_e.dim(), emb_f.dim());
  const int k = config_.cca_k > 0 ? config_.cca_k : DefaultCcaDim(emb_e.dim(), emb_f.dim());
  if (k > max_k) {
    throw ValidationError("cca_k " + std::to_string(k) + " exceeds the embedding dimension " +
                          std::to_string(max_k));
  }
  std::optional<double> epsilon;
  if (config_.cca_epsilon > 0.0) epsilon = config_.cca_epsilon;
  std::size_t usable = 0;
  const CcaProjection proj = FitCca(dict, emb_e, emb_f, k, epsilon, &usable);
  proj.Save(Out(kCcaFile));
  SaveEmbeddings(Out(kProjEFile), Project(emb_e, Side::kE, proj));
  SaveEmbeddings(Out(kProjFFile), Project(emb_f, Side::kF, proj));
  return Json{{"usable_pairs", usable},
              {"dim_e", proj.dim_e},
              {"dim_f", proj.dim_f},
              {"k", proj.k},
              {"epsilon", proj.epsilon},
              {"correlations", proj.correlations}};
}

Json Pipeline::RunMine() {
  const DocumentStore store_e = LoadDocumentStore(config_.store_e, config_.lang_e);
  const DocumentStore store_f = LoadDocumentStore(config_.store_f, config_.lang_f);
  const LinkedPairsResult linked = LinkedPairs(store_e, store_f);
  const BilingualDictionary dict = BilingualDictionary::Load(Out(kDictFile));
  const BilingualDictionary rev_dict = dict.Reversed();
  const EmbeddingSpace proj_e = LoadEmbeddings(Out(kProjEFile), config_.lang_e);
  const EmbeddingSpace proj_f = LoadEmbeddings(Out(kProjFFile), config_.lang_f);
  MiningConfig cfg;
  cfg.tau = config_.tau;
  cfg.numeric_filter = config_.numeric_filter;
  cfg.include_titles = config_.include_titles;
  cfg.threads = config_.threads;
  const Miner miner(dict, rev_dict, proj_e, proj_f);
  const std::vector<SeedPair> titles =
      cfg.include_titles ? ExtractTitles(linked.pairs) : std::vector<SeedPair>();
  const std::vector<MinedPair> mined = miner.Mine(linked.pairs, titles, cfg);
  SaveMinedCorpus(Out(kMinedFile), mined);

  std::size_t sentence_pairs = 0;
  double sum_fwd = 0.0;
  double sum_rev = 0.0;
  for (const MinedPair &pair : mined) {
    sentence_pairs += pair.src_index >= 0;
    sum_fwd += pair.score_fwd;
    sum_rev += pair.score_rev;
  }
  const double n = mined.empty() ? 1.0 : static_cast<double>(mined.size());
  return Json{{"doc_pairs", linked.pairs.size()},
              {"pairs", mined.size()},
              {"sentence_pairs", sentence_pairs},
              {"title_pairs", mined.size() - sentence_pairs},
              {"mean_score_fwd", sum_fwd / n},
              {"mean_score_rev", sum_rev / n}};
}

Json Pipeline::RunProject() {
  std::vector<PartialDepTree> partial = LoadConllu(config_.treebank);
  ProjectionInput input;
  input.src_trees.reserve(partial.size());
  for (std::size_t k = 0; k < partial.size(); ++k) {
    try {
      input.src_trees.push_back(partial[k].ToTree());
    } catch (const DataError &e) {
      throw DataError(config_.treebank.string() + ": sentence " + std::to_string(k + 1) +
                      ": " + e.what());
    }
  }
  const std::size_t n = input.src_trees.size();

  std::vector<std::vector<std::string>> src_tokens;
  {
    std::ifstream in = OpenForRead(config_.bitext);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = Split(StripCr(line), '\t');
      if (fields.size() != 2) {
        throw DataError(config_.bitext.string() + ":" + std::to_string(line_no) +
                        ": expected 2 tab-separated columns");
      }
      std::vector<std::string> src;
      std::vector<std::string> tgt;
      for (std::string_view t : SplitWhitespace(fields[0])) src.emplace_back(t);
      for (std::string_view t : SplitWhitespace(fields[1])) tgt.emplace_back(t);
      src_tokens.push_back(std::move(src));
      input.tgt_tokens.push_back(std::move(tgt));
    }
  }
  if (src_tokens.size() != n) {
    throw DataError("bitext has " + std::to_string(src_tokens.size()) +
                    " lines for a treebank of " + std::to_string(n) + " sentences");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (src_tokens[k].size() != input.src_trees[k].size()) {
      throw DataError("bitext line " + std::to_string(k + 1) + " has " +
                      std::to_string(src_tokens[k].size()) + " source tokens, the tree has " +
                      std::to_string(input.src_trees[k].size()));
    }
  }

  std::string alignment_source;
  if (!config_.fwd_align.empty()) {
    alignment_source = "files";
    input.fwd = LoadPharaoh(config_.fwd_align, n, src_tokens, input.tgt_tokens);
    input.rev = LoadPharaoh(config_.rev_align, n, input.tgt_tokens, src_tokens);
  } else {
    alignment_source = "model1";
    std::vector<SentencePair> corpus;
    corpus.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      corpus.push_back({FoldAll(src_tokens[k]), FoldAll(input.tgt_tokens[k])});
    }
    Model1Options options;
    options.iterations = config_.iterations;
    options.favor_diagonal = config_.favor_diagonal;
    options.threads = config_.threads;
    options.direction = Direction::kEtoF;
    const Model1Result fwd = TrainModel1(corpus, options);
    options.direction = Direction::kFtoE;
    const std::vector<SentencePair> reversed = Reversed(corpus);
    const Model1Result rev = TrainModel1(reversed, options);
    input.fwd.resize(n);
    input.rev.resize(n);
    ParallelFor(n, ResolveThreads(config_.threads), [&](std::size_t k) {
      input.fwd[k] = ViterbiAlign(fwd.table, corpus[k].src, corpus[k].tgt);
      input.rev[k] = ViterbiAlign(rev.table, corpus[k].tgt, corpus[k].src);
    });
    SavePharaoh(Out(kFwdAlignFile), input.fwd);
    SavePharaoh(Out(kRevAlignFile), input.rev);
  }

  if (!config_.target_pos.empty()) {
    input.supervised_pos = LoadTokenLines(config_.target_pos);
    if (input.supervised_pos.size() != n) {
      throw DataError("target_pos has " + std::to_string(input.supervised_pos.size()) +
                      " lines for " + std::to_string(n) + " sentences");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (input.supervised_pos[k].size() != input.tgt_tokens[k].size()) {
        throw DataError("target_pos line " + std::to_string(k + 1) +
                        " does not match the target sentence length");
      }
    }
  }

  const ProjectionResult result =
      ProjectCorpus(input, DensityConfig{config_.min_density, config_.min_run}, config_.threads);
  SaveConllu(Out(kTreebankFile), result.trees);
  return Json{{"alignments", alignment_source},
              {"sentences", result.stats.sentences},
              {"kept", result.stats.kept},
              {"kept_ratio", result.stats.kept_ratio},
              {"mean_density", result.stats.mean_density}};
}

}  // namespace wikimine
