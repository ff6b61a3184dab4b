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

// End-to-end pipeline: seed -> dict -> cca -> mine, plus treebank projection.
// Every stage writes its outputs under out_dir and records parameters, input
// and output hashes in out_dir/manifest.json.

#ifndef WIKIMINE_PIPELINE_H_
#define WIKIMINE_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace wikimine {

inline constexpr std::string_view kToolVersion = "wikimine 0.1.0";

enum class Stage { kSeed, kDict, kCca, kMine, kProject };

std::string_view StageName(Stage stage);
std::optional<Stage> ParseStage(std::string_view name);

// File names under out_dir.
inline constexpr std::string_view kSeedFile = "seed.tsv";
inline constexpr std::string_view kDictFile = "dict.tsv";
inline constexpr std::string_view kCcaFile = "cca.txt";
inline constexpr std::string_view kProjEFile = "emb_e.proj.vec";
inline constexpr std::string_view kProjFFile = "emb_f.proj.vec";
inline constexpr std::string_view kMinedFile = "mined.tsv";
inline constexpr std::string_view kFwdAlignFile = "project.fwd.align";
inline constexpr std::string_view kRevAlignFile = "project.rev.align";
inline constexpr std::string_view kTreebankFile = "treebank.conllu";
inline constexpr std::string_view kManifestFile = "manifest.json";

struct PipelineConfig {
  std::filesystem::path store_e;
  std::filesystem::path store_f;
  std::filesystem::path emb_e;
  std::filesystem::path emb_f;
  // TSV `e sentence \t g sentence`; empty disables the related language.
  std::filesystem::path related_parallel;
  std::filesystem::path out_dir = "out";

  // Projection inputs. bitext is TSV of whitespace-tokenized
  // `source tokens \t target tokens`, one line per treebank sentence.
  std::filesystem::path treebank;
  std::filesystem::path bitext;
  // Optional Pharaoh files; both or neither.
  std::filesystem::path fwd_align;
  std::filesystem::path rev_align;
  // Optional supervised target tags, whitespace separated, one line per
  // sentence.
  std::filesystem::path target_pos;

  std::string lang_e = "en";
  std::string lang_f;
  std::string lang_g;

  int iterations = 5;
  bool favor_diagonal = false;
  long long min_count = 1;
  int cca_k = 0;             // 0 selects half the smaller embedding dimension
  double cca_epsilon = 0.0;  // <= 0 selects the relative default
  double tau = 0.5;
  bool numeric_filter = true;
  bool include_titles = true;
  double min_density = 0.5;
  int min_run = 5;
  // Reserved; every stage is deterministic.
  long long seed = 0;

  int threads = 1;
  bool force = false;

  // Throws ValidationError on bad parameters, e == f, or a missing input
  // path needed by `stage`.
  void Validate(Stage stage) const;

  nlohmann::ordered_json ToJson() const;
};

// Runs stages against one out_dir. A stage whose parameters and input hashes
// match its manifest entry, and whose outputs are intact, is skipped unless
// config.force. A stage refuses an upstream output whose hash differs from
// the manifest entry that produced it (ValidationError) unless config.force.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  // Returns the stage statistics.
  nlohmann::ordered_json Run(Stage stage);

  // seed, dict, cca, mine, then project when a treebank is configured.
  nlohmann::ordered_json RunAll();

  const PipelineConfig &config() const { return config_; }

 private:
  std::filesystem::path Out(std::string_view name) const;

  nlohmann::ordered_json RunSeed();
  nlohmann::ordered_json RunDict();
  nlohmann::ordered_json RunCca();
  nlohmann::ordered_json RunMine();
  nlohmann::ordered_json RunProject();

  nlohmann::ordered_json Params(Stage stage) const;
  // (name -> hash) of the stage inputs; upstream outputs are checked against
  // the manifest.
  nlohmann::ordered_json InputHashes(Stage stage) const;
  std::vector<std::string> Outputs(Stage stage) const;
  bool UpToDate(Stage stage, const nlohmann::ordered_json &params,
                const nlohmann::ordered_json &inputs) const;
  void Record(Stage stage, const nlohmann::ordered_json &params,
              const nlohmann::ordered_json &inputs, const nlohmann::ordered_json &stats,
              double seconds);
  void SaveManifest() const;

  PipelineConfig config_;
  nlohmann::ordered_json manifest_;
};

}  // namespace wikimine

#endif  // WIKIMINE_PIPELINE_H_
