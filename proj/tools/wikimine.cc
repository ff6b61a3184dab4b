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

// wikimine <seed|dict|cca|mine|project|all> [--config run.toml] [--flags]
//
// Exit codes: 0 success, 1 invalid configuration, 2 bad or missing data.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wikimine/pipeline.h"
#include "wikimine/util.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitData = 2;

void AddConfigOptions(CLI::App &app, wikimine::PipelineConfig &cfg) {
  app.add_option("--store_e", cfg.store_e, "English document store (JSONL)");
  app.add_option("--store_f", cfg.store_f, "Target-language document store (JSONL)");
  app.add_option("--emb_e", cfg.emb_e, "English embeddings (word2vec text)");
  app.add_option("--emb_f", cfg.emb_f, "Target-language embeddings (word2vec text)");
  app.add_option("--related_parallel", cfg.related_parallel,
                 "English / related-language parallel TSV");
  app.add_option("--out_dir", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--treebank", cfg.treebank, "Source treebank (CoNLL-U)");
  app.add_option("--bitext", cfg.bitext, "Tokenized bitext for projection (TSV)");
  app.add_option("--fwd_align", cfg.fwd_align, "Source->target Pharaoh alignments");
  app.add_option("--rev_align", cfg.rev_align, "Target->source Pharaoh alignments");
  app.add_option("--target_pos", cfg.target_pos, "Supervised target POS tags");
  app.add_option("--lang_e", cfg.lang_e, "English language code")->capture_default_str();
  app.add_option("--lang_f", cfg.lang_f, "Target language code");
  app.add_option("--lang_g", cfg.lang_g, "Related language code");
  app.add_option("--iterations", cfg.iterations, "Model 1 EM iterations")
      ->capture_default_str();
  app.add_option("--favor_diagonal", cfg.favor_diagonal, "Diagonal alignment prior")
      ->capture_default_str();
  app.add_option("--min_count", cfg.min_count, "Minimum links per dictionary word")
      ->capture_default_str();
  app.add_option("--cca_k", cfg.cca_k, "CCA output dimension (0: half the input)")
      ->capture_default_str();
  app.add_option("--cca_epsilon", cfg.cca_epsilon, "CCA ridge (<= 0: relative default)")
      ->capture_default_str();
  app.add_option("--tau", cfg.tau, "Mining threshold")->capture_default_str();
  app.add_option("--numeric_filter", cfg.numeric_filter, "Require matching numbers")
      ->capture_default_str();
  app.add_option("--include_titles", cfg.include_titles, "Append title pairs")
      ->capture_default_str();
  app.add_option("--min_density", cfg.min_density, "Minimum projected fraction")
      ->capture_default_str();
  app.add_option("--min_run", cfg.min_run, "Minimum projected run")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed (unused; stages are deterministic)");
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  app.add_flag("--force", cfg.force, "Rerun stages and accept stale inputs");
}

}  // namespace

int main(int argc, char **argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("wikimine"));
  spdlog::set_pattern("[%H:%M:%S] %^%l%$ %v");

  CLI::App app("Parallel sentence mining from linked articles", "wikimine");
  app.set_config("--config", "", "TOML file with the same keys as the flags");
  app.require_subcommand(1);
  app.fallthrough();

  wikimine::PipelineConfig cfg;
  std::string stats_path;
  AddConfigOptions(app, cfg);
  app.add_option("--stats", stats_path, "Write a JSON summary of the run here");
  app.set_version_flag("--version", std::string(wikimine::kToolVersion));

  const char *stages[] = {"seed", "dict", "cca", "mine", "project", "all"};
  for (const char *name : stages) app.add_subcommand(name, std::string("Run ") + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    wikimine::Pipeline pipeline(cfg);
    nlohmann::ordered_json stats;
    if (command == "all") {
      stats = pipeline.RunAll();
    } else {
      const auto stage = wikimine::ParseStage(command);
      stats[command] = pipeline.Run(*stage);
    }
    if (!stats_path.empty()) {
      std::ofstream out = wikimine::OpenForWrite(stats_path);
      out << stats.dump(2) << '\n';
    }
  } catch (const wikimine::ValidationError &e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return 0;
}
