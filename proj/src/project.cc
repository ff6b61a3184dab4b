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

#include "wikimine/project.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "wikimine/util.h"

namespace wikimine {

namespace {

constexpr std::string_view kMasked = "_";

// Follows head links from every token; a walk longer than n is a cycle.
// heads are 1-based, 0 = root, nullopt = masked.
bool HasCycle(const std::vector<std::optional<int>> &heads) {
  const int n = static_cast<int>(heads.size());
  // 0 = unvisited, 1 = on the current path, 2 = known to reach a root/mask.
  std::vector<char> state(static_cast<std::size_t>(n) + 1, 0);
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int node = start;
    while (node != 0 && state[static_cast<std::size_t>(node)] == 0) {
      state[static_cast<std::size_t>(node)] = 1;
      path.push_back(node);
      const auto &head = heads[static_cast<std::size_t>(node - 1)];
      node = head ? *head : 0;
    }
    if (node != 0 && state[static_cast<std::size_t>(node)] == 1) return true;
    for (int p : path) state[static_cast<std::size_t>(p)] = 2;
  }
  return false;
}

std::string_view PosSourceName(PosSource source) {
  switch (source) {
    case PosSource::kProjected:
      return "projected";
    case PosSource::kSupervised:
      return "supervised";
    case PosSource::kMissing:
      break;
  }
  return "missing";
}

void WriteSentence(std::ostream &out, const PartialDepTree &tree, bool with_source) {
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out << (i + 1) << '\t' << tree.tokens[i] << "\t_\t"
        << (tree.pos[i].empty() ? std::string(kMasked) : tree.pos[i]) << "\t_\t_\t";
    if (tree.heads[i]) {
      out << *tree.heads[i];
    } else {
      out << kMasked;
    }
    out << '\t' << tree.labels[i].value_or(std::string(kMasked)) << "\t_\t";
    if (with_source && tree.pos_source[i] != PosSource::kMissing) {
      out << "POSSource=" << PosSourceName(tree.pos_source[i]);
    } else {
      out << kMasked;
    }
    out << '\n';
  }
  out << '\n';
}

}  // namespace

void DepTree::Validate() const {
  const std::size_t n = tokens.size();
  if (heads.size() != n || labels.size() != n || pos.size() != n) {
    throw DataError("dependency tree columns differ in length");
  }
  std::vector<std::optional<int>> optional_heads;
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int h = heads[i];
    if (h < 0 || h > static_cast<int>(n)) throw DataError("head out of range");
    if (h == static_cast<int>(i) + 1) throw DataError("token is its own head");
    roots += h == 0;
    optional_heads.emplace_back(h);
  }
  if (n > 0 && roots != 1) {
    throw DataError("tree has " + std::to_string(roots) + " root tokens, expected 1");
  }
  if (HasCycle(optional_heads)) throw DataError("dependency cycle");
}

std::size_t PartialDepTree::ProjectedHeads() const {
  return static_cast<std::size_t>(
      std::count_if(heads.begin(), heads.end(), [](const auto &h) { return h.has_value(); }));
}

bool PartialDepTree::IsForest() const {
  const int n = static_cast<int>(tokens.size());
  if (heads.size() != tokens.size()) return false;
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto &h = heads[static_cast<std::size_t>(i)];
    if (!h) continue;
    if (*h < 0 || *h > n || *h == i + 1) return false;
    roots += *h == 0;
  }
  return roots <= 1 && !HasCycle(heads);
}

PartialDepTree PartialDepTree::FromTree(const DepTree &tree, PosSource source) {
  PartialDepTree out;
  out.tokens = tree.tokens;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out.heads.emplace_back(tree.heads[i]);
    out.labels.emplace_back(tree.labels[i]);
    const bool missing = tree.pos[i].empty() || tree.pos[i] == kMasked;
    out.pos.push_back(missing ? std::string(kMasked) : tree.pos[i]);
    out.pos_source.push_back(missing ? PosSource::kMissing : source);
  }
  return out;
}

DepTree PartialDepTree::ToTree() const {
  DepTree tree;
  tree.tokens = tokens;
  tree.pos = pos;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!heads[i] || !labels[i]) {
      throw DataError("token " + std::to_string(i + 1) + " has a masked head or label");
    }
    tree.heads.push_back(*heads[i]);
    tree.labels.push_back(*labels[i]);
  }
  tree.Validate();
  return tree;
}

std::vector<PartialDepTree> ReadConllu(std::istream &in, ConlluReadStats *stats) {
  ConlluReadStats local;
  std::vector<PartialDepTree> trees;
  PartialDepTree current;
  std::size_t line_no = 0;
  auto fail = [&](const std::string &what) {
    throw DataError("CoNLL-U line " + std::to_string(line_no) + ": " + what);
  };
  auto finish = [&] {
    if (current.tokens.empty()) return;
    const int n = static_cast<int>(current.size());
    for (const auto &h : current.heads) {
      if (h && (*h < 0 || *h > n)) fail("HEAD " + std::to_string(*h) + " out of range");
    }
    if (HasCycle(current.heads)) fail("dependency cycle in sentence");
    if (!current.IsForest()) fail("more than one root in sentence");
    trees.push_back(std::move(current));
    current = PartialDepTree();
    ++local.sentences;
  };
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = StripCr(line);
    if (view.empty()) {
      finish();
      continue;
    }
    if (view.front() == '#') continue;
    const auto fields = Split(view, '\t');
    if (fields.size() != 10) fail("expected 10 columns, got " + std::to_string(fields.size()));
    if (fields[0].find('-') != std::string_view::npos) {
      ++local.skipped_multiword;
      continue;
    }
    if (fields[0].find('.') != std::string_view::npos) {
      ++local.skipped_empty_nodes;
      continue;
    }
    long long id = 0;
    if (!ParseInt(fields[0], &id) || id != static_cast<long long>(current.size()) + 1) {
      fail("token ID '" + std::string(fields[0]) + "' out of sequence");
    }
    current.tokens.emplace_back(fields[1]);
    if (fields[6] == kMasked) {
      current.heads.emplace_back(std::nullopt);
    } else {
      long long head = 0;
      if (!ParseInt(fields[6], &head) || head < 0) fail("malformed HEAD");
      if (head == id) fail("token is its own head");
      current.heads.emplace_back(static_cast<int>(head));
    }
    if (fields[7] == kMasked) {
      current.labels.emplace_back(std::nullopt);
    } else {
      current.labels.emplace_back(std::string(fields[7]));
    }
    current.pos.emplace_back(fields[3]);
    PosSource source = fields[3] == kMasked ? PosSource::kMissing : PosSource::kSupervised;
    for (std::string_view item : Split(fields[9], '|')) {
      if (item == "POSSource=projected") source = PosSource::kProjected;
      if (item == "POSSource=supervised") source = PosSource::kSupervised;
    }
    current.pos_source.push_back(source);
  }
  finish();
  if (stats != nullptr) *stats = local;
  return trees;
}

std::vector<PartialDepTree> LoadConllu(const std::filesystem::path &path,
                                       ConlluReadStats *stats) {
  std::ifstream in = OpenForRead(path);
  try {
    return ReadConllu(in, stats);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteConllu(std::ostream &out, const std::vector<PartialDepTree> &trees) {
  for (const PartialDepTree &tree : trees) WriteSentence(out, tree, true);
}

void WriteConllu(std::ostream &out, const std::vector<DepTree> &trees) {
  for (const DepTree &tree : trees) {
    WriteSentence(out, PartialDepTree::FromTree(tree, PosSource::kSupervised), false);
  }
}

void SaveConllu(const std::filesystem::path &path, const std::vector<PartialDepTree> &trees) {
  std::ofstream out = OpenForWrite(path);
  WriteConllu(out, trees);
}

PartialDepTree ProjectTree(const DepTree &src, const Alignment &alignment,
                           const std::vector<std::string> &tgt_tokens) {
  if (alignment.src_len != static_cast<int>(src.size()) ||
      alignment.tgt_len != static_cast<int>(tgt_tokens.size())) {
    throw std::invalid_argument("alignment does not match the sentence lengths");
  }
  if (!alignment.IsOneToOne()) throw std::invalid_argument("alignment is not one-to-one");
  std::vector<int> target_of(src.size() + 1, 0);
  for (const auto &[i, j] : alignment.links) target_of[static_cast<std::size_t>(i)] = j;

  PartialDepTree out;
  out.tokens = tgt_tokens;
  out.heads.assign(tgt_tokens.size(), std::nullopt);
  out.labels.assign(tgt_tokens.size(), std::nullopt);
  out.pos.assign(tgt_tokens.size(), std::string(kMasked));
  out.pos_source.assign(tgt_tokens.size(), PosSource::kMissing);
  for (std::size_t i = 1; i <= src.size(); ++i) {
    const int m = target_of[i];
    if (m == 0) continue;
    const auto slot = static_cast<std::size_t>(m - 1);
    const std::string &tag = src.pos[i - 1];
    if (!tag.empty() && tag != kMasked) {
      out.pos[slot] = tag;
      out.pos_source[slot] = PosSource::kProjected;
    }
    const int head = src.heads[i - 1];
    const int k = head == 0 ? 0 : target_of[static_cast<std::size_t>(head)];
    if (head != 0 && k == 0) continue;
    out.heads[slot] = k;
    out.labels[slot] = src.labels[i - 1];
  }
  return out;
}

bool DensityKeep(const PartialDepTree &tree, const DensityConfig &cfg) {
  const std::size_t n = tree.size();
  if (n == 0) return false;
  const std::size_t projected = tree.ProjectedHeads();
  if (static_cast<double>(projected) >= cfg.min_ratio * static_cast<double>(n)) return true;
  int run = 0;
  for (const auto &head : tree.heads) {
    run = head ? run + 1 : 0;
    if (run >= cfg.min_run) return true;
  }
  return false;
}

PartialDepTree MergePos(const PartialDepTree &tree,
                        const std::vector<std::string> &supervised_tags) {
  if (supervised_tags.size() != tree.size()) {
    throw std::invalid_argument("supervised tags do not match the sentence length");
  }
  PartialDepTree out = tree;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.pos_source[i] == PosSource::kProjected) continue;
    const std::string &tag = supervised_tags[i];
    const bool missing = tag.empty() || tag == kMasked;
    out.pos[i] = missing ? std::string(kMasked) : tag;
    out.pos_source[i] = missing ? PosSource::kMissing : PosSource::kSupervised;
  }
  return out;
}

ProjectionResult ProjectCorpus(const ProjectionInput &input, const DensityConfig &cfg,
                               int threads) {
  const std::size_t n = input.src_trees.size();
  if (input.tgt_tokens.size() != n || input.fwd.size() != n || input.rev.size() != n ||
      (!input.supervised_pos.empty() && input.supervised_pos.size() != n)) {
    throw DataError("projection inputs differ in sentence count");
  }
  struct Unit {
    PartialDepTree tree;
    double density = 0.0;
    bool keep = false;
  };
  std::vector<Unit> units(n);
  ParallelFor(n, ResolveThreads(threads), [&](std::size_t k) {
    try {
      const Alignment inter = Intersect(input.fwd[k], input.rev[k]);
      Unit &unit = units[k];
      unit.tree = ProjectTree(input.src_trees[k], inter, input.tgt_tokens[k]);
      if (!unit.tree.tokens.empty()) {
        unit.density = static_cast<double>(unit.tree.ProjectedHeads()) /
                       static_cast<double>(unit.tree.size());
      }
      unit.keep = DensityKeep(unit.tree, cfg);
      if (unit.keep && !input.supervised_pos.empty()) {
        unit.tree = MergePos(unit.tree, input.supervised_pos[k]);
      }
    } catch (const std::invalid_argument &e) {
      throw DataError("sentence " + std::to_string(k + 1) + ": " + e.what());
    }
  });
  ProjectionResult result;
  result.stats.sentences = n;
  double density_sum = 0.0;
  for (Unit &unit : units) {
    density_sum += unit.density;
    if (!unit.keep) continue;
    result.trees.push_back(std::move(unit.tree));
  }
  result.stats.kept = result.trees.size();
  if (n > 0) {
    result.stats.kept_ratio = static_cast<double>(result.stats.kept) / static_cast<double>(n);
    result.stats.mean_density = density_sum / static_cast<double>(n);
  }
  return result;
}

}  // namespace wikimine
