// Copyright 2026 The entnas Authors.
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

#include "entnas/archspace.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "entnas/errors.hpp"

namespace entnas {

namespace {

bool contains(const std::vector<int>& xs, int v) {
  return std::binary_search(xs.begin(), xs.end(), v);
}

bool strictly_ascending(const std::vector<int>& xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::greater_equal<>()) == xs.end();
}

int index_of(const std::vector<int>& choices, int v) {
  auto it = std::lower_bound(choices.begin(), choices.end(), v);
  if (it == choices.end() || *it != v) {
    throw DomainError("value " + std::to_string(v) + " is not a grid choice");
  }
  return static_cast<int>(it - choices.begin());
}

// Grid steps a field may take from `index` in a set of `n` choices.
std::vector<int> legal_steps(int index, int n, MutationBias bias) {
  std::vector<int> steps;
  for (int d = -kMutationStepRange; d <= kMutationStepRange; ++d) {
    if (d == 0 || (bias == MutationBias::up_only && d < 0)) continue;
    if (index + d >= 0 && index + d < n) steps.push_back(d);
  }
  return steps;
}

bool widths_ordered(const ArchConfig& arch) {
  for (std::size_t j = 1; j < arch.blocks.size(); ++j) {
    if (arch.blocks[j - 1].embed_dim > arch.blocks[j].embed_dim) return false;
  }
  return true;
}

}  // namespace

int ArchConfig::total_depth() const {
  int total = 0;
  for (const auto& b : blocks) total += b.depth;
  return total;
}

std::string encode(const ArchConfig& arch) {
  std::string out;
  for (std::size_t j = 0; j < arch.blocks.size(); ++j) {
    const auto& b = arch.blocks[j];
    if (j) out += '|';
    out += std::to_string(b.embed_dim) + ':' + std::to_string(b.ffn_dim) + ':' +
           std::to_string(b.depth);
  }
  return out;
}

std::uint64_t fingerprint(const ArchConfig& arch) {
  std::ostringstream os;
  os << encode(arch) << '/' << arch.embed_proj_dim << '/' << arch.max_positions << '/'
     << arch.vocab_size << '/' << arch.head_dim << '/' << arch.param_sharing;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<int> arange(int first, int last, int step) {
  std::vector<int> out;
  for (int v = first; v <= last; v += step) out.push_back(v);
  return out;
}

SearchSpaceDef SearchSpaceDef::defaults() {
  SearchSpaceDef s;
  s.embed_choices = arange(64, 1024, 64);
  s.ffn_choices = arange(128, 4096, 128);
  s.depth_choices = {1, 2, 3, 4};
  s.num_blocks = 4;
  return s;
}

std::string Verdict::describe() const {
  if (ok()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.block >= 0 ? "block " + std::to_string(v.block) + ": " + v.rule : v.rule;
  }
  return out;
}

Verdict check_structure(const ArchConfig& arch) {
  Verdict verdict;
  if (arch.blocks.empty()) verdict.violations.push_back({-1, rules::kBlockCount});
  if (arch.head_dim <= 0 || arch.embed_proj_dim < 0 || arch.max_positions < 0 ||
      arch.vocab_size < 0) {
    verdict.violations.push_back({-1, rules::kPositive});
  }
  for (int j = 0; j < arch.num_blocks(); ++j) {
    const auto& b = arch.blocks[j];
    if (b.embed_dim <= 0 || b.ffn_dim <= 0 || b.depth <= 0) {
      verdict.violations.push_back({j, rules::kPositive});
      continue;
    }
    if (arch.head_dim > 0 && b.embed_dim % arch.head_dim != 0) {
      verdict.violations.push_back({j, rules::kHeadMultiple});
    }
    if (j > 0 && arch.blocks[j - 1].embed_dim > b.embed_dim) {
      verdict.violations.push_back({j, rules::kNonDecreasing});
    }
  }
  return verdict;
}

Verdict validate(const ArchConfig& arch, const SearchSpaceDef& space) {
  Verdict verdict;
  if (arch.num_blocks() != space.num_blocks) {
    verdict.violations.push_back({-1, rules::kBlockCount});
  }
  for (int j = 0; j < arch.num_blocks(); ++j) {
    const auto& b = arch.blocks[j];
    if (!contains(space.embed_choices, b.embed_dim)) {
      verdict.violations.push_back({j, rules::kEmbedChoice});
    }
    if (!contains(space.ffn_choices, b.ffn_dim)) {
      verdict.violations.push_back({j, rules::kFfnChoice});
    }
    if (!contains(space.depth_choices, b.depth)) {
      verdict.violations.push_back({j, rules::kDepthChoice});
    }
    if (arch.head_dim > 0 && b.embed_dim % arch.head_dim != 0) {
      verdict.violations.push_back({j, rules::kHeadMultiple});
    }
    if (j > 0 && arch.blocks[j - 1].embed_dim > b.embed_dim) {
      verdict.violations.push_back({j, rules::kNonDecreasing});
    }
  }
  return verdict;
}

void check_space(const SearchSpaceDef& space) {
  auto check_set = [](const std::vector<int>& xs, const char* name) {
    if (xs.empty()) throw SchemaError(std::string(name) + " is empty");
    if (!strictly_ascending(xs)) {
      throw SchemaError(std::string(name) + " is not strictly ascending");
    }
    if (xs.front() <= 0) throw SchemaError(std::string(name) + " has non-positive values");
  };
  check_set(space.embed_choices, "embed_choices");
  check_set(space.ffn_choices, "ffn_choices");
  check_set(space.depth_choices, "depth_choices");
  if (space.num_blocks < 1) throw SchemaError("num_blocks must be >= 1");
  if (space.head_dim <= 0) throw SchemaError("head_dim must be positive");
  for (int e : space.embed_choices) {
    if (e % space.head_dim != 0) {
      throw SchemaError("embed choice " + std::to_string(e) + " is not a multiple of head_dim");
    }
  }
}

ArchConfig sample_uniform(const SearchSpaceDef& space, Rng& rng, int max_attempts,
                          int* attempts) {
  ArchConfig arch;
  arch.head_dim = space.head_dim;
  arch.blocks.resize(space.num_blocks);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    for (auto& b : arch.blocks) {
      b.embed_dim = space.embed_choices[uniform_index(rng, space.embed_choices.size())];
      b.ffn_dim = space.ffn_choices[uniform_index(rng, space.ffn_choices.size())];
      b.depth = space.depth_choices[uniform_index(rng, space.depth_choices.size())];
    }
    if (widths_ordered(arch)) {
      if (attempts) *attempts = attempt;
      return arch;
    }
  }
  throw RejectionLimitError("sample_uniform: no ordered architecture after " +
                            std::to_string(max_attempts) + " draws");
}

ArchConfig mutate(const ArchConfig& arch, const SearchSpaceDef& space, Rng& rng,
                  MutationBias bias, int max_attempts) {
  if (arch.blocks.empty()) throw DomainError("mutate: architecture has no blocks");
  const std::size_t j = uniform_index(rng, arch.blocks.size());
  const BlockSpec& src = arch.blocks[j];

  const std::vector<int>* grids[3] = {&space.embed_choices, &space.ffn_choices,
                                      &space.depth_choices};
  const int current[3] = {src.embed_dim, src.ffn_dim, src.depth};
  int index[3];
  std::vector<int> steps[3];
  bool any_movable = false;
  for (int f = 0; f < 3; ++f) {
    index[f] = index_of(*grids[f], current[f]);
    steps[f] = legal_steps(index[f], static_cast<int>(grids[f]->size()), bias);
    any_movable = any_movable || !steps[f].empty();
  }
  if (!any_movable) return arch;

  ArchConfig child = arch;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    bool moved = false;
    int next[3];
    for (int f = 0; f < 3; ++f) {
      next[f] = current[f];
      if (steps[f].empty() || !coin_flip(rng)) continue;
      const int d = steps[f][uniform_index(rng, steps[f].size())];
      next[f] = (*grids[f])[index[f] + d];
      moved = true;
    }
    if (!moved) continue;
    BlockSpec& b = child.blocks[j];
    b.embed_dim = next[0];
    b.ffn_dim = next[1];
    b.depth = next[2];
    if (widths_ordered(child)) return child;
  }
  throw RejectionLimitError("mutate: no ordered mutation of block " + std::to_string(j) +
                            " after " + std::to_string(max_attempts) + " draws");
}

std::uint64_t raw_space_size(const SearchSpaceDef& space) {
  const std::uint64_t per_block = static_cast<std::uint64_t>(space.embed_choices.size()) *
                                  space.ffn_choices.size() * space.depth_choices.size();
  std::uint64_t total = 1;
  for (int j = 0; j < space.num_blocks; ++j) {
    if (per_block != 0 && total > std::numeric_limits<std::uint64_t>::max() / per_block) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= per_block;
  }
  return total;
}

void enumerate(const SearchSpaceDef& space, std::uint64_t limit,
               const std::function<void(const ArchConfig&)>& visit) {
  check_space(space);
  const std::uint64_t size = raw_space_size(space);
  if (size > limit) {
    throw SpaceTooLargeError("enumerate: raw space size " + std::to_string(size) +
                             " exceeds limit " + std::to_string(limit));
  }
  std::vector<BlockSpec> combos;
  for (int e : space.embed_choices)
    for (int f : space.ffn_choices)
      for (int l : space.depth_choices) combos.push_back({e, f, l});

  ArchConfig arch;
  arch.head_dim = space.head_dim;
  arch.blocks.resize(space.num_blocks);
  // Odometer with block 0 most significant; combos are sorted by E first, so
  // the first admissible combo for block j is found by a lower bound on E.
  std::function<void(int)> fill = [&](int j) {
    if (j == space.num_blocks) {
      visit(arch);
      return;
    }
    const int min_e = j == 0 ? 0 : arch.blocks[j - 1].embed_dim;
    auto first = std::lower_bound(combos.begin(), combos.end(), min_e,
                                  [](const BlockSpec& b, int e) { return b.embed_dim < e; });
    for (auto it = first; it != combos.end(); ++it) {
      arch.blocks[j] = *it;
      fill(j + 1);
    }
  };
  fill(0);
}

std::vector<ArchConfig> enumerate_all(const SearchSpaceDef& space, std::uint64_t limit) {
  std::vector<ArchConfig> out;
  enumerate(space, limit, [&](const ArchConfig& a) { out.push_back(a); });
  return out;
}

ArchConfig minimal_arch(const SearchSpaceDef& space) {
  check_space(space);
  ArchConfig arch;
  arch.head_dim = space.head_dim;
  arch.blocks.assign(space.num_blocks, {space.embed_choices.front(), space.ffn_choices.front(),
                                        space.depth_choices.front()});
  return arch;
}

ArchConfig make_arch(std::vector<BlockSpec> blocks) {
  ArchConfig arch;
  arch.blocks = std::move(blocks);
  return arch;
}

ArchConfig merino_52m() {
  return make_arch({{512, 512, 2}, {512, 512, 3}, {640, 640, 2}, {896, 896, 1}});
}

ArchConfig merino_61m() {
  return make_arch({{640, 640, 2}, {768, 1152, 2}, {896, 896, 2}, {1024, 1024, 2}});
}

ArchConfig merino_64m() {
  return make_arch({{640, 960, 3}, {896, 1344, 3}, {1024, 1024, 2}, {1024, 1024, 3}});
}

}  // namespace entnas
