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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "entnas/rng.hpp"

namespace entnas {

inline constexpr int kHeadDim = 64;

/// One transformer block: `depth` layers sharing an embedding width and an
/// FFN width. The FFN ratio is derived, never stored.
struct BlockSpec {
  int embed_dim = 0;
  int ffn_dim = 0;
  int depth = 0;

  double ffn_ratio() const { return static_cast<double>(ffn_dim) / embed_dim; }
  int num_heads(int head_dim = kHeadDim) const { return embed_dim / head_dim; }

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
  friend auto operator<=>(const BlockSpec&, const BlockSpec&) = default;
};

/// A block-wise decoder. Embeddings are factorized: tokens are embedded at
/// `embed_proj_dim` and projected into the first block's width.
struct ArchConfig {
  std::vector<BlockSpec> blocks;
  int embed_proj_dim = 768;
  int max_positions = 2048;
  int vocab_size = 50257;
  int head_dim = kHeadDim;
  bool param_sharing = true;

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int total_depth() const;

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

/// Canonical text form "E:F:L|E:F:L|...". Orders architectures for
/// deterministic tie-breaking and feeds the fingerprint.
std::string encode(const ArchConfig& arch);

/// 64-bit FNV-1a of encode(arch) plus the global fields.
std::uint64_t fingerprint(const ArchConfig& arch);

struct SearchSpaceDef {
  std::vector<int> embed_choices;
  std::vector<int> ffn_choices;
  std::vector<int> depth_choices;
  int num_blocks = 4;
  int head_dim = kHeadDim;

  /// 64..1024 step 64, 128..4096 step 128, depth 1..4, four blocks.
  static SearchSpaceDef defaults();

  friend bool operator==(const SearchSpaceDef&, const SearchSpaceDef&) = default;
};

std::vector<int> arange(int first, int last, int step);

struct Violation {
  int block = -1;  // -1 for whole-architecture rules
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct Verdict {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

// Rule names reported in violations.
namespace rules {
inline constexpr const char* kBlockCount = "block count";
inline constexpr const char* kNonDecreasing = "non-decreasing embedding";
inline constexpr const char* kEmbedChoice = "not in embed_choices";
inline constexpr const char* kFfnChoice = "not in ffn_choices";
inline constexpr const char* kDepthChoice = "not in depth_choices";
inline constexpr const char* kHeadMultiple = "embed_dim not a multiple of head_dim";
inline constexpr const char* kPositive = "non-positive field";
}  // namespace rules

/// Structural checks that hold for any architecture, independent of a
/// search space: positive fields, whole heads, non-decreasing widths.
Verdict check_structure(const ArchConfig& arch);

/// Full membership check against a search space. Never throws.
Verdict validate(const ArchConfig& arch, const SearchSpaceDef& space);

/// Throws SchemaError when the space itself is malformed.
void check_space(const SearchSpaceDef& space);

inline constexpr int kDefaultRejectionLimit = 100000;

/// Uniform over every field of every block; architectures with decreasing
/// widths are rejected and redrawn. `attempts`, when given, receives the
/// number of draws used.
ArchConfig sample_uniform(const SearchSpaceDef& space, Rng& rng,
                          int max_attempts = kDefaultRejectionLimit,
                          int* attempts = nullptr);

/// Which direction mutate() may move a field along its grid.
enum class MutationBias { any, up_only };

inline constexpr int kMutationStepRange = 2;

/// Picks one block uniformly and moves each of its fields, independently
/// with probability 1/2, by 1..2 grid steps. At least one field moves when
/// any can. Width-order violations are repaired by redrawing the same block.
ArchConfig mutate(const ArchConfig& arch, const SearchSpaceDef& space, Rng& rng,
                  MutationBias bias = MutationBias::any,
                  int max_attempts = kDefaultRejectionLimit);

/// (|E|*|F|*|L|)^N, saturating at UINT64_MAX.
std::uint64_t raw_space_size(const SearchSpaceDef& space);

/// Visits every valid architecture exactly once, in lexicographic order of
/// (E_1, F_1, L_1, E_2, ...) by choice index. Throws SpaceTooLargeError if
/// raw_space_size(space) > limit.
void enumerate(const SearchSpaceDef& space, std::uint64_t limit,
               const std::function<void(const ArchConfig&)>& visit);

std::vector<ArchConfig> enumerate_all(const SearchSpaceDef& space, std::uint64_t limit);

/// Smallest choice in every field for every block.
ArchConfig minimal_arch(const SearchSpaceDef& space);

/// Arch with the global fields of `arch` template defaults.
ArchConfig make_arch(std::vector<BlockSpec> blocks);

// Published reference structures (MeRino-52M/61M/64M). The 64M model uses
// FFN ratio 1.5 at widths 640 and 896 (F = 960, 1344), which lie off the
// default 128-step FFN grid; it is structurally valid but not a member of
// SearchSpaceDef::defaults().
ArchConfig merino_52m();
ArchConfig merino_61m();
ArchConfig merino_64m();

}  // namespace entnas
