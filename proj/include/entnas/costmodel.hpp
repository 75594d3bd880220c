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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entnas/archspace.hpp"

namespace entnas {

enum class Metric { params, flops, latency };

std::string to_string(Metric m);
/// Throws SchemaError for anything but "params", "flops" or "latency".
Metric parse_metric(const std::string& s);

inline constexpr int kDefaultFlopsSeqLen = 1024;
inline constexpr int kDefaultLatencySeqLen = 128;

struct BudgetSpec {
  Metric metric = Metric::flops;
  double limit = 0.0;
  std::optional<int> seq_len;

  int resolved_seq_len() const {
    return seq_len.value_or(metric == Metric::latency ? kDefaultLatencySeqLen
                                                      : kDefaultFlopsSeqLen);
  }
};

struct ParamBreakdown {
  std::int64_t token_embedding = 0;
  std::int64_t position_embedding = 0;
  std::int64_t input_projection = 0;
  std::int64_t inter_block_projections = 0;
  std::int64_t per_block_shared = 0;
  std::int64_t lm_head = 0;  // E_N -> embed_proj_dim output projection

  std::int64_t total() const {
    return token_embedding + position_embedding + input_projection + inter_block_projections +
           per_block_shared + lm_head;
  }
};

struct FlopBreakdown {
  std::int64_t linear_maps = 0;
  std::int64_t attention_maps = 0;

  std::int64_t total() const { return linear_maps + attention_maps; }
};

struct CostReport {
  ParamBreakdown params;
  std::int64_t params_total = 0;
  FlopBreakdown flops;
  std::int64_t flops_total = 0;
  int seq_len = 0;
  std::optional<double> latency_ms;
  std::vector<std::string> warnings;
};

/// Q, K, V, O (E x E) plus the two FFN maps (E x F, F x E).
std::int64_t layer_matrix_params(int embed_dim, int ffn_dim);

/// Matrices, their biases (4E + F + E) and two layer norms (4E).
std::int64_t layer_params(int embed_dim, int ffn_dim);

CostReport count_params(const ArchConfig& arch);

/// Forward-pass FLOPs of the decoder blocks at 2 FLOPs per multiply-add.
/// Throws SeqLenError unless 1 <= seq_len <= arch.max_positions.
CostReport count_flops(const ArchConfig& arch, int seq_len);

/// Lines describing what the FLOPs and params counts leave out.
std::vector<std::string> accounting_notes();

struct DeviceProfile {
  std::string device_name;
  int seq_len = kDefaultLatencySeqLen;
  double overhead_ms = 0.0;
  std::map<std::pair<int, int>, double> layer_ms;  // (embed_dim, ffn_dim) -> ms per layer
};

/// Throws SchemaError on negative latencies.
void check_profile(const DeviceProfile& profile);

/// Per-layer latency at (E, F): exact on grid keys, bilinear between the
/// bracketing grid values otherwise. Throws OutOfGridError outside the hull or
/// when a bracketing corner is missing.
double layer_latency(const DeviceProfile& profile, int embed_dim, int ffn_dim);

double estimate_latency(const ArchConfig& arch, const DeviceProfile& profile);

struct CostValue {
  double value = 0.0;
  bool feasible = false;
  std::vector<std::string> warnings;
};

/// Evaluates the budgeted metric. Throws MissingProfileError for a latency
/// budget without a profile.
CostValue compute_cost(const ArchConfig& arch, const BudgetSpec& budget,
                       const DeviceProfile* profile = nullptr);

}  // namespace entnas
