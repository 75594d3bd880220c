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

#include "entnas/costmodel.hpp"

#include <algorithm>
#include <set>

#include "entnas/errors.hpp"

namespace entnas {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::params:
      return "params";
    case Metric::flops:
      return "flops";
    case Metric::latency:
      return "latency";
  }
  return "unknown";
}

Metric parse_metric(const std::string& s) {
  if (s == "params") return Metric::params;
  if (s == "flops") return Metric::flops;
  if (s == "latency") return Metric::latency;
  throw SchemaError("unknown metric '" + s + "' (expected params, flops or latency)");
}

std::int64_t layer_matrix_params(int embed_dim, int ffn_dim) {
  const std::int64_t e = embed_dim, f = ffn_dim;
  return 4 * e * e + 2 * e * f;
}

std::int64_t layer_params(int embed_dim, int ffn_dim) {
  const std::int64_t e = embed_dim, f = ffn_dim;
  const std::int64_t biases = 4 * e + f + e;
  const std::int64_t layer_norms = 2 * (e + e);
  return layer_matrix_params(embed_dim, ffn_dim) + biases + layer_norms;
}

CostReport count_params(const ArchConfig& arch) {
  CostReport report;
  auto& p = report.params;
  const std::int64_t d = arch.embed_proj_dim;
  p.token_embedding = static_cast<std::int64_t>(arch.vocab_size) * d;
  p.position_embedding = static_cast<std::int64_t>(arch.max_positions) * d;
  if (!arch.blocks.empty()) {
    p.input_projection = d * arch.blocks.front().embed_dim;
    p.lm_head = d * arch.blocks.back().embed_dim;
  }
  for (std::size_t j = 0; j < arch.blocks.size(); ++j) {
    const auto& b = arch.blocks[j];
    const std::int64_t copies = arch.param_sharing ? 1 : b.depth;
    p.per_block_shared += copies * layer_params(b.embed_dim, b.ffn_dim);
    if (j + 1 < arch.blocks.size() && arch.blocks[j + 1].embed_dim != b.embed_dim) {
      p.inter_block_projections +=
          static_cast<std::int64_t>(b.embed_dim) * arch.blocks[j + 1].embed_dim;
    }
  }
  report.params_total = p.total();
  return report;
}

CostReport count_flops(const ArchConfig& arch, int seq_len) {
  if (seq_len < 1 || seq_len > arch.max_positions) {
    throw SeqLenError("seq_len " + std::to_string(seq_len) + " outside [1, " +
                      std::to_string(arch.max_positions) + "]");
  }
  CostReport report;
  report.seq_len = seq_len;
  const std::int64_t n = seq_len;
  auto& f = report.flops;
  for (std::size_t j = 0; j < arch.blocks.size(); ++j) {
    const auto& b = arch.blocks[j];
    f.linear_maps += 2 * n * b.depth * layer_matrix_params(b.embed_dim, b.ffn_dim);
    // Q K^T and A V: n^2 E multiply-adds each.
    f.attention_maps += b.depth * 4 * n * n * b.embed_dim;
    if (j + 1 < arch.blocks.size() && arch.blocks[j + 1].embed_dim != b.embed_dim) {
      f.linear_maps += 2 * n * b.embed_dim * arch.blocks[j + 1].embed_dim;
    }
  }
  report.flops_total = f.total();
  return report;
}

std::vector<std::string> accounting_notes() {
  return {
      "flops: decoder blocks and inter-block projections only; token/position embeddings, "
      "the embed_proj_dim projections and the vocabulary projection are excluded",
      "flops: 2 FLOPs per multiply-add; every layer counted even when weights are shared",
      "params: biases and layer norms included; lm_head is tied to the token embedding and "
      "only the E_N -> embed_proj_dim projection is counted",
  };
}

void check_profile(const DeviceProfile& profile) {
  if (profile.overhead_ms < 0.0) throw SchemaError("profile overhead_ms is negative");
  for (const auto& [key, ms] : profile.layer_ms) {
    if (!(ms >= 0.0)) {
      throw SchemaError("profile latency for (" + std::to_string(key.first) + ", " +
                        std::to_string(key.second) + ") is negative");
    }
  }
}

namespace {

// Grid values bracketing v: {v, v} when on the grid.
std::pair<int, int> bracket(const std::set<int>& axis, int v, const char* name) {
  if (axis.count(v)) return {v, v};
  auto hi = axis.upper_bound(v);
  if (hi == axis.begin() || hi == axis.end()) {
    throw OutOfGridError(std::string("latency profile: ") + name + " " + std::to_string(v) +
                         " is outside the profiled grid");
  }
  return {*std::prev(hi), *hi};
}

}  // namespace

double layer_latency(const DeviceProfile& profile, int embed_dim, int ffn_dim) {
  if (auto it = profile.layer_ms.find({embed_dim, ffn_dim}); it != profile.layer_ms.end()) {
    return it->second;
  }
  std::set<int> es, fs;
  for (const auto& [key, ms] : profile.layer_ms) {
    es.insert(key.first);
    fs.insert(key.second);
  }
  const auto [e0, e1] = bracket(es, embed_dim, "embed_dim");
  const auto [f0, f1] = bracket(fs, ffn_dim, "ffn_dim");
  auto corner = [&](int e, int f) {
    auto it = profile.layer_ms.find({e, f});
    if (it == profile.layer_ms.end()) {
      throw OutOfGridError("latency profile: missing grid corner (" + std::to_string(e) + ", " +
                           std::to_string(f) + ")");
    }
    return it->second;
  };
  const double te = e1 == e0 ? 0.0 : static_cast<double>(embed_dim - e0) / (e1 - e0);
  const double tf = f1 == f0 ? 0.0 : static_cast<double>(ffn_dim - f0) / (f1 - f0);
  return (1 - te) * (1 - tf) * corner(e0, f0) + te * (1 - tf) * corner(e1, f0) +
         (1 - te) * tf * corner(e0, f1) + te * tf * corner(e1, f1);
}

double estimate_latency(const ArchConfig& arch, const DeviceProfile& profile) {
  double total = profile.overhead_ms;
  for (const auto& b : arch.blocks) total += b.depth * layer_latency(profile, b.embed_dim, b.ffn_dim);
  return total;
}

CostValue compute_cost(const ArchConfig& arch, const BudgetSpec& budget,
                       const DeviceProfile* profile) {
  CostValue out;
  switch (budget.metric) {
    case Metric::params:
      out.value = static_cast<double>(count_params(arch).params_total);
      break;
    case Metric::flops:
      out.value = static_cast<double>(count_flops(arch, budget.resolved_seq_len()).flops_total);
      break;
    case Metric::latency:
      if (!profile) throw MissingProfileError("latency budget requires a device profile");
      out.value = estimate_latency(arch, *profile);
      if (profile->seq_len != budget.resolved_seq_len()) {
        out.warnings.push_back("device profile measured at seq_len " +
                               std::to_string(profile->seq_len) + ", budget uses " +
                               std::to_string(budget.resolved_seq_len()));
      }
      break;
  }
  out.feasible = out.value <= budget.limit;
  return out;
}

}  // namespace entnas
