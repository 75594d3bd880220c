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
#include <optional>
#include <vector>

#include "entnas/archspace.hpp"
#include "entnas/costmodel.hpp"
#include "entnas/entropy.hpp"

namespace entnas {

/// Per-candidate objective. Must be safe to call concurrently.
using Scorer = std::function<ScoreBreakdown(const ArchConfig&)>;

/// score_arch against `table`; checks staleness once, up front.
Scorer table_scorer(const EntropyConfig& cfg, const EntropyTable& table);

/// decoder_param_proxy wrapped as an objective (empty per_block).
Scorer decoder_param_scorer();

enum class ExecMode { parallel, serial };

struct SearchConfig {
  int iterations = 100000;  // refill-then-truncate cycles
  int population_size = 512;
  int parent_size = 64;
  BudgetSpec budget;
  std::uint64_t seed = 0;
  int init_rejection_cap = 100000;
  int refill_attempt_cap = 0;  // 0 means 100 * population_size
  int threads = 0;             // 0 uses the OpenMP default
  ExecMode mode = ExecMode::parallel;

  int resolved_refill_cap() const {
    return refill_attempt_cap > 0 ? refill_attempt_cap : 100 * population_size;
  }
};

/// Throws DomainError unless 1 <= K < M and T >= 1.
void check_search_config(const SearchConfig& cfg);

struct Candidate {
  ArchConfig arch;
  ScoreBreakdown score;
  double cost_value = 0.0;
  int generation = 0;
  std::optional<std::uint64_t> parent_fingerprint;
};

/// Strict order used for truncation and best tracking: higher score, then
/// lower cost, then lexicographically smaller block list.
bool ranks_before(const Candidate& a, const Candidate& b);

struct GenerationStats {
  int generation = 0;
  double best_score = 0.0;  // best ever admitted
  double mean_score = 0.0;  // over the truncated population
  double best_cost = 0.0;   // cost of the best-ever candidate
  int population_size = 0;
  int unique_archs = 0;
  std::int64_t attempts = 0;  // mutation or sampling attempts this generation
};

struct SearchResult {
  Candidate best;
  std::vector<GenerationStats> history;
  SearchConfig config;
  std::int64_t admitted = 0;
  double wall_time_s = 0.0;
};

/// What the searchers need besides the space: objective and constraint.
struct SearchProblem {
  SearchSpaceDef space;
  Scorer scorer;
  const DeviceProfile* profile = nullptr;
};

/// K feasible uniform samples. Sampling attempt i draws from its own stream
/// derived from (seed, i). Throws InfeasibleBudgetError when
/// init_rejection_cap attempts yield fewer than K feasible architectures.
std::vector<Candidate> init_population(const SearchProblem& problem, const SearchConfig& cfg);

/// Refill-to-M by mutating parents drawn uniformly from the K survivors,
/// admit feasible children, truncate to the best K; repeated T times.
SearchResult ea_search(const SearchProblem& problem, const SearchConfig& cfg);

/// Scores T * (M - K) feasible uniform samples and keeps the best.
SearchResult random_search_baseline(const SearchProblem& problem, const SearchConfig& cfg);

enum class ScalingKind { depth, width };

/// Greedy uniform scaling from the minimal architecture: every block gains
/// one depth step (depth) or one embedding and FFN step (width) while the
/// budget allows. Throws InfeasibleBudgetError if the minimal arch does not fit.
ArchConfig naive_scaling_baseline(ScalingKind kind, const BudgetSpec& budget,
                                  const SearchSpaceDef& space,
                                  const DeviceProfile* profile = nullptr);

/// Per-block parameters with every layer counted (no sharing), excluding
/// embeddings and projections.
double decoder_param_proxy(const ArchConfig& arch);

}  // namespace entnas
