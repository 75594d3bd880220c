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

#include "entnas/evosearch.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <set>
#include <stdexcept>

#include "entnas/errors.hpp"

namespace entnas {

namespace {

// Stream tags keep init, refill and random-search draws disjoint.
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kRefillStream = 0x2e71;
constexpr std::uint64_t kRandomStream = 0x3a9d;

using AttemptFn = std::function<std::optional<Candidate>(std::int64_t attempt)>;

struct Collected {
  std::vector<Candidate> candidates;
  std::int64_t attempts = 0;
};

// First `want` successful attempts in attempt order, trying at most `cap`.
Collected collect_serial(std::size_t want, std::int64_t cap, const AttemptFn& attempt) {
  Collected out;
  for (std::int64_t a = 0; a < cap && out.candidates.size() < want; ++a) {
    if (auto c = attempt(a)) out.candidates.push_back(std::move(*c));
    out.attempts = a + 1;
  }
  return out;
}

// Same result as collect_serial: attempts are evaluated in parallel chunks
// and consumed in order; anything past the fill point is discarded.
Collected collect_parallel(std::size_t want, std::int64_t cap, int threads,
                           const AttemptFn& attempt) {
  Collected out;
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::int64_t next = 0;
  while (out.candidates.size() < want && next < cap) {
    const std::int64_t missing = static_cast<std::int64_t>(want - out.candidates.size());
    const std::int64_t chunk = std::min<std::int64_t>(std::max<std::int64_t>(missing, 4 * nthreads), cap - next);
    std::vector<std::optional<Candidate>> results(chunk);
    std::vector<std::exception_ptr> errors(chunk);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
    for (std::int64_t i = 0; i < chunk; ++i) {
      try {
        results[i] = attempt(next + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (std::int64_t i = 0; i < chunk && out.candidates.size() < want; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      if (results[i]) out.candidates.push_back(std::move(*results[i]));
      out.attempts = next + i + 1;
    }
    next += chunk;
  }
  return out;
}

Collected collect(std::size_t want, std::int64_t cap, const SearchConfig& cfg,
                  const AttemptFn& attempt) {
  return cfg.mode == ExecMode::serial ? collect_serial(want, cap, attempt)
                                      : collect_parallel(want, cap, cfg.threads, attempt);
}

// Cost of `arch` if it fits the budget. Architectures a latency profile cannot
// place are treated as infeasible.
std::optional<double> feasible_cost(const ArchConfig& arch, const BudgetSpec& budget,
                                    const DeviceProfile* profile) {
  try {
    const CostValue cost = compute_cost(arch, budget, profile);
    if (!cost.feasible) return std::nullopt;
    return cost.value;
  } catch (const OutOfGridError&) {
    return std::nullopt;
  }
}

void require_minimal_feasible(const SearchProblem& problem, const BudgetSpec& budget) {
  if (budget.metric == Metric::latency) return;
  // Every other architecture dominates this one layer by layer and may add
  // projections, so nothing fits if this does not.
  const ArchConfig smallest = minimal_arch(problem.space);
  if (!feasible_cost(smallest, budget, problem.profile)) {
    throw InfeasibleBudgetError("budget " + to_string(budget.metric) + " <= " +
                                std::to_string(budget.limit) +
                                " is below the cost of the smallest architecture (" +
                                std::to_string(compute_cost(smallest, budget).value) + ")");
  }
}

void check_admitted(const Candidate& c, const SearchProblem& problem, const BudgetSpec& budget) {
  if (!validate(c.arch, problem.space).ok() || c.cost_value > budget.limit) {
    throw std::logic_error("search admitted an invalid or infeasible candidate: " +
                           encode(c.arch));
  }
}

GenerationStats summarize(int generation, const std::vector<Candidate>& population,
                          const Candidate& best, std::int64_t attempts) {
  GenerationStats s;
  s.generation = generation;
  s.best_score = best.score.total;
  s.best_cost = best.cost_value;
  s.population_size = static_cast<int>(population.size());
  s.attempts = attempts;
  std::set<std::uint64_t> prints;
  double sum = 0.0;
  for (const auto& c : population) {
    sum += c.score.total;
    prints.insert(fingerprint(c.arch));
  }
  s.mean_score = population.empty() ? 0.0 : sum / population.size();
  s.unique_archs = static_cast<int>(prints.size());
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AttemptFn sampling_attempt(const SearchProblem& problem, const SearchConfig& cfg,
                           std::uint64_t stream, std::int64_t offset, int generation) {
  return [&problem, &cfg, stream, offset, generation](std::int64_t a) -> std::optional<Candidate> {
    Rng rng = make_rng({cfg.seed, stream, static_cast<std::uint64_t>(offset + a)});
    ArchConfig arch = sample_uniform(problem.space, rng);
    auto cost = feasible_cost(arch, cfg.budget, problem.profile);
    if (!cost) return std::nullopt;
    Candidate c;
    c.score = problem.scorer(arch);
    c.arch = std::move(arch);
    c.cost_value = *cost;
    c.generation = generation;
    return c;
  };
}

}  // namespace

Scorer table_scorer(const EntropyConfig& cfg, const EntropyTable& table) {
  table.check_compatible(cfg);
  return [cfg, &table](const ArchConfig& arch) {
    return score_arch_with(arch, cfg, [&](int r, int c) { return table.lookup(r, c); });
  };
}

Scorer decoder_param_scorer() {
  return [](const ArchConfig& arch) {
    ScoreBreakdown s;
    s.total = decoder_param_proxy(arch);
    return s;
  };
}

void check_search_config(const SearchConfig& cfg) {
  if (cfg.iterations < 1) throw DomainError("iterations must be >= 1");
  if (cfg.parent_size < 1 || cfg.parent_size >= cfg.population_size) {
    throw DomainError("need 1 <= parent_size < population_size");
  }
  if (cfg.init_rejection_cap < 1) throw DomainError("init_rejection_cap must be >= 1");
}

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score.total != b.score.total) return a.score.total > b.score.total;
  if (a.cost_value != b.cost_value) return a.cost_value < b.cost_value;
  return a.arch.blocks < b.arch.blocks;
}

std::vector<Candidate> init_population(const SearchProblem& problem, const SearchConfig& cfg) {
  check_search_config(cfg);
  check_space(problem.space);
  require_minimal_feasible(problem, cfg.budget);
  const auto want = static_cast<std::size_t>(cfg.parent_size);
  Collected got = collect(want, cfg.init_rejection_cap, cfg,
                          sampling_attempt(problem, cfg, kInitStream, 0, 0));
  if (got.candidates.size() < want) {
    throw InfeasibleBudgetError("found only " + std::to_string(got.candidates.size()) + " of " +
                                std::to_string(want) + " feasible architectures in " +
                                std::to_string(cfg.init_rejection_cap) + " samples");
  }
  for (const auto& c : got.candidates) check_admitted(c, problem, cfg.budget);
  return std::move(got.candidates);
}

SearchResult ea_search(const SearchProblem& problem, const SearchConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SearchResult result;
  result.config = cfg;

  std::vector<Candidate> population = init_population(problem, cfg);
  result.admitted = static_cast<std::int64_t>(population.size());
  result.best = *std::min_element(population.begin(), population.end(), ranks_before);
  result.history.push_back(summarize(0, population, result.best, 0));

  const auto refill = static_cast<std::size_t>(cfg.population_size - cfg.parent_size);
  for (int gen = 1; gen <= cfg.iterations; ++gen) {
    const std::vector<Candidate>& parents = population;
    AttemptFn attempt = [&](std::int64_t a) -> std::optional<Candidate> {
      Rng rng = make_rng({cfg.seed, kRefillStream, static_cast<std::uint64_t>(gen),
                          static_cast<std::uint64_t>(a)});
      const Candidate& parent = parents[uniform_index(rng, parents.size())];
      ArchConfig child = mutate(parent.arch, problem.space, rng);
      auto cost = feasible_cost(child, cfg.budget, problem.profile);
      if (!cost) return std::nullopt;
      Candidate c;
      c.score = problem.scorer(child);
      c.arch = std::move(child);
      c.cost_value = *cost;
      c.generation = gen;
      c.parent_fingerprint = fingerprint(parent.arch);
      return c;
    };
    Collected children = collect(refill, cfg.resolved_refill_cap(), cfg, attempt);

    for (auto& c : children.candidates) {
      check_admitted(c, problem, cfg.budget);
      if (ranks_before(c, result.best)) result.best = c;
    }
    result.admitted += static_cast<std::int64_t>(children.candidates.size());
    population.insert(population.end(), std::make_move_iterator(children.candidates.begin()),
                      std::make_move_iterator(children.candidates.end()));
    std::stable_sort(population.begin(), population.end(), ranks_before);
    population.resize(std::min<std::size_t>(population.size(), cfg.parent_size));
    result.history.push_back(summarize(gen, population, result.best, children.attempts));
  }
  result.wall_time_s = seconds_since(t0);
  return result;
}

SearchResult random_search_baseline(const SearchProblem& problem, const SearchConfig& cfg) {
  check_search_config(cfg);
  check_space(problem.space);
  require_minimal_feasible(problem, cfg.budget);
  const auto t0 = std::chrono::steady_clock::now();
  SearchResult result;
  result.config = cfg;

  const auto per_gen = static_cast<std::size_t>(cfg.population_size - cfg.parent_size);
  const std::int64_t cap =
      std::max<std::int64_t>(cfg.init_rejection_cap, 100 * static_cast<std::int64_t>(per_gen));
  std::int64_t offset = 0;
  bool have_best = false;
  for (int gen = 1; gen <= cfg.iterations; ++gen) {
    Collected got =
        collect(per_gen, cap, cfg, sampling_attempt(problem, cfg, kRandomStream, offset, gen));
    offset += got.attempts;
    for (const auto& c : got.candidates) {
      check_admitted(c, problem, cfg.budget);
      if (!have_best || ranks_before(c, result.best)) {
        result.best = c;
        have_best = true;
      }
    }
    if (!have_best) {
      throw InfeasibleBudgetError("random search found no feasible architecture in " +
                                  std::to_string(cap) + " samples");
    }
    result.admitted += static_cast<std::int64_t>(got.candidates.size());
    result.history.push_back(summarize(gen, got.candidates, result.best, got.attempts));
  }
  result.wall_time_s = seconds_since(t0);
  return result;
}

ArchConfig naive_scaling_baseline(ScalingKind kind, const BudgetSpec& budget,
                                  const SearchSpaceDef& space, const DeviceProfile* profile) {
  ArchConfig current = minimal_arch(space);
  if (!feasible_cost(current, budget, profile)) {
    throw InfeasibleBudgetError("the minimal architecture does not fit the budget");
  }
  auto step_up = [](const std::vector<int>& grid, int v) {
    auto it = std::upper_bound(grid.begin(), grid.end(), v);
    return it == grid.end() ? v : *it;
  };
  for (;;) {
    ArchConfig next = current;
    for (auto& b : next.blocks) {
      if (kind == ScalingKind::depth) {
        b.depth = step_up(space.depth_choices, b.depth);
      } else {
        b.embed_dim = step_up(space.embed_choices, b.embed_dim);
        b.ffn_dim = step_up(space.ffn_choices, b.ffn_dim);
      }
    }
    if (next == current || !feasible_cost(next, budget, profile)) return current;
    current = std::move(next);
  }
}

double decoder_param_proxy(const ArchConfig& arch) {
  double total = 0.0;
  for (const auto& b : arch.blocks) {
    total += static_cast<double>(b.depth) * static_cast<double>(layer_params(b.embed_dim, b.ffn_dim));
  }
  return total;
}

}  // namespace entnas
