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

// Serial reference vs OpenMP kernels, and the two spectrum methods.
//
//   ./bench_kernels --benchmark_filter=Table
//
// Table and search timings are wall-clock; thread counts above the core
// count only measure scheduling overhead.

#include <benchmark/benchmark.h>

#include "entnas/evosearch.hpp"

using namespace entnas;

namespace {

SearchSpaceDef bench_space() {
  SearchSpaceDef s;
  s.embed_choices = arange(64, 512, 64);
  s.ffn_choices = arange(128, 1024, 128);
  s.depth_choices = {1, 2, 3, 4};
  s.num_blocks = 4;
  return s;
}

void BM_TableSerial(benchmark::State& state) {
  const SearchSpaceDef space = bench_space();
  const EntropyConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(build_table_serial(space, cfg));
  state.counters["shapes"] = static_cast<double>(required_shapes(space).size());
}
BENCHMARK(BM_TableSerial)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_TableParallel(benchmark::State& state) {
  const SearchSpaceDef space = bench_space();
  const EntropyConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_table(space, cfg, {}, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_TableParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void run_search(benchmark::State& state, ExecMode mode, int threads) {
  const SearchSpaceDef space = bench_space();
  const EntropyConfig cfg;
  const EntropyTable table = build_table(space, cfg);
  const SearchProblem problem{space, table_scorer(cfg, table), nullptr};
  SearchConfig sc;
  sc.iterations = 20;
  sc.population_size = 512;
  sc.parent_size = 64;
  sc.budget = {Metric::flops, 20e9, {}};
  sc.mode = mode;
  sc.threads = threads;
  for (auto _ : state) benchmark::DoNotOptimize(ea_search(problem, sc));
  state.counters["children"] = benchmark::Counter(
      20.0 * (512 - 64) * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}

void BM_SearchSerial(benchmark::State& state) { run_search(state, ExecMode::serial, 1); }
BENCHMARK(BM_SearchSerial)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SearchParallel(benchmark::State& state) {
  run_search(state, ExecMode::parallel, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_SearchParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void run_spectrum(benchmark::State& state, SpectrumMethod method) {
  const int r = static_cast<int>(state.range(0)), c = static_cast<int>(state.range(1));
  Rng rng(1);
  const Eigen::MatrixXd w = gaussian_matrix(r, c, 2.0 / (r + c), rng);
  for (auto _ : state) benchmark::DoNotOptimize(squared_singular_values(w, method));
}

void BM_SpectrumGram(benchmark::State& state) { run_spectrum(state, SpectrumMethod::gram_eigen); }
void BM_SpectrumBdcsvd(benchmark::State& state) {
  run_spectrum(state, SpectrumMethod::bidiagonal_svd);
}
BENCHMARK(BM_SpectrumGram)->Args({64, 64})->Args({256, 1024})->Args({1024, 4096})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumBdcsvd)->Args({64, 64})->Args({256, 1024})->Args({1024, 4096})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
