// Copyright 2026 The qreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qreadout/error_model.h"
#include "qreadout/hmm.h"

namespace qreadout {
namespace {

std::vector<int> all_prefixes(int n_max) {
  std::vector<int> n;
  for (int k = 1; k <= n_max; ++k) n.push_back(k);
  return n;
}

const HmmSpec kSpec{OutcomePair::gaussian(1.0), 0.01, 0.0, 12};

void BM_MonteCarloSerial(benchmark::State& state) {
  const auto m = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_serial(kSpec, m, all_prefixes(12), 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * m));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const auto m = static_cast<std::uint64_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(kSpec, m, all_prefixes(12), 1, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * m));
}

void BM_AdvantageGridSerial(benchmark::State& state) {
  const auto axis = log_spaced(1e-4, 0.3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(advantage_grid_serial(axis, axis));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_AdvantageGridParallel(benchmark::State& state) {
  const auto axis = log_spaced(1e-4, 0.3, static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(advantage_grid(axis, axis, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

BENCHMARK(BM_MonteCarloSerial)->Arg(20000)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)
    ->Args({20000, 1})
    ->Args({20000, 2})
    ->Args({20000, 4})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvantageGridSerial)->Arg(20)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvantageGridParallel)
    ->Args({20, 1})
    ->Args({20, 2})
    ->Args({20, 4})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace qreadout

BENCHMARK_MAIN();
