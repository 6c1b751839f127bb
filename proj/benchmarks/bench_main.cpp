// SPDX-License-Identifier: Apache-2.0
//
// risee: energy-efficient resource allocation for RIS-aided multi-user uplinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <benchmark/benchmark.h>

#include <limits>

#include "risee/algorithms.hpp"
#include "risee/kernels.hpp"
#include "risee/metrics.hpp"
#include "risee/selftest.hpp"

using namespace risee;

namespace {

void BM_SrMmse(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const SystemScenario s = selftest::desk_scenario(N, 4, 4);
  const ChannelSet ch = generate_drop(s, 1);
  const CVec gamma = CVec::Ones(N);
  const RVec p = link_budget(s).power.Pmax_w;
  for (auto _ : state) benchmark::DoNotOptimize(sr_mmse(gamma, p, ch));
}
BENCHMARK(BM_SrMmse)->Arg(16)->Arg(100);

void BM_BallSolver(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const CMat W = selftest::random_cn(n, n, rng);
  const CMat Q = W * W.adjoint();
  const CVec b = selftest::random_cn(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(max_linear_minus_quadratic_ball(b, Q, n));
}
BENCHMARK(BM_BallSolver)->Arg(16)->Arg(100);

void BM_PsdProjection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const CMat M = selftest::random_cn(n, n, rng);
  const CMat H = 0.5 * (M + M.adjoint());
  for (auto _ : state) benchmark::DoNotOptimize(project_psd_trace_ball(H, n));
}
BENCHMARK(BM_PsdProjection)->Arg(16)->Arg(100);

void BM_PsdDiagonalCap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const CMat M = selftest::random_cn(n, n, rng);
  const CMat H = 0.5 * (M + M.adjoint());
  for (auto _ : state) benchmark::DoNotOptimize(project_psd_diagonal_cap(H, 1.0));
}
BENCHMARK(BM_PsdDiagonalCap)->Arg(16);

void BM_Run(benchmark::State& state) {
  const SystemScenario s = selftest::desk_scenario(static_cast<int>(state.range(1)), 2, 2);
  const LinkBudget b = link_budget(s);
  const ChannelSet ch = generate_drop(s, 3);
  MethodConfig cfg;
  cfg.method = state.range(0) == 1 ? Method::Approach1 : Method::Approach2;
  for (auto _ : state) benchmark::DoNotOptimize(run_method(ch, b, cfg, 3));
}
BENCHMARK(BM_Run)->Args({1, 16})->Args({2, 16})->Args({1, 100})->Args({2, 100})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
