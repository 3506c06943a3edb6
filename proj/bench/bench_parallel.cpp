// Copyright 2026 The Forge Authors
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

#include "forge/eval.hpp"
#include "forge/pipeline.hpp"
#include "forge/synth.hpp"

#include <benchmark/benchmark.h>

using namespace forge;

namespace
{

const std::vector<Scenario> & scenes()
{
  static const std::vector<Scenario> s = [] {
    auto out = synth_batch(SceneKind::FourWay, 20, 1);
    auto more = synth_batch(SceneKind::TwoLane, 20, 1);
    out.insert(out.end(), more.begin(), more.end());
    return out;
  }();
  return s;
}

const Corpus & corpus()
{
  static const Corpus c = build_corpus(scenes(), 3, 7);
  return c;
}

Execution mode(const benchmark::State & state)
{
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_BuildCorpus(benchmark::State & state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_corpus(scenes(), 3, 7, {}, mode(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}

void BM_PdmTable(benchmark::State & state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(planner_table(corpus().items, {PlannerKind::PDM}, {}, mode(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}

}  // namespace

BENCHMARK(BM_BuildCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PdmTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
