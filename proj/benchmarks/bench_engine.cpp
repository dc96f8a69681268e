// Copyright 2026 The bpdnn Authors. All Rights Reserved.
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

#include <benchmark/benchmark.h>

#include "bpdnn/engine.hpp"
#include "bpdnn/workload.hpp"

namespace {

using namespace bpdnn;

// Simulator wall time per preset layer (real numerics, default engine).
void BM_SimulatePreset(benchmark::State& state, const char* name) {
  const LayerWorkload wl = *find_preset(name);
  const EngineConfig cfg;
  const BpdMatrix w = make_workload_weights(wl, 1);
  const SramImage image = plan_layout(w, nullptr, cfg);
  const auto x = make_input(wl.cols, wl.activation_density, 2);
  std::uint64_t cycles = 0;
  for (auto _ : state) {
    const auto result = simulate_layer(image, x, cfg, NumericMode::Real);
    cycles = result.report.total_cycles;
    benchmark::DoNotOptimize(result.y.data());
  }
  state.counters["sim_cycles"] = static_cast<double>(cycles);
}
BENCHMARK_CAPTURE(BM_SimulatePreset, alex_fc6, "alex-fc6")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulatePreset, alex_fc8, "alex-fc8")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulatePreset, nmt_3, "nmt-3")->Unit(benchmark::kMillisecond);

void BM_PlanLayout(benchmark::State& state) {
  const LayerWorkload wl = *find_preset("alex-fc6");
  const EngineConfig cfg;
  const BpdMatrix w = make_workload_weights(wl, 1);
  for (auto _ : state) benchmark::DoNotOptimize(plan_layout(w, nullptr, cfg));
}
BENCHMARK(BM_PlanLayout)->Unit(benchmark::kMillisecond);

void BM_SimulateFixed(benchmark::State& state) {
  const LayerWorkload wl = *find_preset("nmt-3");
  const EngineConfig cfg;
  const BpdMatrix w = make_workload_weights(wl, 1);
  const Codebook cb = build_codebook(w, cfg.weight_sharing_bits, 3);
  const SramImage image = plan_layout(w, &cb, cfg);
  const auto x = make_input(wl.cols, 1.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_layer(image, x, cfg, NumericMode::Fixed).y_codes.data());
}
BENCHMARK(BM_SimulateFixed)->Unit(benchmark::kMillisecond);

}  // namespace
