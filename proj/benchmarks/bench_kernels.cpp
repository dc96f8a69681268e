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

#include "bpdnn/bpd_matrix.hpp"
#include "bpdnn/conv.hpp"
#include "bpdnn/projection.hpp"
#include "bpdnn/quant.hpp"
#include "bpdnn/random.hpp"
#include "bpdnn/train.hpp"

namespace {

using namespace bpdnn;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Args: square size, block size.
void BM_Matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::size_t>(state.range(1));
  const BpdMatrix w = make_bpd(n, n, p, PermPolicy::random(1), InitPolicy::scaled_uniform(2));
  const auto x = random_vector(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(matvec(w, x));
  state.counters["MACs/s"] =
      benchmark::Counter(static_cast<double>(n * w.cols_padded() / p), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Matvec)->Args({1024, 1})->Args({1024, 4})->Args({1024, 16})->Args({4096, 10});

void BM_GradFc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const BpdMatrix w = make_bpd(n, n, 8, PermPolicy::random(1), InitPolicy::scaled_uniform(2));
  const auto x = random_vector(n, 3);
  const auto g = random_vector(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(grad_fc(w, x, g));
}
BENCHMARK(BM_GradFc)->Arg(512)->Arg(2048);

void BM_ConvForward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const BpdConvTensor f = make_bpd_conv(c, c, 3, 3, 4, PermPolicy::natural(), InitPolicy::scaled_uniform(1));
  Tensor3 x(c, 16, 16);
  x.data = random_vector(x.size(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv_forward(f, x));
}
BENCHMARK(BM_ConvForward)->Arg(16)->Arg(64);

void BM_Projection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  DenseMatrix d(n, n);
  d.data = random_vector(n * n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(from_dense_project(d, 8));
}
BENCHMARK(BM_Projection)->Arg(256)->Arg(1024);

void BM_Codebook(benchmark::State& state) {
  const auto values = random_vector(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(build_codebook(values, 4, 7));
}
BENCHMARK(BM_Codebook)->Arg(1 << 14)->Arg(1 << 18);

}  // namespace
