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

#include "bpdnn/workload.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bpdnn/config_file.hpp"
#include "bpdnn/random.hpp"

namespace bpdnn {

std::vector<LayerWorkload> workload_presets() {
  return {
      {"alex-fc6", 4096, 9216, 10, 0.358},
      {"alex-fc7", 4096, 4096, 10, 0.206},
      {"alex-fc8", 1000, 4096, 4, 0.444},
      {"nmt-1", 2048, 1024, 8, 1.0},
      {"nmt-2", 2048, 1536, 8, 1.0},
      {"nmt-3", 2048, 2048, 8, 1.0},
  };
}

std::optional<LayerWorkload> find_preset(std::string_view name) {
  for (auto& w : workload_presets()) {
    if (w.name == name) return w;
  }
  return std::nullopt;
}

std::vector<double> make_input(std::size_t length, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("make_input: density must be in [0, 1]");
  Rng rng(seed);
  std::vector<std::size_t> order(length);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  const auto nnz = static_cast<std::size_t>(std::llround(density * static_cast<double>(length)));
  std::vector<double> x(length, 0.0);
  for (std::size_t n = 0; n < nnz; ++n) x[order[n]] = rng.uniform(0.05, 1.0);
  return x;
}

BpdMatrix make_workload_weights(const LayerWorkload& workload, std::uint64_t seed) {
  return make_bpd(workload.rows, workload.cols, workload.block, PermPolicy::random(mix_seed(seed, 1)),
                  InitPolicy::scaled_uniform(mix_seed(seed, 2)));
}

RunReport run_layer(const std::string& name, const BpdMatrix& w, const Codebook* codebook, double density,
                    const EngineConfig& cfg, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  Codebook built;
  if (opts.mode == NumericMode::Fixed && codebook == nullptr) {
    built = build_codebook(w, cfg.weight_sharing_bits, mix_seed(opts.seed, 3));
    codebook = &built;
  }
  const SramImage image = plan_layout(w, opts.mode == NumericMode::Fixed ? codebook : nullptr, cfg);
  const std::vector<double> x = make_input(w.cols(), density, mix_seed(opts.seed, 4));
  const SimulationResult sim = simulate_layer(image, x, cfg, opts.mode, opts.activation);

  RunReport r;
  r.workload = name;
  r.rows = w.rows();
  r.cols = w.cols();
  r.block = w.block();
  r.activation_density = density;
  r.n_pe = cfg.n_pe;
  r.numeric = opts.mode == NumericMode::Fixed ? "fixed" : "real";
  r.seed = opts.seed;
  r.config_digest = config_digest(cfg);
  r.cycles = sim.report;
  r.latency_seconds = static_cast<double>(sim.report.total_cycles) / cfg.clock_hz;

  const LayerShape shape{name, w.rows(), w.cols(), w.block(), 1};
  const CompressionStats stats = compression_stats(std::span(&shape, 1), 32);
  r.bits_per_weight = stats.bits_per_weight;
  r.dense_bytes = stats.dense_bytes;
  r.compressed_bytes = stats.compressed_bytes;
  r.compression_ratio = stats.ratio;

  const double activation_factor = density > 0.0 ? 1.0 / density : 1.0;
  const Throughput t = throughput_model(cfg, static_cast<double>(w.block()), std::max(1.0, activation_factor));
  r.raw_gops = t.raw_gops;
  r.equivalent_tops = t.equivalent_tops;
  if (opts.timing) {
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

RunReport run_workload(const LayerWorkload& workload, const EngineConfig& cfg, const RunOptions& opts) {
  if (workload.rows == 0 || workload.cols == 0 || workload.block == 0) {
    throw std::invalid_argument("run_workload: workload '" + workload.name + "' has a zero dimension");
  }
  const BpdMatrix w = make_workload_weights(workload, opts.seed);
  return run_layer(workload.name, w, nullptr, workload.activation_density, cfg, opts);
}

}  // namespace bpdnn
