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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpdnn/bpd_matrix.hpp"
#include "bpdnn/compression.hpp"
#include "bpdnn/engine.hpp"
#include "bpdnn/quant.hpp"

namespace bpdnn {

// The six evaluated FC layers: alex-fc6/7/8 and nmt-1/2/3.
std::vector<LayerWorkload> workload_presets();
std::optional<LayerWorkload> find_preset(std::string_view name);

/// Seeded input vector with exactly round(density * length) nonzeros at
/// uniformly chosen positions. Nonzero values are uniform in [0.05, 1), the
/// range of post-ReLU activations, and never quantize to zero.
std::vector<double> make_input(std::size_t length, double density, std::uint64_t seed);

// Random permutations and scaled-uniform values for a workload's shape.
BpdMatrix make_workload_weights(const LayerWorkload& workload, std::uint64_t seed);

struct RunOptions {
  std::uint64_t seed = 1;
  NumericMode mode = NumericMode::Real;
  Activation activation = Activation::Relu;
  bool timing = false;  // record wall-clock seconds
};

struct RunReport {
  std::string workload;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t block = 1;
  double activation_density = 1.0;
  std::size_t n_pe = 0;
  std::string numeric = "real";
  std::uint64_t seed = 0;
  std::string config_digest;
  CycleReport cycles;
  double latency_seconds = 0.0;  // total_cycles / clock
  unsigned bits_per_weight = 32;
  double dense_bytes = 0.0;
  double compressed_bytes = 0.0;
  double compression_ratio = 1.0;
  double raw_gops = 0.0;
  double equivalent_tops = 0.0;  // weight factor p, activation factor 1/density
  std::optional<double> wall_seconds;

  bool operator==(const RunReport&) const = default;
};

/// Synthesizes weights and an input for the workload, lays the layer out,
/// and simulates it. Throws CapacityError when the layer does not fit.
RunReport run_workload(const LayerWorkload& workload, const EngineConfig& cfg, const RunOptions& opts);

// Same for a given layer (e.g. loaded from a model file). Fixed mode uses
// `codebook` or, when null, builds a 2^weight_sharing_bits codebook.
RunReport run_layer(const std::string& name, const BpdMatrix& w, const Codebook* codebook, double density,
                    const EngineConfig& cfg, const RunOptions& opts);

}  // namespace bpdnn
