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

#include "bpdnn/compression.hpp"

#include <stdexcept>

namespace bpdnn {

CompressionStats compression_stats(std::span<const LayerShape> layers, unsigned bits_per_weight) {
  CompressionStats stats;
  stats.bits_per_weight = bits_per_weight;
  const double bytes_per_weight = static_cast<double>(bits_per_weight) / 8.0;
  // Dense baseline is always 32-bit float.
  constexpr double kDenseBytesPerWeight = 4.0;
  for (const auto& layer : layers) {
    if (layer.block == 0) throw std::invalid_argument("compression_stats: block must be positive");
    const std::size_t p = layer.block;
    const std::size_t rows_pad = (layer.rows + p - 1) / p * p;
    const std::size_t cols_pad = (layer.cols + p - 1) / p * p;
    LayerCompression lc;
    lc.name = layer.name;
    lc.block = p;
    lc.dense_params = layer.rows * layer.cols * layer.kernel_elems;
    lc.stored_params = rows_pad * cols_pad / p * layer.kernel_elems;
    lc.dense_bytes = static_cast<double>(lc.dense_params) * kDenseBytesPerWeight;
    lc.compressed_bytes = static_cast<double>(lc.stored_params) * bytes_per_weight;
    lc.ratio = lc.dense_bytes / lc.compressed_bytes;
    stats.dense_bytes += lc.dense_bytes;
    stats.compressed_bytes += lc.compressed_bytes;
    stats.per_layer.push_back(std::move(lc));
  }
  stats.ratio = stats.compressed_bytes > 0.0 ? stats.dense_bytes / stats.compressed_bytes : 1.0;
  return stats;
}

std::vector<LayerShape> alexnet_fc_shapes() {
  return {
      {"fc6", 4096, 9216, 10, 1},
      {"fc7", 4096, 4096, 10, 1},
      {"fc8", 1000, 4096, 4, 1},
  };
}

std::vector<LayerShape> nmt_lstm_shapes() {
  std::vector<LayerShape> shapes;
  // Per matrix size in units of 2^20 weights: 12 x 2, 4 x 3 and 16 x 4,
  // which totals 100 * 2^20 weights.
  auto add = [&](const char* prefix, std::size_t count, std::size_t cols) {
    for (std::size_t n = 0; n < count; ++n) {
      shapes.push_back({std::string(prefix) + std::to_string(n), 2048, cols, 8, 1});
    }
  };
  add("w1024_", 12, 1024);
  add("w1536_", 4, 1536);
  add("w2048_", 16, 2048);
  return shapes;
}

}  // namespace bpdnn
