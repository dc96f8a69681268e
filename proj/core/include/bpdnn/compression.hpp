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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bpdnn {

// Shape of one compressible layer: an FC matrix (kernel_elems = 1) or a CONV
// tensor viewed as an out x in grid of kernel_elems-sized kernels.
struct LayerShape {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t block = 1;
  std::size_t kernel_elems = 1;
};

struct LayerCompression {
  std::string name;
  std::size_t block = 1;
  std::size_t dense_params = 0;
  std::size_t stored_params = 0;  // (rows_pad * cols_pad / p) * kernel_elems
  double dense_bytes = 0.0;
  double compressed_bytes = 0.0;
  double ratio = 1.0;
};

struct CompressionStats {
  unsigned bits_per_weight = 32;
  double dense_bytes = 0.0;
  double compressed_bytes = 0.0;
  double ratio = 1.0;
  std::vector<LayerCompression> per_layer;

  // Decimal megabytes (1 MB = 1e6 bytes).
  double dense_megabytes() const { return dense_bytes / 1e6; }
  double compressed_megabytes() const { return compressed_bytes / 1e6; }
};

// Padded slots count toward storage: the packed vector keeps them so block
// addressing stays uniform.
CompressionStats compression_stats(std::span<const LayerShape> layers, unsigned bits_per_weight);

// FC6/FC7/FC8 of AlexNet with block sizes 10/10/4.
std::vector<LayerShape> alexnet_fc_shapes();

// The 32 gate matrices of a 4-layer stacked LSTM translation model, all with
// block size 8, built from the three recurring matrix shapes 2048x1024,
// 2048x1536 and 2048x2048.
std::vector<LayerShape> nmt_lstm_shapes();

}  // namespace bpdnn
