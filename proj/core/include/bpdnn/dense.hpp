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
#include <vector>

namespace bpdnn {

// Row-major dense matrix. Used for projection input and as the oracle
// representation in equivalence tests.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool operator==(const DenseMatrix&) const = default;
};

// Feature map laid out as [channel][x][y].
struct Tensor3 {
  std::size_t channels = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t c, std::size_t w, std::size_t h)
      : channels(c), width(w), height(h), data(c * w * h, 0.0) {}

  std::size_t size() const { return data.size(); }
  double& operator()(std::size_t c, std::size_t x, std::size_t y) {
    return data[(c * width + x) * height + y];
  }
  double operator()(std::size_t c, std::size_t x, std::size_t y) const {
    return data[(c * width + x) * height + y];
  }

  bool operator==(const Tensor3&) const = default;
};

// Convolution weights laid out as [out_channel][in_channel][w][h].
struct Tensor4 {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel_w = 0;
  std::size_t kernel_h = 0;
  std::vector<double> data;

  Tensor4() = default;
  Tensor4(std::size_t o, std::size_t i, std::size_t kw, std::size_t kh)
      : out_channels(o), in_channels(i), kernel_w(kw), kernel_h(kh), data(o * i * kw * kh, 0.0) {}

  double& operator()(std::size_t o, std::size_t i, std::size_t w, std::size_t h) {
    return data[((o * in_channels + i) * kernel_w + w) * kernel_h + h];
  }
  double operator()(std::size_t o, std::size_t i, std::size_t w, std::size_t h) const {
    return data[((o * in_channels + i) * kernel_w + w) * kernel_h + h];
  }

  bool operator==(const Tensor4&) const = default;
};

}  // namespace bpdnn
