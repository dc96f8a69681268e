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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bpdnn {

struct Sample {
  std::vector<double> features;
  std::size_t label = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t num_classes = 0;
  std::size_t image_width = 0;  // nonzero for image data (single channel)
  std::size_t image_height = 0;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  std::size_t feature_count() const { return samples.empty() ? 0 : samples.front().features.size(); }
};

// Isotropic Gaussian clusters around random unit-norm-ish centers scaled by
// `separation`.
Dataset make_blobs(std::size_t per_class, std::size_t classes, std::size_t dims, double separation, double noise,
                   std::uint64_t seed);

// Two linearly separable classes split by a random hyperplane with a margin.
Dataset make_linearly_separable(std::size_t count, std::size_t dims, double margin, std::uint64_t seed);

// side x side single-channel images of 4 stroke classes (horizontal,
// vertical, diagonal, anti-diagonal) at random offsets with additive noise.
Dataset make_bars(std::size_t per_class, std::size_t side, double noise, std::uint64_t seed);

// MNIST IDX pair (train-images-idx3-ubyte / train-labels-idx1-ubyte) from
// `dir`, pixel values scaled to [0, 1]. Returns nullopt if files are absent.
std::optional<Dataset> load_mnist_idx(const std::filesystem::path& dir, std::size_t limit);

// 8x8 digit images as CSV rows of 64 pixel values (0..16) followed by the
// label; gzip-compressed files are read transparently. Returns nullopt if the
// file is absent.
std::optional<Dataset> load_digits_csv(const std::filesystem::path& path);

// Deterministic shuffled split; the first part holds round(fraction * n).
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace bpdnn
