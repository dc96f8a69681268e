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

#include "bpdnn/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bpdnn/random.hpp"

namespace bpdnn {

Dataset make_blobs(std::size_t per_class, std::size_t classes, std::size_t dims, double separation, double noise,
                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> centers(classes, std::vector<double>(dims));
  for (auto& center : centers) {
    double norm = 0.0;
    for (auto& v : center) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : center) v *= separation / norm;
  }
  Dataset data;
  data.num_classes = classes;
  for (std::size_t n = 0; n < per_class; ++n) {
    for (std::size_t c = 0; c < classes; ++c) {
      Sample s;
      s.label = c;
      s.features.resize(dims);
      for (std::size_t d = 0; d < dims; ++d) s.features[d] = centers[c][d] + noise * rng.normal();
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

Dataset make_linearly_separable(std::size_t count, std::size_t dims, double margin, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> normal(dims);
  double norm = 0.0;
  for (auto& v : normal) {
    v = rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : normal) v /= norm;

  Dataset data;
  data.num_classes = 2;
  while (data.samples.size() < count) {
    Sample s;
    s.features.resize(dims);
    double side = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      s.features[d] = rng.uniform(-1.0, 1.0);
      side += s.features[d] * normal[d];
    }
    if (std::abs(side) < margin) continue;
    s.label = side > 0.0 ? 1 : 0;
    data.samples.push_back(std::move(s));
  }
  return data;
}

Dataset make_bars(std::size_t per_class, std::size_t side, double noise, std::uint64_t seed) {
  if (side < 3) throw std::invalid_argument("make_bars: side must be at least 3");
  Rng rng(seed);
  Dataset data;
  data.num_classes = 4;
  data.image_width = side;
  data.image_height = side;
  const std::size_t stroke = side - 2;
  for (std::size_t n = 0; n < per_class; ++n) {
    for (std::size_t c = 0; c < 4; ++c) {
      Sample s;
      s.label = c;
      s.features.assign(side * side, 0.0);
      const auto ox = static_cast<std::size_t>(rng.below(side - stroke + 1));
      const auto oy = static_cast<std::size_t>(rng.below(side - stroke + 1));
      const auto line = static_cast<std::size_t>(rng.below(stroke));
      for (std::size_t t = 0; t < stroke; ++t) {
        std::size_t x = 0;
        std::size_t y = 0;
        switch (c) {
          case 0: x = ox + t; y = oy + line; break;
          case 1: x = ox + line; y = oy + t; break;
          case 2: x = ox + t; y = oy + t; break;
          default: x = ox + t; y = oy + stroke - 1 - t; break;
        }
        s.features[x * side + y] = 1.0;
      }
      for (auto& v : s.features) v += noise * rng.normal();
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

namespace {

std::uint32_t read_be32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("IDX file truncated");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

}  // namespace

std::optional<Dataset> load_mnist_idx(const std::filesystem::path& dir, std::size_t limit) {
  const auto images_path = dir / "train-images-idx3-ubyte";
  const auto labels_path = dir / "train-labels-idx1-ubyte";
  if (!std::filesystem::exists(images_path) || !std::filesystem::exists(labels_path)) return std::nullopt;

  std::ifstream images(images_path, std::ios::binary);
  std::ifstream labels(labels_path, std::ios::binary);
  if (read_be32(images) != 0x00000803) throw std::runtime_error("bad IDX image magic in " + images_path.string());
  if (read_be32(labels) != 0x00000801) throw std::runtime_error("bad IDX label magic in " + labels_path.string());
  const std::size_t count = read_be32(images);
  const std::size_t rows = read_be32(images);
  const std::size_t cols = read_be32(images);
  if (read_be32(labels) != count) throw std::runtime_error("IDX image and label counts differ");

  Dataset data;
  data.num_classes = 10;
  data.image_width = rows;
  data.image_height = cols;
  const std::size_t n = std::min(count, limit);
  std::vector<unsigned char> pixels(rows * cols);
  for (std::size_t s = 0; s < n; ++s) {
    images.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    char label = 0;
    labels.read(&label, 1);
    if (!images || !labels) throw std::runtime_error("IDX file truncated");
    Sample sample;
    sample.label = static_cast<unsigned char>(label);
    sample.features.reserve(pixels.size());
    for (const auto px : pixels) sample.features.push_back(px / 255.0);
    data.samples.push_back(std::move(sample));
  }
  return data;
}

std::optional<Dataset> load_digits_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  // gzopen reads plain files as well.
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string text;
  char buffer[1 << 14];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) text.append(buffer, static_cast<std::size_t>(n));
  gzclose(file);
  if (n < 0) throw std::runtime_error("failed to decompress " + path.string());

  Dataset data;
  data.num_classes = 10;
  data.image_width = 8;
  data.image_height = 8;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(std::stod(field));
    if (fields.size() != 65) throw std::runtime_error("digits row with " + std::to_string(fields.size()) + " fields");
    Sample s;
    s.label = static_cast<std::size_t>(fields.back());
    fields.pop_back();
    for (auto& v : fields) v /= 16.0;
    s.features = std::move(fields);
    data.samples.push_back(std::move(s));
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto head = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size())));
  Dataset a;
  Dataset b;
  for (auto* part : {&a, &b}) {
    part->num_classes = data.num_classes;
    part->image_width = data.image_width;
    part->image_height = data.image_height;
  }
  for (std::size_t i = 0; i < order.size(); ++i) (i < head ? a : b).samples.push_back(data.samples[order[i]]);
  return {std::move(a), std::move(b)};
}

}  // namespace bpdnn
