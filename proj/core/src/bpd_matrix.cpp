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

#include "bpdnn/bpd_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bpdnn/random.hpp"

namespace bpdnn {

BpdMatrix::BpdMatrix(std::size_t rows, std::size_t cols, std::size_t block, std::vector<std::uint32_t> perms,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), block_(block), perms_(std::move(perms)), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0 || block_ == 0) {
    throw std::invalid_argument("BpdMatrix: rows, cols and block must be positive");
  }
  if (perms_.size() != block_rows() * block_cols()) {
    throw std::invalid_argument("BpdMatrix: expected " + std::to_string(block_rows() * block_cols()) +
                                " permutation values, got " + std::to_string(perms_.size()));
  }
  if (values_.size() != perms_.size() * block_) {
    throw std::invalid_argument("BpdMatrix: expected " + std::to_string(perms_.size() * block_) +
                                " packed values, got " + std::to_string(values_.size()));
  }
  for (std::size_t l = 0; l < perms_.size(); ++l) {
    if (perms_[l] >= block_) {
      throw std::invalid_argument("BpdMatrix: permutation value " + std::to_string(perms_[l]) + " of block " +
                                  std::to_string(l) + " is outside [0, " + std::to_string(block_) + ")");
    }
  }
  for (std::size_t s = 0; s < values_.size(); ++s) {
    if (values_[s] != 0.0 && is_padding(s)) {
      throw std::invalid_argument("BpdMatrix: padding slot " + std::to_string(s) + " is nonzero");
    }
  }
}

SlotPosition BpdMatrix::position(std::size_t slot) const {
  const std::size_t l = slot / block_;
  const std::size_t c = slot % block_;
  const std::size_t bc = block_cols();
  SlotPosition pos;
  pos.row = (l / bc) * block_ + c;
  pos.col = (l % bc) * block_ + (c + perms_[l]) % block_;
  pos.padding = pos.row >= rows_ || pos.col >= cols_;
  return pos;
}

std::vector<std::uint32_t> make_perms(std::size_t count, std::size_t block, PermPolicy policy) {
  std::vector<std::uint32_t> perms(count);
  if (policy.kind == PermPolicy::Kind::Natural) {
    for (std::size_t l = 0; l < count; ++l) perms[l] = static_cast<std::uint32_t>(l % block);
  } else {
    Rng rng(policy.seed);
    for (auto& k : perms) k = static_cast<std::uint32_t>(rng.below(block));
  }
  return perms;
}

BpdMatrix make_bpd(std::size_t rows, std::size_t cols, std::size_t block, PermPolicy perm_policy,
                   InitPolicy init_policy) {
  if (block == 0) throw std::invalid_argument("make_bpd: block must be positive");
  const std::size_t block_rows = (rows + block - 1) / block;
  const std::size_t block_cols = (cols + block - 1) / block;
  BpdMatrix w(rows, cols, block, make_perms(block_rows * block_cols, block, perm_policy),
              std::vector<double>(block_rows * block_cols * block, 0.0));

  auto values = w.values_mut();
  switch (init_policy.kind) {
    case InitPolicy::Kind::Zeros:
      break;
    case InitPolicy::Kind::Constant:
      for (std::size_t s = 0; s < values.size(); ++s) {
        if (!w.is_padding(s)) values[s] = init_policy.constant;
      }
      break;
    case InitPolicy::Kind::ScaledUniform: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(block_cols));
      Rng rng(init_policy.seed);
      for (std::size_t s = 0; s < values.size(); ++s) {
        // Draw for every slot so the stream does not depend on padding.
        const double v = rng.uniform(-scale, scale);
        if (!w.is_padding(s)) values[s] = v;
      }
      break;
    }
  }
  return w;
}

double entry_at(const BpdMatrix& w, std::size_t i, std::size_t j) {
  if (i >= w.rows() || j >= w.cols()) {
    throw std::out_of_range("entry_at: (" + std::to_string(i) + ", " + std::to_string(j) + ") outside " +
                            std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
  }
  const std::size_t p = w.block();
  const std::size_t c = i % p;
  const std::size_t d = j % p;
  const std::size_t l = (i / p) * w.block_cols() + j / p;
  if ((c + w.perm(l)) % p != d) return 0.0;
  return w.values()[l * p + c];
}

DenseMatrix to_dense(const BpdMatrix& w) {
  DenseMatrix d(w.rows(), w.cols());
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    const SlotPosition pos = w.position(s);
    if (!pos.padding) d(pos.row, pos.col) = w.values()[s];
  }
  return d;
}

std::vector<double> matvec(const BpdMatrix& w, std::span<const double> x, OpCounter* counter) {
  if (x.size() != w.cols()) {
    throw std::invalid_argument("matvec: input length " + std::to_string(x.size()) + " does not match " +
                                std::to_string(w.cols()) + " columns");
  }
  const std::size_t p = w.block();
  const std::size_t block_cols = w.block_cols();
  const auto values = w.values();
  const auto perms = w.perms();
  std::vector<double> a(w.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const std::size_t c = i % p;
    const std::size_t row_base = (i / p) * block_cols;
    double acc = 0.0;
    for (std::size_t g = 0; g < block_cols; ++g) {
      const std::size_t l = row_base + g;
      const std::size_t j = (c + perms[l]) % p + g * p;
      const double xj = j < x.size() ? x[j] : 0.0;
      acc += values[l * p + c] * xj;
    }
    a[i] = acc;
  }
  if (counter != nullptr) counter->multiplies += static_cast<std::uint64_t>(w.rows()) * block_cols;
  return a;
}

}  // namespace bpdnn
