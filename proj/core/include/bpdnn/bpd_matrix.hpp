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
#include <span>
#include <vector>

#include "bpdnn/dense.hpp"

namespace bpdnn {

// How per-block permutation values are chosen for a freshly made layer.
struct PermPolicy {
  enum class Kind { Natural, Random };
  Kind kind = Kind::Natural;
  std::uint64_t seed = 0;

  // k_l = l mod p
  static PermPolicy natural() { return {Kind::Natural, 0}; }
  // k_l uniform in [0, p) from a seeded generator
  static PermPolicy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

struct InitPolicy {
  enum class Kind { Zeros, Constant, ScaledUniform };
  Kind kind = Kind::Zeros;
  double constant = 0.0;
  std::uint64_t seed = 0;

  static InitPolicy zeros() { return {Kind::Zeros, 0.0, 0}; }
  static InitPolicy filled(double value) { return {Kind::Constant, value, 0}; }
  // Uniform in [-s, s] with s = 1/sqrt(cols_padded/p): the fan-in of a row
  // only counts the connections the block structure keeps.
  static InitPolicy scaled_uniform(std::uint64_t seed) { return {Kind::ScaledUniform, 0.0, seed}; }
};

// Logical coordinates of a packed slot. `padding` is set when the slot maps
// outside the rows x cols region.
struct SlotPosition {
  std::size_t row = 0;
  std::size_t col = 0;
  bool padding = false;
};

/// An m x n block-permuted diagonal matrix.
///
/// The matrix is virtually padded to m_pad x n_pad (multiples of the block
/// size p) and split into p x p blocks numbered l = (i/p)*(n_pad/p) + j/p.
/// Block l keeps only the entries (c, d) with (c + k_l) mod p == d. Its p
/// nonzeros are stored contiguously at values[l*p + c], ordered by the
/// in-block row c. Slots whose logical position falls in the padding region
/// are always exactly zero.
class BpdMatrix {
 public:
  BpdMatrix() = default;

  // Throws std::invalid_argument on a zero dimension, inconsistent lengths,
  // an out-of-range permutation value, or a nonzero padding slot.
  BpdMatrix(std::size_t rows, std::size_t cols, std::size_t block, std::vector<std::uint32_t> perms,
            std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t block() const { return block_; }
  std::size_t rows_padded() const { return block_rows() * block_; }
  std::size_t cols_padded() const { return block_cols() * block_; }
  std::size_t block_rows() const { return (rows_ + block_ - 1) / block_; }
  std::size_t block_cols() const { return (cols_ + block_ - 1) / block_; }
  std::size_t block_count() const { return perms_.size(); }
  std::size_t slot_count() const { return values_.size(); }

  std::span<const std::uint32_t> perms() const { return perms_; }
  std::uint32_t perm(std::size_t block_index) const { return perms_[block_index]; }
  std::uint32_t perm(std::size_t block_row, std::size_t block_col) const {
    return perms_[block_row * block_cols() + block_col];
  }

  std::span<const double> values() const { return values_; }
  // Mutable view for in-place updates. Callers must leave padding slots at
  // zero; see is_padding().
  std::span<double> values_mut() { return values_; }

  SlotPosition position(std::size_t slot) const;
  bool is_padding(std::size_t slot) const { return position(slot).padding; }

  // Packed slot holding the nonzero of logical row i inside block column g.
  std::size_t slot_for_row(std::size_t i, std::size_t block_col) const {
    return ((i / block_) * block_cols() + block_col) * block_ + i % block_;
  }

  // Logical column of the nonzero in row i inside block column g.
  std::size_t col_for_row(std::size_t i, std::size_t block_col) const {
    const std::size_t k = perm(i / block_, block_col);
    return (i % block_ + k) % block_ + block_col * block_;
  }

  // Logical row of the nonzero in column j inside block row g.
  std::size_t row_for_col(std::size_t j, std::size_t block_row) const {
    const std::size_t k = perm(block_row, j / block_);
    return (j % block_ + block_ - k) % block_ + block_row * block_;
  }

  bool operator==(const BpdMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t block_ = 1;
  std::vector<std::uint32_t> perms_;
  std::vector<double> values_;
};

// Counts multiplies issued by instrumented kernels.
struct OpCounter {
  std::uint64_t multiplies = 0;
};

BpdMatrix make_bpd(std::size_t rows, std::size_t cols, std::size_t block, PermPolicy perm_policy,
                   InitPolicy init_policy);

// Generates permutation values for `count` blocks of size `block`.
std::vector<std::uint32_t> make_perms(std::size_t count, std::size_t block, PermPolicy policy);

// Value of logical entry (i, j); throws std::out_of_range outside rows x cols.
double entry_at(const BpdMatrix& w, std::size_t i, std::size_t j);

DenseMatrix to_dense(const BpdMatrix& w);

// a = W x using only the stored diagonals: rows * cols_padded / p multiplies.
// Throws std::invalid_argument when x.size() != cols.
std::vector<double> matvec(const BpdMatrix& w, std::span<const double> x, OpCounter* counter = nullptr);

}  // namespace bpdnn
