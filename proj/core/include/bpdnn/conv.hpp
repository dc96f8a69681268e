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

#include "bpdnn/bpd_matrix.hpp"
#include "bpdnn/dense.hpp"

namespace bpdnn {

// Position of a packed kernel in the (output channel, input channel) grid.
struct KernelPosition {
  std::size_t out_channel = 0;
  std::size_t in_channel = 0;
  bool padding = false;
};

/// Convolution weights with block-permuted diagonal structure over the
/// (output channel, input channel) grid.
///
/// Channels are padded to multiples of p. Channel block l = (i/p)*(c0_pad/p)
/// + j/p carries one kernel per output channel i, connected to input channel
/// j = (i mod p + k_l) mod p + (j/p)*p. Kernel slot s = l*p + (i mod p)
/// occupies values[s*kw*kh, (s+1)*kw*kh), laid out as [w][h].
class BpdConvTensor {
 public:
  BpdConvTensor() = default;
  BpdConvTensor(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_w, std::size_t kernel_h,
                std::size_t block, std::vector<std::uint32_t> perms, std::vector<double> values);

  std::size_t out_channels() const { return out_channels_; }
  std::size_t in_channels() const { return in_channels_; }
  std::size_t kernel_w() const { return kernel_w_; }
  std::size_t kernel_h() const { return kernel_h_; }
  std::size_t block() const { return block_; }
  std::size_t kernel_size() const { return kernel_w_ * kernel_h_; }
  std::size_t block_rows() const { return (out_channels_ + block_ - 1) / block_; }
  std::size_t block_cols() const { return (in_channels_ + block_ - 1) / block_; }
  std::size_t slot_count() const { return perms_.size() * block_; }

  std::span<const std::uint32_t> perms() const { return perms_; }
  std::uint32_t perm(std::size_t block_row, std::size_t block_col) const {
    return perms_[block_row * block_cols() + block_col];
  }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mut() { return values_; }

  std::span<const double> kernel(std::size_t slot) const {
    return std::span<const double>(values_).subspan(slot * kernel_size(), kernel_size());
  }

  KernelPosition position(std::size_t slot) const;
  bool is_padding(std::size_t slot) const { return position(slot).padding; }

  std::size_t slot_for_out(std::size_t out_channel, std::size_t block_col) const {
    return ((out_channel / block_) * block_cols() + block_col) * block_ + out_channel % block_;
  }
  std::size_t in_for_out(std::size_t out_channel, std::size_t block_col) const {
    const std::size_t k = perm(out_channel / block_, block_col);
    return (out_channel % block_ + k) % block_ + block_col * block_;
  }

  bool operator==(const BpdConvTensor&) const = default;

 private:
  std::size_t out_channels_ = 0;
  std::size_t in_channels_ = 0;
  std::size_t kernel_w_ = 0;
  std::size_t kernel_h_ = 0;
  std::size_t block_ = 1;
  std::vector<std::uint32_t> perms_;
  std::vector<double> values_;
};

BpdConvTensor make_bpd_conv(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_w,
                            std::size_t kernel_h, std::size_t block, PermPolicy perm_policy, InitPolicy init_policy);

// F(i, j, w, h); zero off the permuted diagonals. Throws std::out_of_range.
double weight_at(const BpdConvTensor& f, std::size_t out_channel, std::size_t in_channel, std::size_t w,
                 std::size_t h);

Tensor4 to_dense(const BpdConvTensor& f);

// Output spatial size for an input of size `input` and kernel `kernel`: the
// full correlation extent input + kernel - 1.
constexpr std::size_t conv_output_extent(std::size_t input, std::size_t kernel) { return input + kernel - 1; }

// Y(i, x, y) = sum_g sum_w sum_h F(i, j, w, h) * X(j, x - w, y - h) over the
// stored kernels, unit stride, zero outside X. Y has spatial size
// (w0 + kw - 1) x (h0 + kh - 1). Throws std::invalid_argument when X has the
// wrong channel count.
Tensor3 conv_forward(const BpdConvTensor& f, const Tensor3& x);

}  // namespace bpdnn
