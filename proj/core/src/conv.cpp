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

#include "bpdnn/conv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bpdnn/random.hpp"

namespace bpdnn {

BpdConvTensor::BpdConvTensor(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_w,
                             std::size_t kernel_h, std::size_t block, std::vector<std::uint32_t> perms,
                             std::vector<double> values)
    : out_channels_(out_channels),
      in_channels_(in_channels),
      kernel_w_(kernel_w),
      kernel_h_(kernel_h),
      block_(block),
      perms_(std::move(perms)),
      values_(std::move(values)) {
  if (out_channels_ == 0 || in_channels_ == 0 || kernel_w_ == 0 || kernel_h_ == 0 || block_ == 0) {
    throw std::invalid_argument("BpdConvTensor: all dimensions and the block size must be positive");
  }
  if (perms_.size() != block_rows() * block_cols()) {
    throw std::invalid_argument("BpdConvTensor: expected " + std::to_string(block_rows() * block_cols()) +
                                " permutation values, got " + std::to_string(perms_.size()));
  }
  if (values_.size() != slot_count() * kernel_size()) {
    throw std::invalid_argument("BpdConvTensor: expected " + std::to_string(slot_count() * kernel_size()) +
                                " kernel values, got " + std::to_string(values_.size()));
  }
  for (const auto k : perms_) {
    if (k >= block_) throw std::invalid_argument("BpdConvTensor: permutation value out of range");
  }
  for (std::size_t s = 0; s < slot_count(); ++s) {
    if (!is_padding(s)) continue;
    for (const double v : kernel(s)) {
      if (v != 0.0) throw std::invalid_argument("BpdConvTensor: padded kernel " + std::to_string(s) + " is nonzero");
    }
  }
}

KernelPosition BpdConvTensor::position(std::size_t slot) const {
  const std::size_t l = slot / block_;
  const std::size_t c = slot % block_;
  KernelPosition pos;
  pos.out_channel = (l / block_cols()) * block_ + c;
  pos.in_channel = (l % block_cols()) * block_ + (c + perms_[l]) % block_;
  pos.padding = pos.out_channel >= out_channels_ || pos.in_channel >= in_channels_;
  return pos;
}

BpdConvTensor make_bpd_conv(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_w,
                            std::size_t kernel_h, std::size_t block, PermPolicy perm_policy, InitPolicy init_policy) {
  if (block == 0) throw std::invalid_argument("make_bpd_conv: block must be positive");
  const std::size_t block_rows = (out_channels + block - 1) / block;
  const std::size_t block_cols = (in_channels + block - 1) / block;
  const std::size_t slots = block_rows * block_cols * block;
  BpdConvTensor f(out_channels, in_channels, kernel_w, kernel_h, block,
                  make_perms(block_rows * block_cols, block, perm_policy),
                  std::vector<double>(slots * kernel_w * kernel_h, 0.0));

  auto values = f.values_mut();
  const std::size_t ks = f.kernel_size();
  if (init_policy.kind == InitPolicy::Kind::Constant) {
    for (std::size_t s = 0; s < slots; ++s) {
      if (f.is_padding(s)) continue;
      for (std::size_t e = 0; e < ks; ++e) values[s * ks + e] = init_policy.constant;
    }
  } else if (init_policy.kind == InitPolicy::Kind::ScaledUniform) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(block_cols * ks));
    Rng rng(init_policy.seed);
    for (std::size_t s = 0; s < slots; ++s) {
      const bool padding = f.is_padding(s);
      for (std::size_t e = 0; e < ks; ++e) {
        const double v = rng.uniform(-scale, scale);
        if (!padding) values[s * ks + e] = v;
      }
    }
  }
  return f;
}

double weight_at(const BpdConvTensor& f, std::size_t out_channel, std::size_t in_channel, std::size_t w,
                 std::size_t h) {
  if (out_channel >= f.out_channels() || in_channel >= f.in_channels() || w >= f.kernel_w() || h >= f.kernel_h()) {
    throw std::out_of_range("weight_at: index outside tensor");
  }
  const std::size_t g = in_channel / f.block();
  if (f.in_for_out(out_channel, g) != in_channel) return 0.0;
  return f.kernel(f.slot_for_out(out_channel, g))[w * f.kernel_h() + h];
}

Tensor4 to_dense(const BpdConvTensor& f) {
  Tensor4 d(f.out_channels(), f.in_channels(), f.kernel_w(), f.kernel_h());
  for (std::size_t s = 0; s < f.slot_count(); ++s) {
    const KernelPosition pos = f.position(s);
    if (pos.padding) continue;
    const auto k = f.kernel(s);
    for (std::size_t w = 0; w < f.kernel_w(); ++w) {
      for (std::size_t h = 0; h < f.kernel_h(); ++h) d(pos.out_channel, pos.in_channel, w, h) = k[w * f.kernel_h() + h];
    }
  }
  return d;
}

Tensor3 conv_forward(const BpdConvTensor& f, const Tensor3& x) {
  if (x.channels != f.in_channels()) {
    throw std::invalid_argument("conv_forward: input has " + std::to_string(x.channels) + " channels, layer expects " +
                                std::to_string(f.in_channels()));
  }
  const std::size_t kw = f.kernel_w();
  const std::size_t kh = f.kernel_h();
  Tensor3 y(f.out_channels(), conv_output_extent(x.width, kw), conv_output_extent(x.height, kh));
  for (std::size_t i = 0; i < f.out_channels(); ++i) {
    for (std::size_t g = 0; g < f.block_cols(); ++g) {
      const std::size_t j = f.in_for_out(i, g);
      if (j >= f.in_channels()) continue;  // padded input channel reads zero
      const auto kernel = f.kernel(f.slot_for_out(i, g));
      for (std::size_t w = 0; w < kw; ++w) {
        for (std::size_t h = 0; h < kh; ++h) {
          const double weight = kernel[w * kh + h];
          // x - w and y - h range over the input extent exactly once.
          for (std::size_t u = 0; u < x.width; ++u) {
            for (std::size_t v = 0; v < x.height; ++v) y(i, u + w, v + h) += weight * x(j, u, v);
          }
        }
      }
    }
  }
  return y;
}

}  // namespace bpdnn
