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

#include "bpdnn/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpdnn {
namespace {

double score(double v, NormPolicy norm) { return norm == NormPolicy::L2 ? v * v : std::abs(v); }

// Returns the permutation value with the largest score; `entry_score(c, d)`
// gives the score of in-block position (c, d), zero in padding.
template <typename EntryScore>
std::uint32_t best_diagonal(std::size_t p, EntryScore entry_score) {
  std::uint32_t best_k = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < p; ++k) {
    double retained = 0.0;
    for (std::size_t c = 0; c < p; ++c) retained += entry_score(c, (c + k) % p);
    if (retained > best) {  // strict: ties keep the smaller k
      best = retained;
      best_k = static_cast<std::uint32_t>(k);
    }
  }
  return best_k;
}

}  // namespace

MatrixProjection from_dense_project(const DenseMatrix& dense, std::size_t block, NormPolicy norm) {
  if (block == 0) throw std::invalid_argument("from_dense_project: block must be positive");
  const std::size_t p = block;
  const std::size_t block_rows = (dense.rows + p - 1) / p;
  const std::size_t block_cols = (dense.cols + p - 1) / p;

  auto at = [&](std::size_t i, std::size_t j) { return i < dense.rows && j < dense.cols ? dense(i, j) : 0.0; };

  std::vector<std::uint32_t> perms(block_rows * block_cols);
  std::vector<double> values(perms.size() * p, 0.0);
  double dropped = 0.0;
  for (std::size_t bi = 0; bi < block_rows; ++bi) {
    for (std::size_t bj = 0; bj < block_cols; ++bj) {
      const std::size_t l = bi * block_cols + bj;
      const std::uint32_t k =
          best_diagonal(p, [&](std::size_t c, std::size_t d) { return score(at(bi * p + c, bj * p + d), norm); });
      perms[l] = k;
      for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t d = 0; d < p; ++d) {
          const double v = at(bi * p + c, bj * p + d);
          if ((c + k) % p == d) {
            values[l * p + c] = v;
          } else {
            dropped += v * v;
          }
        }
      }
    }
  }
  MatrixProjection out{BpdMatrix(dense.rows, dense.cols, p, perms, std::move(values)), perms, std::sqrt(dropped)};
  return out;
}

TensorProjection from_dense_project(const Tensor4& dense, std::size_t block, NormPolicy norm) {
  if (block == 0) throw std::invalid_argument("from_dense_project: block must be positive");
  const std::size_t p = block;
  const std::size_t ks = dense.kernel_w * dense.kernel_h;
  const std::size_t block_rows = (dense.out_channels + p - 1) / p;
  const std::size_t block_cols = (dense.in_channels + p - 1) / p;

  auto kernel_score = [&](std::size_t o, std::size_t i) {
    if (o >= dense.out_channels || i >= dense.in_channels) return 0.0;
    double s = 0.0;
    const double* k = &dense.data[(o * dense.in_channels + i) * ks];
    if (norm == NormPolicy::L2) {
      for (std::size_t e = 0; e < ks; ++e) s += k[e] * k[e];
    } else {
      for (std::size_t e = 0; e < ks; ++e) s += std::abs(k[e]);
    }
    return s;
  };

  std::vector<std::uint32_t> perms(block_rows * block_cols);
  std::vector<double> values(perms.size() * p * ks, 0.0);
  double dropped = 0.0;
  for (std::size_t bi = 0; bi < block_rows; ++bi) {
    for (std::size_t bj = 0; bj < block_cols; ++bj) {
      const std::size_t l = bi * block_cols + bj;
      const std::uint32_t k =
          best_diagonal(p, [&](std::size_t c, std::size_t d) { return kernel_score(bi * p + c, bj * p + d); });
      perms[l] = k;
      for (std::size_t c = 0; c < p; ++c) {
        const std::size_t o = bi * p + c;
        if (o >= dense.out_channels) continue;
        for (std::size_t d = 0; d < p; ++d) {
          const std::size_t i = bj * p + d;
          if (i >= dense.in_channels) continue;
          const double* src = &dense.data[(o * dense.in_channels + i) * ks];
          if ((c + k) % p == d) {
            std::copy(src, src + ks, values.begin() + static_cast<std::ptrdiff_t>((l * p + c) * ks));
          } else {
            for (std::size_t e = 0; e < ks; ++e) dropped += src[e] * src[e];
          }
        }
      }
    }
  }
  return TensorProjection{BpdConvTensor(dense.out_channels, dense.in_channels, dense.kernel_w, dense.kernel_h, p,
                                        perms, std::move(values)),
                          perms, std::sqrt(dropped)};
}

}  // namespace bpdnn
