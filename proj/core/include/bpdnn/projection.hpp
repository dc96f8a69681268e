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
#include <vector>

#include "bpdnn/bpd_matrix.hpp"
#include "bpdnn/conv.hpp"
#include "bpdnn/dense.hpp"

namespace bpdnn {

// Score used to rank the p candidate diagonals of each block. L2 retains the
// most squared mass (the Frobenius-optimal projection); L1 the most absolute
// mass.
enum class NormPolicy { L2, L1 };

struct MatrixProjection {
  BpdMatrix matrix;
  std::vector<std::uint32_t> chosen_perms;
  double residual_norm = 0.0;  // Frobenius norm of the dropped entries
};

struct TensorProjection {
  BpdConvTensor tensor;
  std::vector<std::uint32_t> chosen_perms;
  double residual_norm = 0.0;
};

// Keeps, per p x p block, the permuted diagonal with the largest retained
// mass and zeroes the rest. Ties go to the smaller permutation value.
MatrixProjection from_dense_project(const DenseMatrix& dense, std::size_t block, NormPolicy norm = NormPolicy::L2);

// Same over the channel grid; each kernel is scored by its l2 (or l1) mass.
TensorProjection from_dense_project(const Tensor4& dense, std::size_t block, NormPolicy norm = NormPolicy::L2);

}  // namespace bpdnn
