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

#include "bpdnn/activation.hpp"
#include "bpdnn/bpd_matrix.hpp"

namespace bpdnn {

// Two's-complement fixed-point format: code = value * 2^frac_bits.
struct FixedPointSpec {
  unsigned total_bits = 16;
  unsigned frac_bits = 12;

  // Throws std::invalid_argument unless 0 <= frac_bits < total_bits <= 32.
  void validate() const;
  std::int64_t max_code() const { return (std::int64_t{1} << (total_bits - 1)) - 1; }
  std::int64_t min_code() const { return -(std::int64_t{1} << (total_bits - 1)); }
  double scale() const { return static_cast<double>(std::int64_t{1} << frac_bits); }
};

// Round half to even, then saturate to the signed range.
std::int32_t quantize_fixed(double x, const FixedPointSpec& spec);
std::vector<std::int32_t> quantize_fixed(std::span<const double> xs, const FixedPointSpec& spec);
double dequantize(std::int64_t code, const FixedPointSpec& spec);

// Clamp to a signed `bits`-wide two's-complement range.
std::int64_t saturate(std::int64_t v, unsigned bits);

// v / 2^shift rounded half to even (exact integer arithmetic).
std::int64_t round_shift(std::int64_t v, unsigned shift);

/// Datapath numerics of the inference engine: 16-bit operands with
/// frac_bits fraction bits, and 24-bit accumulators with the same fraction.
/// Each product is rounded once back to the operand fraction, then added
/// with saturation; there is no other rounding inside an accumulation.
struct FixedNumerics {
  FixedPointSpec operand{16, 12};
  unsigned accumulator_bits = 24;

  std::int64_t product(std::int32_t weight, std::int32_t activation) const {
    return round_shift(std::int64_t{weight} * activation, operand.frac_bits);
  }
  std::int64_t accumulate(std::int64_t acc, std::int64_t product) const {
    return saturate(acc + product, accumulator_bits);
  }
  // Activation unit: applies the nonlinearity and narrows to operand width.
  std::int32_t activate(Activation act, std::int64_t acc) const;
};

struct Codebook {
  unsigned tag_bits = 4;
  std::vector<double> centroids;    // ascending, at most 2^tag_bits
  std::vector<std::uint8_t> tags;   // one per packed value

  std::vector<double> decode() const;
};

// Per-iteration record of the k-means objective.
struct KMeansTrace {
  std::vector<double> sse;  // after each assignment step
  std::size_t iterations = 0;
};

// Index of the centroid closest to v; ties go to the lower index.
std::size_t nearest_centroid(std::span<const double> centroids, double v);

/// 1-D k-means weight sharing with k = 2^tag_bits: k-means++ seeding from
/// `seed`, at most 100 Lloyd iterations or until no centroid moves by 1e-9.
/// If there are at most k distinct values they become the centroids
/// directly. Throws std::invalid_argument for empty input or tag_bits
/// outside [1, 8].
Codebook build_codebook(std::span<const double> values, unsigned tag_bits, std::uint64_t seed,
                        KMeansTrace* trace = nullptr);

// Clusters only the logical slots of `w`; padding slots are tagged with the
// centroid nearest zero.
Codebook build_codebook(const BpdMatrix& w, unsigned tag_bits, std::uint64_t seed, KMeansTrace* trace = nullptr);

// Fixed-point code of each centroid: the contents of a PE's weight LUT.
std::vector<std::int32_t> lut_codes(const Codebook& codebook, const FixedPointSpec& spec);

/// Quantized reference for y = act(W x): for each row, stored weights are
/// visited in ascending column order. weight_codes is aligned with
/// w.values(); the values of `w` itself are ignored.
std::vector<std::int32_t> fixed_matvec_reference(const BpdMatrix& w, std::span<const std::int32_t> weight_codes,
                                                 std::span<const std::int32_t> x_codes, Activation act,
                                                 const FixedNumerics& numerics);

}  // namespace bpdnn
