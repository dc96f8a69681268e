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

#include "bpdnn/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bpdnn/random.hpp"

namespace bpdnn {

void FixedPointSpec::validate() const {
  if (total_bits < 2 || total_bits > 32 || frac_bits >= total_bits) {
    throw std::invalid_argument("FixedPointSpec: need 0 <= frac_bits < total_bits <= 32, got " +
                                std::to_string(frac_bits) + "/" + std::to_string(total_bits));
  }
}

std::int64_t saturate(std::int64_t v, unsigned bits) {
  const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;
  const std::int64_t lo = -(std::int64_t{1} << (bits - 1));
  return std::clamp(v, lo, hi);
}

std::int64_t round_shift(std::int64_t v, unsigned shift) {
  if (shift == 0) return v;
  const std::int64_t floor_q = v >> shift;  // arithmetic shift: floor division
  const std::int64_t rem = v - (floor_q << shift);
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  if (rem > half || (rem == half && (floor_q & 1) != 0)) return floor_q + 1;
  return floor_q;
}

std::int32_t quantize_fixed(double x, const FixedPointSpec& spec) {
  spec.validate();
  if (std::isnan(x)) return 0;
  const double scaled = x * spec.scale();
  if (scaled >= static_cast<double>(spec.max_code())) return static_cast<std::int32_t>(spec.max_code());
  if (scaled <= static_cast<double>(spec.min_code())) return static_cast<std::int32_t>(spec.min_code());
  // nearbyint follows the default rounding mode: to nearest, ties to even.
  return static_cast<std::int32_t>(std::nearbyint(scaled));
}

std::vector<std::int32_t> quantize_fixed(std::span<const double> xs, const FixedPointSpec& spec) {
  std::vector<std::int32_t> codes;
  codes.reserve(xs.size());
  for (const double x : xs) codes.push_back(quantize_fixed(x, spec));
  return codes;
}

double dequantize(std::int64_t code, const FixedPointSpec& spec) { return static_cast<double>(code) / spec.scale(); }

std::int32_t FixedNumerics::activate(Activation act, std::int64_t acc) const {
  std::int64_t v = acc;
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::Relu:
      v = std::max<std::int64_t>(v, 0);
      break;
    case Activation::Tanh:
      return quantize_fixed(std::tanh(dequantize(acc, operand)), operand);
  }
  return static_cast<std::int32_t>(saturate(v, operand.total_bits));
}

std::vector<double> Codebook::decode() const {
  std::vector<double> out;
  out.reserve(tags.size());
  for (const auto t : tags) out.push_back(centroids.at(t));
  return out;
}

std::size_t nearest_centroid(std::span<const double> centroids, double v) {
  std::size_t best = 0;
  double best_dist = std::abs(v - centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = std::abs(v - centroids[c]);
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

namespace {

// Sorted-data Lloyd iterations. Clusters of 1-D data under sorted centroids
// are contiguous ranges split at centroid midpoints, so each assignment step
// is a scan over boundaries.
std::vector<double> lloyd_sorted(const std::vector<double>& sorted, std::vector<double> centroids,
                                 KMeansTrace* trace) {
  constexpr std::size_t kMaxIterations = 100;
  constexpr double kTolerance = 1e-9;
  std::sort(centroids.begin(), centroids.end());
  std::vector<double> sums(centroids.size());
  std::vector<std::size_t> counts(centroids.size());
  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    double sse = 0.0;
    std::size_t c = 0;
    for (const double v : sorted) {
      // Advance while the next centroid is strictly closer (ties stay low).
      while (c + 1 < centroids.size() && std::abs(v - centroids[c + 1]) < std::abs(v - centroids[c])) ++c;
      sums[c] += v;
      ++counts[c];
      sse += (v - centroids[c]) * (v - centroids[c]);
    }
    if (trace != nullptr) {
      trace->sse.push_back(sse);
      trace->iterations = iter + 1;
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      if (counts[k] == 0) continue;  // empty cluster keeps its centroid
      const double next = sums[k] / static_cast<double>(counts[k]);
      moved = std::max(moved, std::abs(next - centroids[k]));
      centroids[k] = next;
    }
    std::sort(centroids.begin(), centroids.end());
    if (moved < kTolerance) break;
  }
  return centroids;
}

}  // namespace

Codebook build_codebook(std::span<const double> values, unsigned tag_bits, std::uint64_t seed, KMeansTrace* trace) {
  if (values.empty()) throw std::invalid_argument("build_codebook: no values");
  if (tag_bits < 1 || tag_bits > 8) throw std::invalid_argument("build_codebook: tag_bits must be in [1, 8]");
  const std::size_t k = std::size_t{1} << tag_bits;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> centroids;
  if (distinct.size() <= k) {
    centroids = distinct;
  } else {
    // k-means++ seeding.
    Rng rng(seed);
    centroids.push_back(sorted[rng.below(sorted.size())]);
    std::vector<double> d2(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) d2[i] = (sorted[i] - centroids[0]) * (sorted[i] - centroids[0]);
    while (centroids.size() < k) {
      double total = 0.0;
      for (const double d : d2) total += d;
      if (total <= 0.0) break;
      const double target = rng.uniform() * total;
      double running = 0.0;
      std::size_t pick = sorted.size() - 1;
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        running += d2[i];
        if (running > target) {
          pick = i;
          break;
        }
      }
      const double c = sorted[pick];
      centroids.push_back(c);
      for (std::size_t i = 0; i < sorted.size(); ++i) d2[i] = std::min(d2[i], (sorted[i] - c) * (sorted[i] - c));
    }
    centroids = lloyd_sorted(sorted, std::move(centroids), trace);
  }

  // Canonical form: drop centroids no value maps to, keep ascending order.
  std::vector<bool> used(centroids.size(), false);
  for (const double v : distinct) used[nearest_centroid(centroids, v)] = true;
  std::vector<double> kept;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (used[c]) kept.push_back(centroids[c]);
  }

  Codebook cb;
  cb.tag_bits = tag_bits;
  cb.centroids = std::move(kept);
  cb.tags.reserve(values.size());
  for (const double v : values) cb.tags.push_back(static_cast<std::uint8_t>(nearest_centroid(cb.centroids, v)));
  return cb;
}

Codebook build_codebook(const BpdMatrix& w, unsigned tag_bits, std::uint64_t seed, KMeansTrace* trace) {
  std::vector<double> logical;
  logical.reserve(w.slot_count());
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    if (!w.is_padding(s)) logical.push_back(w.values()[s]);
  }
  if (logical.empty()) logical.push_back(0.0);
  Codebook clustered = build_codebook(logical, tag_bits, seed, trace);

  const auto zero_tag = static_cast<std::uint8_t>(nearest_centroid(clustered.centroids, 0.0));
  clustered.tags.clear();
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    clustered.tags.push_back(w.is_padding(s) ? zero_tag : static_cast<std::uint8_t>(nearest_centroid(
                                                                clustered.centroids, w.values()[s])));
  }
  return clustered;
}

std::vector<std::int32_t> lut_codes(const Codebook& codebook, const FixedPointSpec& spec) {
  return quantize_fixed(codebook.centroids, spec);
}

std::vector<std::int32_t> fixed_matvec_reference(const BpdMatrix& w, std::span<const std::int32_t> weight_codes,
                                                 std::span<const std::int32_t> x_codes, Activation act,
                                                 const FixedNumerics& numerics) {
  if (weight_codes.size() != w.slot_count() || x_codes.size() != w.cols()) {
    throw std::invalid_argument("fixed_matvec_reference: operand lengths do not match the layer");
  }
  std::vector<std::int32_t> y(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    std::int64_t acc = 0;
    for (std::size_t g = 0; g < w.block_cols(); ++g) {
      const std::size_t j = w.col_for_row(i, g);
      if (j >= w.cols()) continue;
      acc = numerics.accumulate(acc, numerics.product(weight_codes[w.slot_for_row(i, g)], x_codes[j]));
    }
    y[i] = numerics.activate(act, acc);
  }
  return y;
}

}  // namespace bpdnn
