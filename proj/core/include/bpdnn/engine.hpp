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
#include <stdexcept>
#include <string>
#include <vector>

#include "bpdnn/activation.hpp"
#include "bpdnn/bpd_matrix.hpp"
#include "bpdnn/quant.hpp"

namespace bpdnn {

/// Hardware parameters of the computing engine. Defaults are the 32-PE
/// 1.2 GHz design point.
struct EngineConfig {
  std::size_t n_pe = 32;
  std::size_t n_mul = 8;             // multipliers per PE
  unsigned multiplier_bits = 16;
  std::size_t n_acc = 128;           // accumulators per PE
  unsigned accumulator_bits = 24;
  std::size_t weight_subbanks = 16;  // per PE
  unsigned weight_sram_width = 32;   // bits
  std::size_t weight_sram_depth = 2048;
  unsigned perm_sram_width = 48;     // bits
  std::size_t perm_sram_depth = 2048;
  unsigned quant_bits = 16;
  unsigned frac_bits = 12;
  unsigned weight_sharing_bits = 4;
  std::size_t pipeline_stages = 5;
  std::size_t act_banks = 8;
  unsigned act_bank_width = 64;      // bits
  std::size_t act_bank_depth = 2048;
  unsigned fifo_width = 32;          // bits
  std::size_t fifo_depth = 32;
  double clock_hz = 1.2e9;
  bool enforce_capacity = true;

  // Throws std::invalid_argument on zero counts, n_acc not divisible by
  // n_mul, or an activation bank width not divisible by quant_bits.
  void validate() const;

  // Activations read from all banks in one cycle (and written back per
  // group-write cycle).
  std::size_t activations_per_cycle() const { return act_banks * (act_bank_width / quant_bits); }
  std::size_t activation_capacity() const { return activations_per_cycle() * act_bank_depth; }
  FixedNumerics numerics() const { return FixedNumerics{FixedPointSpec{quant_bits, frac_bits}, accumulator_bits}; }

  bool operator==(const EngineConfig&) const = default;
};

// One FC layer as a simulator workload.
struct LayerWorkload {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t block = 1;
  double activation_density = 1.0;  // fraction of nonzero inputs

  double weight_density() const { return 1.0 / static_cast<double>(block); }
};

/// Processing plan for one layer.
///
/// Block rows are dealt round-robin to the PEs of each group. Case 1 keeps
/// every row of a PE in accumulators and finishes a column in
/// ceil(block_rows_per_pe / n_mul) cycles. Case 2 runs several passes over
/// the input, each covering as many block rows as the accumulators hold.
/// Case 3 (fewer rows per PE than p * n_mul) may split the PEs into column
/// groups that each hold the full layer and take alternate nonzero inputs;
/// the group count is the one with the fewest cycles per column, which can
/// be a single group.
struct Schedule {
  int case_id = 1;
  std::size_t rows_per_pe = 0;          // N_ROWPE of the original partition
  std::size_t groups = 1;
  std::size_t pes_per_group = 1;
  std::size_t block_rows_per_pe = 0;    // within a group, padded to equal share
  std::vector<std::size_t> pass_block_rows;
  std::vector<std::size_t> pass_cycles_per_column;

  std::size_t passes() const { return pass_block_rows.size(); }
  // Cycles one group spends on one nonzero input over all passes.
  std::size_t cycles_per_column() const;
};

Schedule select_schedule(const EngineConfig& cfg, std::size_t rows, std::size_t block);
Schedule select_schedule(const EngineConfig& cfg, const LayerWorkload& workload);

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weight SRAM sub-bank: `rows_used` rows of `entries_per_row` entries each.
struct WeightSubBank {
  std::size_t rows_used = 0;
  std::vector<std::uint8_t> tags;  // codebook tags, empty without a codebook
  std::vector<double> reals;       // raw weights for real-valued simulation
};

struct PeImage {
  std::size_t group = 0;
  std::vector<std::size_t> block_rows;  // owned block rows; >= layer block rows means grid padding
  std::vector<WeightSubBank> sub_banks;
  std::vector<std::uint16_t> perm_words;  // permutation SRAM entries, row-major
  std::size_t perm_rows_used = 0;
};

/// On-chip image of a layer.
///
/// Each PE stores, for every column, the nonzeros of its owned block rows
/// in one or more consecutive SRAM rows (rows_per_column of them), filling
/// sub-bank 0 first. The permutation SRAM holds, per (column block, owned
/// block row), the value (p - k_l) mod p so that the accumulation selector
/// can compute the target row as (stored value + column offset) mod p.
struct SramImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t block = 1;
  Schedule schedule;
  unsigned weight_bits = 4;
  std::size_t sub_banks = 16;
  std::size_t sub_bank_depth = 2048;
  std::size_t entries_per_row = 8;
  std::size_t rows_per_column = 1;
  unsigned perm_bits = 1;
  std::size_t perms_per_row = 1;
  std::vector<PeImage> pes;
  bool has_codebook = false;
  std::vector<double> lut_values;
  std::vector<std::int32_t> lut_codes;

  std::size_t block_cols() const { return (cols + block - 1) / block; }
  std::size_t cols_padded() const { return block_cols() * block; }
  std::size_t layer_block_rows() const { return (rows + block - 1) / block; }
};

// Where one weight entry lives inside a PE.
struct WeightLocation {
  std::size_t sub_bank = 0;
  std::size_t row = 0;
  std::size_t lane = 0;
};

WeightLocation locate_weight(const SramImage& image, std::size_t column, std::size_t entry);

/// Partitions and packs a layer into per-PE SRAM. With a codebook, each
/// entry is its tag and the LUT holds the centroids; raw values are kept
/// alongside for real-valued runs. Throws CapacityError naming the
/// overflowing SRAM when enforce_capacity is set.
SramImage plan_layout(const BpdMatrix& w, const Codebook* codebook, const EngineConfig& cfg);

// Row index computed by the accumulation selector of `pe` for a product of
// `column` and its `entry`-th owned block row.
std::size_t selector_row(const SramImage& image, std::size_t pe, std::size_t column, std::size_t entry);

enum class NumericMode { Real, Fixed };

struct CycleReport {
  int schedule_case = 1;
  std::size_t groups = 1;
  std::size_t passes = 1;
  std::size_t cycles_per_column = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t compute_cycles = 0;    // busy cycles of the PE array
  std::uint64_t stall_cycles = 0;      // PE array waiting on the activation FIFO
  std::uint64_t pipeline_fill = 0;
  std::uint64_t merge_cycles = 0;      // Case 3 partial-sum reduction
  std::uint64_t writeback_cycles = 0;  // group writes into activation SRAM
  std::size_t columns_processed = 0;
  std::size_t columns_skipped = 0;
  std::vector<std::uint64_t> pe_macs;  // multiplies issued per PE
  std::uint64_t useful_macs = 0;       // multiplies on logical weights
  double utilization = 0.0;            // useful_macs / (n_pe * n_mul * compute_cycles)

  bool operator==(const CycleReport&) const = default;
};

struct SimulationResult {
  std::vector<double> y;              // real outputs, or dequantized fixed outputs
  std::vector<std::int32_t> y_codes;  // fixed-point outputs (Fixed mode only)
  CycleReport report;
};

/// Runs one layer through the engine. x holds one value per logical column;
/// in Fixed mode it is quantized to operand codes first and zero detection
/// acts on the codes. Functional results are accumulated per row in
/// ascending column order, matching matvec (Real) and
/// fixed_matvec_reference (Fixed). Throws std::invalid_argument when x does
/// not match the image or Fixed mode lacks a codebook.
SimulationResult simulate_layer(const SramImage& image, std::span<const double> x, const EngineConfig& cfg,
                                NumericMode mode, Activation act = Activation::Identity);

struct Throughput {
  double raw_gops = 0.0;
  double equivalent_tops = 0.0;
};

// Steady-state peak: n_pe * n_mul * 2 ops per cycle, scaled by the assumed
// weight and activation sparsity factors for the dense-equivalent figure.
Throughput throughput_model(const EngineConfig& cfg, double weight_sparsity_factor,
                            double activation_sparsity_factor);

struct SweepRow {
  std::size_t n_pe = 0;
  int schedule_case = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t compute_cycles = 0;
  double speedup = 0.0;     // relative to the smallest PE count
  double efficiency = 0.0;  // speedup / (n_pe / smallest n_pe)
  bool sublinear = false;   // efficiency below 0.9
  std::string status = "ok";
};

struct SweepTable {
  std::string workload;
  std::vector<SweepRow> rows;
};

// Lays out and simulates the layer for each PE count. Rows whose layout does
// not fit on chip carry status "capacity" and no cycle figures. Throws
// std::invalid_argument for an empty pe_counts.
SweepTable scalability_sweep(const std::string& name, const BpdMatrix& w, std::span<const double> x,
                             std::span<const std::size_t> pe_counts, const EngineConfig& cfg_template,
                             NumericMode mode = NumericMode::Real);

}  // namespace bpdnn
