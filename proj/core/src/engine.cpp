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

#include "bpdnn/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <string>

#include "bpdnn/train.hpp"

namespace bpdnn {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("EngineConfig: " + message);
}

}  // namespace

void EngineConfig::validate() const {
  require(n_pe > 0 && n_mul > 0 && n_acc > 0, "PE, multiplier and accumulator counts must be positive");
  require(n_acc % n_mul == 0, "n_acc must be divisible by n_mul");
  require(weight_subbanks > 0 && weight_sram_depth > 0 && perm_sram_depth > 0, "SRAM sizes must be positive");
  require(weight_sharing_bits >= 1 && weight_sharing_bits <= 8, "weight_sharing_bits must be in [1, 8]");
  require(weight_sram_width >= weight_sharing_bits, "weight SRAM row narrower than one tag");
  require(perm_sram_width > 0, "permutation SRAM width must be positive");
  require(quant_bits >= 2 && quant_bits <= 32 && frac_bits < quant_bits, "need frac_bits < quant_bits <= 32");
  require(accumulator_bits >= quant_bits && accumulator_bits <= 62, "accumulator width out of range");
  require(act_banks > 0 && act_bank_depth > 0 && act_bank_width >= quant_bits && act_bank_width % quant_bits == 0,
          "activation bank width must be a positive multiple of quant_bits");
  require(fifo_depth > 0, "FIFO depth must be positive");
  require(clock_hz > 0.0 && std::isfinite(clock_hz), "clock_hz must be positive");
}

std::size_t Schedule::cycles_per_column() const {
  std::size_t total = 0;
  for (const auto c : pass_cycles_per_column) total += c;
  return total;
}

namespace {

// Pass plan for `pes_per_group` PEs sharing the block rows of one group.
void plan_passes(const EngineConfig& cfg, std::size_t layer_block_rows, std::size_t block, Schedule& s) {
  s.block_rows_per_pe = ceil_div(layer_block_rows, s.pes_per_group);
  s.pass_block_rows.clear();
  s.pass_cycles_per_column.clear();
  std::size_t per_pass = s.block_rows_per_pe;
  if (cfg.n_acc < s.block_rows_per_pe * block) {
    const std::size_t f = cfg.n_acc / (block * cfg.n_mul);
    per_pass = f > 0 ? f * cfg.n_mul : cfg.n_acc / block;
    if (per_pass == 0) {
      throw std::invalid_argument("select_schedule: " + std::to_string(cfg.n_acc) +
                                  " accumulators cannot hold one block of " + std::to_string(block) + " rows");
    }
  }
  for (std::size_t done = 0; done < s.block_rows_per_pe; done += per_pass) {
    const std::size_t n = std::min(per_pass, s.block_rows_per_pe - done);
    s.pass_block_rows.push_back(n);
    s.pass_cycles_per_column.push_back(ceil_div(n, cfg.n_mul));
  }
}

}  // namespace

Schedule select_schedule(const EngineConfig& cfg, std::size_t rows, std::size_t block) {
  cfg.validate();
  if (rows == 0 || block == 0) throw std::invalid_argument("select_schedule: rows and block must be positive");
  const std::size_t layer_block_rows = ceil_div(rows, block);
  const std::size_t lane_rows = block * cfg.n_mul;  // rows one PE covers per cycle

  Schedule s;
  s.rows_per_pe = ceil_div(layer_block_rows, cfg.n_pe) * block;
  s.pes_per_group = cfg.n_pe;
  plan_passes(cfg, layer_block_rows, block, s);
  if (s.rows_per_pe >= lane_rows) {
    s.case_id = s.passes() > 1 ? 2 : 1;
    return s;
  }

  // Case 3: split the PEs into G groups that take alternate columns. G runs
  // over divisors of n_pe up to the first one that fills the multipliers;
  // keep the lowest cycles per column per group count, fewest groups on ties.
  s.case_id = 3;
  const std::size_t wanted = ceil_div(lane_rows, s.rows_per_pe);
  Schedule best = s;
  for (std::size_t g = 2; g <= cfg.n_pe; ++g) {
    if (cfg.n_pe % g != 0) continue;
    Schedule trial = s;
    trial.groups = g;
    trial.pes_per_group = cfg.n_pe / g;
    plan_passes(cfg, layer_block_rows, block, trial);
    // cycles_per_column / groups compared without division.
    if (trial.cycles_per_column() * best.groups < best.cycles_per_column() * g) best = trial;
    if (g >= wanted) break;
  }
  return best;
}

Schedule select_schedule(const EngineConfig& cfg, const LayerWorkload& workload) {
  return select_schedule(cfg, workload.rows, workload.block);
}

WeightLocation locate_weight(const SramImage& image, std::size_t column, std::size_t entry) {
  const std::size_t row = column * image.rows_per_column + entry / image.entries_per_row;
  WeightLocation loc;
  loc.sub_bank = std::min(row / image.sub_bank_depth, image.sub_banks - 1);
  loc.row = row - loc.sub_bank * image.sub_bank_depth;
  loc.lane = entry % image.entries_per_row;
  return loc;
}

SramImage plan_layout(const BpdMatrix& w, const Codebook* codebook, const EngineConfig& cfg) {
  cfg.validate();
  SramImage image;
  image.rows = w.rows();
  image.cols = w.cols();
  image.block = w.block();
  image.schedule = select_schedule(cfg, w.rows(), w.block());
  image.weight_bits = cfg.weight_sharing_bits;
  image.sub_banks = cfg.weight_subbanks;
  image.sub_bank_depth = cfg.weight_sram_depth;
  image.entries_per_row = cfg.weight_sram_width / cfg.weight_sharing_bits;
  const std::size_t p = w.block();
  const std::size_t owned = image.schedule.block_rows_per_pe;
  image.rows_per_column = ceil_div(owned, image.entries_per_row);
  image.perm_bits = std::max(1u, static_cast<unsigned>(std::bit_width(p - 1)));
  image.perms_per_row = cfg.perm_sram_width / image.perm_bits;
  if (image.perms_per_row == 0) {
    throw std::invalid_argument("plan_layout: permutation SRAM row narrower than one " +
                                std::to_string(image.perm_bits) + "-bit value");
  }

  if (codebook != nullptr) {
    if (codebook->tags.size() != w.slot_count()) {
      throw std::invalid_argument("plan_layout: codebook has " + std::to_string(codebook->tags.size()) +
                                  " tags for " + std::to_string(w.slot_count()) + " slots");
    }
    if (codebook->centroids.empty() || codebook->centroids.size() > (std::size_t{1} << cfg.weight_sharing_bits)) {
      throw std::invalid_argument("plan_layout: codebook size does not fit the weight LUT");
    }
    for (const auto t : codebook->tags) {
      if (t >= codebook->centroids.size()) throw std::invalid_argument("plan_layout: tag out of codebook range");
    }
    image.has_codebook = true;
    image.lut_values = codebook->centroids;
    image.lut_codes = lut_codes(*codebook, cfg.numerics().operand);
  }

  const std::size_t cols_pad = w.cols_padded();
  const std::size_t weight_rows = cols_pad * image.rows_per_column;
  const std::size_t perm_rows = ceil_div(w.block_cols() * owned, image.perms_per_row);
  if (cfg.enforce_capacity) {
    const std::size_t weight_capacity = cfg.weight_subbanks * cfg.weight_sram_depth;
    if (weight_rows > weight_capacity) {
      throw CapacityError("weight SRAM sub-bank " + std::to_string(cfg.weight_subbanks - 1) + " of PE 0 overflows: " +
                          std::to_string(weight_rows) + " rows needed, " + std::to_string(weight_capacity) +
                          " available (" + std::to_string(cfg.weight_subbanks) + " x " +
                          std::to_string(cfg.weight_sram_depth) + ")");
    }
    if (perm_rows > cfg.perm_sram_depth) {
      throw CapacityError("permutation SRAM of PE 0 overflows: " + std::to_string(perm_rows) + " rows needed, " +
                          std::to_string(cfg.perm_sram_depth) + " available");
    }
    const std::size_t act_capacity = cfg.activation_capacity();
    if (cols_pad > act_capacity || w.rows_padded() > act_capacity) {
      throw CapacityError("activation SRAM holds " + std::to_string(act_capacity) + " values, layer needs " +
                          std::to_string(std::max(cols_pad, w.rows_padded())));
    }
  }

  const std::size_t layer_block_rows = w.block_rows();
  const std::size_t block_cols = w.block_cols();
  const auto values = w.values();
  std::uint8_t zero_tag = 0;
  if (codebook != nullptr) zero_tag = static_cast<std::uint8_t>(nearest_centroid(codebook->centroids, 0.0));

  image.pes.resize(cfg.n_pe);
  for (std::size_t t = 0; t < cfg.n_pe; ++t) {
    PeImage& pe = image.pes[t];
    pe.group = t / image.schedule.pes_per_group;
    const std::size_t local = t % image.schedule.pes_per_group;
    for (std::size_t e = 0; e < owned; ++e) pe.block_rows.push_back(local + e * image.schedule.pes_per_group);

    // Sub-bank 0 fills first; rows past the last bank's depth (capacity not
    // enforced) stay in the last bank.
    pe.sub_banks.resize(cfg.weight_subbanks);
    std::size_t left = weight_rows;
    for (std::size_t b = 0; b < cfg.weight_subbanks; ++b) {
      const std::size_t n = b + 1 == cfg.weight_subbanks ? left : std::min(left, cfg.weight_sram_depth);
      pe.sub_banks[b].rows_used = n;
      pe.sub_banks[b].reals.assign(n * image.entries_per_row, 0.0);
      if (image.has_codebook) pe.sub_banks[b].tags.assign(n * image.entries_per_row, zero_tag);
      left -= n;
    }
    pe.perm_rows_used = perm_rows;
    pe.perm_words.assign(perm_rows * image.perms_per_row, 0);
  }

  for (std::size_t t = 0; t < cfg.n_pe; ++t) {
    PeImage& pe = image.pes[t];
    for (std::size_t e = 0; e < owned; ++e) {
      const std::size_t br = pe.block_rows[e];
      if (br >= layer_block_rows) continue;  // grid padding: zeros already in place
      for (std::size_t bj = 0; bj < block_cols; ++bj) {
        const std::size_t l = br * block_cols + bj;
        const std::size_t k = w.perm(l);
        pe.perm_words[bj * owned + e] = static_cast<std::uint16_t>((p - k) % p);
        for (std::size_t d = 0; d < p; ++d) {
          const std::size_t j = bj * p + d;
          const std::size_t slot = l * p + (d + p - k) % p;
          const WeightLocation loc = locate_weight(image, j, e);
          const std::size_t at = loc.row * image.entries_per_row + loc.lane;
          pe.sub_banks[loc.sub_bank].reals[at] = values[slot];
          if (image.has_codebook) pe.sub_banks[loc.sub_bank].tags[at] = codebook->tags[slot];
        }
      }
    }
  }
  return image;
}

std::size_t selector_row(const SramImage& image, std::size_t pe, std::size_t column, std::size_t entry) {
  const PeImage& unit = image.pes.at(pe);
  const std::size_t p = image.block;
  const std::size_t owned = unit.block_rows.size();
  const std::size_t stored = unit.perm_words.at((column / p) * owned + entry);
  return unit.block_rows.at(entry) * p + (stored + column % p) % p;
}

namespace {

struct DispatchTiming {
  std::uint64_t end = 0;          // cycle the last group finishes
  std::uint64_t busy = 0;         // busiest group's compute cycles
  std::vector<std::size_t> group;  // group that took each nonzero
};

// Activation selector -> FIFO -> PE groups, one pass over the input.
//
// Each cycle the scanner reads one window of `window` activations and the
// zero detector pushes up to `rate` of that window's nonzeros into the FIFO,
// staying on the window until all of them are in. An idle group pops a
// nonzero pushed in an earlier cycle and is then busy for `cycles` cycles.
DispatchTiming dispatch(const std::vector<std::size_t>& nz, std::size_t window, std::size_t windows,
                        std::size_t rate, std::size_t depth, std::size_t groups, std::size_t cycles) {
  DispatchTiming out;
  out.group.assign(nz.size(), 0);
  if (nz.empty()) return out;
  std::vector<std::uint64_t> busy_until(groups, 0);
  std::vector<std::uint64_t> busy(groups, 0);
  std::deque<std::size_t> fifo;
  std::size_t next_push = 0;
  std::size_t consumed = 0;
  std::size_t scan = 0;
  std::size_t next_group = 0;  // round-robin start among idle groups
  for (std::uint64_t t = 0; consumed < nz.size(); ++t) {
    const std::size_t start = next_group;
    for (std::size_t probe = 0; probe < groups && !fifo.empty(); ++probe) {
      const std::size_t g = (start + probe) % groups;
      if (busy_until[g] > t) continue;
      next_group = (g + 1) % groups;
      out.group[fifo.front()] = g;
      fifo.pop_front();
      busy_until[g] = t + cycles;
      busy[g] += cycles;
      ++consumed;
    }
    if (scan < windows) {
      std::size_t pushed = 0;
      while (pushed < rate && fifo.size() < depth && next_push < nz.size() && nz[next_push] / window == scan) {
        fifo.push_back(next_push++);
        ++pushed;
      }
      if (next_push == nz.size() || nz[next_push] / window != scan) ++scan;
    }
  }
  out.end = *std::max_element(busy_until.begin(), busy_until.end());
  out.busy = *std::max_element(busy.begin(), busy.end());
  return out;
}

}  // namespace

SimulationResult simulate_layer(const SramImage& image, std::span<const double> x, const EngineConfig& cfg,
                                NumericMode mode, Activation act) {
  cfg.validate();
  if (x.size() != image.cols) {
    throw std::invalid_argument("simulate_layer: input length " + std::to_string(x.size()) + " does not match " +
                                std::to_string(image.cols) + " columns");
  }
  const Schedule& sched = image.schedule;
  if (image.pes.size() != cfg.n_pe || sched.groups * sched.pes_per_group != cfg.n_pe) {
    throw std::invalid_argument("simulate_layer: image was planned for " + std::to_string(image.pes.size()) +
                                " PEs, config has " + std::to_string(cfg.n_pe));
  }
  if (mode == NumericMode::Fixed && !image.has_codebook) {
    throw std::invalid_argument("simulate_layer: fixed-point mode needs a codebook in the image");
  }
  for (const auto& pe : image.pes) {
    if (pe.block_rows.size() != sched.block_rows_per_pe) {
      throw std::invalid_argument("simulate_layer: PE image does not match its schedule");
    }
  }

  const FixedNumerics numerics = cfg.numerics();
  std::vector<std::int32_t> x_codes;
  if (mode == NumericMode::Fixed) x_codes = quantize_fixed(x, numerics.operand);

  std::vector<std::size_t> nz;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const bool nonzero = mode == NumericMode::Fixed ? x_codes[j] != 0 : x[j] != 0.0;
    if (nonzero) nz.push_back(j);
  }

  SimulationResult result;
  CycleReport& rep = result.report;
  rep.schedule_case = sched.case_id;
  rep.groups = sched.groups;
  rep.passes = sched.passes();
  rep.cycles_per_column = sched.cycles_per_column();
  rep.columns_processed = nz.size();
  rep.columns_skipped = image.cols_padded() - nz.size();
  rep.pe_macs.assign(cfg.n_pe, 0);

  // Timing, pass by pass.
  const std::size_t window = cfg.activations_per_cycle();
  const std::size_t windows = ceil_div(image.cols_padded(), window);
  const std::size_t rate = sched.groups;  // zero detector output per cycle
  const std::size_t merge_rounds = sched.groups > 1 ? std::bit_width(sched.groups - 1) : 0;
  const std::size_t p = image.block;
  const std::size_t layer_block_rows = image.layer_block_rows();
  std::vector<std::size_t> first_pass_group;
  std::size_t pass_start = 0;
  for (std::size_t pass = 0; pass < sched.passes(); ++pass) {
    const std::size_t pass_rows = sched.pass_block_rows[pass];
    const DispatchTiming timing =
        dispatch(nz, window, windows, rate, cfg.fifo_depth, sched.groups, sched.pass_cycles_per_column[pass]);
    if (pass == 0) first_pass_group = timing.group;

    std::size_t outputs = 0;
    for (std::size_t u = 0; u < sched.pes_per_group; ++u) {
      for (std::size_t e = pass_start; e < pass_start + pass_rows; ++e) {
        const std::size_t br = u + e * sched.pes_per_group;
        if (br < layer_block_rows) outputs += std::min(p, image.rows - br * p);
      }
    }
    std::vector<std::uint64_t> per_group(sched.groups, 0);
    for (const auto g : timing.group) ++per_group[g];
    for (std::size_t t = 0; t < cfg.n_pe; ++t) {
      rep.pe_macs[t] += per_group[image.pes[t].group] * pass_rows;
    }

    const std::uint64_t merge = nz.empty() ? 0 : merge_rounds * ceil_div(pass_rows * p, cfg.n_mul);
    const std::uint64_t writeback = ceil_div(outputs, window);
    rep.pipeline_fill += cfg.pipeline_stages;
    rep.compute_cycles += timing.busy;
    rep.stall_cycles += timing.end - timing.busy;
    rep.merge_cycles += merge;
    rep.writeback_cycles += writeback;
    rep.total_cycles += cfg.pipeline_stages + timing.end + merge + writeback;
    pass_start += pass_rows;
  }

  // Function: every dispatched column updates the rows the selector picks,
  // visiting columns in ascending order.
  const std::size_t rows_pad = image.layer_block_rows() * p;
  std::vector<double> acc_real(mode == NumericMode::Real ? rows_pad : 0, 0.0);
  std::vector<std::int64_t> acc_fixed(mode == NumericMode::Fixed ? rows_pad : 0, 0);
  for (std::size_t n = 0; n < nz.size(); ++n) {
    const std::size_t j = nz[n];
    const std::size_t group = first_pass_group[n];
    for (std::size_t t = group * sched.pes_per_group; t < (group + 1) * sched.pes_per_group; ++t) {
      const PeImage& pe = image.pes[t];
      for (std::size_t e = 0; e < pe.block_rows.size(); ++e) {
        if (pe.block_rows[e] >= layer_block_rows) continue;
        const std::size_t row = selector_row(image, t, j, e);
        if (row >= image.rows) continue;
        ++rep.useful_macs;
        const WeightLocation loc = locate_weight(image, j, e);
        const WeightSubBank& bank = pe.sub_banks[loc.sub_bank];
        const std::size_t at = loc.row * image.entries_per_row + loc.lane;
        if (mode == NumericMode::Real) {
          acc_real[row] += bank.reals[at] * x[j];
        } else {
          acc_fixed[row] = numerics.accumulate(acc_fixed[row], numerics.product(image.lut_codes[bank.tags[at]], x_codes[j]));
        }
      }
    }
  }

  result.y.resize(image.rows);
  if (mode == NumericMode::Real) {
    for (std::size_t i = 0; i < image.rows; ++i) result.y[i] = activate(act, acc_real[i]);
  } else {
    result.y_codes.resize(image.rows);
    for (std::size_t i = 0; i < image.rows; ++i) {
      result.y_codes[i] = numerics.activate(act, acc_fixed[i]);
      result.y[i] = dequantize(result.y_codes[i], numerics.operand);
    }
  }

  const double capacity = static_cast<double>(cfg.n_pe * cfg.n_mul) * static_cast<double>(rep.compute_cycles);
  rep.utilization = capacity > 0.0 ? static_cast<double>(rep.useful_macs) / capacity : 0.0;
  return result;
}

Throughput throughput_model(const EngineConfig& cfg, double weight_sparsity_factor,
                            double activation_sparsity_factor) {
  cfg.validate();
  if (!(weight_sparsity_factor >= 1.0) || !(activation_sparsity_factor >= 1.0)) {
    throw std::invalid_argument("throughput_model: sparsity factors must be >= 1");
  }
  Throughput t;
  t.raw_gops = static_cast<double>(cfg.n_pe * cfg.n_mul * 2) * cfg.clock_hz / 1e9;
  t.equivalent_tops = t.raw_gops * weight_sparsity_factor * activation_sparsity_factor / 1e3;
  return t;
}

SweepTable scalability_sweep(const std::string& name, const BpdMatrix& w, std::span<const double> x,
                             std::span<const std::size_t> pe_counts, const EngineConfig& cfg_template,
                             NumericMode mode) {
  if (pe_counts.empty()) throw std::invalid_argument("scalability_sweep: no PE counts given");
  Codebook codebook;
  if (mode == NumericMode::Fixed) codebook = build_codebook(w, cfg_template.weight_sharing_bits, 1);

  SweepTable table;
  table.workload = name;
  for (const auto n : pe_counts) {
    SweepRow row;
    row.n_pe = n;
    EngineConfig cfg = cfg_template;
    cfg.n_pe = n;
    try {
      const SramImage image = plan_layout(w, mode == NumericMode::Fixed ? &codebook : nullptr, cfg);
      const CycleReport rep = simulate_layer(image, x, cfg, mode).report;
      row.schedule_case = rep.schedule_case;
      row.total_cycles = rep.total_cycles;
      row.compute_cycles = rep.compute_cycles;
    } catch (const CapacityError&) {
      row.status = "capacity";
    }
    table.rows.push_back(row);
  }

  const SweepRow* base = nullptr;
  for (const auto& row : table.rows) {
    if (row.status == "ok" && (base == nullptr || row.n_pe < base->n_pe)) base = &row;
  }
  if (base == nullptr) return table;
  const double base_cycles = static_cast<double>(base->total_cycles);
  const double base_pes = static_cast<double>(base->n_pe);
  for (auto& row : table.rows) {
    if (row.status != "ok") continue;
    row.speedup = row.total_cycles > 0 ? base_cycles / static_cast<double>(row.total_cycles) : 1.0;
    row.efficiency = row.speedup / (static_cast<double>(row.n_pe) / base_pes);
    row.sublinear = row.efficiency < 0.9;
  }
  return table;
}

}  // namespace bpdnn
