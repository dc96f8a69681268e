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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "bpdnn/engine.hpp"
#include "oracles.hpp"

namespace bpdnn {
namespace {

// Two PEs with one multiplier and four accumulators each.
EngineConfig tiny_config() {
  EngineConfig cfg;
  cfg.n_pe = 2;
  cfg.n_mul = 1;
  cfg.n_acc = 4;
  return cfg;
}

std::vector<double> sparse_input(std::size_t n, double density, Rng& rng) {
  std::vector<double> x(n, 0.0);
  for (auto& v : x) {
    if (rng.bernoulli(density)) v = rng.uniform(0.1, 1.0);
  }
  return x;
}

std::vector<std::int32_t> codebook_weight_codes(const Codebook& cb, const EngineConfig& cfg) {
  const auto lut = lut_codes(cb, cfg.numerics().operand);
  std::vector<std::int32_t> codes;
  for (const auto t : cb.tags) codes.push_back(lut[t]);
  return codes;
}

TEST(Schedule, CaseOneExample) {
  EngineConfig cfg;
  cfg.n_pe = 8;
  cfg.n_acc = 256;
  // 2048 rows over 8 PEs: N_ROWPE 256.
  const Schedule s = select_schedule(cfg, 2048, 8);
  EXPECT_EQ(s.rows_per_pe, 256u);
  EXPECT_EQ(s.case_id, 1);
  EXPECT_EQ(s.cycles_per_column(), 4u);
  EXPECT_EQ(s.passes(), 1u);
}

TEST(Schedule, TwoPeEightByEightIsCaseOne) {
  const Schedule s = select_schedule(tiny_config(), 8, 2);
  EXPECT_EQ(s.case_id, 1);
  EXPECT_EQ(s.rows_per_pe, 4u);
  EXPECT_EQ(s.cycles_per_column(), 2u);
}

TEST(Schedule, BlockThreeNeedsSeveralPasses) {
  const Schedule s = select_schedule(tiny_config(), 9, 3);
  EXPECT_EQ(s.case_id, 2);
  EXPECT_EQ(s.rows_per_pe, 6u);
  EXPECT_GT(s.passes(), 1u);
  std::size_t covered = 0;
  for (const auto n : s.pass_block_rows) covered += n;
  EXPECT_EQ(covered, s.block_rows_per_pe);
}

TEST(Schedule, CaseTwoPassesFitAccumulators) {
  EngineConfig cfg;
  // Alex-FC6 shape on the default engine: 13 block rows of 10 per PE.
  const Schedule s = select_schedule(cfg, 4096, 10);
  EXPECT_EQ(s.case_id, 2);
  for (const auto n : s.pass_block_rows) EXPECT_LE(n * 10, cfg.n_acc);
}

TEST(Schedule, CaseThreeWhenRowsPerPeAreFew) {
  EngineConfig cfg;
  cfg.n_pe = 64;
  const Schedule s = select_schedule(cfg, 256, 4);  // 64 block rows, one per PE
  EXPECT_EQ(s.case_id, 3);
  EXPECT_LT(s.rows_per_pe, 4u * cfg.n_mul);
  EXPECT_EQ(s.groups * s.pes_per_group, cfg.n_pe);
}

TEST(Schedule, RejectsUnusableConfig) {
  EngineConfig cfg;
  cfg.n_acc = 4;
  cfg.n_mul = 4;
  EXPECT_THROW(select_schedule(cfg, 64, 8), std::invalid_argument);  // 4 accumulators, blocks of 8
  EngineConfig odd;
  odd.n_acc = 100;
  EXPECT_THROW(odd.validate(), std::invalid_argument);
  EngineConfig bank;
  bank.act_bank_width = 40;
  EXPECT_THROW(bank.validate(), std::invalid_argument);
  EXPECT_THROW(select_schedule(EngineConfig{}, 0, 2), std::invalid_argument);
}

TEST(Layout, BlockRowsDealtRoundRobin) {
  const auto w = make_bpd(8, 8, 2, PermPolicy::random(1), InitPolicy::scaled_uniform(2));
  const SramImage image = plan_layout(w, nullptr, tiny_config());
  ASSERT_EQ(image.pes.size(), 2u);
  EXPECT_EQ(image.pes[0].block_rows, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(image.pes[1].block_rows, (std::vector<std::size_t>{1, 3}));

  EngineConfig one = tiny_config();
  one.n_pe = 1;
  one.n_acc = 8;
  const SramImage all = plan_layout(w, nullptr, one);
  EXPECT_EQ(all.pes[0].block_rows, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Layout, StoredWeightsMatchMatrix) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    EngineConfig cfg;
    cfg.n_pe = 1 + rng.below(8);
    const std::size_t p = 1 + rng.below(8);
    const auto w = make_bpd(1 + rng.below(64), 1 + rng.below(64), p, PermPolicy::random(rng.next()),
                            InitPolicy::scaled_uniform(rng.next()));
    const SramImage image = plan_layout(w, nullptr, cfg);
    std::multiset<double> seen;
    for (std::size_t t = 0; t < cfg.n_pe; ++t) {
      const PeImage& pe = image.pes[t];
      for (std::size_t j = 0; j < image.cols_padded(); ++j) {
        for (std::size_t e = 0; e < pe.block_rows.size(); ++e) {
          const WeightLocation loc = locate_weight(image, j, e);
          const double v = pe.sub_banks[loc.sub_bank].reals[loc.row * image.entries_per_row + loc.lane];
          const std::size_t br = pe.block_rows[e];
          if (br >= image.layer_block_rows()) {
            EXPECT_EQ(v, 0.0);
            continue;
          }
          // The selector's row must be the row that holds column j in block row br.
          const std::size_t row = selector_row(image, t, j, e);
          EXPECT_EQ(row, w.row_for_col(j, br));
          const double expect = row < w.rows() && j < w.cols() ? entry_at(w, row, j) : 0.0;
          EXPECT_EQ(v, expect);
        }
      }
    }
  }
}

TEST(Layout, SelectorMatchesStoredPermutation) {
  const std::size_t p = 5;
  const auto w = make_bpd(40, 35, p, PermPolicy::random(4), InitPolicy::scaled_uniform(2));
  EngineConfig cfg;
  cfg.n_pe = 3;
  const SramImage image = plan_layout(w, nullptr, cfg);
  for (std::size_t t = 0; t < cfg.n_pe; ++t) {
    for (std::size_t e = 0; e < image.pes[t].block_rows.size(); ++e) {
      const std::size_t br = image.pes[t].block_rows[e];
      if (br >= w.block_rows()) continue;
      for (std::size_t j = 0; j < w.cols_padded(); ++j) {
        const std::size_t k = w.perm(br, j / p);
        // Position rule: row offset c satisfies (c + k) mod p == j mod p.
        const std::size_t c = selector_row(image, t, j, e) - br * p;
        EXPECT_EQ((c + k) % p, j % p);
      }
    }
  }
}

TEST(Layout, CapacityLimit) {
  EngineConfig cfg;
  const auto fits = make_bpd(2048, 32768, 8, PermPolicy::natural(), InitPolicy::zeros());
  EXPECT_NO_THROW(plan_layout(fits, nullptr, cfg));
  const auto over = make_bpd(2048, 32776, 8, PermPolicy::natural(), InitPolicy::zeros());
  try {
    plan_layout(over, nullptr, cfg);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("sub-bank"), std::string::npos);
  }
  cfg.enforce_capacity = false;
  EXPECT_NO_THROW(plan_layout(over, nullptr, cfg));
}

TEST(Layout, CodebookMismatchThrows) {
  const auto w = make_bpd(8, 8, 2, PermPolicy::natural(), InitPolicy::scaled_uniform(1));
  Codebook cb = build_codebook(w, 4, 1);
  cb.tags.pop_back();
  EXPECT_THROW(plan_layout(w, &cb, EngineConfig{}), std::invalid_argument);
}

TEST(Simulate, ZeroInputCostsNothing) {
  const auto w = make_bpd(16, 16, 4, PermPolicy::random(2), InitPolicy::scaled_uniform(1));
  EngineConfig cfg;
  cfg.n_pe = 2;
  const SramImage image = plan_layout(w, nullptr, cfg);
  const auto r = simulate_layer(image, std::vector<double>(16, 0.0), cfg, NumericMode::Real, Activation::Tanh);
  EXPECT_EQ(r.report.compute_cycles, 0u);
  EXPECT_EQ(r.report.columns_processed, 0u);
  EXPECT_EQ(r.report.columns_skipped, 16u);
  for (const double v : r.y) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, TwoPeEightByEightDenseInput) {
  const auto w = make_bpd(8, 8, 2, PermPolicy::random(7), InitPolicy::scaled_uniform(1));
  const EngineConfig cfg = tiny_config();
  const SramImage image = plan_layout(w, nullptr, cfg);
  const auto r = simulate_layer(image, std::vector<double>(8, 1.0), cfg, NumericMode::Real);
  EXPECT_EQ(r.report.cycles_per_column, 2u);
  EXPECT_EQ(r.report.compute_cycles, 16u);
  EXPECT_EQ(r.report.pipeline_fill, cfg.pipeline_stages);
  EXPECT_GE(r.report.total_cycles, 16u + cfg.pipeline_stages);
  EXPECT_EQ(r.report.columns_processed + r.report.columns_skipped, 8u);
}

TEST(Simulate, RealModeMatchesMatvec) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    EngineConfig cfg;
    cfg.n_pe = 1 + rng.below(16);
    const std::size_t p = 1 + rng.below(8);
    const auto w = make_bpd(1 + rng.below(64), 1 + rng.below(64), p, PermPolicy::random(rng.next()),
                            InitPolicy::scaled_uniform(rng.next()));
    const auto x = sparse_input(w.cols(), rng.uniform(), rng);
    const SramImage image = plan_layout(w, nullptr, cfg);
    const auto r = simulate_layer(image, x, cfg, NumericMode::Real);
    EXPECT_LE(oracle::relative_error(r.y, oracle::dense_matvec(oracle::expand(w), x)), 1e-12);
  }
}

TEST(Simulate, FixedModeIsBitExact) {
  Rng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    EngineConfig cfg;
    cfg.n_pe = 1 + rng.below(16);
    const std::size_t p = 1 + rng.below(8);
    const auto w = make_bpd(1 + rng.below(64), 1 + rng.below(64), p, PermPolicy::random(rng.next()),
                            InitPolicy::scaled_uniform(rng.next()));
    const Codebook cb = build_codebook(w, cfg.weight_sharing_bits, rng.next());
    const auto x = sparse_input(w.cols(), rng.uniform(), rng);
    const SramImage image = plan_layout(w, &cb, cfg);
    const Activation act = trial % 2 == 0 ? Activation::Relu : Activation::Identity;
    const auto r = simulate_layer(image, x, cfg, NumericMode::Fixed, act);
    const auto ref = fixed_matvec_reference(w, codebook_weight_codes(cb, cfg), quantize_fixed(x, cfg.numerics().operand),
                                            act, cfg.numerics());
    EXPECT_EQ(r.y_codes, ref);
  }
}

TEST(Simulate, FixedModeNeedsCodebook) {
  const auto w = make_bpd(8, 8, 2, PermPolicy::natural(), InitPolicy::scaled_uniform(1));
  const EngineConfig cfg = tiny_config();
  const SramImage image = plan_layout(w, nullptr, cfg);
  EXPECT_THROW(simulate_layer(image, std::vector<double>(8, 1.0), cfg, NumericMode::Fixed), std::invalid_argument);
  EXPECT_THROW(simulate_layer(image, std::vector<double>(7, 1.0), cfg, NumericMode::Real), std::invalid_argument);
  EngineConfig other = cfg;
  other.n_pe = 4;
  EXPECT_THROW(simulate_layer(image, std::vector<double>(8, 1.0), other, NumericMode::Real), std::invalid_argument);
}

TEST(Simulate, LoadIsBalanced) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    EngineConfig cfg;
    cfg.n_pe = 1 + rng.below(16);
    const auto w = make_bpd(1 + rng.below(64), 1 + rng.below(64), 1 + rng.below(8), PermPolicy::random(rng.next()),
                            InitPolicy::scaled_uniform(rng.next()));
    const SramImage image = plan_layout(w, nullptr, cfg);
    if (image.schedule.groups != 1) continue;  // groups may split an odd column count unevenly
    const auto r = simulate_layer(image, sparse_input(w.cols(), 0.5, rng), cfg, NumericMode::Real);
    for (const auto m : r.report.pe_macs) EXPECT_EQ(m, r.report.pe_macs.front());
  }
}

TEST(Simulate, GroupsDifferByAtMostOneColumn) {
  EngineConfig cfg;
  cfg.n_pe = 64;
  const auto w = make_bpd(256, 256, 4, PermPolicy::random(3), InitPolicy::scaled_uniform(1));
  const SramImage image = plan_layout(w, nullptr, cfg);
  ASSERT_GT(image.schedule.groups, 1u);
  Rng rng(9);
  const auto r = simulate_layer(image, sparse_input(256, 0.6, rng), cfg, NumericMode::Real);
  const auto [lo, hi] = std::minmax_element(r.report.pe_macs.begin(), r.report.pe_macs.end());
  EXPECT_LE(*hi - *lo, image.schedule.block_rows_per_pe);
}

TEST(Simulate, ZeroSkippingIsSound) {
  Rng rng(10);
  const auto w = make_bpd(40, 60, 4, PermPolicy::random(1), InitPolicy::scaled_uniform(2));
  EngineConfig cfg;
  cfg.n_pe = 4;
  const SramImage image = plan_layout(w, nullptr, cfg);
  auto x = sparse_input(60, 0.4, rng);
  const auto a = simulate_layer(image, x, cfg, NumericMode::Real);
  EXPECT_LE(oracle::relative_error(a.y, matvec(w, x)), 1e-12);
  // Same nonzero count at different positions: same compute cycles.
  std::vector<double> shifted(60, 0.0);
  std::size_t nnz = 0;
  for (const double v : x) nnz += v != 0.0;
  for (std::size_t j = 0; j < nnz; ++j) shifted[59 - 2 * j % 60] = 0.5;
  const auto b = simulate_layer(image, shifted, cfg, NumericMode::Real);
  EXPECT_EQ(a.report.compute_cycles, b.report.compute_cycles);
  EXPECT_EQ(a.report.columns_processed, nnz);
}

TEST(Simulate, CaseOneCyclesFollowFormula) {
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    EngineConfig cfg;
    cfg.n_pe = std::size_t{1} << rng.below(4);
    cfg.n_mul = std::size_t{1} << rng.below(3);
    cfg.n_acc = cfg.n_mul * 64;
    const std::size_t p = 1 + rng.below(6);
    const auto w = make_bpd(p * cfg.n_pe * (1 + rng.below(6)), 1 + rng.below(64), p, PermPolicy::random(rng.next()),
                            InitPolicy::scaled_uniform(rng.next()));
    const Schedule s = select_schedule(cfg, w.rows(), p);
    if (s.case_id != 1) continue;
    const auto x = sparse_input(w.cols(), rng.uniform(), rng);
    const auto r = simulate_layer(plan_layout(w, nullptr, cfg), x, cfg, NumericMode::Real);
    std::size_t nnz = 0;
    for (const double v : x) nnz += v != 0.0;
    const std::size_t lane = p * cfg.n_mul;
    EXPECT_EQ(r.report.compute_cycles, nnz * ((s.rows_per_pe + lane - 1) / lane));
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Simulate, Deterministic) {
  Rng rng(12);
  const auto w = make_bpd(100, 80, 4, PermPolicy::random(1), InitPolicy::scaled_uniform(2));
  const Codebook cb = build_codebook(w, 4, 3);
  EngineConfig cfg;
  cfg.n_pe = 8;
  const auto x = sparse_input(80, 0.5, rng);
  const SramImage image = plan_layout(w, &cb, cfg);
  const auto a = simulate_layer(image, x, cfg, NumericMode::Fixed);
  const auto b = simulate_layer(plan_layout(w, &cb, cfg), x, cfg, NumericMode::Fixed);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.y_codes, b.y_codes);
}

TEST(Throughput, DefaultDesignPoint) {
  const EngineConfig cfg;
  const Throughput raw = throughput_model(cfg, 1, 1);
  EXPECT_DOUBLE_EQ(raw.raw_gops, 614.4);
  EXPECT_DOUBLE_EQ(raw.equivalent_tops * 1e3, raw.raw_gops);
  EXPECT_NEAR(throughput_model(cfg, 8, 3).equivalent_tops, 14.7456, 1e-9);
  EXPECT_THROW(throughput_model(cfg, 0.5, 1), std::invalid_argument);
}

TEST(Sweep, SingleCountIsBaseline) {
  const auto w = make_bpd(64, 64, 4, PermPolicy::random(1), InitPolicy::scaled_uniform(1));
  const std::vector<double> x(64, 1.0);
  const std::vector<std::size_t> counts{4};
  const SweepTable t = scalability_sweep("tiny", w, x, counts, EngineConfig{});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].speedup, 1.0);
  EXPECT_FALSE(t.rows[0].sublinear);
  EXPECT_THROW(scalability_sweep("tiny", w, x, std::vector<std::size_t>{}, EngineConfig{}), std::invalid_argument);
}

TEST(Sweep, TinyLayerFlagsSublinearRegion) {
  const auto w = make_bpd(64, 64, 4, PermPolicy::random(1), InitPolicy::scaled_uniform(1));
  const std::vector<double> x(64, 1.0);
  const std::vector<std::size_t> counts{1, 2, 4, 8, 16};
  const SweepTable t = scalability_sweep("tiny", w, x, counts, EngineConfig{});
  bool flagged = false;
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.status, "ok");
    if (row.sublinear) {
      flagged = true;
      EXPECT_EQ(row.schedule_case, 3);
    }
  }
  EXPECT_TRUE(flagged);
}

TEST(Sweep, CapacityRowsAreMarked) {
  EngineConfig cfg;
  cfg.weight_subbanks = 1;
  cfg.weight_sram_depth = 16;
  // 16 columns: one PE needs 2 rows per column, 16 PEs need 1.
  const auto w = make_bpd(32, 16, 2, PermPolicy::natural(), InitPolicy::scaled_uniform(1));
  const std::vector<std::size_t> counts{1, 16};
  const SweepTable t = scalability_sweep("small-sram", w, std::vector<double>(16, 1.0), counts, cfg);
  EXPECT_EQ(t.rows[0].status, "capacity");
  EXPECT_EQ(t.rows[1].status, "ok");
  EXPECT_EQ(t.rows[1].speedup, 1.0);
}

}  // namespace
}  // namespace bpdnn
