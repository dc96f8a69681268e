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
#include <cmath>

#include "bpdnn/projection.hpp"
#include "bpdnn/train.hpp"
#include "oracles.hpp"

namespace bpdnn {
namespace {

// Loss J = sum_i r_i * a_i for fixed random r, so dJ/da = r.
double probe_loss(const BpdMatrix& w, std::span<const double> x, std::span<const double> r) {
  const auto a = matvec(w, x);
  double j = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) j += r[i] * a[i];
  return j;
}

void expect_close_fd(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1.0});
  EXPECT_LE(std::abs(analytic - numeric), 1e-5 * scale) << "analytic " << analytic << " numeric " << numeric;
}

TEST(GradFc, ZeroOutputGradientGivesZeroGradients) {
  Rng rng(1);
  const auto w = make_bpd(6, 9, 3, PermPolicy::random(2), InitPolicy::scaled_uniform(3));
  const auto g = grad_fc(w, oracle::random_vector(9, rng), std::vector<double>(6, 0.0));
  for (const double v : g.d_values) EXPECT_EQ(v, 0.0);
  for (const double v : g.d_input) EXPECT_EQ(v, 0.0);
}

TEST(GradFc, BlockOneIsDenseOuterProduct) {
  Rng rng(2);
  const auto w = make_bpd(3, 4, 1, PermPolicy::natural(), InitPolicy::scaled_uniform(3));
  const auto x = oracle::random_vector(4, rng);
  const auto ga = oracle::random_vector(3, rng);
  const auto g = grad_fc(w, x, ga);
  const DenseMatrix d = to_dense(w);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(g.d_values[w.slot_for_row(i, j)], ga[i] * x[j]);
  }
  for (std::size_t j = 0; j < 4; ++j) {
    double expect = 0.0;
    for (std::size_t i = 0; i < 3; ++i) expect += d(i, j) * ga[i];
    EXPECT_NEAR(g.d_input[j], expect, 1e-15);
  }
}

TEST(GradFc, MatchesFiniteDifferences) {
  Rng rng(3);
  constexpr double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 1 + rng.below(4);
    auto w = make_bpd(1 + rng.below(9), 1 + rng.below(9), p, PermPolicy::random(rng.next()),
                      InitPolicy::scaled_uniform(rng.next()));
    auto x = oracle::random_vector(w.cols(), rng);
    const auto r = oracle::random_vector(w.rows(), rng);
    const auto g = grad_fc(w, x, r);
    for (std::size_t s = 0; s < w.slot_count(); ++s) {
      if (w.is_padding(s)) {
        EXPECT_EQ(g.d_values[s], 0.0);
        continue;
      }
      const double saved = w.values()[s];
      w.values_mut()[s] = saved + h;
      const double up = probe_loss(w, x, r);
      w.values_mut()[s] = saved - h;
      const double down = probe_loss(w, x, r);
      w.values_mut()[s] = saved;
      expect_close_fd(g.d_values[s], (up - down) / (2 * h));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double saved = x[j];
      x[j] = saved + h;
      const double up = probe_loss(w, x, r);
      x[j] = saved - h;
      const double down = probe_loss(w, x, r);
      x[j] = saved;
      expect_close_fd(g.d_input[j], (up - down) / (2 * h));
    }
  }
}

TEST(GradFc, LengthMismatchThrows) {
  const auto w = make_bpd(4, 4, 2, PermPolicy::natural(), InitPolicy::zeros());
  EXPECT_THROW(grad_fc(w, std::vector<double>(3), std::vector<double>(4)), std::invalid_argument);
  EXPECT_THROW(grad_fc(w, std::vector<double>(4), std::vector<double>(5)), std::invalid_argument);
}

double probe_loss(const BpdConvTensor& f, const Tensor3& x, const Tensor3& r) {
  const Tensor3 y = conv_forward(f, x);
  double j = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) j += r.data[n] * y.data[n];
  return j;
}

TEST(GradConv, MatchesFiniteDifferences) {
  Rng rng(4);
  constexpr double h = 1e-6;
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t p = 1 + rng.below(3);
    auto f = make_bpd_conv(1 + rng.below(5), 1 + rng.below(5), 1 + rng.below(3), 1 + rng.below(3), p,
                           PermPolicy::random(rng.next()), InitPolicy::scaled_uniform(rng.next()));
    Tensor3 x(f.in_channels(), 1 + rng.below(4), 1 + rng.below(4));
    x.data = oracle::random_vector(x.size(), rng);
    Tensor3 r(f.out_channels(), conv_output_extent(x.width, f.kernel_w()), conv_output_extent(x.height, f.kernel_h()));
    r.data = oracle::random_vector(r.size(), rng);
    const ConvGradients g = grad_conv(f, x, r);
    for (std::size_t n = 0; n < f.values().size(); ++n) {
      if (f.is_padding(n / f.kernel_size())) {
        EXPECT_EQ(g.d_values[n], 0.0);
        continue;
      }
      const double saved = f.values()[n];
      f.values_mut()[n] = saved + h;
      const double up = probe_loss(f, x, r);
      f.values_mut()[n] = saved - h;
      const double down = probe_loss(f, x, r);
      f.values_mut()[n] = saved;
      expect_close_fd(g.d_values[n], (up - down) / (2 * h));
    }
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double saved = x.data[n];
      x.data[n] = saved + h;
      const double up = probe_loss(f, x, r);
      x.data[n] = saved - h;
      const double down = probe_loss(f, x, r);
      x.data[n] = saved;
      expect_close_fd(g.d_input.data[n], (up - down) / (2 * h));
    }
  }
}

TEST(SgdUpdate, AppliesStepToStoredValues) {
  BpdMatrix w(2, 2, 1, {0, 0, 0, 0}, {1, 2, 3, 4});
  sgd_update(w, std::vector<double>{1, 1, 1, 1}, 0.5);
  EXPECT_EQ(std::vector<double>(w.values().begin(), w.values().end()), (std::vector<double>{0.5, 1.5, 2.5, 3.5}));
}

TEST(SgdUpdate, ZeroRateLeavesWeightsUnchanged) {
  auto w = make_bpd(5, 7, 2, PermPolicy::random(1), InitPolicy::scaled_uniform(2));
  const auto before = w;
  sgd_update(w, std::vector<double>(w.slot_count(), 3.0), 0.0);
  EXPECT_EQ(w, before);
}

TEST(SgdUpdate, PaddingAndPermutationsSurvive) {
  auto w = make_bpd(5, 7, 3, PermPolicy::random(9), InitPolicy::scaled_uniform(2));
  const std::vector<std::uint32_t> perms(w.perms().begin(), w.perms().end());
  sgd_update(w, std::vector<double>(w.slot_count(), 1.0), 0.1);
  EXPECT_TRUE(structure_intact(w));
  EXPECT_EQ(std::vector<std::uint32_t>(w.perms().begin(), w.perms().end()), perms);
  EXPECT_THROW(sgd_update(w, std::vector<double>(3), 0.1), std::invalid_argument);
}

TEST(Training, PreservesStructureOverEpochs) {
  const Dataset data = make_blobs(30, 3, 12, 3.0, 0.5, 5);
  const std::vector<std::size_t> widths{12, 10, 3};
  const std::vector<std::size_t> blocks{4, 2};
  Model model = make_mlp(widths, blocks, Activation::Relu, PermPolicy::random(7), 11);
  std::vector<std::vector<std::uint32_t>> perms;
  for (const auto& l : model.layers) {
    const auto& w = std::get<FcLayer>(l.op).weights;
    perms.emplace_back(w.perms().begin(), w.perms().end());
  }
  TrainConfig cfg;
  cfg.epochs = 5;
  train(model, data, cfg);
  for (std::size_t n = 0; n < model.layers.size(); ++n) {
    const auto& w = std::get<FcLayer>(model.layers[n].op).weights;
    EXPECT_TRUE(structure_intact(w));
    EXPECT_EQ(std::vector<std::uint32_t>(w.perms().begin(), w.perms().end()), perms[n]);
  }
}

TEST(Training, DeterministicForSeed) {
  const Dataset data = make_blobs(20, 3, 8, 3.0, 0.5, 2);
  const std::vector<std::size_t> widths{8, 8, 3};
  const std::vector<std::size_t> blocks{2, 1};
  TrainConfig cfg;
  cfg.epochs = 3;
  Model a = make_mlp(widths, blocks, Activation::Relu, PermPolicy::random(3), 4);
  Model b = make_mlp(widths, blocks, Activation::Relu, PermPolicy::random(3), 4);
  const auto ha = train(a, data, cfg);
  const auto hb = train(b, data, cfg);
  for (std::size_t n = 0; n < a.layers.size(); ++n) {
    EXPECT_EQ(std::get<FcLayer>(a.layers[n].op).weights, std::get<FcLayer>(b.layers[n].op).weights);
  }
  ASSERT_EQ(ha.size(), hb.size());
  for (std::size_t e = 0; e < ha.size(); ++e) EXPECT_EQ(ha[e].loss, hb[e].loss);
}

// Plain dense two-layer network trained with the same batching, used as an
// independent reference for the p = 1 case.
struct DenseNet {
  std::vector<DenseMatrix> w;
  std::vector<std::vector<double>> b;
};

std::vector<std::vector<double>> dense_forward(const DenseNet& net, std::span<const double> x) {
  std::vector<std::vector<double>> acts{std::vector<double>(x.begin(), x.end())};
  for (std::size_t n = 0; n < net.w.size(); ++n) {
    std::vector<double> a = oracle::dense_matvec(net.w[n], acts.back());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] += net.b[n][i];
      if (n + 1 < net.w.size()) a[i] = std::max(a[i], 0.0);
    }
    acts.push_back(std::move(a));
  }
  return acts;
}

void dense_epoch(DenseNet& net, const Dataset& data, const TrainConfig& cfg, std::size_t epoch) {
  const auto order = epoch_order(data.size(), cfg.seed, epoch);
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    std::vector<DenseMatrix> gw;
    std::vector<std::vector<double>> gb;
    for (const auto& m : net.w) gw.emplace_back(m.rows, m.cols);
    for (const auto& v : net.b) gb.emplace_back(v.size(), 0.0);
    for (std::size_t s = start; s < end; ++s) {
      const Sample& sample = data.samples[order[s]];
      const auto acts = dense_forward(net, sample.features);
      // Softmax cross-entropy gradient.
      const auto& z = acts.back();
      const double top = *std::max_element(z.begin(), z.end());
      double denom = 0.0;
      for (const double v : z) denom += std::exp(v - top);
      std::vector<double> delta(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) delta[i] = std::exp(z[i] - top) / denom - (i == sample.label);
      for (std::size_t n = net.w.size(); n-- > 0;) {
        const auto& in = acts[n];
        for (std::size_t i = 0; i < net.w[n].rows; ++i) {
          gb[n][i] += delta[i];
          for (std::size_t j = 0; j < net.w[n].cols; ++j) gw[n](i, j) += delta[i] * in[j];
        }
        if (n == 0) break;
        std::vector<double> next(net.w[n].cols, 0.0);
        for (std::size_t j = 0; j < net.w[n].cols; ++j) {
          for (std::size_t i = 0; i < net.w[n].rows; ++i) next[j] += net.w[n](i, j) * delta[i];
          if (in[j] <= 0.0) next[j] = 0.0;
        }
        delta = std::move(next);
      }
    }
    const double step = cfg.learning_rate / static_cast<double>(end - start);
    for (std::size_t n = 0; n < net.w.size(); ++n) {
      for (std::size_t k = 0; k < gw[n].data.size(); ++k) net.w[n].data[k] -= step * gw[n].data[k];
      for (std::size_t k = 0; k < gb[n].size(); ++k) net.b[n][k] -= step * gb[n][k];
    }
  }
}

TEST(Training, BlockOneMatchesDenseReference) {
  const Dataset data = make_blobs(15, 3, 6, 3.0, 0.5, 8);
  const std::vector<std::size_t> widths{6, 7, 3};
  const std::vector<std::size_t> blocks{1, 1};
  Model model = make_mlp(widths, blocks, Activation::Relu, PermPolicy::natural(), 21);
  DenseNet net;
  for (const auto& l : model.layers) {
    const auto& fc = std::get<FcLayer>(l.op);
    net.w.push_back(oracle::expand(fc.weights));
    net.b.push_back(fc.bias);
  }
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.1;
  for (std::size_t e = 0; e < 4; ++e) {
    train_epoch(model, data, cfg, e);
    dense_epoch(net, data, cfg, e);
  }
  for (std::size_t n = 0; n < model.layers.size(); ++n) {
    const auto& fc = std::get<FcLayer>(model.layers[n].op);
    EXPECT_LE(oracle::relative_error(to_dense(fc.weights).data, net.w[n].data), 1e-12);
    EXPECT_LE(oracle::relative_error(fc.bias, net.b[n]), 1e-12);
  }
}

TEST(Training, LearnsLinearlySeparableData) {
  const Dataset data = make_linearly_separable(400, 16, 0.1, 3);
  const std::vector<std::size_t> widths{16, 16, 2};
  const std::vector<std::size_t> blocks{2, 2};
  Model model = make_mlp(widths, blocks, Activation::Relu, PermPolicy::random(5), 6);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  double best = 0.0;
  for (std::size_t e = 0; e < 50 && best < 0.95; ++e) {
    train_epoch(model, data, cfg, e);
    best = std::max(best, evaluate(model, data, cfg.loss).accuracy);
  }
  EXPECT_GE(best, 0.95);
}

TEST(Training, EmptyDatasetThrows) {
  const std::vector<std::size_t> widths{4, 2};
  const std::vector<std::size_t> blocks{2};
  Model model = make_mlp(widths, blocks, Activation::Relu, PermPolicy::natural(), 1);
  EXPECT_THROW(train_epoch(model, Dataset{}, TrainConfig{}), std::invalid_argument);
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Training, EpochOrderIsPermutation) {
  auto order = epoch_order(50, 3, 2);
  EXPECT_EQ(order, epoch_order(50, 3, 2));
  EXPECT_NE(order, epoch_order(50, 3, 3));
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
}

TEST(Conversion, BlockOneKeepsModel) {
  const Dataset data = make_blobs(10, 3, 6, 3.0, 0.5, 4);
  const std::vector<std::size_t> widths{6, 5, 3};
  const std::vector<std::size_t> dense_blocks{1, 1};
  const Model dense = make_mlp(widths, dense_blocks, Activation::Relu, PermPolicy::natural(), 9);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto result = convert_pretrained(dense, dense_blocks, cfg, data, data);
  for (std::size_t n = 0; n < dense.layers.size(); ++n) {
    EXPECT_EQ(to_dense(std::get<FcLayer>(result.model.layers[n].op).weights),
              to_dense(std::get<FcLayer>(dense.layers[n].op).weights));
    EXPECT_EQ(result.trace.residual_norms[n], 0.0);
  }
  EXPECT_EQ(result.trace.projected.accuracy, result.trace.dense.accuracy);
}

TEST(Conversion, AlreadyStructuredModelIsLossless) {
  const Dataset data = make_blobs(10, 3, 8, 3.0, 0.5, 4);
  const std::vector<std::size_t> widths{8, 8, 3};
  const std::vector<std::size_t> blocks{2, 1};
  const Model src = make_mlp(widths, blocks, Activation::Relu, PermPolicy::random(2), 9);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto result = convert_pretrained(src, blocks, cfg, data, data);
  for (std::size_t n = 0; n < src.layers.size(); ++n) {
    EXPECT_EQ(to_dense(std::get<FcLayer>(result.model.layers[n].op).weights),
              to_dense(std::get<FcLayer>(src.layers[n].op).weights));
  }
  EXPECT_EQ(result.trace.projected.loss, result.trace.dense.loss);
  const std::vector<std::size_t> wrong{2};
  EXPECT_THROW(convert_pretrained(src, wrong, cfg, data, data), std::invalid_argument);
}

TEST(Conversion, FineTuneKeepsStructure) {
  const Dataset data = make_blobs(20, 3, 8, 3.0, 0.5, 4);
  const std::vector<std::size_t> widths{8, 8, 3};
  const std::vector<std::size_t> dense_blocks{1, 1};
  Model dense = make_mlp(widths, dense_blocks, Activation::Relu, PermPolicy::natural(), 9);
  TrainConfig cfg;
  cfg.epochs = 3;
  train(dense, data, cfg);
  const std::vector<std::size_t> blocks{4, 2};
  const auto result = convert_pretrained(dense, blocks, cfg, data, data);
  EXPECT_EQ(result.trace.fine_tune.size(), 3u);
  for (const auto& l : result.model.layers) {
    const auto& w = std::get<FcLayer>(l.op).weights;
    EXPECT_TRUE(structure_intact(w));
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < w.cols(); ++j) {
        const std::size_t g = j / w.block();
        if (w.col_for_row(i, g) != j) EXPECT_EQ(entry_at(w, i, j), 0.0);
      }
    }
  }
}

}  // namespace
}  // namespace bpdnn
