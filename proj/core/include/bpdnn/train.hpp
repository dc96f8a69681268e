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
#include <variant>
#include <vector>

#include "bpdnn/activation.hpp"
#include "bpdnn/bpd_matrix.hpp"
#include "bpdnn/conv.hpp"
#include "bpdnn/dataset.hpp"

namespace bpdnn {

enum class Loss { SoftmaxCrossEntropy, MeanSquaredError };

// Gradients of one FC layer. d_values is aligned with BpdMatrix::values();
// padding slots are exactly zero.
struct LayerGradients {
  std::vector<double> d_values;
  std::vector<double> d_input;
};

struct ConvGradients {
  std::vector<double> d_values;  // aligned with BpdConvTensor::values()
  Tensor3 d_input;
};

/// Backward pass of a = W x for a block-permuted diagonal W.
///
/// Only stored weights receive a gradient: dJ/dq[l*p+c] = x_j * dJ/da_i for
/// the unique (i, j) of that slot. The input gradient walks each column's
/// block rows, dJ/dx_j = sum_g w_ij dJ/da_i with i = (j + p - k_l) mod p + g*p.
/// Throws std::invalid_argument on length mismatches.
LayerGradients grad_fc(const BpdMatrix& w, std::span<const double> x, std::span<const double> grad_output);

// Kernel gradient on stored (i, j) pairs only:
// dF(i,j,w,h) = sum_{x,y} X(j, x-w, y-h) * gY(i, x, y). Input gradient
// dX(j,u,v) = sum over connected output channels of F(i,j,w,h) * gY(i,u+w,v+h).
ConvGradients grad_conv(const BpdConvTensor& f, const Tensor3& x, const Tensor3& grad_output);

// values -= learning_rate * d_values on non-padding slots; permutations are
// never touched.
void sgd_update(BpdMatrix& w, std::span<const double> d_values, double learning_rate);
void sgd_update(BpdMatrix& w, const LayerGradients& g, double learning_rate);
void sgd_update(BpdConvTensor& f, std::span<const double> d_values, double learning_rate);

struct FcLayer {
  BpdMatrix weights;
  std::vector<double> bias;  // one per output row, kept dense
};

struct ConvLayer {
  BpdConvTensor kernels;
  std::vector<double> bias;  // one per output channel
  std::size_t in_width = 0;
  std::size_t in_height = 0;

  std::size_t out_width() const { return conv_output_extent(in_width, kernels.kernel_w()); }
  std::size_t out_height() const { return conv_output_extent(in_height, kernels.kernel_h()); }
};

struct Layer {
  std::variant<FcLayer, ConvLayer> op;
  Activation activation = Activation::Identity;

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t block() const;
};

// Feed-forward stack. CONV layers read and write flattened [c][x][y] maps.
struct Model {
  std::vector<Layer> layers;

  std::size_t input_size() const { return layers.empty() ? 0 : layers.front().input_size(); }
  std::size_t output_size() const { return layers.empty() ? 0 : layers.back().output_size(); }
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  Activation activation = Activation::Relu;  // hidden-layer activation used by model builders
  Loss loss = Loss::SoftmaxCrossEntropy;

  // Throws std::invalid_argument unless learning_rate > 0 and batch_size >= 1.
  // A zero learning rate is accepted only with allow_zero_rate.
  void validate(bool allow_zero_rate = false) const;
};

struct EpochMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Fully-connected stack: widths = {inputs, hidden..., outputs}; blocks has one
// entry per layer. Hidden layers use `hidden`, the last layer is linear.
Model make_mlp(std::span<const std::size_t> widths, std::span<const std::size_t> blocks, Activation hidden,
               PermPolicy perms, std::uint64_t seed);

double activate(Activation act, double a);

std::vector<double> forward(const Model& model, std::span<const double> input);

// Loss value and gradient with respect to the logits.
double loss_and_gradient(Loss loss, std::span<const double> logits, std::size_t label, std::vector<double>* grad);

EpochMetrics evaluate(const Model& model, const Dataset& data, Loss loss);

// Visit order for one epoch: a seeded shuffle keyed by (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t sample_count, std::uint64_t seed, std::size_t epoch);

/// One pass of mini-batch SGD in epoch_order(). Per-sample gradients are
/// summed in sample order, averaged over the batch, then applied. Returns the
/// mean loss and accuracy observed before each batch's update. Throws
/// std::invalid_argument for an empty dataset or invalid config.
EpochMetrics train_epoch(Model& model, const Dataset& data, const TrainConfig& cfg, std::size_t epoch = 0);

std::vector<EpochMetrics> train(Model& model, const Dataset& data, const TrainConfig& cfg);

struct ConversionTrace {
  EpochMetrics dense;                      // pre-trained model on eval set
  EpochMetrics projected;                  // right after projection
  std::vector<EpochMetrics> fine_tune;     // eval metrics after each epoch
  std::vector<double> residual_norms;      // per layer
};

struct ConversionResult {
  Model model;
  ConversionTrace trace;
};

// Projects every layer of a pre-trained model onto its block size
// (blocks[i] for layer i), then fine-tunes with structure-preserving SGD.
ConversionResult convert_pretrained(const Model& dense, std::span<const std::size_t> blocks,
                                    const TrainConfig& fine_tune, const Dataset& train_set, const Dataset& eval_set);

// True when every weight off the permuted diagonals and every padding slot is
// exactly zero.
bool structure_intact(const BpdMatrix& w);

}  // namespace bpdnn
