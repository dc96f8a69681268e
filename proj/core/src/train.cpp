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

#include "bpdnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bpdnn/projection.hpp"
#include "bpdnn/random.hpp"

namespace bpdnn {

LayerGradients grad_fc(const BpdMatrix& w, std::span<const double> x, std::span<const double> grad_output) {
  if (x.size() != w.cols() || grad_output.size() != w.rows()) {
    throw std::invalid_argument("grad_fc: expected input length " + std::to_string(w.cols()) +
                                " and output gradient length " + std::to_string(w.rows()));
  }
  const std::size_t p = w.block();
  const auto values = w.values();
  LayerGradients g;
  g.d_values.assign(w.slot_count(), 0.0);
  g.d_input.assign(w.cols(), 0.0);

  // Block-row-major walk: each input gradient still sums its block rows in
  // ascending order.
  const std::size_t block_cols = w.block_cols();
  for (std::size_t l = 0; l < w.block_count(); ++l) {
    const std::size_t row0 = (l / block_cols) * p;
    const std::size_t col0 = (l % block_cols) * p;
    const std::size_t k = w.perm(l);
    for (std::size_t c = 0; c < p; ++c) {
      const std::size_t i = row0 + c;
      const std::size_t j = col0 + (c + k) % p;
      if (i >= w.rows() || j >= w.cols()) continue;
      g.d_values[l * p + c] = x[j] * grad_output[i];
      g.d_input[j] += values[l * p + c] * grad_output[i];
    }
  }
  return g;
}

ConvGradients grad_conv(const BpdConvTensor& f, const Tensor3& x, const Tensor3& grad_output) {
  const std::size_t kw = f.kernel_w();
  const std::size_t kh = f.kernel_h();
  if (x.channels != f.in_channels() || grad_output.channels != f.out_channels() ||
      grad_output.width != conv_output_extent(x.width, kw) || grad_output.height != conv_output_extent(x.height, kh)) {
    throw std::invalid_argument("grad_conv: input, output gradient and kernel shapes are inconsistent");
  }
  ConvGradients g;
  g.d_values.assign(f.values().size(), 0.0);
  g.d_input = Tensor3(x.channels, x.width, x.height);
  const std::size_t ks = f.kernel_size();
  for (std::size_t i = 0; i < f.out_channels(); ++i) {
    for (std::size_t gc = 0; gc < f.block_cols(); ++gc) {
      const std::size_t j = f.in_for_out(i, gc);
      if (j >= f.in_channels()) continue;
      const std::size_t slot = f.slot_for_out(i, gc);
      const auto kernel = f.kernel(slot);
      for (std::size_t w = 0; w < kw; ++w) {
        for (std::size_t h = 0; h < kh; ++h) {
          double acc = 0.0;
          const double weight = kernel[w * kh + h];
          for (std::size_t u = 0; u < x.width; ++u) {
            for (std::size_t v = 0; v < x.height; ++v) {
              const double gy = grad_output(i, u + w, v + h);
              acc += x(j, u, v) * gy;
              g.d_input(j, u, v) += weight * gy;
            }
          }
          g.d_values[slot * ks + w * kh + h] = acc;
        }
      }
    }
  }
  return g;
}

void sgd_update(BpdMatrix& w, std::span<const double> d_values, double learning_rate) {
  if (d_values.size() != w.slot_count()) throw std::invalid_argument("sgd_update: gradient length mismatch");
  auto values = w.values_mut();
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (!w.is_padding(s)) values[s] -= learning_rate * d_values[s];
  }
}

void sgd_update(BpdMatrix& w, const LayerGradients& g, double learning_rate) { sgd_update(w, g.d_values, learning_rate); }

void sgd_update(BpdConvTensor& f, std::span<const double> d_values, double learning_rate) {
  if (d_values.size() != f.values().size()) throw std::invalid_argument("sgd_update: gradient length mismatch");
  auto values = f.values_mut();
  const std::size_t ks = f.kernel_size();
  for (std::size_t s = 0; s < f.slot_count(); ++s) {
    if (f.is_padding(s)) continue;
    for (std::size_t e = 0; e < ks; ++e) values[s * ks + e] -= learning_rate * d_values[s * ks + e];
  }
}

std::size_t Layer::input_size() const {
  if (const auto* fc = std::get_if<FcLayer>(&op)) return fc->weights.cols();
  const auto& conv = std::get<ConvLayer>(op);
  return conv.kernels.in_channels() * conv.in_width * conv.in_height;
}

std::size_t Layer::output_size() const {
  if (const auto* fc = std::get_if<FcLayer>(&op)) return fc->weights.rows();
  const auto& conv = std::get<ConvLayer>(op);
  return conv.kernels.out_channels() * conv.out_width() * conv.out_height();
}

std::size_t Layer::block() const {
  if (const auto* fc = std::get_if<FcLayer>(&op)) return fc->weights.block();
  return std::get<ConvLayer>(op).kernels.block();
}

void TrainConfig::validate(bool allow_zero_rate) const {
  if (!(learning_rate > 0.0) && !(allow_zero_rate && learning_rate == 0.0)) {
    throw std::invalid_argument("TrainConfig: learning rate must be positive");
  }
  if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch size must be at least 1");
}

Model make_mlp(std::span<const std::size_t> widths, std::span<const std::size_t> blocks, Activation hidden,
               PermPolicy perms, std::uint64_t seed) {
  if (widths.size() < 2 || blocks.size() != widths.size() - 1) {
    throw std::invalid_argument("make_mlp: need one block size per layer");
  }
  Model model;
  for (std::size_t n = 0; n + 1 < widths.size(); ++n) {
    PermPolicy layer_perms = perms;
    if (perms.kind == PermPolicy::Kind::Random) layer_perms.seed = mix_seed(perms.seed, n);
    FcLayer fc{make_bpd(widths[n + 1], widths[n], blocks[n], layer_perms, InitPolicy::scaled_uniform(mix_seed(seed, n))),
               std::vector<double>(widths[n + 1], 0.0)};
    const bool last = n + 2 == widths.size();
    model.layers.push_back(Layer{std::move(fc), last ? Activation::Identity : hidden});
  }
  return model;
}

double activate(Activation act, double a) {
  switch (act) {
    case Activation::Relu: return a > 0.0 ? a : 0.0;
    case Activation::Tanh: return std::tanh(a);
    case Activation::Identity: break;
  }
  return a;
}

namespace {

// d activation / d a, expressed through the pre-activation a and output y.
double activation_slope(Activation act, double a, double y) {
  switch (act) {
    case Activation::Relu: return a > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Identity: break;
  }
  return 1.0;
}

Tensor3 as_tensor(std::span<const double> flat, std::size_t channels, std::size_t width, std::size_t height) {
  Tensor3 t(channels, width, height);
  std::copy(flat.begin(), flat.end(), t.data.begin());
  return t;
}

std::vector<double> layer_linear(const Layer& layer, std::span<const double> input) {
  if (const auto* fc = std::get_if<FcLayer>(&layer.op)) {
    auto a = matvec(fc->weights, input);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += fc->bias[i];
    return a;
  }
  const auto& conv = std::get<ConvLayer>(layer.op);
  Tensor3 y = conv_forward(conv.kernels, as_tensor(input, conv.kernels.in_channels(), conv.in_width, conv.in_height));
  const std::size_t plane = y.width * y.height;
  for (std::size_t c = 0; c < y.channels; ++c) {
    for (std::size_t e = 0; e < plane; ++e) y.data[c * plane + e] += conv.bias[c];
  }
  return std::move(y.data);
}

struct ForwardTrace {
  std::vector<std::vector<double>> inputs;  // input of each layer
  std::vector<std::vector<double>> pre;     // pre-activation of each layer
  std::vector<double> output;
};

ForwardTrace forward_trace(const Model& model, std::span<const double> input) {
  ForwardTrace t;
  std::vector<double> current(input.begin(), input.end());
  for (const auto& layer : model.layers) {
    auto a = layer_linear(layer, current);
    std::vector<double> y(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = activate(layer.activation, a[i]);
    t.inputs.push_back(std::move(current));
    t.pre.push_back(std::move(a));
    current = std::move(y);
  }
  t.output = std::move(current);
  return t;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Per-layer parameter gradients, matching the layer's values() and bias.
struct ParamGrads {
  std::vector<double> d_values;
  std::vector<double> d_bias;
};

void backward(const Model& model, const ForwardTrace& t, std::vector<double> grad_out,
              std::vector<ParamGrads>& accum) {
  for (std::size_t n = model.layers.size(); n-- > 0;) {
    const Layer& layer = model.layers[n];
    const auto& a = t.pre[n];
    // grad_out holds dJ/dy; turn it into dJ/da.
    const std::vector<double>& y = (n + 1 < model.layers.size()) ? t.inputs[n + 1] : t.output;
    for (std::size_t i = 0; i < a.size(); ++i) grad_out[i] *= activation_slope(layer.activation, a[i], y[i]);

    ParamGrads& acc = accum[n];
    std::vector<double> grad_in;
    if (const auto* fc = std::get_if<FcLayer>(&layer.op)) {
      LayerGradients g = grad_fc(fc->weights, t.inputs[n], grad_out);
      for (std::size_t s = 0; s < g.d_values.size(); ++s) acc.d_values[s] += g.d_values[s];
      for (std::size_t i = 0; i < grad_out.size(); ++i) acc.d_bias[i] += grad_out[i];
      grad_in = std::move(g.d_input);
    } else {
      const auto& conv = std::get<ConvLayer>(layer.op);
      const Tensor3 x = as_tensor(t.inputs[n], conv.kernels.in_channels(), conv.in_width, conv.in_height);
      const Tensor3 gy = as_tensor(grad_out, conv.kernels.out_channels(), conv.out_width(), conv.out_height());
      ConvGradients g = grad_conv(conv.kernels, x, gy);
      for (std::size_t s = 0; s < g.d_values.size(); ++s) acc.d_values[s] += g.d_values[s];
      const std::size_t plane = gy.width * gy.height;
      for (std::size_t c = 0; c < gy.channels; ++c) {
        for (std::size_t e = 0; e < plane; ++e) acc.d_bias[c] += gy.data[c * plane + e];
      }
      grad_in = std::move(g.d_input.data);
    }
    grad_out = std::move(grad_in);
  }
}

std::vector<ParamGrads> zero_grads(const Model& model) {
  std::vector<ParamGrads> grads;
  for (const auto& layer : model.layers) {
    if (const auto* fc = std::get_if<FcLayer>(&layer.op)) {
      grads.push_back({std::vector<double>(fc->weights.slot_count(), 0.0), std::vector<double>(fc->bias.size(), 0.0)});
    } else {
      const auto& conv = std::get<ConvLayer>(layer.op);
      grads.push_back(
          {std::vector<double>(conv.kernels.values().size(), 0.0), std::vector<double>(conv.bias.size(), 0.0)});
    }
  }
  return grads;
}

void apply(Model& model, std::vector<ParamGrads>& grads, double step) {
  for (std::size_t n = 0; n < model.layers.size(); ++n) {
    auto& layer = model.layers[n];
    if (auto* fc = std::get_if<FcLayer>(&layer.op)) {
      sgd_update(fc->weights, grads[n].d_values, step);
      for (std::size_t i = 0; i < fc->bias.size(); ++i) fc->bias[i] -= step * grads[n].d_bias[i];
    } else {
      auto& conv = std::get<ConvLayer>(layer.op);
      sgd_update(conv.kernels, grads[n].d_values, step);
      for (std::size_t i = 0; i < conv.bias.size(); ++i) conv.bias[i] -= step * grads[n].d_bias[i];
    }
  }
}

}  // namespace

std::vector<double> forward(const Model& model, std::span<const double> input) {
  if (input.size() != model.input_size()) throw std::invalid_argument("forward: input size mismatch");
  return forward_trace(model, input).output;
}

double loss_and_gradient(Loss loss, std::span<const double> logits, std::size_t label, std::vector<double>* grad) {
  const std::size_t k = logits.size();
  if (label >= k) throw std::invalid_argument("loss: label outside output range");
  if (grad != nullptr) grad->assign(k, 0.0);
  if (loss == Loss::SoftmaxCrossEntropy) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (const double z : logits) denom += std::exp(z - top);
    if (grad != nullptr) {
      for (std::size_t i = 0; i < k; ++i) (*grad)[i] = std::exp(logits[i] - top) / denom;
      (*grad)[label] -= 1.0;
    }
    return std::log(denom) - (logits[label] - top);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double diff = logits[i] - (i == label ? 1.0 : 0.0);
    total += diff * diff;
    if (grad != nullptr) (*grad)[i] = 2.0 * diff / static_cast<double>(k);
  }
  return total / static_cast<double>(k);
}

EpochMetrics evaluate(const Model& model, const Dataset& data, Loss loss) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  EpochMetrics m;
  std::size_t correct = 0;
  for (const auto& s : data.samples) {
    const auto out = forward(model, s.features);
    m.loss += loss_and_gradient(loss, out, s.label, nullptr);
    if (argmax(out) == s.label) ++correct;
  }
  m.loss /= static_cast<double>(data.size());
  m.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return m;
}

std::vector<std::size_t> epoch_order(std::size_t sample_count, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) order[i] = i;
  Rng rng(mix_seed(seed, epoch));
  rng.shuffle(order);
  return order;
}

EpochMetrics train_epoch(Model& model, const Dataset& data, const TrainConfig& cfg, std::size_t epoch) {
  if (data.empty()) throw std::invalid_argument("train_epoch: empty dataset");
  cfg.validate(/*allow_zero_rate=*/true);
  if (data.feature_count() != model.input_size()) throw std::invalid_argument("train_epoch: feature size mismatch");

  const auto order = epoch_order(data.size(), cfg.seed, epoch);
  EpochMetrics m;
  std::size_t correct = 0;
  std::vector<double> grad;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    auto grads = zero_grads(model);
    for (std::size_t b = start; b < end; ++b) {
      const Sample& s = data.samples[order[b]];
      const ForwardTrace t = forward_trace(model, s.features);
      m.loss += loss_and_gradient(cfg.loss, t.output, s.label, &grad);
      if (argmax(t.output) == s.label) ++correct;
      backward(model, t, grad, grads);
    }
    apply(model, grads, cfg.learning_rate / static_cast<double>(end - start));
  }
  m.loss /= static_cast<double>(data.size());
  m.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return m;
}

std::vector<EpochMetrics> train(Model& model, const Dataset& data, const TrainConfig& cfg) {
  std::vector<EpochMetrics> history;
  for (std::size_t e = 0; e < cfg.epochs; ++e) history.push_back(train_epoch(model, data, cfg, e));
  return history;
}

ConversionResult convert_pretrained(const Model& dense, std::span<const std::size_t> blocks,
                                    const TrainConfig& fine_tune, const Dataset& train_set, const Dataset& eval_set) {
  if (blocks.size() != dense.layers.size()) {
    throw std::invalid_argument("convert_pretrained: need one block size per layer");
  }
  ConversionResult result;
  result.trace.dense = evaluate(dense, eval_set, fine_tune.loss);
  for (std::size_t n = 0; n < dense.layers.size(); ++n) {
    const Layer& src = dense.layers[n];
    if (const auto* fc = std::get_if<FcLayer>(&src.op)) {
      MatrixProjection proj = from_dense_project(to_dense(fc->weights), blocks[n]);
      result.trace.residual_norms.push_back(proj.residual_norm);
      result.model.layers.push_back(Layer{FcLayer{std::move(proj.matrix), fc->bias}, src.activation});
    } else {
      const auto& conv = std::get<ConvLayer>(src.op);
      TensorProjection proj = from_dense_project(to_dense(conv.kernels), blocks[n]);
      result.trace.residual_norms.push_back(proj.residual_norm);
      result.model.layers.push_back(
          Layer{ConvLayer{std::move(proj.tensor), conv.bias, conv.in_width, conv.in_height}, src.activation});
    }
  }
  result.trace.projected = evaluate(result.model, eval_set, fine_tune.loss);
  for (std::size_t e = 0; e < fine_tune.epochs; ++e) {
    train_epoch(result.model, train_set, fine_tune, e);
    result.trace.fine_tune.push_back(evaluate(result.model, eval_set, fine_tune.loss));
  }
  return result;
}

bool structure_intact(const BpdMatrix& w) {
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    if (w.is_padding(s) && w.values()[s] != 0.0) return false;
  }
  return true;
}

}  // namespace bpdnn
