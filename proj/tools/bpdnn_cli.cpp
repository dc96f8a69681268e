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

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bpdnn/compression.hpp"
#include "bpdnn/config_file.hpp"
#include "bpdnn/dataset.hpp"
#include "bpdnn/engine.hpp"
#include "bpdnn/model_file.hpp"
#include "bpdnn/projection.hpp"
#include "bpdnn/random.hpp"
#include "bpdnn/report.hpp"
#include "bpdnn/train.hpp"
#include "bpdnn/workload.hpp"

namespace {

using namespace bpdnn;

// Exit statuses.
constexpr int kOk = 0;
constexpr int kFailure = 1;  // simulation or training failure, capacity errors
constexpr int kUsage = 2;    // bad flags or values
constexpr int kInput = 3;    // unreadable or invalid input files
constexpr int kOutput = 4;   // unwritable output

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "human";
  std::string output;
  std::string config;
  bool timing = false;
};

void add_output_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format: human, rows, json")
      ->check(CLI::IsMember({"human", "rows", "tsv", "json"}));
  cmd->add_option("-o,--output", c.output, "Write the report to a file instead of stdout");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path);
  out << text;
  if (!out) throw OutputError("failed writing " + path);
}

void save(const std::string& path, const ModelFile& file) {
  try {
    store_model(path, file);
  } catch (const ModelFileError& e) {
    if (e.code() == ModelFileErrorCode::Io) throw OutputError(e.what());
    throw;
  }
}

ReportFormat format_of(const Common& c) { return *parse_format(c.format); }

EngineConfig engine_config(const Common& c) { return c.config.empty() ? EngineConfig{} : load_config(c.config); }

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw UsageError("unknown activation '" + name + "'");
}

NumericMode parse_numeric(const std::string& name) { return name == "fixed" ? NumericMode::Fixed : NumericMode::Real; }

DenseMatrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  DenseMatrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw InputError(path + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
      }
    }
    if (m.rows == 0) m.cols = row.size();
    if (row.size() != m.cols) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(m.cols) + " values");
    }
    m.data.insert(m.data.end(), row.begin(), row.end());
    ++m.rows;
  }
  if (m.rows == 0 || m.cols == 0) throw InputError(path + ": empty matrix");
  return m;
}

// Keeps the entries of `dense` on fixed permuted diagonals.
BpdMatrix restrict_to(const DenseMatrix& dense, std::size_t block, PermPolicy policy) {
  BpdMatrix w = make_bpd(dense.rows, dense.cols, block, policy, InitPolicy::zeros());
  auto values = w.values_mut();
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    const SlotPosition pos = w.position(s);
    if (!pos.padding) values[s] = dense(pos.row, pos.col);
  }
  return w;
}

std::vector<std::size_t> block_list(const std::vector<std::size_t>& blocks, std::size_t layers) {
  if (blocks.empty()) return std::vector<std::size_t>(layers, 1);
  if (blocks.size() == 1) return std::vector<std::size_t>(layers, blocks[0]);
  if (blocks.size() != layers) {
    throw UsageError("--block-size needs one value or one per layer (" + std::to_string(layers) + ")");
  }
  return blocks;
}

PackOptions pack_options(const std::string& payload, unsigned frac_bits, unsigned tag_bits, std::uint64_t seed) {
  PackOptions p;
  p.payload = payload == "fixed16" ? PayloadKind::Fixed16 : payload == "tags" ? PayloadKind::Tags : PayloadKind::Float32;
  p.frac_bits = frac_bits;
  p.tag_bits = tag_bits;
  p.seed = seed;
  return p;
}

// ---- dataset selection shared by train and convert ----

struct DataFlags {
  std::string dataset = "blobs";
  std::string path;
  std::size_t limit = 5000;
  std::uint64_t seed = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& d) {
  cmd->add_option("--dataset", d.dataset, "blobs, bars, digits (CSV, optionally gzipped) or mnist (IDX directory)")
      ->check(CLI::IsMember({"blobs", "bars", "digits", "mnist"}));
  cmd->add_option("--data", d.path, "Path for the digits file or MNIST directory");
  cmd->add_option("--limit", d.limit, "Maximum number of MNIST samples to load");
}

Dataset load_dataset(const DataFlags& d) {
  if (d.dataset == "blobs") return make_blobs(200, 4, 16, 3.0, 1.0, d.seed);
  if (d.dataset == "bars") return make_bars(100, 8, 0.2, d.seed);
  if (d.path.empty()) throw UsageError("--dataset " + d.dataset + " needs --data");
  std::optional<Dataset> data;
  try {
    data = d.dataset == "digits" ? load_digits_csv(d.path) : load_mnist_idx(d.path, d.limit);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  if (!data) throw InputError("no " + d.dataset + " data at " + d.path);
  return *data;
}

std::string metrics_line(std::size_t epoch, const EpochMetrics& m) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "epoch %3zu  loss %.6f  accuracy %.4f\n", epoch, m.loss, m.accuracy);
  return buf;
}

// ---- subcommands ----

int cmd_compress(const std::vector<std::string>& inputs, const std::vector<std::size_t>& blocks,
                 const std::string& perm, std::uint64_t seed, const std::string& payload, unsigned frac_bits,
                 unsigned tag_bits, const std::string& activation, const std::string& model_out) {
  if (model_out.empty()) throw UsageError("compress needs --model-out");
  const auto per_layer = block_list(blocks, inputs.size());
  Model model;
  std::vector<LayerShape> shapes;
  std::string text;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const DenseMatrix dense = read_csv_matrix(inputs[n]);
    Layer layer;
    layer.activation = n + 1 < inputs.size() ? parse_activation(activation) : Activation::Identity;
    BpdMatrix w;
    if (perm == "optimal") {
      MatrixProjection proj = from_dense_project(dense, per_layer[n]);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: %zu x %zu, p=%zu, residual norm %.6g\n", inputs[n].c_str(), dense.rows,
                    dense.cols, per_layer[n], proj.residual_norm);
      text += buf;
      w = std::move(proj.matrix);
    } else {
      const PermPolicy policy = perm == "random" ? PermPolicy::random(mix_seed(seed, n)) : PermPolicy::natural();
      w = restrict_to(dense, per_layer[n], policy);
    }
    shapes.push_back({inputs[n], w.rows(), w.cols(), w.block(), 1});
    layer.op = FcLayer{std::move(w), std::vector<double>(dense.rows, 0.0)};
    model.layers.push_back(std::move(layer));
  }
  save(model_out, pack_model(model, pack_options(payload, frac_bits, tag_bits, seed)));
  std::cout << text << emit_report(compression_stats(shapes, 32), ReportFormat::Human);
  return kOk;
}

int cmd_train(const DataFlags& data_flags, const std::vector<std::size_t>& hidden, const std::vector<std::size_t>& blocks,
              const TrainConfig& cfg, const std::string& perm, const std::string& model_out, const Common& c) {
  const Dataset data = load_dataset(data_flags);
  const auto [train_set, eval_set] = split(data, 0.8, mix_seed(cfg.seed, 7));
  std::vector<std::size_t> widths{data.feature_count()};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(data.num_classes);
  const auto per_layer = block_list(blocks, widths.size() - 1);
  const PermPolicy policy = perm == "random" ? PermPolicy::random(mix_seed(cfg.seed, 8)) : PermPolicy::natural();
  Model model = make_mlp(widths, per_layer, cfg.activation, policy, cfg.seed);
  std::string text;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    train_epoch(model, train_set, cfg, e);
    text += metrics_line(e + 1, evaluate(model, eval_set, cfg.loss));
  }
  if (!model_out.empty()) save(model_out, pack_model(model, PackOptions{}));
  emit(text, c.output);
  return kOk;
}

int cmd_convert(const DataFlags& data_flags, const std::vector<std::size_t>& hidden,
                const std::vector<std::size_t>& blocks, const TrainConfig& cfg, std::size_t dense_epochs,
                const std::string& model_out, const Common& c) {
  const Dataset data = load_dataset(data_flags);
  const auto [train_set, eval_set] = split(data, 0.8, mix_seed(cfg.seed, 7));
  std::vector<std::size_t> widths{data.feature_count()};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(data.num_classes);
  const std::vector<std::size_t> ones(widths.size() - 1, 1);
  Model dense = make_mlp(widths, ones, cfg.activation, PermPolicy::natural(), cfg.seed);
  TrainConfig pre = cfg;
  pre.epochs = dense_epochs;
  train(dense, train_set, pre);
  const auto per_layer = block_list(blocks, widths.size() - 1);
  const ConversionResult result = convert_pretrained(dense, per_layer, cfg, train_set, eval_set);
  char buf[128];
  std::string text;
  std::snprintf(buf, sizeof buf, "dense       loss %.6f  accuracy %.4f\n", result.trace.dense.loss,
                result.trace.dense.accuracy);
  text += buf;
  std::snprintf(buf, sizeof buf, "projected   loss %.6f  accuracy %.4f\n", result.trace.projected.loss,
                result.trace.projected.accuracy);
  text += buf;
  for (std::size_t e = 0; e < result.trace.fine_tune.size(); ++e) text += metrics_line(e + 1, result.trace.fine_tune[e]);
  if (!model_out.empty()) save(model_out, pack_model(result.model, PackOptions{}));
  emit(text, c.output);
  return kOk;
}

struct LayerSource {
  std::string preset;
  std::string model;
  std::size_t layer = 0;
  double density = -1.0;  // negative: preset density, or 1 for model files
};

void add_source_flags(CLI::App* cmd, LayerSource& s) {
  cmd->add_option("--preset", s.preset, "Workload preset (see `bpdnn presets`)");
  cmd->add_option("--model", s.model, "Model file to take an FC layer from");
  cmd->add_option("--layer", s.layer, "Layer index within --model");
  cmd->add_option("--density", s.density, "Activation density in [0, 1]")->check(CLI::Range(0.0, 1.0));
}

struct ResolvedLayer {
  std::string name;
  BpdMatrix weights;
  std::optional<Codebook> codebook;
  double density = 1.0;
};

ResolvedLayer resolve(const LayerSource& s, std::uint64_t seed) {
  if (s.preset.empty() == s.model.empty()) throw UsageError("give exactly one of --preset or --model");
  ResolvedLayer r;
  if (!s.preset.empty()) {
    const auto preset = find_preset(s.preset);
    if (!preset) throw UsageError("unknown preset '" + s.preset + "'");
    r.name = preset->name;
    r.weights = make_workload_weights(*preset, seed);
    r.density = s.density >= 0.0 ? s.density : preset->activation_density;
    return r;
  }
  const ModelFile file = load_model(s.model);
  if (s.layer >= file.layers.size()) throw UsageError("model has " + std::to_string(file.layers.size()) + " layers");
  const LayerRecord& rec = file.layers[s.layer];
  if (rec.kind != LayerKind::Fc) throw UsageError("the engine runs FC layers only; layer is CONV");
  ModelFile single;
  single.layers.push_back(rec);
  r.weights = std::get<FcLayer>(unpack_model(single).layers[0].op).weights;
  if (rec.payload == PayloadKind::Tags) r.codebook = record_codebook(rec);
  r.name = s.model + "#" + std::to_string(s.layer);
  r.density = s.density >= 0.0 ? s.density : 1.0;
  return r;
}

int cmd_simulate(const LayerSource& src, std::size_t pes, const std::string& numeric, std::uint64_t seed,
                 bool no_capacity, const Common& c) {
  EngineConfig cfg = engine_config(c);
  if (pes > 0) cfg.n_pe = pes;
  cfg.enforce_capacity = !no_capacity;
  const ResolvedLayer layer = resolve(src, seed);
  RunOptions opts;
  opts.seed = seed;
  opts.mode = parse_numeric(numeric);
  opts.timing = c.timing;
  const RunReport report =
      run_layer(layer.name, layer.weights, layer.codebook ? &*layer.codebook : nullptr, layer.density, cfg, opts);
  emit(emit_report(report, format_of(c)), c.output);
  return kOk;
}

int cmd_sweep(const LayerSource& src, const std::vector<std::size_t>& pes, const std::string& numeric,
              std::uint64_t seed, const Common& c) {
  const EngineConfig cfg = engine_config(c);
  const ResolvedLayer layer = resolve(src, seed);
  const std::vector<double> x = make_input(layer.weights.cols(), layer.density, mix_seed(seed, 4));
  const SweepTable table = pes.empty() ? SweepTable{layer.name, {}}
                                       : scalability_sweep(layer.name, layer.weights, x, pes, cfg, parse_numeric(numeric));
  emit(emit_report(table, format_of(c)), c.output);
  return kOk;
}

int cmd_report(const std::string& what, const std::string& model, unsigned bits, double wf, double af,
               const Common& c) {
  if (what == "throughput") {
    const Throughput t = throughput_model(engine_config(c), wf, af);
    char buf[160];
    if (format_of(c) == ReportFormat::Json) {
      nlohmann::ordered_json j;
      j["raw_gops"] = t.raw_gops;
      j["equivalent_tops"] = t.equivalent_tops;
      emit(j.dump(2) + "\n", c.output);
    } else if (format_of(c) == ReportFormat::Rows) {
      std::snprintf(buf, sizeof buf, "raw_gops\tequivalent_tops\n%.17g\t%.17g\n", t.raw_gops, t.equivalent_tops);
      emit(buf, c.output);
    } else {
      std::snprintf(buf, sizeof buf, "raw %.1f GOPS; with %gx weight and %gx activation sparsity %.4f TOPS\n",
                    t.raw_gops, wf, af, t.equivalent_tops);
      emit(buf, c.output);
    }
    return kOk;
  }
  std::vector<LayerShape> shapes;
  if (what == "alexnet") {
    shapes = alexnet_fc_shapes();
  } else if (what == "nmt") {
    shapes = nmt_lstm_shapes();
  } else {
    if (model.empty()) throw UsageError("report model needs --model");
    const ModelFile file = load_model(model);
    for (std::size_t n = 0; n < file.layers.size(); ++n) {
      const auto& r = file.layers[n];
      shapes.push_back({"layer" + std::to_string(n), r.rows, r.cols, r.block, std::size_t{r.kernel_w} * r.kernel_h});
    }
  }
  emit(emit_report(compression_stats(shapes, bits), format_of(c)), c.output);
  return kOk;
}

int cmd_presets() {
  std::printf("%-10s %6s %6s %4s %8s\n", "name", "rows", "cols", "p", "density");
  for (const auto& w : workload_presets()) {
    std::printf("%-10s %6zu %6zu %4zu %8.3f\n", w.name.c_str(), w.rows, w.cols, w.block, w.activation_density);
  }
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Block-permuted diagonal networks: compression, training and engine simulation"};
  app.require_subcommand(1);
  Common common;

  auto* compress = app.add_subcommand("compress", "Compress dense CSV matrices into a model file");
  std::vector<std::string> inputs;
  std::vector<std::size_t> blocks;
  std::string perm = "optimal";
  std::uint64_t seed = 1;
  std::string payload = "f32";
  unsigned frac_bits = 12;
  unsigned tag_bits = 4;
  std::string activation = "relu";
  std::string model_out;
  compress->add_option("-i,--input", inputs, "Dense matrix CSV, one per layer")->required();
  compress->add_option("--block-size", blocks, "Block size, one value or one per layer")->delimiter(',');
  compress->add_option("--perm", perm, "optimal (projection), natural or random")
      ->check(CLI::IsMember({"optimal", "natural", "random"}));
  compress->add_option("--seed", seed, "Seed for random permutations and codebooks");
  compress->add_option("--payload", payload, "f32, fixed16 or tags")->check(CLI::IsMember({"f32", "fixed16", "tags"}));
  compress->add_option("--frac-bits", frac_bits, "Fraction bits of fixed16 payloads")->check(CLI::Range(0, 15));
  compress->add_option("--tag-bits", tag_bits, "Tag width of weight-shared payloads")->check(CLI::Range(1, 8));
  compress->add_option("--activation", activation, "Hidden activation: relu, tanh, identity");
  compress->add_option("--model-out", model_out, "Model file to write")->required();

  auto make_train_flags = [&](CLI::App* cmd, DataFlags& d, std::vector<std::size_t>& hidden, TrainConfig& cfg,
                              std::string& act, std::string& loss) {
    add_data_flags(cmd, d);
    cmd->add_option("--hidden", hidden, "Hidden layer widths")->delimiter(',');
    cmd->add_option("--block-size", blocks, "Block size, one value or one per layer")->delimiter(',');
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--lr", cfg.learning_rate, "Learning rate");
    cmd->add_option("--batch", cfg.batch_size, "Mini-batch size");
    cmd->add_option("--seed", cfg.seed, "Seed for initialization and data order");
    cmd->add_option("--activation", act, "relu or tanh")->check(CLI::IsMember({"relu", "tanh"}));
    cmd->add_option("--loss", loss, "xent or mse")->check(CLI::IsMember({"xent", "mse"}));
    cmd->add_option("--model-out", model_out, "Write the trained model");
    add_output_flags(cmd, common);
  };

  DataFlags data_flags;
  std::vector<std::size_t> hidden{32};
  TrainConfig train_cfg;
  std::string train_act = "relu";
  std::string train_loss = "xent";
  std::string train_perm = "natural";
  auto* train_cmd = app.add_subcommand("train", "Train a block-permuted diagonal MLP from scratch");
  make_train_flags(train_cmd, data_flags, hidden, train_cfg, train_act, train_loss);
  train_cmd->add_option("--perm", train_perm, "natural or random")->check(CLI::IsMember({"natural", "random"}));

  auto* convert = app.add_subcommand("convert", "Train a dense MLP, project it and fine-tune");
  std::size_t dense_epochs = 10;
  make_train_flags(convert, data_flags, hidden, train_cfg, train_act, train_loss);
  convert->add_option("--dense-epochs", dense_epochs, "Epochs for the dense baseline");

  LayerSource source;
  std::size_t pes = 0;
  std::string numeric = "real";
  bool no_capacity = false;
  auto* simulate = app.add_subcommand("simulate", "Run one FC layer through the engine model");
  simulate->alias("run");
  add_source_flags(simulate, source);
  simulate->add_option("--pes", pes, "Override the PE count");
  simulate->add_option("--numeric", numeric, "fixed or real")->check(CLI::IsMember({"fixed", "real"}));
  simulate->add_option("--seed", seed, "Seed for synthetic weights and inputs");
  simulate->add_option("--config", common.config, "Engine configuration file");
  simulate->add_flag("--timing", common.timing, "Include wall-clock time in the report");
  simulate->add_flag("--no-capacity-check", no_capacity, "Simulate layers larger than the on-chip SRAM");
  add_output_flags(simulate, common);

  std::vector<std::size_t> pe_list;
  auto* sweep = app.add_subcommand("sweep", "Scalability sweep over PE counts");
  add_source_flags(sweep, source);
  sweep->add_option("--pes", pe_list, "Comma-separated PE counts")->delimiter(',')->required();
  sweep->add_option("--numeric", numeric, "fixed or real")->check(CLI::IsMember({"fixed", "real"}));
  sweep->add_option("--seed", seed, "Seed for synthetic weights and inputs");
  sweep->add_option("--config", common.config, "Engine configuration file");
  add_output_flags(sweep, common);

  std::string what = "alexnet";
  std::string model_path;
  unsigned bits = 32;
  double wf = 8.0;
  double af = 3.0;
  auto* report = app.add_subcommand("report", "Compression or throughput arithmetic");
  report->add_option("what", what, "alexnet, nmt, model or throughput")
      ->check(CLI::IsMember({"alexnet", "nmt", "model", "throughput"}));
  report->add_option("--model", model_path, "Model file for `report model`");
  report->add_option("--bits", bits, "Bits per stored weight")->check(CLI::Range(1, 64));
  report->add_option("--weight-factor", wf, "Weight sparsity factor for `report throughput`");
  report->add_option("--activation-factor", af, "Activation sparsity factor for `report throughput`");
  report->add_option("--config", common.config, "Engine configuration file");
  add_output_flags(report, common);

  auto* presets = app.add_subcommand("presets", "List workload presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  auto finish_train_cfg = [&] {
    train_cfg.activation = parse_activation(train_act);
    train_cfg.loss = train_loss == "mse" ? Loss::MeanSquaredError : Loss::SoftmaxCrossEntropy;
    data_flags.seed = train_cfg.seed;
    try {
      train_cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  };

  if (*compress) return cmd_compress(inputs, blocks, perm, seed, payload, frac_bits, tag_bits, activation, model_out);
  if (*train_cmd) {
    finish_train_cfg();
    return cmd_train(data_flags, hidden, blocks, train_cfg, train_perm, model_out, common);
  }
  if (*convert) {
    finish_train_cfg();
    return cmd_convert(data_flags, hidden, blocks, train_cfg, dense_epochs, model_out, common);
  }
  if (*simulate) return cmd_simulate(source, pes, numeric, seed, no_capacity, common);
  if (*sweep) return cmd_sweep(source, pe_list, numeric, seed, common);
  if (*report) return cmd_report(what, model_path, bits, wf, af, common);
  if (*presets) return cmd_presets();
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "bpdnn: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "bpdnn: config: " << e.what() << "\n";
    return kInput;
  } catch (const ModelFileError& e) {
    std::cerr << "bpdnn: model file (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "bpdnn: " << e.what() << "\n";
    return kInput;
  } catch (const OutputError& e) {
    std::cerr << "bpdnn: " << e.what() << "\n";
    return kOutput;
  } catch (const CapacityError& e) {
    std::cerr << "bpdnn: capacity: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "bpdnn: " << e.what() << "\n";
    return kFailure;
  }
}
