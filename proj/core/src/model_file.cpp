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

#include "bpdnn/model_file.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace bpdnn {

namespace {

constexpr char kMagic[4] = {'P', 'D', 'N', 'N'};
constexpr std::uint32_t kMaxDim = 1u << 24;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) u8(static_cast<std::uint8_t>(v >> s));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    const std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (std::uint16_t{u8()} << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= std::uint32_t{u8()} << s;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  // Element count of a length-prefixed array whose elements take `width` bytes.
  std::size_t count(std::size_t width) {
    const std::size_t n = u32();
    need(n * width);
    return n;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ModelFileError(ModelFileErrorCode::Truncated, "model file is truncated");
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

[[noreturn]] void malformed(const std::string& what) { throw ModelFileError(ModelFileErrorCode::Malformed, what); }

std::size_t padded(std::size_t n, std::size_t p) { return (n + p - 1) / p * p; }

void write_layer(Writer& w, const LayerRecord& r) {
  w.u8(static_cast<std::uint8_t>(r.kind));
  w.u8(static_cast<std::uint8_t>(r.payload));
  w.u8(static_cast<std::uint8_t>(r.activation));
  w.u8(0);
  for (const auto v : {r.rows, r.cols, r.kernel_w, r.kernel_h, r.in_width, r.in_height, r.block}) w.u32(v);
  w.u32(static_cast<std::uint32_t>(r.perms.size()));
  for (const auto k : r.perms) w.u32(k);
  w.u32(static_cast<std::uint32_t>(r.bias.size()));
  for (const auto b : r.bias) w.f32(b);
  switch (r.payload) {
    case PayloadKind::Float32:
      w.u32(static_cast<std::uint32_t>(r.reals.size()));
      for (const auto v : r.reals) w.f32(v);
      break;
    case PayloadKind::Fixed16:
      w.u8(r.frac_bits);
      w.u8(0);
      w.u8(0);
      w.u8(0);
      w.u32(static_cast<std::uint32_t>(r.codes.size()));
      for (const auto c : r.codes) w.u16(static_cast<std::uint16_t>(c));
      break;
    case PayloadKind::Tags: {
      w.u8(r.tag_bits);
      w.u8(0);
      w.u8(0);
      w.u8(0);
      w.u32(static_cast<std::uint32_t>(r.centroids.size()));
      for (const auto c : r.centroids) w.f32(c);
      w.u32(static_cast<std::uint32_t>(r.tags.size()));
      std::vector<std::uint8_t> packed((r.tags.size() * r.tag_bits + 7) / 8, 0);
      for (std::size_t n = 0; n < r.tags.size(); ++n) {
        for (unsigned b = 0; b < r.tag_bits; ++b) {
          if ((r.tags[n] >> b) & 1u) {
            const std::size_t bit = n * r.tag_bits + b;
            packed[bit / 8] = static_cast<std::uint8_t>(packed[bit / 8] | (1u << (bit % 8)));
          }
        }
      }
      for (const auto byte : packed) w.u8(byte);
      break;
    }
  }
}

LayerRecord read_layer(Reader& in) {
  LayerRecord r;
  const auto kind = in.u8();
  const auto payload = in.u8();
  const auto act = in.u8();
  in.u8();
  if (kind > 1) malformed("unknown layer kind " + std::to_string(kind));
  if (payload > 2) malformed("unknown payload kind " + std::to_string(payload));
  if (act > 2) malformed("unknown activation " + std::to_string(act));
  r.kind = static_cast<LayerKind>(kind);
  r.payload = static_cast<PayloadKind>(payload);
  r.activation = static_cast<Activation>(act);
  r.rows = in.u32();
  r.cols = in.u32();
  r.kernel_w = in.u32();
  r.kernel_h = in.u32();
  r.in_width = in.u32();
  r.in_height = in.u32();
  r.block = in.u32();
  for (const auto v : {r.rows, r.cols, r.kernel_w, r.kernel_h, r.block}) {
    if (v == 0 || v > kMaxDim) malformed("layer dimension out of range");
  }
  if (r.kind == LayerKind::Fc && (r.kernel_w != 1 || r.kernel_h != 1)) malformed("FC layer with a kernel");
  r.perms.resize(in.count(4));
  for (auto& k : r.perms) k = in.u32();
  r.bias.resize(in.count(4));
  for (auto& b : r.bias) b = in.f32();
  switch (r.payload) {
    case PayloadKind::Float32:
      r.reals.resize(in.count(4));
      for (auto& v : r.reals) v = in.f32();
      break;
    case PayloadKind::Fixed16:
      r.frac_bits = in.u8();
      in.u8();
      in.u8();
      in.u8();
      r.codes.resize(in.count(2));
      for (auto& c : r.codes) c = static_cast<std::int16_t>(in.u16());
      break;
    case PayloadKind::Tags: {
      r.tag_bits = in.u8();
      in.u8();
      in.u8();
      in.u8();
      if (r.tag_bits < 1 || r.tag_bits > 8) malformed("tag width out of range");
      r.centroids.resize(in.count(4));
      for (auto& c : r.centroids) c = in.f32();
      const std::size_t n = in.u32();
      const std::size_t bytes = (n * r.tag_bits + 7) / 8;
      in.need(bytes);
      std::vector<std::uint8_t> packed(bytes);
      for (auto& b : packed) b = in.u8();
      r.tags.assign(n, 0);
      for (std::size_t t = 0; t < n; ++t) {
        unsigned v = 0;
        for (unsigned b = 0; b < r.tag_bits; ++b) {
          const std::size_t bit = t * r.tag_bits + b;
          v |= ((packed[bit / 8] >> (bit % 8)) & 1u) << b;
        }
        r.tags[t] = static_cast<std::uint8_t>(v);
      }
      break;
    }
  }
  return r;
}

void check_layer(const LayerRecord& r) {
  const std::size_t p = r.block;
  const std::size_t blocks = (padded(r.rows, p) / p) * (padded(r.cols, p) / p);
  if (r.perms.size() != blocks) malformed("permutation count does not match the layer dimensions");
  for (const auto k : r.perms) {
    if (k >= p) malformed("permutation value out of range");
  }
  if (r.bias.size() != r.rows) malformed("bias length does not match the output count");
  const std::size_t slots = r.slot_count();
  switch (r.payload) {
    case PayloadKind::Float32:
      if (r.reals.size() != slots) malformed("payload length does not match the layer dimensions");
      break;
    case PayloadKind::Fixed16:
      if (r.codes.size() != slots) malformed("payload length does not match the layer dimensions");
      if (r.frac_bits >= 16) malformed("fraction bits out of range");
      break;
    case PayloadKind::Tags:
      if (r.tags.size() != slots) malformed("payload length does not match the layer dimensions");
      if (r.centroids.empty() || r.centroids.size() > (std::size_t{1} << r.tag_bits)) malformed("bad codebook size");
      for (const auto t : r.tags) {
        if (t >= r.centroids.size()) malformed("tag outside the codebook");
      }
      break;
  }
  if (r.kind == LayerKind::Conv && (r.in_width == 0 || r.in_height == 0)) malformed("CONV layer without input size");
}

ModelFile decode_body(std::span<const std::uint8_t> body, std::size_t* consumed) {
  Reader in(body);
  in.need(12);
  char magic[4];
  for (auto& c : magic) c = static_cast<char>(in.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) throw ModelFileError(ModelFileErrorCode::BadMagic, "not a model file");
  const auto version = in.u16();
  if (version != ModelFile::kVersion) {
    throw ModelFileError(ModelFileErrorCode::BadVersion, "unsupported model file version " + std::to_string(version) +
                                                             " (reader supports " +
                                                             std::to_string(ModelFile::kVersion) + ")");
  }
  in.u16();  // flags, none defined
  const std::size_t layers = in.u32();
  ModelFile file;
  for (std::size_t n = 0; n < layers; ++n) file.layers.push_back(read_layer(in));
  *consumed = in.position();
  return file;
}

}  // namespace

const char* to_string(ModelFileErrorCode code) {
  switch (code) {
    case ModelFileErrorCode::Io: return "io";
    case ModelFileErrorCode::BadMagic: return "bad-magic";
    case ModelFileErrorCode::BadVersion: return "bad-version";
    case ModelFileErrorCode::BadChecksum: return "bad-checksum";
    case ModelFileErrorCode::Truncated: return "truncated";
    case ModelFileErrorCode::Malformed: return "malformed";
  }
  return "unknown";
}

std::size_t LayerRecord::slot_count() const {
  if (block == 0) return 0;
  return padded(rows, block) * padded(cols, block) / block * kernel_w * kernel_h;
}

std::vector<std::uint8_t> encode_model(const ModelFile& file) {
  Writer w;
  for (const char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(ModelFile::kVersion);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(file.layers.size()));
  for (const auto& layer : file.layers) {
    check_layer(layer);
    write_layer(w, layer);
  }
  w.u32(crc32_of(w.bytes()));
  return std::move(w.bytes());
}

ModelFile decode_model(std::span<const std::uint8_t> bytes) {
  // Header checks first so a foreign or newer file is reported as such.
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ModelFileError(ModelFileErrorCode::BadMagic, "not a model file");
  }
  if (bytes.size() < 16) throw ModelFileError(ModelFileErrorCode::Truncated, "model file is truncated");
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != ModelFile::kVersion) {
    throw ModelFileError(ModelFileErrorCode::BadVersion, "unsupported model file version " + std::to_string(version) +
                                                             " (reader supports " +
                                                             std::to_string(ModelFile::kVersion) + ")");
  }
  const auto body = bytes.first(bytes.size() - 4);
  const auto tail = bytes.last(4);
  const std::uint32_t stored = tail[0] | (tail[1] << 8) | (tail[2] << 16) | (std::uint32_t{tail[3]} << 24);
  if (stored != crc32_of(body)) {
    // A file cut short also fails the checksum; tell the two apart.
    std::size_t consumed = 0;
    try {
      decode_body(bytes, &consumed);
    } catch (const ModelFileError& e) {
      if (e.code() == ModelFileErrorCode::Truncated) throw;
    }
    throw ModelFileError(ModelFileErrorCode::BadChecksum, "model file checksum mismatch");
  }
  std::size_t consumed = 0;
  ModelFile file = decode_body(body, &consumed);
  if (consumed != body.size()) malformed("trailing bytes after the last layer");
  for (const auto& layer : file.layers) check_layer(layer);
  return file;
}

void store_model(const std::filesystem::path& path, const ModelFile& file) {
  const auto bytes = encode_model(file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelFileError(ModelFileErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFileError(ModelFileErrorCode::Io, "failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError(ModelFileErrorCode::Io, "cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

Codebook record_codebook(const LayerRecord& r) {
  if (r.payload != PayloadKind::Tags) throw std::invalid_argument("record_codebook: layer payload is not tags");
  Codebook cb;
  cb.tag_bits = r.tag_bits;
  cb.centroids.assign(r.centroids.begin(), r.centroids.end());
  cb.tags = r.tags;
  return cb;
}

ModelFile pack_model(const Model& model, const PackOptions& opts) {
  const FixedPointSpec spec{16, opts.frac_bits};
  spec.validate();
  ModelFile file;
  for (std::size_t n = 0; n < model.layers.size(); ++n) {
    const Layer& layer = model.layers[n];
    LayerRecord r;
    r.activation = layer.activation;
    r.payload = opts.payload;
    std::span<const double> values;
    std::vector<double> bias;
    if (const auto* fc = std::get_if<FcLayer>(&layer.op)) {
      const BpdMatrix& w = fc->weights;
      r.kind = LayerKind::Fc;
      r.rows = static_cast<std::uint32_t>(w.rows());
      r.cols = static_cast<std::uint32_t>(w.cols());
      r.block = static_cast<std::uint32_t>(w.block());
      r.perms.assign(w.perms().begin(), w.perms().end());
      values = w.values();
      bias = fc->bias;
    } else {
      const auto& conv = std::get<ConvLayer>(layer.op);
      const BpdConvTensor& f = conv.kernels;
      r.kind = LayerKind::Conv;
      r.rows = static_cast<std::uint32_t>(f.out_channels());
      r.cols = static_cast<std::uint32_t>(f.in_channels());
      r.kernel_w = static_cast<std::uint32_t>(f.kernel_w());
      r.kernel_h = static_cast<std::uint32_t>(f.kernel_h());
      r.in_width = static_cast<std::uint32_t>(conv.in_width);
      r.in_height = static_cast<std::uint32_t>(conv.in_height);
      r.block = static_cast<std::uint32_t>(f.block());
      r.perms.assign(f.perms().begin(), f.perms().end());
      values = f.values();
      bias = conv.bias;
    }
    r.bias.assign(bias.begin(), bias.end());
    switch (opts.payload) {
      case PayloadKind::Float32:
        r.reals.assign(values.begin(), values.end());
        break;
      case PayloadKind::Fixed16:
        r.frac_bits = static_cast<std::uint8_t>(opts.frac_bits);
        for (const auto v : values) r.codes.push_back(static_cast<std::int16_t>(quantize_fixed(v, spec)));
        break;
      case PayloadKind::Tags: {
        r.tag_bits = static_cast<std::uint8_t>(opts.tag_bits);
        const Codebook cb = build_codebook(values, opts.tag_bits, opts.seed + n);
        // Centroids are stored in single precision; retag against those.
        r.centroids.assign(cb.centroids.begin(), cb.centroids.end());
        const std::vector<double> stored(r.centroids.begin(), r.centroids.end());
        for (const auto v : values) r.tags.push_back(static_cast<std::uint8_t>(nearest_centroid(stored, v)));
        break;
      }
    }
    file.layers.push_back(std::move(r));
  }
  return file;
}

Model unpack_model(const ModelFile& file) {
  Model model;
  for (const auto& r : file.layers) {
    check_layer(r);
    std::vector<double> values;
    switch (r.payload) {
      case PayloadKind::Float32:
        values.assign(r.reals.begin(), r.reals.end());
        break;
      case PayloadKind::Fixed16:
        for (const auto c : r.codes) values.push_back(dequantize(c, FixedPointSpec{16, r.frac_bits}));
        break;
      case PayloadKind::Tags:
        for (const auto t : r.tags) values.push_back(static_cast<double>(r.centroids[t]));
        break;
    }
    Layer layer;
    layer.activation = r.activation;
    std::vector<double> bias(r.bias.begin(), r.bias.end());
    try {
      if (r.kind == LayerKind::Fc) {
        // Padding slots decode to a nonzero centroid under weight sharing.
        BpdMatrix probe(r.rows, r.cols, r.block, r.perms, std::vector<double>(values.size(), 0.0));
        for (std::size_t s = 0; s < values.size(); ++s) {
          if (probe.is_padding(s)) values[s] = 0.0;
        }
        layer.op = FcLayer{BpdMatrix(r.rows, r.cols, r.block, r.perms, std::move(values)), std::move(bias)};
      } else {
        const std::size_t ks = std::size_t{r.kernel_w} * r.kernel_h;
        const std::size_t bc = padded(r.cols, r.block) / r.block;
        for (std::size_t s = 0; s < values.size() / ks; ++s) {
          const std::size_t out = (s / r.block) / bc * r.block + s % r.block;
          const std::size_t in = ((s / r.block) % bc) * r.block + (s % r.block + r.perms[s / r.block]) % r.block;
          if (out >= r.rows || in >= r.cols) std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(s * ks), ks, 0.0);
        }
        layer.op = ConvLayer{BpdConvTensor(r.rows, r.cols, r.kernel_w, r.kernel_h, r.block, r.perms, std::move(values)),
                             std::move(bias), r.in_width, r.in_height};
      }
    } catch (const std::invalid_argument& e) {
      malformed(e.what());
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

}  // namespace bpdnn
