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

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpdnn/activation.hpp"
#include "bpdnn/quant.hpp"
#include "bpdnn/train.hpp"

namespace bpdnn {

enum class ModelFileErrorCode { Io, BadMagic, BadVersion, BadChecksum, Truncated, Malformed };

const char* to_string(ModelFileErrorCode code);

class ModelFileError : public std::runtime_error {
 public:
  ModelFileError(ModelFileErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ModelFileErrorCode code() const { return code_; }

 private:
  ModelFileErrorCode code_;
};

enum class PayloadKind : std::uint8_t { Float32 = 0, Fixed16 = 1, Tags = 2 };
enum class LayerKind : std::uint8_t { Fc = 0, Conv = 1 };

// One stored layer. FC layers have kernel 1x1 and no input extent.
struct LayerRecord {
  LayerKind kind = LayerKind::Fc;
  Activation activation = Activation::Identity;
  std::uint32_t rows = 0;  // output channels for CONV
  std::uint32_t cols = 0;  // input channels for CONV
  std::uint32_t kernel_w = 1;
  std::uint32_t kernel_h = 1;
  std::uint32_t in_width = 0;
  std::uint32_t in_height = 0;
  std::uint32_t block = 1;
  std::vector<std::uint32_t> perms;
  std::vector<float> bias;
  PayloadKind payload = PayloadKind::Float32;
  std::vector<float> reals;          // Float32
  std::uint8_t frac_bits = 12;       // Fixed16
  std::vector<std::int16_t> codes;   // Fixed16
  std::uint8_t tag_bits = 4;         // Tags
  std::vector<float> centroids;      // Tags
  std::vector<std::uint8_t> tags;    // Tags, one per slot

  std::size_t slot_count() const;  // packed values expected for the dims
  bool operator==(const LayerRecord&) const = default;
};

/// Binary model container, little-endian:
///   "PDNN" | u16 version | u16 flags | u32 layer count | layers | u32 CRC-32
/// Each layer: u8 kind, u8 payload kind, u8 activation, u8 reserved, u32
/// rows, cols, kernel_w, kernel_h, in_width, in_height, block, then
/// length-prefixed perms (u32), bias (f32) and payload. Tags are bit-packed
/// LSB first. The CRC covers every byte before it.
struct ModelFile {
  static constexpr std::uint16_t kVersion = 1;
  std::vector<LayerRecord> layers;

  bool operator==(const ModelFile&) const = default;
};

std::vector<std::uint8_t> encode_model(const ModelFile& file);
// Throws ModelFileError.
ModelFile decode_model(std::span<const std::uint8_t> bytes);

void store_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

struct PackOptions {
  PayloadKind payload = PayloadKind::Float32;
  unsigned frac_bits = 12;
  unsigned tag_bits = 4;
  std::uint64_t seed = 1;  // codebook seeding
};

ModelFile pack_model(const Model& model, const PackOptions& opts);
// Decodes payloads to reals (codes are dequantized, tags looked up).
Model unpack_model(const ModelFile& file);

// The codebook of a Tags layer, for feeding the engine directly.
Codebook record_codebook(const LayerRecord& record);

}  // namespace bpdnn
