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
#include <stdexcept>
#include <string>
#include <string_view>

#include "bpdnn/engine.hpp"

namespace bpdnn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text engine configuration: one `key = value` per line, `#` starts a
/// comment. Keys follow the hardware parameter table (multiplier_amount,
/// accumulator_width, weight_sram_depth, ...). Keys left out keep their
/// defaults; unknown keys, repeated keys and bad values throw ConfigError
/// with the line number. The result is validated.
EngineConfig parse_config(std::string_view text);
EngineConfig load_config(const std::filesystem::path& path);

// Canonical text with every key, in a fixed order.
std::string to_config_text(const EngineConfig& cfg);

// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_digest(const EngineConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace bpdnn
