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

#include "bpdnn/config_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace bpdnn {

namespace {

struct Key {
  const char* name;
  std::function<void(EngineConfig&, double)> set;
  std::function<double(const EngineConfig&)> get;
  bool integral;
};

template <typename T>
Key int_key(const char* name, T EngineConfig::*field) {
  return {name, [field](EngineConfig& c, double v) { c.*field = static_cast<T>(v); },
          [field](const EngineConfig& c) { return static_cast<double>(c.*field); }, true};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      int_key("pe_amount", &EngineConfig::n_pe),
      int_key("multiplier_amount", &EngineConfig::n_mul),
      int_key("multiplier_width", &EngineConfig::multiplier_bits),
      int_key("accumulator_amount", &EngineConfig::n_acc),
      int_key("accumulator_width", &EngineConfig::accumulator_bits),
      int_key("weight_sram_subbanks", &EngineConfig::weight_subbanks),
      int_key("weight_sram_width", &EngineConfig::weight_sram_width),
      int_key("weight_sram_depth", &EngineConfig::weight_sram_depth),
      int_key("permutation_sram_width", &EngineConfig::perm_sram_width),
      int_key("permutation_sram_depth", &EngineConfig::perm_sram_depth),
      int_key("quantization_bits", &EngineConfig::quant_bits),
      int_key("fraction_bits", &EngineConfig::frac_bits),
      int_key("weight_sharing_bits", &EngineConfig::weight_sharing_bits),
      int_key("pipeline_stages", &EngineConfig::pipeline_stages),
      int_key("activation_sram_banks", &EngineConfig::act_banks),
      int_key("activation_sram_width", &EngineConfig::act_bank_width),
      int_key("activation_sram_depth", &EngineConfig::act_bank_depth),
      int_key("activation_fifo_width", &EngineConfig::fifo_width),
      int_key("activation_fifo_depth", &EngineConfig::fifo_depth),
      {"clock_hz", [](EngineConfig& c, double v) { c.clock_hz = v; },
       [](const EngineConfig& c) { return c.clock_hz; }, false},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

EngineConfig parse_config(std::string_view text) {
  EngineConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const Key* match = nullptr;
    for (const auto& k : keys()) {
      if (key == k.name) match = &k;
    }
    if (match == nullptr) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) throw ConfigError(where + "repeated key '" + std::string(key) + "'");
    double v = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || end != value.data() + value.size() || !(v >= 0.0)) {
      throw ConfigError(where + "bad value '" + std::string(value) + "' for " + std::string(key));
    }
    if (match->integral && (v != static_cast<double>(static_cast<std::uint64_t>(v)) || v > 4294967295.0)) {
      throw ConfigError(where + std::string(key) + " must be a non-negative integer");
    }
    match->set(cfg, v);
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_config_text(const EngineConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) {
    char buf[64];
    const double v = k.get(cfg);
    if (k.integral) {
      std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
    } else {
      const auto r = std::to_chars(buf, buf + sizeof buf - 1, v);
      *r.ptr = '\0';
    }
    out += k.name;
    out += " = ";
    out += buf;
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_digest(const EngineConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_config_text(cfg))));
  return buf;
}

}  // namespace bpdnn
