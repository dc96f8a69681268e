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

#include "bpdnn/config_file.hpp"

namespace bpdnn {
namespace {

TEST(ConfigFile, ParsesKeysAndComments) {
  const EngineConfig cfg = parse_config(
      "# 64-PE variant\n"
      "pe_amount = 64\n"
      "  multiplier_amount=4   # per PE\n"
      "\n"
      "accumulator_amount = 64\r\n"
      "clock_hz = 8e8\n");
  EXPECT_EQ(cfg.n_pe, 64u);
  EXPECT_EQ(cfg.n_mul, 4u);
  EXPECT_EQ(cfg.n_acc, 64u);
  EXPECT_EQ(cfg.clock_hz, 8e8);
  EXPECT_EQ(cfg.weight_sram_depth, EngineConfig{}.weight_sram_depth);
}

TEST(ConfigFile, EmptyTextGivesDefaults) { EXPECT_EQ(parse_config(""), EngineConfig{}); }

void expect_error_mentions(std::string_view text, const std::string& needle) {
  try {
    parse_config(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ConfigFile, RejectsBadInput) {
  expect_error_mentions("pe_amount = 8\nwarp_drive = 1\n", "line 2");
  expect_error_mentions("pe_amount = 8\npe_amount = 16\n", "line 2");
  expect_error_mentions("pe_amount = eight\n", "line 1");
  expect_error_mentions("pe_amount = 2.5\n", "line 1");
  expect_error_mentions("pe_amount = -4\n", "line 1");
  expect_error_mentions("pe_amount\n", "line 1");
  // Parses, but the result is not a valid engine.
  EXPECT_THROW(parse_config("accumulator_amount = 100\n"), std::exception);
}

TEST(ConfigFile, CanonicalTextRoundTrips) {
  EngineConfig cfg;
  cfg.n_pe = 48;
  cfg.fifo_depth = 16;
  cfg.clock_hz = 1.5e9;
  const std::string text = to_config_text(cfg);
  EXPECT_EQ(parse_config(text), cfg);
  EXPECT_EQ(to_config_text(parse_config(text)), text);
}

TEST(ConfigFile, DigestIsStableAndSensitive) {
  const EngineConfig a;
  EngineConfig b;
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16u);
  b.n_pe = 64;
  EXPECT_NE(config_digest(a), config_digest(b));
  // FNV-1a 64 reference values.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(ConfigFile, MissingFileThrows) {
  EXPECT_THROW(load_config("/nonexistent/engine.cfg"), ConfigError);
}

}  // namespace
}  // namespace bpdnn
