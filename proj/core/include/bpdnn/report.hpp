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

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bpdnn/compression.hpp"
#include "bpdnn/engine.hpp"
#include "bpdnn/workload.hpp"

namespace bpdnn {

// human: aligned text; rows: tab-separated header + data lines; json: one
// object with a fixed key order.
enum class ReportFormat { Human, Rows, Json };

std::optional<ReportFormat> parse_format(std::string_view name);

class ReportParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::ordered_json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

std::string emit_report(const RunReport& report, ReportFormat format);
std::string emit_report(const SweepTable& table, ReportFormat format);
std::string emit_report(const CompressionStats& stats, ReportFormat format);

// Inverse of the rows and json forms of a RunReport. Throws ReportParseError.
RunReport parse_run_report(std::string_view text, ReportFormat format);

}  // namespace bpdnn
