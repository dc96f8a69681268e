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

#include "bpdnn/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <vector>

namespace bpdnn {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest decimal text that parses back to the same double.
std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string cell(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return number(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (std::size_t n = 0; n < v.size(); ++n) {
      if (n > 0) out += ',';
      out += cell(v[n]);
    }
    return out;
  }
  return v.dump();
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.emplace_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

// Parses a rows-format cell using the type of the same key in `like`.
nlohmann::json parse_cell(const std::string& text, const ordered_json& like, const std::string& key) {
  try {
    if (like.is_string()) return text;
    if (like.is_array()) {
      nlohmann::json arr = nlohmann::json::array();
      std::size_t pos = 0;
      while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        arr.push_back(std::stoull(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return arr;
    }
    if (like.is_number_float()) {
      double v = 0.0;
      const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) throw std::invalid_argument(text);
      return v;
    }
    if (like.is_boolean()) return text == "true";
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ReportParseError("bad value '" + text + "' for field " + key);
  }
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ReportParseError(std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ReportParseError(std::string("wrong type for field ") + key);
  }
}

}  // namespace

std::optional<ReportFormat> parse_format(std::string_view name) {
  if (name == "human") return ReportFormat::Human;
  if (name == "rows" || name == "tsv") return ReportFormat::Rows;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["workload"] = r.workload;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  j["block"] = r.block;
  j["activation_density"] = r.activation_density;
  j["n_pe"] = r.n_pe;
  j["numeric"] = r.numeric;
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  const CycleReport& c = r.cycles;
  j["schedule_case"] = c.schedule_case;
  j["groups"] = c.groups;
  j["passes"] = c.passes;
  j["cycles_per_column"] = c.cycles_per_column;
  j["total_cycles"] = c.total_cycles;
  j["compute_cycles"] = c.compute_cycles;
  j["stall_cycles"] = c.stall_cycles;
  j["pipeline_fill"] = c.pipeline_fill;
  j["merge_cycles"] = c.merge_cycles;
  j["writeback_cycles"] = c.writeback_cycles;
  j["columns_processed"] = c.columns_processed;
  j["columns_skipped"] = c.columns_skipped;
  j["pe_macs"] = c.pe_macs;
  j["useful_macs"] = c.useful_macs;
  j["utilization"] = c.utilization;
  j["latency_seconds"] = r.latency_seconds;
  j["bits_per_weight"] = r.bits_per_weight;
  j["dense_bytes"] = r.dense_bytes;
  j["compressed_bytes"] = r.compressed_bytes;
  j["compression_ratio"] = r.compression_ratio;
  j["raw_gops"] = r.raw_gops;
  j["equivalent_tops"] = r.equivalent_tops;
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
  return j;
}

RunReport run_report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ReportParseError("run report must be an object");
  RunReport r;
  r.workload = field<std::string>(j, "workload");
  r.rows = field<std::size_t>(j, "rows");
  r.cols = field<std::size_t>(j, "cols");
  r.block = field<std::size_t>(j, "block");
  r.activation_density = field<double>(j, "activation_density");
  r.n_pe = field<std::size_t>(j, "n_pe");
  r.numeric = field<std::string>(j, "numeric");
  r.seed = field<std::uint64_t>(j, "seed");
  r.config_digest = field<std::string>(j, "config_digest");
  CycleReport& c = r.cycles;
  c.schedule_case = field<int>(j, "schedule_case");
  c.groups = field<std::size_t>(j, "groups");
  c.passes = field<std::size_t>(j, "passes");
  c.cycles_per_column = field<std::size_t>(j, "cycles_per_column");
  c.total_cycles = field<std::uint64_t>(j, "total_cycles");
  c.compute_cycles = field<std::uint64_t>(j, "compute_cycles");
  c.stall_cycles = field<std::uint64_t>(j, "stall_cycles");
  c.pipeline_fill = field<std::uint64_t>(j, "pipeline_fill");
  c.merge_cycles = field<std::uint64_t>(j, "merge_cycles");
  c.writeback_cycles = field<std::uint64_t>(j, "writeback_cycles");
  c.columns_processed = field<std::size_t>(j, "columns_processed");
  c.columns_skipped = field<std::size_t>(j, "columns_skipped");
  c.pe_macs = field<std::vector<std::uint64_t>>(j, "pe_macs");
  c.useful_macs = field<std::uint64_t>(j, "useful_macs");
  c.utilization = field<double>(j, "utilization");
  r.latency_seconds = field<double>(j, "latency_seconds");
  r.bits_per_weight = field<unsigned>(j, "bits_per_weight");
  r.dense_bytes = field<double>(j, "dense_bytes");
  r.compressed_bytes = field<double>(j, "compressed_bytes");
  r.compression_ratio = field<double>(j, "compression_ratio");
  r.raw_gops = field<double>(j, "raw_gops");
  r.equivalent_tops = field<double>(j, "equivalent_tops");
  if (j.contains("wall_seconds")) r.wall_seconds = field<double>(j, "wall_seconds");
  return r;
}

std::string emit_report(const RunReport& r, ReportFormat format) {
  const ordered_json j = to_json(r);
  if (format == ReportFormat::Json) return j.dump(2) + "\n";
  if (format == ReportFormat::Rows) {
    std::string header;
    std::string values;
    for (const auto& [key, value] : j.items()) {
      if (!header.empty()) {
        header += '\t';
        values += '\t';
      }
      header += key;
      values += cell(value);
    }
    return header + "\n" + values + "\n";
  }
  const CycleReport& c = r.cycles;
  std::ostringstream out;
  out << "workload        " << r.workload << " (" << r.rows << " x " << r.cols << ", p=" << r.block
      << ", activation density " << fixed(r.activation_density, 3) << ")\n";
  out << "engine          " << r.n_pe << " PEs, " << r.numeric << " numerics, config " << r.config_digest << "\n";
  out << "schedule        case " << c.schedule_case << ", " << c.passes << " pass(es), " << c.groups
      << " group(s), " << c.cycles_per_column << " cycle(s) per column\n";
  out << "cycles          total " << c.total_cycles << " = compute " << c.compute_cycles << " + stall "
      << c.stall_cycles << " + fill " << c.pipeline_fill << " + merge " << c.merge_cycles << " + writeback "
      << c.writeback_cycles << "\n";
  out << "columns         " << c.columns_processed << " processed, " << c.columns_skipped << " skipped\n";
  out << "MACs per PE     " << (c.pe_macs.empty() ? 0 : c.pe_macs.front()) << " (useful total " << c.useful_macs
      << ", utilization " << fixed(100.0 * c.utilization, 1) << "%)\n";
  out << "latency         " << fixed(r.latency_seconds * 1e6, 3) << " us\n";
  out << "storage         " << fixed(r.dense_bytes / 1e6, 2) << " MB dense -> " << fixed(r.compressed_bytes / 1e6, 2)
      << " MB at " << r.bits_per_weight << "-bit (" << fixed(r.compression_ratio, 2) << "x)\n";
  out << "throughput      " << fixed(r.raw_gops, 1) << " GOPS raw, " << fixed(r.equivalent_tops, 2)
      << " TOPS dense-equivalent\n";
  if (r.wall_seconds) out << "wall clock      " << fixed(*r.wall_seconds, 3) << " s\n";
  return out.str();
}

std::string emit_report(const SweepTable& t, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["workload"] = t.workload;
    j["rows"] = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json r;
      r["n_pe"] = row.n_pe;
      r["schedule_case"] = row.schedule_case;
      r["total_cycles"] = row.total_cycles;
      r["compute_cycles"] = row.compute_cycles;
      r["speedup"] = row.speedup;
      r["efficiency"] = row.efficiency;
      r["sublinear"] = row.sublinear;
      r["status"] = row.status;
      j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == ReportFormat::Rows) {
    out << "workload\tn_pe\tschedule_case\ttotal_cycles\tcompute_cycles\tspeedup\tefficiency\tsublinear\tstatus\n";
    for (const auto& row : t.rows) {
      out << t.workload << '\t' << row.n_pe << '\t' << row.schedule_case << '\t' << row.total_cycles << '\t'
          << row.compute_cycles << '\t' << number(row.speedup) << '\t' << number(row.efficiency) << '\t'
          << (row.sublinear ? "true" : "false") << '\t' << row.status << '\n';
    }
    return out.str();
  }
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-4s %14s %14s %8s %10s  %s\n", "PEs", "case", "total_cycles",
                "compute", "speedup", "efficiency", "note");
  out << "scalability: " << t.workload << "\n" << line;
  for (const auto& row : t.rows) {
    if (row.status != "ok") {
      std::snprintf(line, sizeof line, "%-6zu %-4s %14s %14s %8s %10s  %s\n", row.n_pe, "-", "-", "-", "-", "-",
                    ("does not fit: " + row.status).c_str());
    } else {
      std::snprintf(line, sizeof line, "%-6zu %-4d %14llu %14llu %8.3f %10.3f  %s\n", row.n_pe, row.schedule_case,
                    static_cast<unsigned long long>(row.total_cycles),
                    static_cast<unsigned long long>(row.compute_cycles), row.speedup, row.efficiency,
                    row.sublinear ? "sub-linear" : "");
    }
    out << line;
  }
  return out.str();
}

std::string emit_report(const CompressionStats& s, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["bits_per_weight"] = s.bits_per_weight;
    j["dense_bytes"] = s.dense_bytes;
    j["compressed_bytes"] = s.compressed_bytes;
    j["ratio"] = s.ratio;
    j["layers"] = ordered_json::array();
    for (const auto& l : s.per_layer) {
      ordered_json r;
      r["name"] = l.name;
      r["block"] = l.block;
      r["dense_params"] = l.dense_params;
      r["stored_params"] = l.stored_params;
      r["dense_bytes"] = l.dense_bytes;
      r["compressed_bytes"] = l.compressed_bytes;
      r["ratio"] = l.ratio;
      j["layers"].push_back(r);
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == ReportFormat::Rows) {
    out << "layer\tblock\tdense_params\tstored_params\tdense_bytes\tcompressed_bytes\tratio\n";
    for (const auto& l : s.per_layer) {
      out << l.name << '\t' << l.block << '\t' << l.dense_params << '\t' << l.stored_params << '\t'
          << number(l.dense_bytes) << '\t' << number(l.compressed_bytes) << '\t' << number(l.ratio) << '\n';
    }
    out << "total\t\t\t\t" << number(s.dense_bytes) << '\t' << number(s.compressed_bytes) << '\t' << number(s.ratio)
        << '\n';
    return out.str();
  }
  char line[160];
  out << "compression at " << s.bits_per_weight << "-bit weights (dense baseline 32-bit)\n";
  for (const auto& l : s.per_layer) {
    std::snprintf(line, sizeof line, "  %-10s p=%-3zu %10.2f MB -> %8.2f MB  (%.1fx)\n", l.name.c_str(), l.block,
                  l.dense_bytes / 1e6, l.compressed_bytes / 1e6, l.ratio);
    out << line;
  }
  std::snprintf(line, sizeof line, "  %-16s %10.2f MB -> %8.2f MB  (%.2fx)\n", "total", s.dense_megabytes(),
                s.compressed_megabytes(), s.ratio);
  out << line;
  return out.str();
}

RunReport parse_run_report(std::string_view text, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ReportParseError(std::string("invalid JSON: ") + e.what());
    }
    return run_report_from_json(j);
  }
  if (format != ReportFormat::Rows) throw ReportParseError("human reports are not parseable");
  const auto nl = text.find('\n');
  if (nl == std::string_view::npos) throw ReportParseError("rows report needs a header and a data line");
  std::string_view data = text.substr(nl + 1);
  if (!data.empty() && data.back() == '\n') data.remove_suffix(1);
  const auto header = split_tabs(text.substr(0, nl));
  const auto values = split_tabs(data);
  if (header.size() != values.size()) throw ReportParseError("rows report header and data differ in length");

  RunReport typed_template;
  typed_template.wall_seconds = 0.0;
  const ordered_json like = to_json(typed_template);
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t n = 0; n < header.size(); ++n) {
    if (!like.contains(header[n])) throw ReportParseError("unknown field " + header[n]);
    j[header[n]] = parse_cell(values[n], like[header[n]], header[n]);
  }
  return run_report_from_json(j);
}

}  // namespace bpdnn
