// Copyright 2026 The oodeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Results tables as CSV or aligned markdown. Metrics print with three
// decimals, counts as integers and undefined values as an em dash.

#ifndef OODEVAL_REPORT_HPP_
#define OODEVAL_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oodeval/io.hpp"
#include "oodeval/metrics.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

enum class ReportFormat { kCsv, kMarkdown };

inline ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

inline std::string_view ReportExtension(ReportFormat format) {
  return format == ReportFormat::kCsv ? ".csv" : ".md";
}

inline constexpr char kUndefinedCell[] = "—";

inline std::string FormatMetric(const std::optional<double>& value) {
  if (!value) return kUndefinedCell;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *value);
  return buf;
}

inline std::string_view ColumnName(ThresholdSetId id) {
  switch (id) {
    case ThresholdSetId::kAp50_95: return "AP50..95";
    case ThresholdSetId::kAp10: return "AP10";
    case ThresholdSetId::kAp10_75: return "AP10..75";
    case ThresholdSetId::kAp20_75: return "AP20..75";
    case ThresholdSetId::kAp50: return "AP50";
    case ThresholdSetId::kAp75: return "AP75";
    case ThresholdSetId::kCustom: return "AP";
  }
  return "AP";
}

using Provenance = std::vector<std::pair<std::string, std::string>>;

namespace internal {

struct Table {
  std::vector<std::string> header;
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> rows;
};

inline Table BuildTable(std::span<const MetricReport> reports) {
  const MetricReport& first = reports.front();
  Table t;
  auto col = [&](std::string name, bool numeric) {
    t.header.push_back(std::move(name));
    t.numeric.push_back(numeric);
  };
  col("Model", false);
  col("Prompt", false);
  col("Subset", false);
  for (const auto& e : first.ap) col(std::string(ColumnName(e.set)), true);
  col("APs", true);
  col("APm", true);
  col("APl", true);
  if (first.ar) col("AR" + std::to_string(first.ar->k), true);
  col("TP", true);
  col("FP", true);
  col("FN", true);

  for (const auto& r : reports) {
    if (r.ap.size() != first.ap.size() || r.ar.has_value() != first.ar.has_value()) {
      throw DataError("reports in one table must share a column layout");
    }
    std::vector<std::string> row{r.model, r.prompt, r.subset_id.value_or("")};
    for (const auto& e : r.ap) row.push_back(FormatMetric(e.value));
    row.push_back(FormatMetric(r.ap_small));
    row.push_back(FormatMetric(r.ap_medium));
    row.push_back(FormatMetric(r.ap_large));
    if (r.ar) row.push_back(FormatMetric(r.ar->value));
    row.push_back(std::to_string(r.counts.tp));
    row.push_back(std::to_string(r.counts.fp));
    row.push_back(std::to_string(r.counts.fn));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Display width in code points (UTF-8 continuation bytes not counted).
inline std::size_t DisplayWidth(const std::string& s) {
  return std::count_if(s.begin(), s.end(),
                       [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; });
}

inline std::string Pad(const std::string& s, std::size_t width, bool right) {
  const std::string fill(width - std::min(width, DisplayWidth(s)), ' ');
  return right ? fill + s : s + fill;
}

}  // namespace internal

inline std::string FormatReport(std::span<const MetricReport> reports, ReportFormat format,
                                const Provenance& provenance = {}) {
  if (reports.empty()) throw DataError("no reports to write");
  const auto t = internal::BuildTable(reports);
  std::string out;
  if (format == ReportFormat::kCsv) {
    for (const auto& [k, v] : provenance) out += "# " + k + ": " + v + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += internal::CsvField(cells[i]);
      }
      out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
  }

  for (const auto& [k, v] : provenance) out += "<!-- " + k + ": " + v + " -->\n";
  std::vector<std::size_t> width(t.header.size(), 3);
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    width[c] = std::max(width[c], internal::DisplayWidth(t.header[c]));
    for (const auto& r : t.rows) width[c] = std::max(width[c], internal::DisplayWidth(r[c]));
  }
  auto line = [&](const std::vector<std::string>& cells) {
    out += '|';
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out += ' ' + internal::Pad(cells[c], width[c], t.numeric[c]) + " |";
    }
    out += '\n';
  };
  line(t.header);
  out += '|';
  for (std::size_t c = 0; c < width.size(); ++c) {
    out += ' ' + std::string(width[c] - (t.numeric[c] ? 1 : 0), '-') + (t.numeric[c] ? ":" : "") + " |";
  }
  out += '\n';
  for (const auto& r : t.rows) line(r);
  return out;
}

inline void WriteReport(std::span<const MetricReport> reports, ReportFormat format,
                        const std::filesystem::path& path, const Provenance& provenance = {}) {
  internal::WriteFile(path, FormatReport(reports, format, provenance));
}

}  // namespace oodeval

#endif  // OODEVAL_REPORT_HPP_
