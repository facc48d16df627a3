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

// Checks a library report against the independent oracles: exhaustive
// matching for counts, the reference evaluator for AP and AR.

#ifndef OODEVAL_TESTS_ORACLE_COMPARE_HPP_
#define OODEVAL_TESTS_ORACLE_COMPARE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "oodeval/metrics.hpp"
#include "oracle/brute_match.hpp"
#include "oracle/reference_eval.hpp"
#include "support.hpp"

namespace testing_support {

struct OracleLayout {
  double match_iou = 0.5;
  std::size_t max_dets = 100;
  int recall_k = 10;
};

inline std::vector<double> OracleThresholds(oodeval::ThresholdSetId id) {
  using Id = oodeval::ThresholdSetId;
  switch (id) {
    case Id::kAp50_95: return oracle::Thresholds(50, 95);
    case Id::kAp10: return oracle::Thresholds(10, 10);
    case Id::kAp10_75: return oracle::Thresholds(10, 75);
    case Id::kAp20_75: return oracle::Thresholds(20, 75);
    case Id::kAp50: return oracle::Thresholds(50, 50);
    case Id::kAp75: return oracle::Thresholds(75, 75);
    case Id::kCustom: break;
  }
  return {};
}

inline oodeval::ReportLayout LibraryLayout(const OracleLayout& o) {
  oodeval::ReportLayout l;
  using Id = oodeval::ThresholdSetId;
  l.ap_sets = {Id::kAp10, Id::kAp10_75, Id::kAp20_75, Id::kAp50_95, Id::kAp50, Id::kAp75};
  l.size_set = Id::kAp50_95;
  l.recall_k = o.recall_k;
  l.match_iou = o.match_iou;
  l.max_detections_per_image = static_cast<int>(o.max_dets);
  return l;
}

inline std::string CompareValue(const char* what, const std::optional<double>& got,
                                const std::optional<double>& want, double tol) {
  char buf[160];
  if (got.has_value() != want.has_value()) {
    std::snprintf(buf, sizeof(buf), "%s: defined %d vs oracle %d", what, got.has_value(), want.has_value());
    return buf;
  }
  if (got && !(std::fabs(*got - *want) <= tol)) {
    std::snprintf(buf, sizeof(buf), "%s: %.17g vs oracle %.17g", what, *got, *want);
    return buf;
  }
  return "";
}

// Empty when the library agrees with every oracle, else the first mismatch.
inline std::string CompareWithOracle(const MetricFixture& f, const OracleLayout& o, double tol = 1e-9) {
  const auto layout = LibraryLayout(o);
  const auto report = oodeval::EvaluateDetections(f.detections, f.ground_truth, layout);
  const auto dets = ToOracle(f.detections);
  const auto gts = ToOracle(f.ground_truth);

  oracle::Counts counts;
  for (int img = 0; img < f.num_images; ++img) {
    std::vector<oracle::Det> d;
    std::vector<oracle::Gt> g;
    for (const auto& x : dets) if (x.image == img) d.push_back(x);
    for (const auto& x : gts) if (x.image == img) g.push_back(x);
    const auto order = oracle::RankOrder(d);
    std::vector<oracle::Det> top;
    for (std::size_t k = 0; k < order.size() && k < o.max_dets; ++k) top.push_back(d[order[k]]);
    const auto c = oracle::BruteCounts(top, g, o.match_iou);
    counts.tp += c.tp;
    counts.fp += c.fp;
    counts.fn += c.fn;
  }
  if (report.counts.tp != counts.tp || report.counts.fp != counts.fp || report.counts.fn != counts.fn) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "counts %ld/%ld/%ld vs oracle %ld/%ld/%ld", report.counts.tp,
                  report.counts.fp, report.counts.fn, counts.tp, counts.fp, counts.fn);
    return buf;
  }

  const oracle::AreaRng all;
  for (const auto& entry : report.ap) {
    const auto acc = oracle::Accumulate(dets, gts, f.num_images, OracleThresholds(entry.set), all, o.max_dets);
    const std::string name = "AP " + std::string(oodeval::ThresholdSetName(entry.set));
    auto msg = CompareValue(name.c_str(), entry.value, oracle::MeanDefined(acc.precision), tol);
    if (!msg.empty()) return msg;
  }
  const auto size_thrs = OracleThresholds(layout.size_set);
  const double s = layout.buckets.small_max, m = layout.buckets.medium_max;
  const std::pair<const char*, std::pair<std::optional<double>, oracle::AreaRng>> sized[] = {
      {"APs", {report.ap_small, {0.0, s}}},
      {"APm", {report.ap_medium, {s, m}}},
      {"APl", {report.ap_large, {m, std::numeric_limits<double>::infinity()}}}};
  for (const auto& [name, pr] : sized) {
    const auto acc = oracle::Accumulate(dets, gts, f.num_images, size_thrs, pr.second, o.max_dets);
    auto msg = CompareValue(name, pr.first, oracle::MeanDefined(acc.precision), tol);
    if (!msg.empty()) return msg;
  }
  // The per-image detection cap applies before the recall cutoff.
  const auto rec = oracle::Accumulate(dets, gts, f.num_images, oracle::Thresholds(50, 95), all,
                                      std::min(o.max_dets, static_cast<std::size_t>(o.recall_k)));
  return CompareValue("AR", report.ar ? report.ar->value : std::nullopt, oracle::MeanDefined(rec.recall), tol);
}

}  // namespace testing_support

#endif  // OODEVAL_TESTS_ORACLE_COMPARE_HPP_
