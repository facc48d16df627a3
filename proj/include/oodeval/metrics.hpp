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

// COCO-style detection metrics for a single class.
//
// AP at one IoU threshold is the 101-point interpolated area under the
// precision/recall curve built from detections pooled over all images and
// ranked by score. Interval metrics such as AP10..75 average that value over
// a threshold set. Size-bucketed AP follows the reference evaluator: ground
// truth outside the bucket is "ignored" (a detection matched to it leaves the
// pool), as are unmatched detections whose own area falls outside the bucket.
//
// A metric with no ground truth to measure against is undefined
// (std::nullopt), never zero.

#ifndef OODEVAL_METRICS_HPP_
#define OODEVAL_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oodeval/matching.hpp"
#include "oodeval/suppression.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

class ThresholdSet {
 public:
  static ThresholdSet Standard(ThresholdSetId id) {
    switch (id) {
      case ThresholdSetId::kAp50_95: return Range(id, 50, 95);
      case ThresholdSetId::kAp10: return Range(id, 10, 10);
      case ThresholdSetId::kAp10_75: return Range(id, 10, 75);
      case ThresholdSetId::kAp20_75: return Range(id, 20, 75);
      case ThresholdSetId::kAp50: return Range(id, 50, 50);
      case ThresholdSetId::kAp75: return Range(id, 75, 75);
      case ThresholdSetId::kCustom: break;
    }
    throw ConfigError("custom threshold sets need explicit thresholds");
  }

  static ThresholdSet Custom(std::vector<double> thresholds) {
    if (thresholds.empty()) throw ConfigError("threshold set is empty");
    for (double t : thresholds) RequireOpenUnitInterval(t, "IoU threshold");
    std::sort(thresholds.begin(), thresholds.end());
    return ThresholdSet(ThresholdSetId::kCustom, std::move(thresholds));
  }

  ThresholdSetId id() const { return id_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

 private:
  ThresholdSet(ThresholdSetId id, std::vector<double> t) : id_(id), thresholds_(std::move(t)) {}

  // Percent bounds, step 5.
  static ThresholdSet Range(ThresholdSetId id, int lo, int hi) {
    std::vector<double> t;
    for (int p = lo; p <= hi; p += 5) t.push_back(p / 100.0);
    return ThresholdSet(id, std::move(t));
  }

  ThresholdSetId id_;
  std::vector<double> thresholds_;
};

inline std::string_view ThresholdSetName(ThresholdSetId id) {
  switch (id) {
    case ThresholdSetId::kAp50_95: return "ap50_95";
    case ThresholdSetId::kAp10: return "ap10";
    case ThresholdSetId::kAp10_75: return "ap10_75";
    case ThresholdSetId::kAp20_75: return "ap20_75";
    case ThresholdSetId::kAp50: return "ap50";
    case ThresholdSetId::kAp75: return "ap75";
    case ThresholdSetId::kCustom: return "custom";
  }
  return "custom";
}

inline ThresholdSetId ParseThresholdSetId(std::string_view name) {
  for (auto id : {ThresholdSetId::kAp50_95, ThresholdSetId::kAp10, ThresholdSetId::kAp10_75,
                  ThresholdSetId::kAp20_75, ThresholdSetId::kAp50, ThresholdSetId::kAp75}) {
    if (ThresholdSetName(id) == name) return id;
  }
  throw ConfigError("unknown threshold set '" + std::string(name) + "'");
}

// Closed area interval [lo, hi], matching the reference evaluator's ranges.
struct AreaRange {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double area) const { return area >= lo && area <= hi; }
};

struct SizeBuckets {
  double small_max = 32.0 * 32.0;
  double medium_max = 96.0 * 96.0;

  void Validate() const {
    if (!(small_max > 0) || !(small_max < medium_max)) {
      throw ConfigError("size buckets need 0 < small_max < medium_max");
    }
  }
  AreaRange small() const { return {0.0, small_max}; }
  AreaRange medium() const { return {small_max, medium_max}; }
  AreaRange large() const { return {medium_max, std::numeric_limits<double>::infinity()}; }
};

struct PrPoint {
  double score;
  double precision;
  double recall;
  std::size_t true_positives;  // cumulative, up to and including this point
  std::size_t rank;            // 1-based position among non-ignored detections
};

struct PrCurve {
  std::vector<PrPoint> points;
  std::size_t num_ground_truth = 0;
};

namespace internal {

// Detections and ground truth of one image, detections in rank order.
struct ImageSlice {
  std::vector<Detection> detections;
  std::vector<GroundTruthObject> ground_truth;
};

// Groups inputs by image (ascending id), ranks detections and keeps at most
// `max_detections` of them per image.
inline std::vector<ImageSlice> SliceByImage(std::span<const Detection> detections,
                                            std::span<const GroundTruthObject> ground_truth,
                                            std::size_t max_detections) {
  std::map<std::string, ImageSlice> slices;
  std::map<std::string, std::vector<Detection>> raw;
  for (const auto& d : detections) raw[d.image_id()].push_back(d);
  for (const auto& g : ground_truth) slices[g.image_id()].ground_truth.push_back(g);
  for (auto& [image, dets] : raw) {
    auto& slice = slices[image];
    const auto order = RankDetections(dets);
    for (std::size_t i = 0; i < order.size() && i < max_detections; ++i) {
      slice.detections.push_back(dets[order[i]]);
    }
  }
  std::vector<ImageSlice> out;
  out.reserve(slices.size());
  for (auto& [image, slice] : slices) out.push_back(std::move(slice));
  return out;
}

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

struct RankedOutcome {
  double score;
  bool true_positive;
};

// Matches every image at `iou_threshold` and returns the non-ignored outcomes
// in global rank order plus the number of non-ignored ground truth objects.
inline std::pair<std::vector<RankedOutcome>, std::size_t> PooledOutcomes(
    const std::vector<ImageSlice>& slices, double iou_threshold,
    const std::optional<AreaRange>& range) {
  std::vector<RankedOutcome> outcomes;
  std::size_t num_gt = 0;
  for (const auto& slice : slices) {
    std::vector<bool> gt_ignore(slice.ground_truth.size(), false);
    if (range) {
      for (std::size_t g = 0; g < slice.ground_truth.size(); ++g) {
        gt_ignore[g] = !range->contains(slice.ground_truth[g].area());
      }
    }
    num_gt += std::count(gt_ignore.begin(), gt_ignore.end(), false);
    std::vector<std::size_t> order(slice.detections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto assigned = GreedyAssign(slice.detections, order, slice.ground_truth,
                                       gt_ignore, iou_threshold);
    for (std::size_t d = 0; d < slice.detections.size(); ++d) {
      const Detection& det = slice.detections[d];
      if (assigned[d] == kUnmatched) {
        if (range && !range->contains(det.box().area())) continue;
        outcomes.push_back({det.score(), false});
      } else if (!gt_ignore[assigned[d]]) {
        outcomes.push_back({det.score(), true});
      }
    }
  }
  // Stable: equal scores keep image order, then per-image rank.
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const RankedOutcome& a, const RankedOutcome& b) { return a.score > b.score; });
  return {std::move(outcomes), num_gt};
}

inline PrCurve CurveFromOutcomes(const std::vector<RankedOutcome>& outcomes,
                                 std::size_t num_gt) {
  PrCurve curve;
  curve.num_ground_truth = num_gt;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].true_positive) ++tp;
    const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    const double recall = num_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(num_gt);
    curve.points.push_back({outcomes[k].score, precision, recall, tp, k + 1});
  }
  return curve;
}

}  // namespace internal

// Ranked precision/recall points. `range` restricts evaluation to ground
// truth within an area bucket.
inline PrCurve BuildPrCurve(std::span<const Detection> detections,
                            std::span<const GroundTruthObject> ground_truth,
                            double iou_threshold,
                            const std::optional<AreaRange>& range = std::nullopt) {
  RequireOpenUnitInterval(iou_threshold, "IoU threshold");
  const auto slices = internal::SliceByImage(detections, ground_truth, internal::kNoLimit);
  auto [outcomes, num_gt] = internal::PooledOutcomes(slices, iou_threshold, range);
  return internal::CurveFromOutcomes(outcomes, num_gt);
}

// 101-point interpolated AP: mean over r in {0, 0.01, ..., 1} of the best
// precision achieved at recall >= r (0 when recall never reaches r).
inline std::optional<double> AveragePrecision(const PrCurve& curve) {
  if (curve.num_ground_truth == 0) return std::nullopt;
  const auto& pts = curve.points;
  std::vector<double> envelope(pts.size());
  double running = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    running = std::max(running, pts[i].precision);
    envelope[i] = running;
  }
  // recall >= r/100 <=> 100 * tp >= r * num_gt, compared exactly in integers.
  const std::size_t n = curve.num_ground_truth;
  double sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t r = 0; r <= 100; ++r) {
    while (idx < pts.size() && 100 * pts[idx].true_positives < r * n) ++idx;
    if (idx == pts.size()) break;
    sum += envelope[idx];
  }
  return sum / 101.0;
}

namespace internal {

inline std::optional<double> MeanAp(const std::vector<ImageSlice>& slices,
                                    const ThresholdSet& set,
                                    const std::optional<AreaRange>& range) {
  double sum = 0.0;
  for (double t : set.thresholds()) {
    auto [outcomes, num_gt] = PooledOutcomes(slices, t, range);
    const auto ap = AveragePrecision(CurveFromOutcomes(outcomes, num_gt));
    if (!ap) return std::nullopt;
    sum += *ap;
  }
  return sum / static_cast<double>(set.thresholds().size());
}

inline std::optional<double> MeanRecall(const std::vector<ImageSlice>& slices) {
  const auto set = ThresholdSet::Standard(ThresholdSetId::kAp50_95);
  std::size_t num_gt = 0;
  for (const auto& s : slices) num_gt += s.ground_truth.size();
  if (num_gt == 0) return std::nullopt;
  double sum = 0.0;
  for (double t : set.thresholds()) {
    std::size_t matched = 0;
    for (const auto& s : slices) {
      matched += Confusion(MatchImage(s.detections, s.ground_truth, t)).tp;
    }
    sum += static_cast<double>(matched) / static_cast<double>(num_gt);
  }
  return sum / static_cast<double>(set.thresholds().size());
}

}  // namespace internal

// Mean AP over the thresholds of `set`.
inline std::optional<double> ApOverThresholds(std::span<const Detection> detections,
                                              std::span<const GroundTruthObject> ground_truth,
                                              const ThresholdSet& set,
                                              const std::optional<AreaRange>& range = std::nullopt) {
  const auto slices = internal::SliceByImage(detections, ground_truth, internal::kNoLimit);
  return internal::MeanAp(slices, set, range);
}

struct SizedAp {
  std::optional<double> small;
  std::optional<double> medium;
  std::optional<double> large;
};

inline SizedAp SizeBucketedAp(std::span<const Detection> detections,
                              std::span<const GroundTruthObject> ground_truth,
                              const SizeBuckets& buckets, const ThresholdSet& set) {
  buckets.Validate();
  const auto slices = internal::SliceByImage(detections, ground_truth, internal::kNoLimit);
  return {internal::MeanAp(slices, set, buckets.small()),
          internal::MeanAp(slices, set, buckets.medium()),
          internal::MeanAp(slices, set, buckets.large())};
}

// Recall with the k best detections per image, averaged over AP50..95
// thresholds.
inline std::optional<double> AverageRecallAtK(std::span<const Detection> detections,
                                              std::span<const GroundTruthObject> ground_truth,
                                              int k) {
  if (k <= 0) throw ConfigError("AR@k needs k > 0");
  return internal::MeanRecall(
      internal::SliceByImage(detections, ground_truth, static_cast<std::size_t>(k)));
}

struct ApEntry {
  ThresholdSetId set;
  std::optional<double> value;

  friend bool operator==(const ApEntry&, const ApEntry&) = default;
};

struct RecallEntry {
  int k;
  std::optional<double> value;

  friend bool operator==(const RecallEntry&, const RecallEntry&) = default;
};

// One row of a results table.
struct MetricReport {
  std::string model;
  std::string prompt;
  std::optional<std::string> subset_id;
  std::vector<ApEntry> ap;  // column order
  std::optional<double> ap_small;
  std::optional<double> ap_medium;
  std::optional<double> ap_large;
  std::optional<RecallEntry> ar;  // absent when not computed
  ConfusionCounts counts;

  std::optional<double> ap_for(ThresholdSetId id) const {
    for (const auto& e : ap) {
      if (e.set == id) return e.value;
    }
    return std::nullopt;
  }

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Which columns a report carries and how they are computed.
struct ReportLayout {
  std::vector<ThresholdSetId> ap_sets;
  ThresholdSetId size_set = ThresholdSetId::kAp50_95;
  SizeBuckets buckets;
  std::optional<int> recall_k;
  double match_iou = 0.5;
  int max_detections_per_image = 100;
};

// Computes a full report row over one evaluation pool.
inline MetricReport EvaluateDetections(std::span<const Detection> detections,
                                       std::span<const GroundTruthObject> ground_truth,
                                       const ReportLayout& layout) {
  RequireOpenUnitInterval(layout.match_iou, "match IoU threshold");
  if (layout.max_detections_per_image <= 0) {
    throw ConfigError("max_detections_per_image must be positive");
  }
  const auto slices = internal::SliceByImage(
      detections, ground_truth, static_cast<std::size_t>(layout.max_detections_per_image));

  MetricReport report;
  for (auto id : layout.ap_sets) {
    report.ap.push_back({id, internal::MeanAp(slices, ThresholdSet::Standard(id), std::nullopt)});
  }
  const auto size_set = ThresholdSet::Standard(layout.size_set);
  layout.buckets.Validate();
  report.ap_small = internal::MeanAp(slices, size_set, layout.buckets.small());
  report.ap_medium = internal::MeanAp(slices, size_set, layout.buckets.medium());
  report.ap_large = internal::MeanAp(slices, size_set, layout.buckets.large());
  if (layout.recall_k) {
    std::vector<internal::ImageSlice> top_k;
    for (const auto& s : slices) {
      internal::ImageSlice t{{}, s.ground_truth};
      const std::size_t n = std::min<std::size_t>(s.detections.size(), *layout.recall_k);
      t.detections.assign(s.detections.begin(), s.detections.begin() + n);
      top_k.push_back(std::move(t));
    }
    report.ar = RecallEntry{*layout.recall_k, internal::MeanRecall(top_k)};
  }
  for (const auto& s : slices) {
    report.counts += Confusion(MatchImage(s.detections, s.ground_truth, layout.match_iou));
  }
  return report;
}

namespace internal {

inline std::optional<double> MeanDefined(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace internal

inline constexpr char kAverageSubsetId[] = "Average";

// Unweighted mean over per-subset reports. Undefined values are excluded from
// each mean; counts are averaged and rounded half away from zero.
inline MetricReport AggregateSubsets(std::span<const MetricReport> reports) {
  if (reports.empty()) throw DataError("cannot aggregate an empty list of reports");
  if (reports.size() == 1) return reports.front();

  std::set<std::string> seen;
  const MetricReport& first = reports.front();
  for (const auto& r : reports) {
    if (r.subset_id && !seen.insert(*r.subset_id).second) {
      throw DataError("duplicate subset '" + *r.subset_id + "' in aggregation");
    }
    if (r.ap.size() != first.ap.size() || r.ar.has_value() != first.ar.has_value()) {
      throw DataError("subset reports have different column layouts");
    }
    for (std::size_t i = 0; i < r.ap.size(); ++i) {
      if (r.ap[i].set != first.ap[i].set) {
        throw DataError("subset reports have different column layouts");
      }
    }
  }

  auto mean_of = [&](auto field) {
    std::vector<std::optional<double>> values;
    for (const auto& r : reports) values.push_back(field(r));
    return internal::MeanDefined(values);
  };
  auto mean_count = [&](long ConfusionCounts::*field) {
    double sum = 0.0;
    for (const auto& r : reports) sum += static_cast<double>(r.counts.*field);
    return std::lround(sum / static_cast<double>(reports.size()));
  };

  MetricReport out;
  out.model = first.model;
  out.prompt = first.prompt;
  for (const auto& r : reports) {
    if (r.prompt != first.prompt) out.prompt.clear();
  }
  out.subset_id = kAverageSubsetId;
  for (std::size_t i = 0; i < first.ap.size(); ++i) {
    out.ap.push_back({first.ap[i].set,
                      mean_of([i](const MetricReport& r) { return r.ap[i].value; })});
  }
  out.ap_small = mean_of([](const MetricReport& r) { return r.ap_small; });
  out.ap_medium = mean_of([](const MetricReport& r) { return r.ap_medium; });
  out.ap_large = mean_of([](const MetricReport& r) { return r.ap_large; });
  if (first.ar) {
    out.ar = RecallEntry{first.ar->k, mean_of([](const MetricReport& r) { return r.ar->value; })};
  }
  out.counts = {mean_count(&ConfusionCounts::tp), mean_count(&ConfusionCounts::fp),
                mean_count(&ConfusionCounts::fn)};
  return out;
}

}  // namespace oodeval

#endif  // OODEVAL_METRICS_HPP_
