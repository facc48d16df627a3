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

#ifndef OODEVAL_MATCHING_HPP_
#define OODEVAL_MATCHING_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "oodeval/geometry.hpp"
#include "oodeval/suppression.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

struct MatchPair {
  std::size_t detection;
  std::size_t ground_truth;
  double iou;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

// Indices refer to positions in the inputs of MatchImage.
struct MatchResult {
  std::vector<MatchPair> pairs;  // in detection rank order
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_ground_truth;
};

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) {
    return a += b;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

namespace internal {

inline constexpr long kUnmatched = -1;

// Greedy one-to-one assignment. Detections are visited in `order`; each takes
// the untaken ground truth with the highest IoU >= threshold (lowest index on
// ties). Ground truth flagged in `gt_ignore` is only taken when no regular
// candidate qualifies. Returns, per detection position, the matched ground
// truth index or kUnmatched.
inline std::vector<long> GreedyAssign(std::span<const Detection> detections,
                                      std::span<const std::size_t> order,
                                      std::span<const GroundTruthObject> ground_truth,
                                      const std::vector<bool>& gt_ignore,
                                      double iou_threshold) {
  std::vector<long> assigned(detections.size(), kUnmatched);
  std::vector<bool> taken(ground_truth.size(), false);
  for (std::size_t d : order) {
    long best = kUnmatched;
    double best_iou = 0.0;
    bool best_ignored = true;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (taken[g]) continue;
      const double iou = Iou(detections[d].box(), ground_truth[g].box());
      if (iou < iou_threshold) continue;
      const bool ignored = !gt_ignore.empty() && gt_ignore[g];
      const bool better = best == kUnmatched ||
                          (best_ignored && !ignored) ||
                          (best_ignored == ignored && iou > best_iou);
      if (better) {
        best = static_cast<long>(g);
        best_iou = iou;
        best_ignored = ignored;
      }
    }
    if (best != kUnmatched) {
      taken[best] = true;
      assigned[d] = best;
    }
  }
  return assigned;
}

inline void RequireSingleImage(std::span<const Detection> detections,
                               std::span<const GroundTruthObject> ground_truth) {
  const std::string* image = nullptr;
  auto check = [&](const std::string& id) {
    if (image == nullptr) {
      image = &id;
    } else if (*image != id) {
      throw DataError("matching input mixes images '" + *image + "' and '" + id + "'");
    }
  };
  for (const auto& d : detections) check(d.image_id());
  for (const auto& g : ground_truth) check(g.image_id());
}

}  // namespace internal

// Greedy score-ordered matching of one image's detections to its ground truth.
inline MatchResult MatchImage(std::span<const Detection> detections,
                              std::span<const GroundTruthObject> ground_truth,
                              double iou_threshold) {
  RequireOpenUnitInterval(iou_threshold, "match IoU threshold");
  internal::RequireSingleImage(detections, ground_truth);
  const auto order = RankDetections(detections);
  const auto assigned =
      internal::GreedyAssign(detections, order, ground_truth, {}, iou_threshold);

  MatchResult result;
  std::vector<bool> gt_matched(ground_truth.size(), false);
  for (std::size_t d : order) {
    if (assigned[d] == internal::kUnmatched) {
      result.unmatched_detections.push_back(d);
    } else {
      const auto g = static_cast<std::size_t>(assigned[d]);
      gt_matched[g] = true;
      result.pairs.push_back({d, g, Iou(detections[d].box(), ground_truth[g].box())});
    }
  }
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    if (!gt_matched[g]) result.unmatched_ground_truth.push_back(g);
  }
  return result;
}

inline ConfusionCounts Confusion(const MatchResult& match) {
  return {static_cast<long>(match.pairs.size()),
          static_cast<long>(match.unmatched_detections.size()),
          static_cast<long>(match.unmatched_ground_truth.size())};
}

}  // namespace oodeval

#endif  // OODEVAL_MATCHING_HPP_
