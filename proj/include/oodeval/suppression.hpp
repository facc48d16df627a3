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

#ifndef OODEVAL_SUPPRESSION_HPP_
#define OODEVAL_SUPPRESSION_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "oodeval/geometry.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

// Index order used wherever detections are ranked: score descending, then
// larger area first, then input position.
inline std::vector<std::size_t> RankDetections(std::span<const Detection> detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Detection& da = detections[a];
    const Detection& db = detections[b];
    if (da.score() != db.score()) return da.score() > db.score();
    return da.box().area() > db.box().area();
  });
  return order;
}

// Greedy non-maximum suppression over detections of a single image. A box is
// dropped when its IoU with an already kept box is >= iou_threshold. Survivors
// are returned in rank order.
inline std::vector<Detection> Nms(std::span<const Detection> detections,
                                  double iou_threshold) {
  RequireOpenUnitInterval(iou_threshold, "NMS IoU threshold");
  if (detections.empty()) return {};
  const std::string& image = detections.front().image_id();
  for (const auto& d : detections) {
    if (d.image_id() != image) {
      throw DataError("NMS input mixes images '" + image + "' and '" +
                      d.image_id() + "'");
    }
  }
  std::vector<Detection> kept;
  for (std::size_t idx : RankDetections(detections)) {
    const Detection& cand = detections[idx];
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
          return Iou(k.box(), cand.box()) >= iou_threshold;
        });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

// Groups detections by image id, keeping first-appearance order of images and
// input order within each group.
inline std::vector<std::vector<Detection>> GroupByImage(
    std::span<const Detection> detections) {
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<Detection>> groups;
  for (const auto& d : detections) {
    auto [it, inserted] = slot.emplace(d.image_id(), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(d);
  }
  return groups;
}

// NMS within each (prompt, image) group. Streams never suppress each other.
inline std::vector<PromptStream> NmsPerPrompt(std::span<const PromptStream> streams,
                                              double iou_threshold) {
  RequireOpenUnitInterval(iou_threshold, "NMS IoU threshold");
  std::vector<PromptStream> out;
  out.reserve(streams.size());
  for (const auto& stream : streams) {
    std::vector<Detection> survivors;
    for (const auto& group : GroupByImage(stream.detections())) {
      auto kept = Nms(group, iou_threshold);
      survivors.insert(survivors.end(), kept.begin(), kept.end());
    }
    out.push_back(stream.WithDetections(std::move(survivors)));
  }
  return out;
}

}  // namespace oodeval

#endif  // OODEVAL_SUPPRESSION_HPP_
