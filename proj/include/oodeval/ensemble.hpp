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

// Prompt ensemble and test-time-augmentation merging.
//
// Prompt fusion runs in three steps per image:
//   1. all detections of all streams are visited by descending score and
//      greedily clustered against the running fused box of each cluster,
//      allowing at most one member per prompt;
//   2. each cluster gets score sum_p w_p * s_p with weights normalized to sum
//      to one (prompts absent from a cluster contribute zero) and the mean of
//      its member boxes weighted by w_p * s_p;
//   3. plain NMS over the fused detections.

#ifndef OODEVAL_ENSEMBLE_HPP_
#define OODEVAL_ENSEMBLE_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oodeval/geometry.hpp"
#include "oodeval/suppression.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

inline constexpr char kEnsemblePromptId[] = "ensemble";

struct FusionMember {
  std::string prompt_id;
  Detection detection;
};

struct FusionCluster {
  std::vector<FusionMember> members;  // in join order, highest score first
  BoundingBox fused_box;
  double fused_score;

  bool has_prompt(const std::string& prompt_id) const {
    return std::any_of(members.begin(), members.end(),
                       [&](const FusionMember& m) { return m.prompt_id == prompt_id; });
  }
};

// prompt_id -> weight / sum of weights. Throws ConfigError when every weight
// is zero and DataError on duplicate prompt ids.
inline std::map<std::string, double> NormalizedWeights(
    std::span<const PromptStream> streams) {
  double total = 0.0;
  std::map<std::string, double> weights;
  for (const auto& s : streams) {
    if (!weights.emplace(s.prompt_id(), s.weight()).second) {
      throw DataError("duplicate prompt stream '" + s.prompt_id() + "'");
    }
    total += s.weight();
  }
  if (!streams.empty() && !(total > 0.0)) {
    throw ConfigError("all prompt weights are zero");
  }
  for (auto& [id, w] : weights) w /= total;
  return weights;
}

namespace internal {

// Mean of member boxes weighted by each member's share of the fused score,
// w_p * s_p. Falls back to the plain mean when every share is zero.
inline BoundingBox ContributionWeightedBox(const std::vector<FusionMember>& members,
                                           const std::map<std::string, double>& weights) {
  const BoundingBox& first = members.front().detection.box();
  if (std::all_of(members.begin(), members.end(),
                  [&](const FusionMember& m) { return m.detection.box() == first; })) {
    return first;
  }
  std::vector<double> share(members.size());
  double total = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    share[i] = weights.at(members[i].prompt_id) * members[i].detection.score();
    total += share[i];
  }
  const bool uniform = !(total > 0.0);
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double w = uniform ? 1.0 / members.size() : share[i] / total;
    const BoundingBox& b = members[i].detection.box();
    x1 += w * b.x1();
    y1 += w * b.y1();
    x2 += w * b.x2();
    y2 += w * b.y2();
  }
  return BoundingBox(x1, y1, x2, y2);
}

struct Candidate {
  const Detection* detection;
  std::size_t position;
};

// Clusters the candidates of one image. Candidates must already be ranked.
inline std::vector<FusionCluster> ClusterImage(const std::vector<Candidate>& ranked,
                                               const std::map<std::string, double>& weights,
                                               double fuse_iou) {
  std::vector<FusionCluster> clusters;
  for (const Candidate& c : ranked) {
    const Detection& det = *c.detection;
    std::ptrdiff_t best = -1;
    double best_iou = -1.0;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const double iou = Iou(clusters[k].fused_box, det.box());
      if (iou > best_iou) {
        best_iou = iou;
        best = static_cast<std::ptrdiff_t>(k);
      }
    }
    if (best >= 0 && best_iou >= fuse_iou && !clusters[best].has_prompt(det.prompt_id())) {
      FusionCluster& cl = clusters[best];
      cl.members.push_back({det.prompt_id(), det});
      cl.fused_box = ContributionWeightedBox(cl.members, weights);
    } else {
      clusters.push_back(FusionCluster{{{det.prompt_id(), det}}, det.box(), 0.0});
    }
  }
  for (auto& cl : clusters) {
    double score = 0.0;
    for (const auto& m : cl.members) score += weights.at(m.prompt_id) * m.detection.score();
    cl.fused_score = std::clamp(score, 0.0, 1.0);
  }
  return clusters;
}

}  // namespace internal

// Cross-prompt clusters for every image, images in ascending id order.
inline std::vector<FusionCluster> ClusterPrompts(std::span<const PromptStream> streams,
                                                 double fuse_iou) {
  RequireOpenUnitInterval(fuse_iou, "fusion IoU threshold");
  const auto weights = NormalizedWeights(streams);

  std::map<std::string, std::vector<internal::Candidate>> by_image;
  for (const auto& s : streams) {
    for (std::size_t i = 0; i < s.detections().size(); ++i) {
      const Detection& d = s.detections()[i];
      by_image[d.image_id()].push_back({&d, i});
    }
  }

  std::vector<FusionCluster> out;
  for (auto& [image, cands] : by_image) {
    // Ties resolved by prompt id rather than stream position, so reordering
    // the streams cannot change the result.
    std::stable_sort(cands.begin(), cands.end(),
                     [](const internal::Candidate& a, const internal::Candidate& b) {
                       const Detection& da = *a.detection;
                       const Detection& db = *b.detection;
                       if (da.score() != db.score()) return da.score() > db.score();
                       if (da.box().area() != db.box().area()) {
                         return da.box().area() > db.box().area();
                       }
                       if (da.prompt_id() != db.prompt_id()) {
                         return da.prompt_id() < db.prompt_id();
                       }
                       return a.position < b.position;
                     });
    auto clusters = internal::ClusterImage(cands, weights, fuse_iou);
    std::move(clusters.begin(), clusters.end(), std::back_inserter(out));
  }
  return out;
}

// Weighted prompt ensemble. Output detections carry prompt id "ensemble" and
// are grouped by image in ascending id order, rank-ordered within an image.
inline std::vector<Detection> FusePrompts(std::span<const PromptStream> streams,
                                          double fuse_iou, double nms_iou) {
  RequireOpenUnitInterval(nms_iou, "NMS IoU threshold");
  std::vector<Detection> fused;
  for (const auto& cl : ClusterPrompts(streams, fuse_iou)) {
    const Detection& top = cl.members.front().detection;
    fused.emplace_back(top.image_id(), cl.fused_box, cl.fused_score,
                       kEnsemblePromptId, top.label());
  }
  std::vector<Detection> out;
  for (const auto& group : GroupByImage(fused)) {
    auto kept = Nms(group, nms_iou);
    std::move(kept.begin(), kept.end(), std::back_inserter(out));
  }
  return out;
}

// Detections produced on one augmented view of an image set.
struct AugmentedDetections {
  AugmentationSpec spec;
  std::vector<Detection> detections;
};

// Maps augmented detections back to the original frame, pools them with the
// originals and runs NMS per (image, prompt). Scores are left untouched.
// Output groups are ordered by image id, then prompt id.
inline std::vector<Detection> FuseTta(std::span<const Detection> original,
                                      std::span<const AugmentedDetections> augmented,
                                      double nms_iou) {
  RequireOpenUnitInterval(nms_iou, "NMS IoU threshold");
  std::map<std::pair<std::string, std::string>, std::vector<Detection>> pools;
  for (const auto& d : original) pools[{d.image_id(), d.prompt_id()}].push_back(d);
  for (const auto& view : augmented) {
    for (const auto& d : view.detections) {
      pools[{d.image_id(), d.prompt_id()}].push_back(
          d.WithBox(DeaugmentBox(d.box(), view.spec)));
    }
  }
  std::vector<Detection> out;
  for (const auto& [key, pool] : pools) {
    auto kept = Nms(pool, nms_iou);
    std::move(kept.begin(), kept.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace oodeval

#endif  // OODEVAL_ENSEMBLE_HPP_
