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

#ifndef OODEVAL_DATASET_HPP_
#define OODEVAL_DATASET_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "oodeval/types.hpp"

namespace oodeval {

// Ground truth indexed by image and subset. Only produced by ValidateDataset,
// so every object resolves to an image and lies within its bounds.
class Dataset {
 public:
  const std::vector<ImageRecord>& images() const { return images_; }
  const std::vector<GroundTruthObject>& objects() const { return objects_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool has_image(const std::string& image_id) const {
    return image_index_.count(image_id) != 0;
  }
  const ImageRecord& image(const std::string& image_id) const {
    auto it = image_index_.find(image_id);
    if (it == image_index_.end()) {
      throw DataError("unknown image '" + image_id + "'");
    }
    return images_[it->second];
  }

  // Indices into objects() for one image; empty for images without objects.
  std::span<const std::size_t> objects_for(const std::string& image_id) const {
    auto it = objects_by_image_.find(image_id);
    if (it == objects_by_image_.end()) return {};
    return it->second;
  }

  // Subset id -> image ids, in image order. Empty when no image is tagged.
  const std::map<std::string, std::vector<std::string>>& subsets() const {
    return subsets_;
  }

  friend Dataset ValidateDataset(std::vector<GroundTruthObject>,
                                 std::vector<ImageRecord>);

 private:
  Dataset() = default;

  std::vector<ImageRecord> images_;
  std::vector<GroundTruthObject> objects_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t> image_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> objects_by_image_;
  std::map<std::string, std::vector<std::string>> subsets_;
};

namespace internal {

// Clamps one coordinate into [0, limit] when it overshoots by at most a pixel.
// Returns false when the overshoot is larger.
inline bool ClampCoordinate(double& value, double limit, bool& clamped) {
  if (value < 0.0) {
    if (value < -1.0) return false;
    value = 0.0;
    clamped = true;
  } else if (value > limit) {
    if (value > limit + 1.0) return false;
    value = limit;
    clamped = true;
  }
  return true;
}

}  // namespace internal

// Checks referential integrity and bounds, clamping boxes that exceed their
// image by at most one pixel (with a warning). Throws DataError otherwise.
inline Dataset ValidateDataset(std::vector<GroundTruthObject> ground_truth,
                               std::vector<ImageRecord> images) {
  Dataset ds;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!ds.image_index_.emplace(images[i].image_id(), i).second) {
      throw DataError("images[" + std::to_string(i) + "]: duplicate image id '" +
                      images[i].image_id() + "'");
    }
    if (images[i].subset_id()) {
      ds.subsets_[*images[i].subset_id()].push_back(images[i].image_id());
    }
  }
  ds.images_ = std::move(images);

  ds.objects_.reserve(ground_truth.size());
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    const auto& gt = ground_truth[i];
    const std::string where = "annotations[" + std::to_string(i) + "]";
    auto it = ds.image_index_.find(gt.image_id());
    if (it == ds.image_index_.end()) {
      throw DataError(where + ": unknown image '" + gt.image_id() + "'");
    }
    const ImageRecord& img = ds.images_[it->second];
    double x1 = gt.box().x1(), y1 = gt.box().y1();
    double x2 = gt.box().x2(), y2 = gt.box().y2();
    bool clamped = false;
    const double w = img.width(), h = img.height();
    if (!internal::ClampCoordinate(x1, w, clamped) ||
        !internal::ClampCoordinate(y1, h, clamped) ||
        !internal::ClampCoordinate(x2, w, clamped) ||
        !internal::ClampCoordinate(y2, h, clamped)) {
      throw DataError(where + ": box out of bounds of image '" +
                      gt.image_id() + "' (" + std::to_string(img.width()) +
                      "x" + std::to_string(img.height()) + ")");
    }
    if (clamped) {
      if (!(x1 < x2) || !(y1 < y2)) {
        throw DataError(where + ": box degenerates after clamping to image '" +
                        gt.image_id() + "'");
      }
      ds.warnings_.push_back(where + ": box clamped to bounds of image '" +
                             gt.image_id() + "'");
      ds.objects_.push_back(gt.WithBox(BoundingBox(x1, y1, x2, y2)));
    } else {
      ds.objects_.push_back(gt);
    }
    ds.objects_by_image_[gt.image_id()].push_back(i);
  }
  return ds;
}

// Re-validation of an already validated dataset is a no-op apart from
// dropping the warnings of the first pass.
inline Dataset ValidateDataset(const Dataset& dataset) {
  return ValidateDataset(dataset.objects(), dataset.images());
}

// Keeps detections with score >= threshold, preserving order.
inline std::vector<Detection> FilterByScore(std::span<const Detection> detections,
                                            double threshold) {
  RequireUnitInterval(threshold, "score threshold");
  std::vector<Detection> out;
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(out),
               [threshold](const Detection& d) { return d.score() >= threshold; });
  return out;
}

}  // namespace oodeval

#endif  // OODEVAL_DATASET_HPP_
