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

// Shared data model: boxes, detections, ground truth, images, prompt streams
// and evaluation settings. Every type validates itself on construction and is
// immutable afterwards.

#ifndef OODEVAL_TYPES_HPP_
#define OODEVAL_TYPES_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oodeval {

// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (annotations, predictions, masks).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration or argument outside its documented range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Collects non-fatal diagnostics emitted while processing inputs.
class Diagnostics {
 public:
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t warning_count() const { return warnings_.size(); }

 private:
  std::vector<std::string> warnings_;
};

// Axis-aligned rectangle in corner form, image frame with origin top-left.
class BoundingBox {
 public:
  BoundingBox(double x1, double y1, double x2, double y2)
      : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
    if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) ||
        !std::isfinite(y2)) {
      throw DataError("bounding box has non-finite coordinates");
    }
    if (!(x1 < x2) || !(y1 < y2)) {
      throw DataError("bounding box must satisfy x1 < x2 and y1 < y2, got (" +
                      std::to_string(x1) + ", " + std::to_string(y1) + ", " +
                      std::to_string(x2) + ", " + std::to_string(y2) + ")");
    }
  }

  // [x, y, width, height] as used by the published results format.
  static BoundingBox FromXywh(double x, double y, double w, double h) {
    if (!std::isfinite(w) || !std::isfinite(h) || !(w > 0) || !(h > 0)) {
      throw DataError("bbox width and height must be positive and finite");
    }
    return BoundingBox(x, y, x + w, y + h);
  }

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }
  double width() const { return x2_ - x1_; }
  double height() const { return y2_ - y1_; }
  double area() const { return width() * height(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x1_, y1_, x2_, y2_;
};

inline void RequireUnitInterval(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in [0, 1], got " +
                      std::to_string(value));
  }
}

inline void RequireOpenUnitInterval(double value, const char* what) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in (0, 1], got " +
                      std::to_string(value));
  }
}

// A scored, prompt-attributed box on one image.
class Detection {
 public:
  Detection(std::string image_id, BoundingBox box, double score,
            std::string prompt_id, std::string label = {})
      : image_id_(std::move(image_id)),
        box_(box),
        score_(score),
        prompt_id_(std::move(prompt_id)),
        label_(std::move(label)) {
    if (!(score_ >= 0.0 && score_ <= 1.0)) {
      throw DataError("detection score must lie in [0, 1], got " +
                      std::to_string(score_));
    }
    if (image_id_.empty()) throw DataError("detection image_id is empty");
    if (prompt_id_.empty()) throw DataError("detection prompt_id is empty");
  }

  const std::string& image_id() const { return image_id_; }
  const BoundingBox& box() const { return box_; }
  double score() const { return score_; }
  const std::string& prompt_id() const { return prompt_id_; }
  const std::string& label() const { return label_; }

  Detection WithBox(BoundingBox box) const {
    return Detection(image_id_, box, score_, prompt_id_, label_);
  }
  Detection WithPrompt(std::string prompt_id) const {
    return Detection(image_id_, box_, score_, std::move(prompt_id), label_);
  }

  friend bool operator==(const Detection&, const Detection&) = default;

 private:
  std::string image_id_;
  BoundingBox box_;
  double score_;
  std::string prompt_id_;
  std::string label_;
};

// Annotated out-of-distribution instance.
class GroundTruthObject {
 public:
  // When `area` is absent the box area is used and tracked as derived, so a
  // later clamp of the box recomputes it.
  GroundTruthObject(std::string image_id, BoundingBox box,
                    std::optional<double> area = std::nullopt,
                    std::optional<std::string> subset_id = std::nullopt)
      : image_id_(std::move(image_id)),
        box_(box),
        area_(area.value_or(box.area())),
        explicit_area_(area.has_value()),
        subset_id_(std::move(subset_id)) {
    if (image_id_.empty()) throw DataError("ground truth image_id is empty");
    if (!std::isfinite(area_) || !(area_ > 0)) {
      throw DataError("ground truth area must be positive, got " +
                      std::to_string(area_));
    }
  }

  const std::string& image_id() const { return image_id_; }
  const BoundingBox& box() const { return box_; }
  double area() const { return area_; }
  bool has_explicit_area() const { return explicit_area_; }
  const std::optional<std::string>& subset_id() const { return subset_id_; }

  GroundTruthObject WithBox(BoundingBox box) const {
    return GroundTruthObject(
        image_id_, box,
        explicit_area_ ? std::optional<double>(area_) : std::nullopt,
        subset_id_);
  }

  friend bool operator==(const GroundTruthObject&,
                         const GroundTruthObject&) = default;

 private:
  std::string image_id_;
  BoundingBox box_;
  double area_;
  bool explicit_area_;
  std::optional<std::string> subset_id_;
};

// Image metadata. No pixels are stored.
class ImageRecord {
 public:
  ImageRecord(std::string image_id, int width, int height,
              std::optional<std::string> subset_id = std::nullopt)
      : image_id_(std::move(image_id)),
        width_(width),
        height_(height),
        subset_id_(std::move(subset_id)) {
    if (image_id_.empty()) throw DataError("image record id is empty");
    if (width <= 0 || height <= 0) {
      throw DataError("image '" + image_id_ +
                      "' must have positive width and height");
    }
  }

  const std::string& image_id() const { return image_id_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::optional<std::string>& subset_id() const { return subset_id_; }

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;

 private:
  std::string image_id_;
  int width_;
  int height_;
  std::optional<std::string> subset_id_;
};

// All detections one text prompt produced, with its ensemble weight.
class PromptStream {
 public:
  PromptStream(std::string prompt_id, std::string prompt_text, double weight,
               std::vector<Detection> detections)
      : prompt_id_(std::move(prompt_id)),
        prompt_text_(std::move(prompt_text)),
        weight_(weight),
        detections_(std::move(detections)) {
    if (prompt_id_.empty()) throw DataError("prompt stream id is empty");
    if (!std::isfinite(weight_) || weight_ < 0) {
      throw ConfigError("prompt '" + prompt_id_ +
                        "' weight must be nonnegative");
    }
    for (const auto& det : detections_) {
      if (det.prompt_id() != prompt_id_) {
        throw DataError("detection with prompt_id '" + det.prompt_id() +
                        "' placed in stream '" + prompt_id_ + "'");
      }
    }
  }

  const std::string& prompt_id() const { return prompt_id_; }
  const std::string& prompt_text() const { return prompt_text_; }
  double weight() const { return weight_; }
  const std::vector<Detection>& detections() const { return detections_; }

  PromptStream WithDetections(std::vector<Detection> detections) const {
    return PromptStream(prompt_id_, prompt_text_, weight_,
                        std::move(detections));
  }
  PromptStream WithWeight(double weight) const {
    return PromptStream(prompt_id_, prompt_text_, weight, detections_);
  }

  friend bool operator==(const PromptStream&, const PromptStream&) = default;

 private:
  std::string prompt_id_;
  std::string prompt_text_;
  double weight_;
  std::vector<Detection> detections_;
};

enum class ThresholdSetId { kAp50_95, kAp10, kAp10_75, kAp20_75, kAp50, kAp75, kCustom };

struct EvalConfig {
  double score_threshold = 0.1;
  double match_iou = 0.5;
  double nms_iou = 0.5;
  double fuse_iou = 0.5;
  double roi_fraction = 0.5;
  ThresholdSetId threshold_set = ThresholdSetId::kAp50_95;
  int max_detections_per_image = 100;

  void Validate() const {
    RequireUnitInterval(score_threshold, "score_threshold");
    RequireOpenUnitInterval(match_iou, "match_iou");
    RequireOpenUnitInterval(nms_iou, "nms_iou");
    RequireOpenUnitInterval(fuse_iou, "fuse_iou");
    RequireUnitInterval(roi_fraction, "roi_fraction");
    if (threshold_set == ThresholdSetId::kCustom) {
      throw ConfigError("threshold_set 'custom' cannot be selected for a run");
    }
    if (max_detections_per_image <= 0) {
      throw ConfigError("max_detections_per_image must be positive");
    }
  }
};

}  // namespace oodeval

#endif  // OODEVAL_TYPES_HPP_
