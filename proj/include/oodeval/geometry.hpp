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

// Box arithmetic on continuous coordinates (width = x2 - x1, no +1 pixel).

#ifndef OODEVAL_GEOMETRY_HPP_
#define OODEVAL_GEOMETRY_HPP_

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>

#include "oodeval/types.hpp"

namespace oodeval {

// Overlap area; zero for boxes that only share an edge or corner.
inline double IntersectionArea(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1()));
  const double h = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1()));
  return w * h;
}

inline double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::min(1.0, inter / uni);
}

enum class AugmentationKind { kIdentity, kHorizontalFlip, kRotate90Cw, kRotate90Ccw };

inline std::string_view ToString(AugmentationKind kind) {
  switch (kind) {
    case AugmentationKind::kIdentity: return "identity";
    case AugmentationKind::kHorizontalFlip: return "horizontal_flip";
    case AugmentationKind::kRotate90Cw: return "rotate90_cw";
    case AugmentationKind::kRotate90Ccw: return "rotate90_ccw";
  }
  return "unknown";
}

inline AugmentationKind ParseAugmentationKind(std::string_view name) {
  if (name == "identity") return AugmentationKind::kIdentity;
  if (name == "horizontal_flip" || name == "hflip") {
    return AugmentationKind::kHorizontalFlip;
  }
  if (name == "rotate90_cw" || name == "rot90_cw") return AugmentationKind::kRotate90Cw;
  if (name == "rotate90_ccw" || name == "rot90_ccw") return AugmentationKind::kRotate90Ccw;
  throw ConfigError("unknown augmentation kind '" + std::string(name) + "'");
}

// How an augmented image was derived from its original. The reference size is
// always the ORIGINAL image's; 90 degree rotations swap width and height of
// the augmented image.
class AugmentationSpec {
 public:
  AugmentationSpec(AugmentationKind kind, double reference_width,
                   double reference_height)
      : kind_(kind), width_(reference_width), height_(reference_height) {
    if (!(reference_width > 0) || !(reference_height > 0)) {
      throw ConfigError("augmentation reference dimensions must be positive");
    }
  }

  AugmentationKind kind() const { return kind_; }
  double reference_width() const { return width_; }
  double reference_height() const { return height_; }

 private:
  AugmentationKind kind_;
  double width_;
  double height_;
};

// Maps a box from the augmented image's frame back to the original frame.
//
//   horizontal_flip: (x, y) -> (W - x, y)
//   rotate90_cw:     the original was turned clockwise, so (x', y') -> (y', H - x')
//   rotate90_ccw:    the original was turned counter-clockwise, (x', y') -> (W - y', x')
//
// Corners are re-sorted after mapping.
inline BoundingBox DeaugmentBox(const BoundingBox& box, const AugmentationSpec& aug) {
  const double w = aug.reference_width();
  const double h = aug.reference_height();
  double ax = 0, ay = 0, bx = 0, by = 0;
  switch (aug.kind()) {
    case AugmentationKind::kIdentity:
      return box;
    case AugmentationKind::kHorizontalFlip:
      ax = w - box.x1(); ay = box.y1();
      bx = w - box.x2(); by = box.y2();
      break;
    case AugmentationKind::kRotate90Cw:
      ax = box.y1(); ay = h - box.x1();
      bx = box.y2(); by = h - box.x2();
      break;
    case AugmentationKind::kRotate90Ccw:
      ax = w - box.y1(); ay = box.x1();
      bx = w - box.y2(); by = box.x2();
      break;
  }
  const double x1 = std::min(ax, bx), x2 = std::max(ax, bx);
  const double y1 = std::min(ay, by), y2 = std::max(ay, by);
  if (!(x1 < x2) || !(y1 < y2)) {
    throw std::logic_error("de-augmentation produced a degenerate box");
  }
  return BoundingBox(x1, y1, x2, y2);
}

}  // namespace oodeval

#endif  // OODEVAL_GEOMETRY_HPP_
