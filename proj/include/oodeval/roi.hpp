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

// Region-of-interest filtering. A region is either a binary mask with the
// image's dimensions or a union of rectangles (e.g. predicted road boxes).

#ifndef OODEVAL_ROI_HPP_
#define OODEVAL_ROI_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oodeval/geometry.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

// Row-major 8-bit mask, nonzero = inside. Keeps a summed-area table so that
// coverage queries are O(1).
class MaskRegion {
 public:
  MaskRegion(int width, int height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width <= 0 || height <= 0) throw DataError("ROI mask must be non-empty");
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
      throw DataError("ROI mask has " + std::to_string(pixels_.size()) +
                      " pixels, expected " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
    const std::size_t stride = width_ + 1;
    integral_.assign(stride * (height_ + 1), 0);
    for (int y = 0; y < height_; ++y) {
      std::uint64_t row = 0;
      for (int x = 0; x < width_; ++x) {
        row += pixels_[static_cast<std::size_t>(y) * width_ + x] != 0 ? 1 : 0;
        integral_[(y + 1) * stride + (x + 1)] = integral_[y * stride + (x + 1)] + row;
      }
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool inside(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
    return pixels_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }

  // Number of inside pixels in columns [x0, x1) and rows [y0, y1), clipped.
  std::uint64_t count(long x0, long y0, long x1, long y1) const {
    x0 = std::clamp<long>(x0, 0, width_);
    x1 = std::clamp<long>(x1, 0, width_);
    y0 = std::clamp<long>(y0, 0, height_);
    y1 = std::clamp<long>(y1, 0, height_);
    if (x0 >= x1 || y0 >= y1) return 0;
    const std::size_t stride = width_ + 1;
    return integral_[y1 * stride + x1] - integral_[y0 * stride + x1] -
           integral_[y1 * stride + x0] + integral_[y0 * stride + x0];
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
  std::vector<std::uint64_t> integral_;
};

class RectRegion {
 public:
  explicit RectRegion(std::vector<BoundingBox> rects) : rects_(std::move(rects)) {
    if (rects_.empty()) throw DataError("rectangle ROI needs at least one box");
  }
  const std::vector<BoundingBox>& rects() const { return rects_; }

 private:
  std::vector<BoundingBox> rects_;
};

class RegionOfInterest {
 public:
  RegionOfInterest(std::string image_id, MaskRegion mask)
      : image_id_(std::move(image_id)), region_(std::move(mask)) {}
  RegionOfInterest(std::string image_id, RectRegion rects)
      : image_id_(std::move(image_id)), region_(std::move(rects)) {}

  const std::string& image_id() const { return image_id_; }
  const std::variant<MaskRegion, RectRegion>& region() const { return region_; }
  const MaskRegion* mask() const { return std::get_if<MaskRegion>(&region_); }
  const RectRegion* rects() const { return std::get_if<RectRegion>(&region_); }

  // Mask regions must share the image's dimensions.
  void CheckAgainst(const ImageRecord& image) const {
    if (image.image_id() != image_id_) {
      throw DataError("ROI for '" + image_id_ + "' checked against image '" +
                      image.image_id() + "'");
    }
    if (const MaskRegion* m = mask();
        m && (m->width() != image.width() || m->height() != image.height())) {
      throw DataError("ROI mask for '" + image_id_ + "' is " +
                      std::to_string(m->width()) + "x" + std::to_string(m->height()) +
                      ", image is " + std::to_string(image.width()) + "x" +
                      std::to_string(image.height()));
    }
  }

 private:
  std::string image_id_;
  std::variant<MaskRegion, RectRegion> region_;
};

using RoiMap = std::map<std::string, RegionOfInterest>;

// Area of the union of `rects` restricted to `clip`, by an x-slab sweep.
inline double UnionAreaWithin(std::span<const BoundingBox> rects, const BoundingBox& clip) {
  struct Rect { double x1, y1, x2, y2; };
  std::vector<Rect> clipped;
  std::vector<double> xs;
  for (const auto& r : rects) {
    Rect c{std::max(r.x1(), clip.x1()), std::max(r.y1(), clip.y1()),
           std::min(r.x2(), clip.x2()), std::min(r.y2(), clip.y2())};
    if (c.x1 < c.x2 && c.y1 < c.y2) {
      clipped.push_back(c);
      xs.push_back(c.x1);
      xs.push_back(c.x2);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double area = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i], hi = xs[i + 1];
    spans.clear();
    for (const auto& c : clipped) {
      if (c.x1 <= lo && c.x2 >= hi) spans.emplace_back(c.y1, c.y2);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double start = spans.front().first, end = spans.front().second;
    for (const auto& [a, b] : spans) {
      if (a > end) {
        covered += end - start;
        start = a;
        end = b;
      } else {
        end = std::max(end, b);
      }
    }
    covered += end - start;
    area += covered * (hi - lo);
  }
  return area;
}

namespace internal {

// Pixel columns whose centers c + 0.5 satisfy lo <= c + 0.5 < hi.
inline std::pair<long, long> CenterRange(double lo, double hi) {
  return {static_cast<long>(std::ceil(lo - 0.5)), static_cast<long>(std::ceil(hi - 0.5))};
}

inline double MaskFraction(const BoundingBox& box, const MaskRegion& mask) {
  const auto [cx0, cx1] = CenterRange(box.x1(), box.x2());
  const auto [cy0, cy1] = CenterRange(box.y1(), box.y2());
  const long total = (cx1 - cx0) * (cy1 - cy0);
  if (total <= 0) {
    // Sub-pixel box covering no pixel center: use the pixel under its center.
    const double mx = 0.5 * (box.x1() + box.x2());
    const double my = 0.5 * (box.y1() + box.y2());
    return mask.inside(static_cast<int>(std::floor(mx)), static_cast<int>(std::floor(my)))
               ? 1.0
               : 0.0;
  }
  return static_cast<double>(mask.count(cx0, cy0, cx1, cy1)) / static_cast<double>(total);
}

}  // namespace internal

// Fraction of the box covered by the region. Mask regions count covered pixel
// centers; rectangle regions use exact union area.
inline double RoiOverlapFraction(const BoundingBox& box, const RegionOfInterest& roi) {
  if (const MaskRegion* m = roi.mask()) return internal::MaskFraction(box, *m);
  const double inter = UnionAreaWithin(roi.rects()->rects(), box);
  return std::clamp(inter / box.area(), 0.0, 1.0);
}

inline double RoiOverlapFraction(const Detection& det, const RegionOfInterest& roi) {
  if (det.image_id() != roi.image_id()) {
    throw DataError("detection on image '" + det.image_id() +
                    "' tested against ROI of image '" + roi.image_id() + "'");
  }
  return RoiOverlapFraction(det.box(), roi);
}

// Keeps detections whose ROI coverage is >= fraction_threshold. Images without
// a registered ROI pass through untouched.
inline std::vector<Detection> FilterByRoi(std::span<const Detection> detections,
                                          const RoiMap& rois, double fraction_threshold) {
  RequireUnitInterval(fraction_threshold, "ROI fraction threshold");
  std::vector<Detection> out;
  for (const auto& d : detections) {
    auto it = rois.find(d.image_id());
    if (it == rois.end() || RoiOverlapFraction(d, it->second) >= fraction_threshold) {
      out.push_back(d);
    }
  }
  return out;
}

// Builds a rectangle-union region from road boxes scoring >= score_floor.
// Returns nullopt (pass-through) with a warning when none qualifies.
inline std::optional<RegionOfInterest> RoiFromDetections(
    std::span<const Detection> road_detections, const ImageRecord& image,
    double score_floor, Diagnostics& diag) {
  RequireUnitInterval(score_floor, "road score floor");
  std::vector<BoundingBox> rects;
  for (const auto& d : road_detections) {
    if (d.image_id() != image.image_id()) {
      throw DataError("road detection for '" + d.image_id() +
                      "' used to build ROI of '" + image.image_id() + "'");
    }
    if (d.score() >= score_floor) rects.push_back(d.box());
  }
  if (rects.empty()) {
    diag.warn("image '" + image.image_id() +
              "': no road box above the score floor, ROI filter disabled");
    return std::nullopt;
  }
  return RegionOfInterest(image.image_id(), RectRegion(std::move(rects)));
}

}  // namespace oodeval

#endif  // OODEVAL_ROI_HPP_
