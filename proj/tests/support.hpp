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

// Seeded generators and small helpers shared by the test binaries.

#ifndef OODEVAL_TESTS_SUPPORT_HPP_
#define OODEVAL_TESTS_SUPPORT_HPP_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oodeval/types.hpp"
#include "oracle/reference_eval.hpp"

namespace testing_support {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double Real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  bool Chance(double p) { return Real(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Random box inside [0, w] x [0, h]. On a grid, coordinates are integers,
// which makes exact IoU ties and shared edges common.
inline oodeval::BoundingBox RandomBox(Rng& rng, double w, double h, bool grid,
                                      double min_side = 1.0, double max_side = 200.0) {
  max_side = std::min({max_side, w, h});
  double bw = rng.Real(min_side, max_side), bh = rng.Real(min_side, max_side);
  double x = rng.Real(0, w - bw), y = rng.Real(0, h - bh);
  if (grid) {
    bw = std::max(1.0, std::round(bw));
    bh = std::max(1.0, std::round(bh));
    x = std::floor(x);
    y = std::floor(y);
  }
  return oodeval::BoundingBox(x, y, x + bw, y + bh);
}

// A box near `base`: each edge moves by up to `jitter` times the side length.
inline oodeval::BoundingBox Jitter(Rng& rng, const oodeval::BoundingBox& base, double jitter,
                                   bool grid) {
  for (;;) {
    const double jw = jitter * base.width(), jh = jitter * base.height();
    double x1 = base.x1() + rng.Real(-jw, jw), x2 = base.x2() + rng.Real(-jw, jw);
    double y1 = base.y1() + rng.Real(-jh, jh), y2 = base.y2() + rng.Real(-jh, jh);
    if (grid) {
      x1 = std::round(x1);
      x2 = std::round(x2);
      y1 = std::round(y1);
      y2 = std::round(y2);
    }
    if (x1 < x2 && y1 < y2) return oodeval::BoundingBox(x1, y1, x2, y2);
  }
}

// Score drawn either from a coarse set (forcing ties) or continuously.
inline double RandomScore(Rng& rng, bool coarse) {
  if (coarse) return rng.Int(1, 10) / 10.0;
  return rng.Real(0.0, 1.0);
}

inline std::string ImageId(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "img%03d", i);
  return buf;
}

// Detections and ground truth over `num_images` images named ImageId(i).
struct MetricFixture {
  int num_images = 0;
  std::vector<oodeval::Detection> detections;
  std::vector<oodeval::GroundTruthObject> ground_truth;
};

struct FixtureLimits {
  int max_images = 20;
  int max_detections = 20;
  int max_ground_truth = 10;
};

inline MetricFixture RandomMetricFixture(Rng& rng, const FixtureLimits& lim = {}) {
  MetricFixture f;
  f.num_images = rng.Int(1, lim.max_images);
  const bool grid = rng.Chance(0.5);
  const bool coarse = rng.Chance(0.3);
  const double size = 400.0;
  for (int i = 0; i < f.num_images; ++i) {
    const std::string id = ImageId(i);
    const int ngt = rng.Int(0, lim.max_ground_truth);
    std::vector<oodeval::BoundingBox> gt_boxes;
    for (int g = 0; g < ngt; ++g) {
      auto box = RandomBox(rng, size, size, grid, 4.0, 160.0);
      gt_boxes.push_back(box);
      std::optional<double> area;
      if (rng.Chance(0.2)) area = rng.Real(10.0, 20000.0);
      f.ground_truth.emplace_back(id, box, area);
    }
    const int ndet = rng.Int(0, lim.max_detections);
    for (int d = 0; d < ndet; ++d) {
      oodeval::BoundingBox box = (!gt_boxes.empty() && rng.Chance(0.6))
                                     ? Jitter(rng, gt_boxes[rng.Int(0, ngt - 1)], rng.Real(0.0, 0.3), grid)
                                     : RandomBox(rng, size, size, grid, 4.0, 160.0);
      f.detections.emplace_back(id, box, RandomScore(rng, coarse), "p");
    }
  }
  return f;
}

inline int ImageIndex(const std::string& id) { return std::stoi(id.substr(3)); }

inline oracle::Box ToOracle(const oodeval::BoundingBox& b) { return {b.x1(), b.y1(), b.x2(), b.y2()}; }

inline std::vector<oracle::Det> ToOracle(const std::vector<oodeval::Detection>& dets) {
  std::vector<oracle::Det> out;
  for (const auto& d : dets) out.push_back({ImageIndex(d.image_id()), ToOracle(d.box()), d.score()});
  return out;
}

inline std::vector<oracle::Gt> ToOracle(const std::vector<oodeval::GroundTruthObject>& gts) {
  std::vector<oracle::Gt> out;
  for (const auto& g : gts) out.push_back({ImageIndex(g.image_id()), ToOracle(g.box()), g.area()});
  return out;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("oodeval_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support

#endif  // OODEVAL_TESTS_SUPPORT_HPP_
