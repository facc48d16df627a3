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

#include <gtest/gtest.h>

#include "oodeval/config.hpp"
#include "support.hpp"

namespace oodeval {
namespace {

RunConfig Parse(const char* text) { return ParseRunConfig(nlohmann::json::parse(text), "/base"); }

TEST(RunConfigTest, DefaultsFollowTheProtocol) {
  const RunConfig c;
  EXPECT_EQ(c.eval.score_threshold, 0.1);
  EXPECT_EQ(c.eval.match_iou, 0.5);
  EXPECT_EQ(c.eval.threshold_set, ThresholdSetId::kAp50_95);
  EXPECT_EQ(c.roi_mode, RoiMode::kNone);
  EXPECT_NO_THROW(c.Validate());
  const auto layout = c.Layout();
  EXPECT_EQ(layout.ap_sets, (std::vector<ThresholdSetId>{ThresholdSetId::kAp50_95, ThresholdSetId::kAp50,
                                                         ThresholdSetId::kAp75}));
  EXPECT_EQ(layout.recall_k, 10);
}

TEST(RunConfigTest, LowIouLayout) {
  RunConfig c;
  c.eval.threshold_set = ThresholdSetId::kAp10;
  const auto layout = c.Layout();
  EXPECT_EQ(layout.ap_sets.size(), 4u);
  EXPECT_EQ(layout.ap_sets.front(), ThresholdSetId::kAp10);
  EXPECT_FALSE(layout.recall_k.has_value());
  c.ar_k = 5;
  EXPECT_EQ(c.Layout().recall_k, 5);
}

TEST(RunConfigTest, ParsesEveryKey) {
  const auto c = Parse(R"({
    "model": "m", "ground_truth": "gt.json", "predictions": "/abs/p.json", "images": "img.json",
    "prompts": [{"prompt_id": "a", "weight": 0.3}, {"prompt_id": "b"}],
    "weights": [1, 2],
    "score_threshold": 0.2, "match_iou": 0.1, "nms_iou": 0.6, "fuse_iou": 0.4, "roi_fraction": 0.3,
    "threshold_set": "ap10_75", "max_detections_per_image": 50, "ar_k": 20,
    "size_buckets": {"small_max": 100, "medium_max": 1000},
    "roi": {"mode": "mask-dir", "mask_dir": "masks", "score_floor": 0.2},
    "augmented": [{"predictions": "flip.json", "kind": "hflip"}],
    "weight_sweep": [[1, 0], [0.5, 0.5]],
    "output_dir": "out", "format": "md", "threads": 2})");
  EXPECT_EQ(c.model, "m");
  EXPECT_EQ(c.ground_truth, std::filesystem::path("/base/gt.json"));
  EXPECT_EQ(c.predictions, std::filesystem::path("/abs/p.json"));
  ASSERT_EQ(c.prompts.size(), 2u);
  EXPECT_EQ(c.prompts[0].weight, 0.3);
  EXPECT_EQ(c.prompts[1].weight, 1.0);
  EXPECT_EQ(c.weights, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.eval.score_threshold, 0.2);
  EXPECT_EQ(c.eval.match_iou, 0.1);
  EXPECT_EQ(c.eval.threshold_set, ThresholdSetId::kAp10_75);
  EXPECT_EQ(c.eval.max_detections_per_image, 50);
  EXPECT_EQ(c.ar_k, 20);
  EXPECT_EQ(c.buckets.small_max, 100);
  EXPECT_EQ(c.roi_mode, RoiMode::kMaskDir);
  EXPECT_EQ(c.mask_dir, std::filesystem::path("/base/masks"));
  EXPECT_EQ(c.roi_score_floor, 0.2);
  ASSERT_EQ(c.augmented.size(), 1u);
  EXPECT_EQ(c.augmented[0].kind, AugmentationKind::kHorizontalFlip);
  EXPECT_EQ(c.weight_sweep.size(), 2u);
  EXPECT_EQ(c.format, ReportFormat::kMarkdown);
  EXPECT_EQ(c.threads, 2);
  EXPECT_NO_THROW(c.Validate());
}

TEST(RunConfigTest, RejectsBadInput) {
  EXPECT_THROW(Parse(R"({"colour": 1})"), ConfigError);
  EXPECT_THROW(Parse(R"({"score_threshold": "high"})"), ConfigError);
  EXPECT_THROW(Parse(R"({"threshold_set": "ap33"})"), ConfigError);
  EXPECT_THROW(Parse(R"({"roi": {"mode": "everywhere"}})"), ConfigError);
  EXPECT_THROW(Parse(R"({"augmented": [{"predictions": "x", "kind": "vflip"}]})"), ConfigError);
  EXPECT_THROW(Parse(R"({"max_detections_per_image": 1.5})"), ConfigError);
  EXPECT_THROW(Parse("[]"), ConfigError);
}

TEST(RunConfigTest, ValidationRules) {
  EXPECT_THROW(Parse(R"({"prompts": [{"prompt_id": "a", "weight": 0}]})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"prompts": [{"prompt_id": "a", "weight": -1}, {"prompt_id": "b"}]})").Validate(),
               ConfigError);
  EXPECT_THROW(Parse(R"({"prompts": [{"prompt_id": "a"}, {"prompt_id": "a"}]})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"weights": [0, 0]})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"weight_sweep": [[0, 0]]})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"roi": {"mode": "mask-dir"}})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"match_iou": 0})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"roi_fraction": 1.5})").Validate(), ConfigError);
  EXPECT_THROW(Parse(R"({"size_buckets": {"small_max": 10, "medium_max": 5}})").Validate(), ConfigError);
  EXPECT_NO_THROW(Parse(R"({"prompts": [{"prompt_id": "a", "weight": 0}, {"prompt_id": "b"}]})").Validate());
}

TEST(RunConfigTest, LoadFromFileAndHashIgnoresThreadsAndOutputDir) {
  testing_support::TempDir dir("config");
  testing_support::WriteText(dir / "run.json", R"({"ground_truth": "gt.json", "threads": 4})");
  const auto c = LoadRunConfig(dir / "run.json");
  EXPECT_EQ(c.ground_truth, dir / "gt.json");
  RunConfig single = c;
  single.threads = 1;
  single.output_dir = dir / "elsewhere";
  EXPECT_EQ(single.ToJson().dump(), c.ToJson().dump());
  single.model = "other";
  EXPECT_NE(single.ToJson().dump(), c.ToJson().dump());
  testing_support::WriteText(dir / "bad.json", "{\"model\": ");
  EXPECT_THROW(LoadRunConfig(dir / "bad.json"), ConfigError);
  EXPECT_THROW(LoadRunConfig(dir / "missing.json"), ConfigError);
}

}  // namespace
}  // namespace oodeval
