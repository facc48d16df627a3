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

// Run configuration: one JSON document per run. Relative paths resolve
// against the directory of the config file. Example:
//
//   {
//     "model": "grounding-dino",
//     "ground_truth": "gt.json",
//     "predictions": "predictions.json",
//     "prompts": [{"prompt_id": "p1", "weight": 0.6}, {"prompt_id": "p2", "weight": 0.4}],
//     "score_threshold": 0.1,
//     "match_iou": 0.1,
//     "threshold_set": "ap10",
//     "roi": {"mode": "mask-dir", "mask_dir": "masks"},
//     "output_dir": "out",
//     "format": "md"
//   }

#ifndef OODEVAL_CONFIG_HPP_
#define OODEVAL_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "oodeval/geometry.hpp"
#include "oodeval/io.hpp"
#include "oodeval/metrics.hpp"
#include "oodeval/report.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

enum class RoiMode { kNone, kMaskDir, kPredictedRoad };

inline std::string_view ToString(RoiMode mode) {
  switch (mode) {
    case RoiMode::kNone: return "none";
    case RoiMode::kMaskDir: return "mask-dir";
    case RoiMode::kPredictedRoad: return "predicted-road";
  }
  return "none";
}

inline RoiMode ParseRoiMode(std::string_view name) {
  if (name == "none") return RoiMode::kNone;
  if (name == "mask-dir") return RoiMode::kMaskDir;
  if (name == "predicted-road") return RoiMode::kPredictedRoad;
  throw ConfigError("unknown ROI mode '" + std::string(name) + "'");
}

struct PromptSetting {
  std::string prompt_id;
  double weight = 1.0;
};

struct AugmentedInput {
  std::filesystem::path predictions;
  AugmentationKind kind = AugmentationKind::kIdentity;
};

struct RunConfig {
  std::string model = "model";
  std::filesystem::path ground_truth;
  std::filesystem::path predictions;
  std::filesystem::path images;  // optional; image records default to ground_truth
  std::vector<PromptSetting> prompts;
  std::vector<double> weights;  // positional, in stream order; overrides prompts
  EvalConfig eval;
  SizeBuckets buckets;
  std::optional<int> ar_k;  // unset: 10 for the AP50..95 layout, off otherwise
  RoiMode roi_mode = RoiMode::kNone;
  std::filesystem::path mask_dir;
  double roi_score_floor = 0.1;
  std::vector<AugmentedInput> augmented;
  std::vector<std::vector<double>> weight_sweep;
  std::filesystem::path output_dir = "oodeval_out";
  ReportFormat format = ReportFormat::kCsv;
  int threads = 0;  // 0: hardware concurrency

  void Validate() const {
    eval.Validate();
    buckets.Validate();
    RequireUnitInterval(roi_score_floor, "roi score_floor");
    if (ar_k && *ar_k < 0) throw ConfigError("ar_k must be nonnegative");
    if (threads < 0) throw ConfigError("threads must be nonnegative");
    std::set<std::string> seen;
    bool any_positive = prompts.empty();
    for (const auto& p : prompts) {
      if (p.prompt_id.empty()) throw ConfigError("prompt_id must be non-empty");
      if (!seen.insert(p.prompt_id).second) {
        throw ConfigError("prompt '" + p.prompt_id + "' listed twice");
      }
      if (!(p.weight >= 0)) throw ConfigError("prompt '" + p.prompt_id + "' has negative weight");
      any_positive |= p.weight > 0;
    }
    if (!any_positive) throw ConfigError("at least one prompt weight must be positive");
    if (!weights.empty()) {
      double sum = 0;
      for (double w : weights) {
        if (!(w >= 0)) throw ConfigError("weights must be nonnegative");
        sum += w;
      }
      if (!(sum > 0)) throw ConfigError("all weights are zero");
    }
    for (const auto& pair : weight_sweep) {
      double sum = 0;
      for (double w : pair) {
        if (!(w >= 0)) throw ConfigError("weight_sweep entries must be nonnegative");
        sum += w;
      }
      if (!(sum > 0)) throw ConfigError("weight_sweep entry with all-zero weights");
    }
    if (roi_mode == RoiMode::kMaskDir && mask_dir.empty()) {
      throw ConfigError("ROI mode mask-dir needs roi.mask_dir");
    }
  }

  // Report columns: the standard layout for AP50..95 runs, the low-IoU
  // interval layout otherwise.
  ReportLayout Layout() const {
    ReportLayout layout;
    const bool standard = eval.threshold_set == ThresholdSetId::kAp50_95 ||
                          eval.threshold_set == ThresholdSetId::kAp50 ||
                          eval.threshold_set == ThresholdSetId::kAp75;
    if (standard) {
      layout.ap_sets = {ThresholdSetId::kAp50_95, ThresholdSetId::kAp50, ThresholdSetId::kAp75};
    } else {
      layout.ap_sets = {ThresholdSetId::kAp10, ThresholdSetId::kAp10_75,
                        ThresholdSetId::kAp20_75, ThresholdSetId::kAp50_95};
    }
    layout.size_set = eval.threshold_set;
    layout.buckets = buckets;
    const int k = ar_k.value_or(standard ? 10 : 0);
    if (k > 0) layout.recall_k = k;
    layout.match_iou = eval.match_iou;
    layout.max_detections_per_image = eval.max_detections_per_image;
    return layout;
  }

  // Canonical form used for the provenance hash. Thread count and output
  // directory are excluded: neither changes results.
  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["model"] = model;
    j["ground_truth"] = ground_truth.string();
    j["predictions"] = predictions.string();
    j["images"] = images.string();
    j["prompts"] = nlohmann::ordered_json::array();
    for (const auto& p : prompts) {
      j["prompts"].push_back({{"prompt_id", p.prompt_id}, {"weight", p.weight}});
    }
    j["weights"] = weights;
    j["score_threshold"] = eval.score_threshold;
    j["match_iou"] = eval.match_iou;
    j["nms_iou"] = eval.nms_iou;
    j["fuse_iou"] = eval.fuse_iou;
    j["roi_fraction"] = eval.roi_fraction;
    j["threshold_set"] = ThresholdSetName(eval.threshold_set);
    j["max_detections_per_image"] = eval.max_detections_per_image;
    j["ar_k"] = ar_k ? nlohmann::ordered_json(*ar_k) : nlohmann::ordered_json();
    j["size_buckets"] = {{"small_max", buckets.small_max}, {"medium_max", buckets.medium_max}};
    j["roi"] = {{"mode", ToString(roi_mode)},
                {"mask_dir", mask_dir.string()},
                {"score_floor", roi_score_floor}};
    j["augmented"] = nlohmann::ordered_json::array();
    for (const auto& a : augmented) {
      j["augmented"].push_back({{"predictions", a.predictions.string()}, {"kind", ToString(a.kind)}});
    }
    j["weight_sweep"] = weight_sweep;
    j["format"] = format == ReportFormat::kCsv ? "csv" : "md";
    return j;
  }
};

namespace internal {

inline double ConfigNumber(const nlohmann::json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("config '") + key + "' must be a number");
  return j.get<double>();
}

inline std::string ConfigString(const nlohmann::json& j, const char* key) {
  if (!j.is_string()) throw ConfigError(std::string("config '") + key + "' must be a string");
  return j.get<std::string>();
}

inline int ConfigInt(const nlohmann::json& j, const char* key) {
  if (!j.is_number_integer()) {
    throw ConfigError(std::string("config '") + key + "' must be an integer");
  }
  return j.get<int>();
}

}  // namespace internal

inline RunConfig ParseRunConfig(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  auto path = [&](const nlohmann::json& v, const char* key) {
    std::filesystem::path p = internal::ConfigString(v, key);
    return p.is_absolute() || p.empty() ? p : base_dir / p;
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "model") c.model = internal::ConfigString(v, "model");
    else if (key == "ground_truth") c.ground_truth = path(v, "ground_truth");
    else if (key == "predictions") c.predictions = path(v, "predictions");
    else if (key == "images") c.images = path(v, "images");
    else if (key == "prompts") {
      if (!v.is_array()) throw ConfigError("config 'prompts' must be an array");
      for (const auto& p : v) {
        if (!p.is_object() || !p.contains("prompt_id")) {
          throw ConfigError("config prompts need a 'prompt_id'");
        }
        PromptSetting s{internal::ConfigString(p["prompt_id"], "prompt_id"), 1.0};
        if (p.contains("weight")) s.weight = internal::ConfigNumber(p["weight"], "weight");
        c.prompts.push_back(std::move(s));
      }
    } else if (key == "weights") {
      if (!v.is_array()) throw ConfigError("config 'weights' must be an array");
      for (const auto& w : v) c.weights.push_back(internal::ConfigNumber(w, "weights"));
    } else if (key == "score_threshold") c.eval.score_threshold = internal::ConfigNumber(v, "score_threshold");
    else if (key == "match_iou") c.eval.match_iou = internal::ConfigNumber(v, "match_iou");
    else if (key == "nms_iou") c.eval.nms_iou = internal::ConfigNumber(v, "nms_iou");
    else if (key == "fuse_iou") c.eval.fuse_iou = internal::ConfigNumber(v, "fuse_iou");
    else if (key == "roi_fraction") c.eval.roi_fraction = internal::ConfigNumber(v, "roi_fraction");
    else if (key == "threshold_set") c.eval.threshold_set = ParseThresholdSetId(internal::ConfigString(v, "threshold_set"));
    else if (key == "max_detections_per_image") c.eval.max_detections_per_image = internal::ConfigInt(v, "max_detections_per_image");
    else if (key == "ar_k") {
      if (!v.is_null()) c.ar_k = internal::ConfigInt(v, "ar_k");
    } else if (key == "size_buckets") {
      if (!v.is_object()) throw ConfigError("config 'size_buckets' must be an object");
      if (v.contains("small_max")) c.buckets.small_max = internal::ConfigNumber(v["small_max"], "small_max");
      if (v.contains("medium_max")) c.buckets.medium_max = internal::ConfigNumber(v["medium_max"], "medium_max");
    } else if (key == "roi") {
      if (!v.is_object()) throw ConfigError("config 'roi' must be an object");
      if (v.contains("mode")) c.roi_mode = ParseRoiMode(internal::ConfigString(v["mode"], "roi.mode"));
      if (v.contains("mask_dir")) c.mask_dir = path(v["mask_dir"], "roi.mask_dir");
      if (v.contains("score_floor")) c.roi_score_floor = internal::ConfigNumber(v["score_floor"], "roi.score_floor");
    } else if (key == "augmented") {
      if (!v.is_array()) throw ConfigError("config 'augmented' must be an array");
      for (const auto& a : v) {
        if (!a.is_object() || !a.contains("predictions") || !a.contains("kind")) {
          throw ConfigError("augmented inputs need 'predictions' and 'kind'");
        }
        c.augmented.push_back({path(a["predictions"], "augmented.predictions"),
                               ParseAugmentationKind(internal::ConfigString(a["kind"], "augmented.kind"))});
      }
    } else if (key == "weight_sweep") {
      if (!v.is_array()) throw ConfigError("config 'weight_sweep' must be an array of arrays");
      for (const auto& pair : v) {
        if (!pair.is_array()) throw ConfigError("config 'weight_sweep' must be an array of arrays");
        std::vector<double> ws;
        for (const auto& w : pair) ws.push_back(internal::ConfigNumber(w, "weight_sweep"));
        c.weight_sweep.push_back(std::move(ws));
      }
    } else if (key == "output_dir") c.output_dir = path(v, "output_dir");
    else if (key == "format") c.format = ParseReportFormat(internal::ConfigString(v, "format"));
    else if (key == "threads") c.threads = internal::ConfigInt(v, "threads");
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

inline RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = internal::ReadFile(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": parse error at byte " + std::to_string(e.byte));
  }
  return ParseRunConfig(j, path.parent_path());
}

}  // namespace oodeval

#endif  // OODEVAL_CONFIG_HPP_
