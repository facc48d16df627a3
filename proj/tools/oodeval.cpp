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

// oodeval command-line tool. Exit codes: 0 ok, 1 data error, 2 config error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oodeval/config.hpp"
#include "oodeval/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

struct Overrides {
  std::string config;
  std::string ground_truth;
  std::string predictions;
  std::string images;
  std::string output_dir;
  std::string model;
  std::optional<double> score_threshold;
  std::optional<double> match_iou;
  std::optional<double> nms_iou;
  std::optional<double> fuse_iou;
  std::optional<double> roi_fraction;
  std::optional<double> roi_score_floor;
  std::string roi_mode;
  std::string mask_dir;
  std::string weights;
  std::string weight_sweep;
  std::string threshold_set;
  std::optional<int> max_dets;
  std::optional<int> ar_k;
  std::string format;
  std::optional<int> threads;
  std::vector<std::string> augmented;
};

std::vector<double> ParseWeights(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw oodeval::ConfigError("invalid weight '" + item + "'");
    }
  }
  if (out.empty()) throw oodeval::ConfigError("empty weight list");
  return out;
}

oodeval::RunConfig BuildConfig(const Overrides& o) {
  oodeval::RunConfig c;
  if (!o.config.empty()) c = oodeval::LoadRunConfig(o.config);
  if (!o.ground_truth.empty()) c.ground_truth = o.ground_truth;
  if (!o.predictions.empty()) c.predictions = o.predictions;
  if (!o.images.empty()) c.images = o.images;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (!o.model.empty()) c.model = o.model;
  if (o.score_threshold) c.eval.score_threshold = *o.score_threshold;
  if (o.match_iou) c.eval.match_iou = *o.match_iou;
  if (o.nms_iou) c.eval.nms_iou = *o.nms_iou;
  if (o.fuse_iou) c.eval.fuse_iou = *o.fuse_iou;
  if (o.roi_fraction) c.eval.roi_fraction = *o.roi_fraction;
  if (o.roi_score_floor) c.roi_score_floor = *o.roi_score_floor;
  if (!o.roi_mode.empty()) c.roi_mode = oodeval::ParseRoiMode(o.roi_mode);
  if (!o.mask_dir.empty()) c.mask_dir = o.mask_dir;
  if (!o.threshold_set.empty()) c.eval.threshold_set = oodeval::ParseThresholdSetId(o.threshold_set);
  if (o.max_dets) c.eval.max_detections_per_image = *o.max_dets;
  if (o.ar_k) c.ar_k = *o.ar_k;
  if (!o.format.empty()) c.format = oodeval::ParseReportFormat(o.format);
  if (o.threads) c.threads = *o.threads;
  if (!o.weights.empty()) c.weights = ParseWeights(o.weights);
  if (!o.weight_sweep.empty()) {
    c.weight_sweep.clear();
    std::stringstream ss(o.weight_sweep);
    std::string pair;
    while (std::getline(ss, pair, ';')) c.weight_sweep.push_back(ParseWeights(pair));
  }
  for (const auto& spec : o.augmented) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw oodeval::ConfigError("--augmented expects KIND:PATH, got '" + spec + "'");
    }
    c.augmented.push_back({spec.substr(colon + 1), oodeval::ParseAugmentationKind(spec.substr(0, colon))});
  }
  return c;
}

void AddCommonOptions(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)");
  cmd->add_option("--ground-truth", o.ground_truth, "Ground-truth annotation file");
  cmd->add_option("--predictions", o.predictions, "Prediction file");
  cmd->add_option("--images", o.images, "Image records file (defaults to the ground truth)");
  cmd->add_option("--output-dir", o.output_dir, "Directory for reports and prediction files");
  cmd->add_option("--model", o.model, "Model name shown in report rows");
  cmd->add_option("--score-threshold", o.score_threshold, "Minimum detection score (inclusive)");
  cmd->add_option("--match-iou", o.match_iou, "IoU needed to count a true positive");
  cmd->add_option("--nms-iou", o.nms_iou, "IoU at which NMS suppresses a box");
  cmd->add_option("--fuse-iou", o.fuse_iou, "IoU for associating boxes across prompts");
  cmd->add_option("--roi-mode", o.roi_mode, "none | mask-dir | predicted-road");
  cmd->add_option("--mask-dir", o.mask_dir, "Directory of <image_id>.png/.pgm ROI masks");
  cmd->add_option("--roi-fraction", o.roi_fraction, "Minimum fraction of a box inside the ROI");
  cmd->add_option("--roi-score-floor", o.roi_score_floor, "Minimum score of road boxes forming the ROI");
  cmd->add_option("--weights", o.weights, "Prompt weights w1,w2,... in stream order");
  cmd->add_option("--weight-sweep", o.weight_sweep, "Weight sets 'w1,w2;w1,w2;...', one report each");
  cmd->add_option("--threshold-set", o.threshold_set, "ap50_95 | ap10 | ap10_75 | ap20_75");
  cmd->add_option("--max-dets", o.max_dets, "Maximum detections per image");
  cmd->add_option("--ar-k", o.ar_k, "k for AR@k (0 disables)");
  cmd->add_option("--format", o.format, "csv | md");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--augmented", o.augmented, "Augmented predictions KIND:PATH (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate open-vocabulary detectors on out-of-distribution road-scene benchmarks"};
  app.require_subcommand(1);
  Overrides o;
  auto* validate = app.add_subcommand("validate", "Load and check all inputs, print a dataset summary");
  auto* evaluate = app.add_subcommand("evaluate", "Filter, suppress and score every prompt stream");
  auto* fuse = app.add_subcommand("fuse", "Fuse prompt streams by weighted scores, then evaluate");
  auto* tta = app.add_subcommand("tta-merge", "Merge test-time-augmented predictions into the original frame");
  for (auto* cmd : {validate, evaluate, fuse, tta}) AddCommonOptions(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    oodeval::RunConfig config = BuildConfig(o);
    oodeval::RunOutputs result;
    if (*validate) {
      result = oodeval::RunValidate(config, std::cout);
    } else if (*evaluate) {
      result = oodeval::RunEvaluate(config);
    } else if (*fuse) {
      result = oodeval::RunFuse(config);
    } else if (*tta) {
      result = oodeval::RunTtaMerge(config);
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& p : result.predictions) std::cout << "wrote " << p.string() << "\n";
    for (const auto& p : result.reports) std::cout << "wrote " << p.string() << "\n";
  } catch (const oodeval::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const oodeval::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}
