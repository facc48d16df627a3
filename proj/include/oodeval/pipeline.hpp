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

// End-to-end runs behind the command-line subcommands.
//
// evaluate:  score filter -> per-prompt NMS -> optional ROI filter ->
//            one report row per prompt (per subset plus an "Average" row
//            when the images carry subset tags)
// fuse:      score filter -> per-prompt NMS -> weighted prompt ensemble ->
//            fused prediction file -> evaluate on the fused stream
// tta-merge: de-augment augmented predictions, pool with the originals, NMS
// validate:  load and check every input, print a dataset summary

#ifndef OODEVAL_PIPELINE_HPP_
#define OODEVAL_PIPELINE_HPP_

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oodeval/config.hpp"
#include "oodeval/dataset.hpp"
#include "oodeval/digest.hpp"
#include "oodeval/ensemble.hpp"
#include "oodeval/io.hpp"
#include "oodeval/mask_io.hpp"
#include "oodeval/metrics.hpp"
#include "oodeval/parallel.hpp"
#include "oodeval/report.hpp"
#include "oodeval/roi.hpp"
#include "oodeval/suppression.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

inline constexpr char kToolVersion[] = "oodeval 1.0.0";

// Reraises an error with the failing stage prepended, keeping its type.
template <typename Fn>
auto RunStage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  }
}

// Files produced by a run.
struct RunOutputs {
  std::vector<std::filesystem::path> reports;
  std::vector<std::filesystem::path> predictions;
  std::vector<std::string> warnings;
};

namespace internal {

inline void RequirePath(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("no ") + what + " given");
}

inline Dataset LoadDatasetFor(const RunConfig& config) {
  RequirePath(config.ground_truth, "ground truth file");
  auto gt = RunStage("load ground truth", [&] { return LoadGroundTruth(config.ground_truth); });
  if (!config.images.empty()) {
    auto extra = RunStage("load images", [&] { return LoadGroundTruth(config.images); });
    gt.images = std::move(extra.images);
  }
  return RunStage("validate dataset",
                  [&] { return ValidateDataset(std::move(gt.objects), std::move(gt.images)); });
}

inline std::vector<ImageRecord> LoadImagesFor(const RunConfig& config) {
  const auto& path = config.images.empty() ? config.ground_truth : config.images;
  RequirePath(path, "image records (images or ground_truth)");
  auto file = RunStage("load images", [&] { return LoadGroundTruth(path); });
  return std::move(file.images);
}

// Orders streams as listed in the config (unlisted ones follow in file order)
// and applies configured weights.
inline std::vector<PromptStream> ApplyPromptSettings(std::vector<PromptStream> streams,
                                                     const RunConfig& config,
                                                     Diagnostics& diag) {
  std::vector<PromptStream> ordered;
  std::set<std::string> used;
  for (const auto& p : config.prompts) {
    auto it = std::find_if(streams.begin(), streams.end(),
                           [&](const PromptStream& s) { return s.prompt_id() == p.prompt_id; });
    if (it == streams.end()) {
      diag.warn("configured prompt '" + p.prompt_id + "' has no predictions");
      continue;
    }
    ordered.push_back(it->WithWeight(p.weight));
    used.insert(p.prompt_id);
  }
  for (auto& s : streams) {
    if (!used.count(s.prompt_id())) ordered.push_back(std::move(s));
  }
  if (!config.weights.empty()) {
    if (config.weights.size() != ordered.size()) {
      throw ConfigError(std::to_string(config.weights.size()) + " weights given for " +
                        std::to_string(ordered.size()) + " prompt streams");
    }
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      ordered[i] = ordered[i].WithWeight(config.weights[i]);
    }
  }
  return ordered;
}

struct LoadedPredictions {
  PredictionFile file;
  std::vector<PromptStream> streams;  // without the reserved ROI stream
  std::vector<Detection> road;        // reserved ROI stream
};

inline LoadedPredictions LoadPredictionsFor(const RunConfig& config, const Dataset* dataset,
                                            Diagnostics& diag) {
  RequirePath(config.predictions, "predictions file");
  LoadedPredictions out;
  out.file = RunStage("load predictions", [&] { return LoadPredictionFile(config.predictions); });
  for (std::size_t i = 0; dataset && i < out.file.entries.size(); ++i) {
    if (!dataset->has_image(out.file.entries[i].image_id)) {
      throw DataError("load predictions: " + config.predictions.string() + ": entries[" +
                      std::to_string(i) + "]: unknown image '" + out.file.entries[i].image_id + "'");
    }
  }
  std::vector<PromptStream> streams;
  for (auto& s : ToPromptStreams(out.file)) {
    if (s.prompt_id() == kRoiPromptId) {
      out.road = s.detections();
    } else {
      streams.push_back(std::move(s));
    }
  }
  out.streams = ApplyPromptSettings(std::move(streams), config, diag);
  return out;
}

inline RoiMap BuildRois(const RunConfig& config, const Dataset& dataset,
                        const std::vector<Detection>& road, Diagnostics& diag) {
  switch (config.roi_mode) {
    case RoiMode::kNone:
      return {};
    case RoiMode::kMaskDir:
      return RunStage("load ROI masks", [&] { return LoadMaskDir(config.mask_dir, dataset, diag); });
    case RoiMode::kPredictedRoad: {
      if (road.empty()) {
        throw DataError("build ROI: ROI mode predicted-road but predictions have no '" +
                        std::string(kRoiPromptId) + "' entries");
      }
      std::map<std::string, std::vector<Detection>> by_image;
      for (const auto& d : road) by_image[d.image_id()].push_back(d);
      RoiMap rois;
      for (const auto& img : dataset.images()) {
        auto roi = RoiFromDetections(by_image[img.image_id()], img, config.roi_score_floor, diag);
        if (roi) rois.emplace(img.image_id(), std::move(*roi));
      }
      return rois;
    }
  }
  return {};
}

// Score filter, per-image NMS and ROI filter for one stream.
inline std::vector<Detection> PrepareDetections(const PromptStream& stream, const RunConfig& config,
                                                const RoiMap& rois) {
  auto kept = FilterByScore(stream.detections(), config.eval.score_threshold);
  auto nmsed = NmsPerPrompt(std::vector<PromptStream>{stream.WithDetections(std::move(kept))},
                            config.eval.nms_iou);
  const auto& dets = nmsed.front().detections();
  if (rois.empty()) return dets;
  return FilterByRoi(dets, rois, config.eval.roi_fraction);
}

struct EvalJob {
  std::size_t stream;
  std::optional<std::string> subset;
};

// Report rows for every stream: one row each, or per-subset rows followed by
// their "Average" row when the dataset has subsets.
inline std::vector<MetricReport> EvaluateStreams(const std::vector<PromptStream>& streams,
                                                 const Dataset& dataset, const RoiMap& rois,
                                                 const RunConfig& config) {
  const ReportLayout layout = config.Layout();
  const auto& subsets = dataset.subsets();
  if (!subsets.empty()) {
    for (const auto& img : dataset.images()) {
      if (!img.subset_id()) {
        throw DataError("evaluate: image '" + img.image_id() +
                        "' has no subset while other images do");
      }
    }
  }

  std::vector<std::vector<Detection>> prepared(streams.size());
  ParallelFor(streams.size(), config.threads,
              [&](std::size_t i) { prepared[i] = PrepareDetections(streams[i], config, rois); });

  std::vector<EvalJob> jobs;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    if (subsets.empty()) {
      jobs.push_back({s, std::nullopt});
    } else {
      for (const auto& [id, images] : subsets) jobs.push_back({s, id});
    }
  }

  std::vector<MetricReport> rows(jobs.size());
  ParallelFor(jobs.size(), config.threads, [&](std::size_t j) {
    const EvalJob& job = jobs[j];
    const auto& dets = prepared[job.stream];
    MetricReport report;
    if (!job.subset) {
      report = EvaluateDetections(dets, dataset.objects(), layout);
    } else {
      const auto& images = subsets.at(*job.subset);
      const std::set<std::string> in_subset(images.begin(), images.end());
      std::vector<Detection> sub_dets;
      for (const auto& d : dets) {
        if (in_subset.count(d.image_id())) sub_dets.push_back(d);
      }
      std::vector<GroundTruthObject> sub_gt;
      for (const auto& img : images) {
        for (std::size_t g : dataset.objects_for(img)) sub_gt.push_back(dataset.objects()[g]);
      }
      report = EvaluateDetections(sub_dets, sub_gt, layout);
      report.subset_id = job.subset;
    }
    report.model = config.model;
    report.prompt = streams[job.stream].prompt_id();
    rows[j] = std::move(report);
  });

  if (subsets.empty()) return rows;
  std::vector<MetricReport> out;
  const std::size_t per_stream = subsets.size();
  for (std::size_t s = 0; s < streams.size(); ++s) {
    std::vector<MetricReport> group(rows.begin() + s * per_stream, rows.begin() + (s + 1) * per_stream);
    MetricReport avg = AggregateSubsets(group);
    avg.subset_id = kAverageSubsetId;
    avg.prompt = streams[s].prompt_id();
    out.insert(out.end(), group.begin(), group.end());
    out.push_back(std::move(avg));
  }
  return out;
}

inline Provenance MakeProvenance(const std::string& command, const RunConfig& config) {
  Provenance p;
  p.emplace_back("tool", kToolVersion);
  p.emplace_back("command", command);
  p.emplace_back("config_sha256", Sha256Hex(config.ToJson().dump()));
  auto add_file = [&](const std::string& name, const std::filesystem::path& path) {
    if (!path.empty() && std::filesystem::exists(path)) {
      p.emplace_back(name + "_sha256", FileSha256(path));
    }
  };
  add_file("ground_truth", config.ground_truth);
  add_file("images", config.images);
  add_file("predictions", config.predictions);
  for (std::size_t i = 0; i < config.augmented.size(); ++i) {
    add_file("augmented" + std::to_string(i), config.augmented[i].predictions);
  }
  if (config.roi_mode == RoiMode::kMaskDir && std::filesystem::is_directory(config.mask_dir)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(config.mask_dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& f : files) listing += f.filename().string() + ":" + FileSha256(f) + "\n";
    p.emplace_back("roi_masks_sha256", Sha256Hex(listing));
  }
  return p;
}

inline std::string FormatWeight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", w);
  return buf;
}

}  // namespace internal

inline std::filesystem::path ReportPath(const RunConfig& config, const std::string& stem) {
  return config.output_dir / (stem + std::string(ReportExtension(config.format)));
}

// Loads and checks every input named by the config and writes a summary.
// Throws on the first hard error.
inline RunOutputs RunValidate(const RunConfig& config, std::ostream& out) {
  RunStage("config", [&] { config.Validate(); });
  Diagnostics diag;
  const Dataset dataset = internal::LoadDatasetFor(config);
  for (const auto& w : dataset.warnings()) diag.warn(w);

  out << "images: " << dataset.images().size() << "\n";
  out << "objects: " << dataset.objects().size() << "\n";
  for (const auto& [subset, images] : dataset.subsets()) {
    std::size_t objects = 0;
    for (const auto& img : images) objects += dataset.objects_for(img).size();
    out << "subset " << subset << ": " << images.size() << " images, " << objects << " objects\n";
  }
  std::size_t small = 0, medium = 0, large = 0;
  for (const auto& g : dataset.objects()) {
    if (g.area() <= config.buckets.small_max) ++small;
    else if (g.area() <= config.buckets.medium_max) ++medium;
    else ++large;
  }
  out << "size buckets (small/medium/large): " << small << "/" << medium << "/" << large << "\n";

  std::vector<Detection> road;
  if (!config.predictions.empty()) {
    auto preds = internal::LoadPredictionsFor(config, &dataset, diag);
    out << "predictions: " << preds.file.entries.size() << " entries in " << preds.streams.size()
        << " prompt streams";
    if (!preds.road.empty()) out << " plus " << preds.road.size() << " ROI boxes";
    out << "\n";
    road = std::move(preds.road);
  }
  if (config.roi_mode != RoiMode::kNone) {
    const auto rois = internal::BuildRois(config, dataset, road, diag);
    out << "regions of interest: " << rois.size() << "\n";
  }
  for (const auto& a : config.augmented) {
    auto file = RunStage("load augmented predictions", [&] { return LoadPredictionFile(a.predictions); });
    for (std::size_t i = 0; i < file.entries.size(); ++i) {
      if (!dataset.has_image(file.entries[i].image_id)) {
        throw DataError("load augmented predictions: " + a.predictions.string() + ": entries[" +
                        std::to_string(i) + "]: unknown image '" + file.entries[i].image_id + "'");
      }
    }
  }
  out << "warnings: " << diag.warning_count() << "\n";
  for (const auto& w : diag.warnings()) out << "  warning: " << w << "\n";
  return {{}, {}, diag.warnings()};
}

inline RunOutputs RunEvaluate(const RunConfig& config) {
  RunStage("config", [&] { config.Validate(); });
  Diagnostics diag;
  const Dataset dataset = internal::LoadDatasetFor(config);
  auto preds = internal::LoadPredictionsFor(config, &dataset, diag);
  const RoiMap rois = internal::BuildRois(config, dataset, preds.road, diag);
  const auto rows = RunStage("evaluate", [&] {
    return internal::EvaluateStreams(preds.streams, dataset, rois, config);
  });
  if (rows.empty()) throw DataError("evaluate: predictions contain no prompt streams");
  RunOutputs out;
  out.reports.push_back(ReportPath(config, "report"));
  RunStage("write report", [&] {
    WriteReport(rows, config.format, out.reports.back(), internal::MakeProvenance("evaluate", config));
  });
  out.warnings = diag.warnings();
  return out;
}

inline RunOutputs RunFuse(const RunConfig& config) {
  RunStage("config", [&] { config.Validate(); });
  Diagnostics diag;
  const Dataset dataset = internal::LoadDatasetFor(config);
  auto preds = internal::LoadPredictionsFor(config, &dataset, diag);
  if (preds.streams.size() < 2) {
    throw ConfigError("fuse: needs at least two prompt streams, found " +
                      std::to_string(preds.streams.size()));
  }
  const RoiMap rois = internal::BuildRois(config, dataset, preds.road, diag);

  // Fusion input: score-filtered, per-prompt NMS'd streams.
  std::vector<PromptStream> prepared;
  for (const auto& s : preds.streams) {
    prepared.push_back(s.WithDetections(FilterByScore(s.detections(), config.eval.score_threshold)));
  }
  prepared = NmsPerPrompt(prepared, config.eval.nms_iou);

  std::vector<std::vector<double>> weight_sets = config.weight_sweep;
  const bool sweep = !weight_sets.empty();
  if (!sweep) {
    std::vector<double> ws;
    for (const auto& s : prepared) ws.push_back(s.weight());
    weight_sets.push_back(std::move(ws));
  }

  RunOutputs out;
  for (const auto& ws : weight_sets) {
    if (ws.size() != prepared.size()) {
      throw ConfigError("fuse: " + std::to_string(ws.size()) + " weights given for " +
                        std::to_string(prepared.size()) + " prompt streams");
    }
    std::vector<PromptStream> weighted;
    std::string suffix;
    for (std::size_t i = 0; i < prepared.size(); ++i) {
      weighted.push_back(prepared[i].WithWeight(ws[i]));
      suffix += (i ? "_" : "_w") + internal::FormatWeight(ws[i]);
    }
    if (!sweep) suffix.clear();

    const auto fused = RunStage("fuse", [&] {
      return FusePrompts(weighted, config.eval.fuse_iou, config.eval.nms_iou);
    });
    std::string description = "weighted prompt ensemble of";
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      description += " " + weighted[i].prompt_id() + "=" + internal::FormatWeight(ws[i]);
    }
    PredictionFile file = FromDetections(fused, {{kEnsemblePromptId, description, 1.0}});
    out.predictions.push_back(config.output_dir / ("fused" + suffix + ".json"));
    RunStage("write fused predictions", [&] { WritePredictionFile(file, out.predictions.back()); });

    // Evaluate exactly what was written, so re-evaluating the file reproduces
    // this report.
    auto streams = ToPromptStreams(file);
    if (streams.empty()) streams.emplace_back(kEnsemblePromptId, description, 1.0, std::vector<Detection>{});
    const auto rows = RunStage("evaluate", [&] {
      return internal::EvaluateStreams(streams, dataset, rois, config);
    });
    out.reports.push_back(ReportPath(config, "fused_report" + suffix));
    RunStage("write report", [&] {
      WriteReport(rows, config.format, out.reports.back(), internal::MakeProvenance("fuse", config));
    });
  }
  out.warnings = diag.warnings();
  return out;
}

inline RunOutputs RunTtaMerge(const RunConfig& config) {
  RunStage("config", [&] { config.Validate(); });
  RequireOpenUnitInterval(config.eval.nms_iou, "nms_iou");
  if (config.augmented.empty()) {
    throw ConfigError("tta-merge: no augmented prediction files given");
  }
  std::map<std::string, ImageRecord> images;
  for (auto& img : internal::LoadImagesFor(config)) images.emplace(img.image_id(), img);
  internal::RequirePath(config.predictions, "predictions file");
  const PredictionFile original =
      RunStage("load predictions", [&] { return LoadPredictionFile(config.predictions); });
  std::vector<Detection> originals;
  for (const auto& e : original.entries) originals.push_back(e.ToDetection());

  std::vector<AugmentedDetections> views;
  for (const auto& a : config.augmented) {
    const PredictionFile file =
        RunStage("load augmented predictions", [&] { return LoadPredictionFile(a.predictions); });
    std::map<std::string, std::vector<Detection>> by_image;
    for (std::size_t i = 0; i < file.entries.size(); ++i) {
      const auto& e = file.entries[i];
      if (!images.count(e.image_id)) {
        throw DataError("tta-merge: " + a.predictions.string() + ": entries[" + std::to_string(i) +
                        "]: no image record for '" + e.image_id + "'");
      }
      by_image[e.image_id].push_back(e.ToDetection());
    }
    for (auto& [image_id, dets] : by_image) {
      const ImageRecord& img = images.at(image_id);
      views.push_back({AugmentationSpec(a.kind, img.width(), img.height()), std::move(dets)});
    }
  }
  const auto merged = RunStage("merge", [&] { return FuseTta(originals, views, config.eval.nms_iou); });
  PredictionFile out_file = FromDetections(merged, original.prompts);
  RunOutputs out;
  out.predictions.push_back(config.output_dir / "merged.json");
  RunStage("write merged predictions", [&] { WritePredictionFile(out_file, out.predictions.back()); });
  return out;
}

}  // namespace oodeval

#endif  // OODEVAL_PIPELINE_HPP_
