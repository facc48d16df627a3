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

// Prediction and annotation files.
//
// Prediction file (schema_version "1.x"):
//
//   {
//     "schema_version": "1.0",
//     "prompts": [{"prompt_id": "p1", "text": "objects", "weight": 1.0}],
//     "entries": [{"image_id": "img_0", "prompt_id": "p1", "label": "objects",
//                  "bbox": [x, y, width, height], "score": 0.93}]
//   }
//
// "prompts" is optional. Unknown fields, at the top level and per entry, are
// kept and written back unchanged. The reserved prompt id "roi" carries road
// boxes used to build rectangle regions of interest.
//
// Ground truth follows the common detection-annotation layout:
//
//   {
//     "images": [{"id": 1, "width": 2048, "height": 1024, "subset": "3"}],
//     "annotations": [{"image_id": 1, "bbox": [x, y, w, h], "area": 812.0}]
//   }
//
// Image ids may be strings or integers; both are handled as strings. "area"
// and "subset" are optional.

#ifndef OODEVAL_IO_HPP_
#define OODEVAL_IO_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "oodeval/types.hpp"

namespace oodeval {

inline constexpr char kRoiPromptId[] = "roi";
inline constexpr char kPredictionSchemaVersion[] = "1.0";

struct PromptInfo {
  std::string prompt_id;
  std::string text;
  double weight = 1.0;

  friend bool operator==(const PromptInfo&, const PromptInfo&) = default;
};

// One row of a prediction file, kept in its external [x, y, w, h] form so that
// writing and re-reading is lossless.
struct PredictionEntry {
  std::string image_id;
  std::string prompt_id;
  std::string label;
  std::array<double, 4> bbox;  // x, y, width, height
  double score = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  Detection ToDetection() const {
    return Detection(image_id, BoundingBox::FromXywh(bbox[0], bbox[1], bbox[2], bbox[3]),
                     score, prompt_id, label);
  }

  static PredictionEntry FromDetection(const Detection& d) {
    const BoundingBox& b = d.box();
    return {d.image_id(), d.prompt_id(), d.label(),
            {b.x1(), b.y1(), b.width(), b.height()}, d.score(), nlohmann::json::object()};
  }

  friend bool operator==(const PredictionEntry&, const PredictionEntry&) = default;
};

struct PredictionFile {
  std::string schema_version = kPredictionSchemaVersion;
  std::vector<PromptInfo> prompts;
  std::vector<PredictionEntry> entries;
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const PredictionFile&, const PredictionFile&) = default;
};

namespace internal {

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json ParseJson(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(source + ": parse error at byte " + std::to_string(e.byte) + ": " +
                    e.what());
  }
}

// Ids may be written as strings or integers.
inline std::string IdString(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw DataError(where + " must be a string or integer");
}

inline double Number(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(where + ": missing '" + key + "'");
  if (!it->is_number()) throw DataError(where + ": '" + key + "' must be a number");
  return it->get<double>();
}

inline std::array<double, 4> Bbox(const nlohmann::json& obj, const std::string& where) {
  auto it = obj.find("bbox");
  if (it == obj.end()) throw DataError(where + ": missing 'bbox'");
  if (!it->is_array() || it->size() != 4) {
    throw DataError(where + ": 'bbox' must be [x, y, width, height]");
  }
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(*it)[i].is_number()) throw DataError(where + ": 'bbox' values must be numbers");
    out[i] = (*it)[i].get<double>();
  }
  return out;
}

inline void WriteFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace internal

inline PredictionFile ParsePredictionFile(const std::string& text, const std::string& source) {
  const auto root = internal::ParseJson(text, source);
  if (!root.is_object()) throw DataError(source + ": top level must be an object");

  PredictionFile file;
  auto version = root.find("schema_version");
  if (version == root.end() || !version->is_string()) {
    throw DataError(source + ": missing string 'schema_version'");
  }
  file.schema_version = version->get<std::string>();
  if (file.schema_version.rfind("1.", 0) != 0) {
    throw DataError(source + ": unsupported schema_version '" + file.schema_version +
                    "', expected 1.x");
  }

  if (auto prompts = root.find("prompts"); prompts != root.end()) {
    if (!prompts->is_array()) throw DataError(source + ": 'prompts' must be an array");
    for (std::size_t i = 0; i < prompts->size(); ++i) {
      const auto& p = (*prompts)[i];
      const std::string where = source + ": prompts[" + std::to_string(i) + "]";
      if (!p.is_object() || !p.contains("prompt_id")) {
        throw DataError(where + ": missing 'prompt_id'");
      }
      PromptInfo info{internal::IdString(p["prompt_id"], where + ".prompt_id"),
                      p.value("text", std::string()), 1.0};
      if (p.contains("weight")) info.weight = internal::Number(p, "weight", where);
      if (!(info.weight >= 0)) throw DataError(where + ": weight must be nonnegative");
      file.prompts.push_back(std::move(info));
    }
  }

  auto entries = root.find("entries");
  if (entries == root.end() || !entries->is_array()) {
    throw DataError(source + ": missing array 'entries'");
  }
  file.entries.reserve(entries->size());
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const auto& e = (*entries)[i];
    const std::string where = source + ": entries[" + std::to_string(i) + "]";
    if (!e.is_object()) throw DataError(where + ": must be an object");
    PredictionEntry entry;
    if (!e.contains("image_id")) throw DataError(where + ": missing 'image_id'");
    if (!e.contains("prompt_id")) throw DataError(where + ": missing 'prompt_id'");
    entry.image_id = internal::IdString(e["image_id"], where + ".image_id");
    entry.prompt_id = internal::IdString(e["prompt_id"], where + ".prompt_id");
    if (e.contains("label")) {
      if (!e["label"].is_string()) throw DataError(where + ": 'label' must be a string");
      entry.label = e["label"].get<std::string>();
    }
    entry.bbox = internal::Bbox(e, where);
    entry.score = internal::Number(e, "score", where);
    for (const auto& [key, value] : e.items()) {
      if (key != "image_id" && key != "prompt_id" && key != "label" && key != "bbox" &&
          key != "score") {
        entry.extra[key] = value;
      }
    }
    try {
      (void)entry.ToDetection();
    } catch (const DataError& err) {
      throw DataError(where + ": " + err.what());
    }
    file.entries.push_back(std::move(entry));
  }

  for (const auto& [key, value] : root.items()) {
    if (key != "schema_version" && key != "prompts" && key != "entries") {
      file.extra[key] = value;
    }
  }
  return file;
}

inline PredictionFile LoadPredictionFile(const std::filesystem::path& path) {
  return ParsePredictionFile(internal::ReadFile(path), path.string());
}

inline std::string SerializePredictionFile(const PredictionFile& file) {
  nlohmann::ordered_json root;
  root["schema_version"] = file.schema_version;
  if (!file.prompts.empty()) {
    root["prompts"] = nlohmann::ordered_json::array();
    for (const auto& p : file.prompts) {
      root["prompts"].push_back({{"prompt_id", p.prompt_id}, {"text", p.text}, {"weight", p.weight}});
    }
  }
  root["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : file.entries) {
    nlohmann::ordered_json j;
    j["image_id"] = e.image_id;
    j["prompt_id"] = e.prompt_id;
    j["label"] = e.label;
    j["bbox"] = e.bbox;
    j["score"] = e.score;
    for (const auto& [key, value] : e.extra.items()) j[key] = value;
    root["entries"].push_back(std::move(j));
  }
  for (const auto& [key, value] : file.extra.items()) root[key] = value;
  return root.dump(1) + "\n";
}

inline void WritePredictionFile(const PredictionFile& file, const std::filesystem::path& path) {
  internal::WriteFile(path, SerializePredictionFile(file));
}

// Groups entries into prompt streams in order of first appearance. Prompts
// declared in the header but without entries still yield an (empty) stream.
inline std::vector<PromptStream> ToPromptStreams(const PredictionFile& file) {
  std::vector<std::string> order;
  std::map<std::string, PromptInfo> info;
  std::map<std::string, std::vector<Detection>> dets;
  for (const auto& p : file.prompts) {
    if (info.emplace(p.prompt_id, p).second) order.push_back(p.prompt_id);
  }
  for (const auto& e : file.entries) {
    if (info.emplace(e.prompt_id, PromptInfo{e.prompt_id, e.label, 1.0}).second) {
      order.push_back(e.prompt_id);
    }
    dets[e.prompt_id].push_back(e.ToDetection());
  }
  std::vector<PromptStream> streams;
  for (const auto& id : order) {
    const auto& p = info.at(id);
    streams.emplace_back(p.prompt_id, p.text, p.weight, std::move(dets[id]));
  }
  return streams;
}

inline std::vector<PromptStream> LoadPredictions(const std::filesystem::path& path) {
  return ToPromptStreams(LoadPredictionFile(path));
}

inline PredictionFile FromDetections(std::span<const Detection> detections,
                                     std::vector<PromptInfo> prompts = {}) {
  PredictionFile file;
  file.prompts = std::move(prompts);
  for (const auto& d : detections) file.entries.push_back(PredictionEntry::FromDetection(d));
  return file;
}

struct GroundTruthFile {
  std::vector<GroundTruthObject> objects;
  std::vector<ImageRecord> images;
};

inline GroundTruthFile ParseGroundTruth(const std::string& text, const std::string& source) {
  const auto root = internal::ParseJson(text, source);
  if (!root.is_object()) throw DataError(source + ": top level must be an object");
  auto images = root.find("images");
  if (images == root.end() || !images->is_array()) {
    throw DataError(source + ": missing array 'images'");
  }
  GroundTruthFile out;
  std::map<std::string, std::optional<std::string>> subset_of;
  for (std::size_t i = 0; i < images->size(); ++i) {
    const auto& img = (*images)[i];
    const std::string where = source + ": images[" + std::to_string(i) + "]";
    if (!img.is_object() || !img.contains("id")) throw DataError(where + ": missing 'id'");
    const std::string id = internal::IdString(img["id"], where + ".id");
    const double w = internal::Number(img, "width", where);
    const double h = internal::Number(img, "height", where);
    if (w != static_cast<int>(w) || h != static_cast<int>(h)) {
      throw DataError(where + ": width and height must be integers");
    }
    std::optional<std::string> subset;
    if (img.contains("subset") && !img["subset"].is_null()) {
      subset = internal::IdString(img["subset"], where + ".subset");
    }
    try {
      out.images.emplace_back(id, static_cast<int>(w), static_cast<int>(h), subset);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    subset_of[id] = subset;
  }

  auto anns = root.find("annotations");
  if (anns == root.end()) return out;
  if (!anns->is_array()) throw DataError(source + ": 'annotations' must be an array");
  for (std::size_t i = 0; i < anns->size(); ++i) {
    const auto& a = (*anns)[i];
    const std::string where = source + ": annotations[" + std::to_string(i) + "]";
    if (!a.is_object() || !a.contains("image_id")) {
      throw DataError(where + ": missing 'image_id'");
    }
    const std::string image_id = internal::IdString(a["image_id"], where + ".image_id");
    const auto bbox = internal::Bbox(a, where);
    std::optional<double> area;
    if (a.contains("area") && !a["area"].is_null()) area = internal::Number(a, "area", where);
    auto it = subset_of.find(image_id);
    std::optional<std::string> subset = it == subset_of.end() ? std::nullopt : it->second;
    try {
      out.objects.emplace_back(image_id, BoundingBox::FromXywh(bbox[0], bbox[1], bbox[2], bbox[3]),
                               area, subset);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

inline GroundTruthFile LoadGroundTruth(const std::filesystem::path& path) {
  return ParseGroundTruth(internal::ReadFile(path), path.string());
}

}  // namespace oodeval

#endif  // OODEVAL_IO_HPP_
