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

// ROI mask files: 8-bit single-channel PNG or binary PGM, nonzero = inside.
// Masks for a dataset live in one directory as <image_id>.png / <image_id>.pgm.
// Requires linking libpng.

#ifndef OODEVAL_MASK_IO_HPP_
#define OODEVAL_MASK_IO_HPP_

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "oodeval/dataset.hpp"
#include "oodeval/io.hpp"
#include "oodeval/roi.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

namespace internal {

inline MaskRegion ReadPng(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DataError(path.string() + ": " + msg);
  }
  return MaskRegion(static_cast<int>(image.width), static_cast<int>(image.height),
                    std::move(pixels));
}

// Binary (P5) PGM with maxval < 256.
inline MaskRegion ReadPgm(const std::filesystem::path& path) {
  const std::string data = ReadFile(path);
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
  };
  if (next_token() != "P5") throw DataError(path.string() + ": not a binary PGM (P5)");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw DataError(path.string() + ": malformed PGM header");
  }
  if (maxval <= 0 || maxval > 255) throw DataError(path.string() + ": PGM must be 8-bit");
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (width <= 0 || height <= 0 || data.size() < pos + n) {
    throw DataError(path.string() + ": truncated PGM raster");
  }
  return MaskRegion(width, height, std::vector<std::uint8_t>(data.begin() + pos, data.begin() + pos + n));
}

}  // namespace internal

inline MaskRegion LoadMask(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return internal::ReadPng(path);
  if (ext == ".pgm" || ext == ".PGM") return internal::ReadPgm(path);
  throw DataError(path.string() + ": unsupported mask format (use .png or .pgm)");
}

inline void WriteMaskPng(const std::filesystem::path& path, int width, int height,
                         const std::vector<std::uint8_t>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw DataError(path.string() + ": " + image.message);
  }
}

// One mask per image that has a file in `dir`. Images without a mask pass
// through unfiltered (with a warning); a directory with no usable mask at all
// is an error.
inline RoiMap LoadMaskDir(const std::filesystem::path& dir, const Dataset& dataset,
                          Diagnostics& diag) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError(dir.string() + ": ROI mask directory does not exist");
  }
  RoiMap rois;
  for (const auto& img : dataset.images()) {
    std::filesystem::path found;
    for (const char* ext : {".png", ".pgm"}) {
      auto candidate = dir / (img.image_id() + ext);
      if (std::filesystem::exists(candidate)) {
        found = candidate;
        break;
      }
    }
    if (found.empty()) {
      diag.warn("image '" + img.image_id() + "': no ROI mask, detections pass unfiltered");
      continue;
    }
    RegionOfInterest roi(img.image_id(), LoadMask(found));
    roi.CheckAgainst(img);
    rois.emplace(img.image_id(), std::move(roi));
  }
  if (rois.empty()) {
    throw DataError(dir.string() + ": no ROI masks found for any image");
  }
  return rois;
}

}  // namespace oodeval

#endif  // OODEVAL_MASK_IO_HPP_
