// Copyright 2026 The Eigencontour Authors. All Rights Reserved.
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

// COCO-style polygon annotation ingestion and synthetic star-convex corpora.

#ifndef EIGENCONTOUR_DATASET_H_
#define EIGENCONTOUR_DATASET_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "eigencontour/eigenspace.h"
#include "eigencontour/geometry.h"
#include "json.hpp"

namespace eigencontour {

// Category counts of the two benchmark layouts.
inline constexpr int kCocoCategoryCount = 80;
inline constexpr int kSbdCategoryCount = 20;

inline constexpr int kDefaultSampleCount = 360;

struct AnnotatedInstance {
  int64_t image_id = 0;
  int64_t annotation_id = 0;
  // Contiguous index in [0, K): position of the COCO category id in the
  // ascending list of declared category ids.
  int category = 0;
  std::vector<Polygon> polygons;
  int image_width = 0;
  int image_height = 0;
  // Union of the rasterized polygons.
  Mask mask{1, 1};
};

struct LoadStats {
  int64_t instances = 0;
  int64_t skipped_empty = 0;
  int64_t skipped_rle = 0;
  // Declared category ids in ascending order; index = AnnotatedInstance
  // category.
  std::vector<int64_t> category_ids;
  // image id -> (width, height), in file order.
  std::vector<std::pair<int64_t, std::pair<int, int>>> images;
  std::vector<std::string> warnings;
};

using InstanceSink = std::function<void(AnnotatedInstance&&)>;

// Streams instances from COCO JSON text. Annotation records are handed to
// `sink` and released as soon as `images` and `categories` have been seen, so
// memory does not grow with the number of annotations when those arrays
// precede `annotations` (the usual layout). RLE segmentations are skipped
// with a warning and instances whose mask is empty are skipped and counted.
// Throws ValidationError on malformed JSON or a record with missing or bad
// fields; the message names the annotation index.
LoadStats ParseAnnotations(std::string_view json_text, const InstanceSink& sink);
LoadStats LoadAnnotations(const std::string& path, const InstanceSink& sink);

std::vector<AnnotatedInstance> LoadAllAnnotations(const std::string& path,
                                                  LoadStats* stats = nullptr);

struct SyntheticShapeSpec {
  uint64_t seed = 0;
  int harmonic_count = 0;
  double base_radius = 20.0;
  // Sum of |a_j| is at most this; must lie in [0, 1).
  double amplitude = 0.0;
  int width = 64;
  int height = 64;
  int samples = kDefaultSampleCount;

  void Validate() const;
};

SyntheticShapeSpec SyntheticSpecFromJson(const nlohmann::json& doc);
nlohmann::json SyntheticSpecToJson(const SyntheticShapeSpec& spec);

struct SyntheticCorpus {
  std::vector<StarContour> contours;
  std::vector<Mask> masks;
};

// Shape k has r(theta) = base_radius * (1 + sum_j a_j cos(j theta + phi_j))
// around the image center, sampled at spec.samples angles and rasterized.
// The same spec and count always give bit-identical output.
SyntheticCorpus GenerateSyntheticCorpus(const SyntheticShapeSpec& spec,
                                        int count);

// Column j = contours[j].radii. Throws ValidationError on an empty list or
// mixed sample counts.
ContourMatrix CorpusToMatrix(const std::vector<StarContour>& contours);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_DATASET_H_
