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

// Turns per-pixel network outputs into final instance masks: confidence
// scoring, thresholding, contour decoding through an eigenbasis, and greedy
// mask non-maximum suppression.

#ifndef EIGENCONTOUR_POSTPROCESS_H_
#define EIGENCONTOUR_POSTPROCESS_H_

#include <optional>
#include <span>
#include <vector>

#include "eigencontour/eigenspace.h"
#include "eigencontour/geometry.h"

namespace eigencontour {

inline constexpr double kDefaultConfidenceThreshold = 0.05;
inline constexpr double kDefaultNmsIouThreshold = 0.5;
inline constexpr int kDefaultMaxCandidates = 1000;

// One feature level of network output. All arrays are row-major; P and R are
// channel-fastest.
struct PredictionMaps {
  int height = 0;
  int width = 0;
  int categories = 0;    // K
  int coefficients = 0;  // M
  int stride = 1;        // image pixels per feature cell
  std::vector<float> p;  // height * width * categories, in [0, 1]
  std::vector<float> o;  // height * width, in [0, 1]
  std::vector<float> r;  // height * width * coefficients, finite

  // Throws ValidationError if a dimension or array size is inconsistent or
  // an entry is out of range.
  void Validate() const;

  size_t cells() const { return static_cast<size_t>(height) * width; }
  std::span<const float> class_probabilities(int row, int col) const;
  std::span<const float> coefficient_vector(int row, int col) const;
};

struct ScoreGrid {
  int height = 0;
  int width = 0;
  std::vector<double> score;  // o * max_k p[k]
  std::vector<int> category;  // argmax_k p[k], lowest index on ties
};

ScoreGrid ConfidenceScores(const PredictionMaps& maps);

struct Candidate {
  int row = 0;
  int col = 0;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Cells with score >= threshold, by descending score, ties by row-major
// index. Throws ValidationError unless threshold is in [0, 1].
std::vector<Candidate> CandidateFilter(const ScoreGrid& scores,
                                       double threshold);

struct Instance {
  int category = 0;
  double score = 0.0;
  Mask mask{1, 1};
  Point2 center;
};

// Decodes the contour predicted at (row, col). The center is the image
// position of the cell center; decoded radii are multiplied by radius_scale
// and clamped to kEmptyBinRadius before rasterizing at image resolution.
// Returns nullopt when the rasterized mask is empty.
std::optional<Instance> DecodeInstance(const PredictionMaps& maps,
                                       const EigenBasis& basis, int row,
                                       int col, int image_width,
                                       int image_height,
                                       double radius_scale = 1.0);

// Greedy class-agnostic suppression: keep the best remaining candidate and
// drop every candidate whose mask IoU with it exceeds iou_threshold.
// Candidates must already be sorted by descending score.
std::vector<Instance> Nms(std::vector<Instance> candidates,
                          double iou_threshold = kDefaultNmsIouThreshold);

struct PostprocessConfig {
  double confidence_threshold = kDefaultConfidenceThreshold;
  double nms_iou_threshold = kDefaultNmsIouThreshold;
  int max_candidates = kDefaultMaxCandidates;
  double radius_scale = 1.0;
  // 0 derives the image size from the first level as width * stride.
  int image_width = 0;
  int image_height = 0;
  int threads = 1;
};

// Candidates from every level form one pool, ordered by score and then by
// (level, row-major index).
std::vector<Instance> RunPostprocess(std::span<const PredictionMaps> levels,
                                     const EigenBasis& basis,
                                     const PostprocessConfig& config = {});
std::vector<Instance> RunPostprocess(const PredictionMaps& maps,
                                     const EigenBasis& basis,
                                     const PostprocessConfig& config = {});

}  // namespace eigencontour

#endif  // EIGENCONTOUR_POSTPROCESS_H_
