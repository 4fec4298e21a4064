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

// COCO-style mask average precision and the reconstruction comparison between
// eigencontour coefficients and plain centroidal profiles.

#ifndef EIGENCONTOUR_EVAL_H_
#define EIGENCONTOUR_EVAL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eigencontour/eigenspace.h"
#include "eigencontour/geometry.h"
#include "eigencontour/postprocess.h"
#include "json.hpp"

namespace eigencontour {

inline constexpr int kIouThresholdCount = 10;
inline constexpr int kRecallPoints = 101;

// 0.50, 0.55, ..., 0.95, each the double nearest to its decimal value.
std::array<double, kIouThresholdCount> IouThresholds();

struct GroundTruth {
  int category = 0;
  Mask mask{1, 1};
};

struct ImageEval {
  std::vector<Instance> detections;
  std::vector<GroundTruth> ground_truth;
};

struct MatchCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
};

struct EvalReport {
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::array<double, kIouThresholdCount> thresholds{};
  std::array<double, kIouThresholdCount> ap_per_threshold{};
  std::array<MatchCounts, kIouThresholdCount> counts{};
  // Categories with at least one ground-truth instance, ascending.
  std::vector<int> categories;
};

// For every IoU threshold and every category with ground truth, detections
// are visited by descending score (ties by image, then detection order) and
// each is matched to the unmatched ground truth of its image with the highest
// mask IoU >= threshold (lowest index on ties). The precision envelope is
// sampled at 101 recall points and averaged; AP is the mean over categories,
// then over thresholds. Detections of categories without ground truth are
// ignored. Throws ValidationError when a detection and a ground truth of the
// same image differ in size.
EvalReport EvaluateAp(std::span<const ImageEval> images);

nlohmann::json EvalReportToJson(const EvalReport& report);

struct ReconRecord {
  int index = 0;
  double iou_eigen = 0.0;
  double iou_profile = 0.0;
  double l2_error = 0.0;
};

struct ReconReport {
  int n = 0;
  int m = 0;
  int64_t basis_corpus_size = 0;
  double mean_iou_eigen = 0.0;
  double mean_iou_profile = 0.0;
  double mean_l2_error = 0.0;
  std::vector<ReconRecord> records;
};

struct CompareOptions {
  // Fraction of the corpus (taken from the end) held out from basis
  // construction and evaluated alone. 0 builds and evaluates on everything.
  double holdout_fraction = 0.0;
  Normalization normalization = Normalization::kNone;
  int threads = 1;
};

// Per instance: (a) the m-ray centroidal profile rasterized directly and
// (b) the n-ray profile passed through a rank-m eigenbasis, each compared with
// the original mask by IoU. Profiles with fewer than 3 rays are degenerate
// polygons and score 0.
ReconReport CompareDescriptors(std::span<const Mask> corpus, int n, int m,
                               const CompareOptions& options = {});

// Same as CompareDescriptors for each rank in `ranks`, sharing the contour
// extraction and the eigendecomposition.
std::vector<ReconReport> CompareDescriptorsSweep(std::span<const Mask> corpus,
                                                 int n,
                                                 std::span<const int> ranks,
                                                 const CompareOptions& options = {});

// Evaluates every instance against an existing basis: n and m come from the
// basis, and no eigendecomposition is performed.
ReconReport CompareDescriptorsWithBasis(std::span<const Mask> corpus,
                                        const EigenBasis& basis,
                                        int threads = 1);

nlohmann::json ReconReportToJson(const ReconReport& report,
                                 bool include_records = true);
std::string ReconReportCsv(std::span<const ReconReport> reports);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_EVAL_H_
