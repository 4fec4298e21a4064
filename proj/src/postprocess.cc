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

#include "eigencontour/postprocess.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "eigencontour/errors.h"
#include "eigencontour/parallel.h"

namespace eigencontour {

namespace {

void CheckThreshold(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

// Highest score first; ties by lower key.
template <typename T, typename Key>
void SortByScore(std::vector<T>& items, Key key) {
  std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    if (a.score != b.score) return a.score > b.score;
    return key(a) < key(b);
  });
}

}  // namespace

void PredictionMaps::Validate() const {
  if (height < 1 || width < 1) {
    throw ValidationError("prediction maps need height, width >= 1");
  }
  if (categories < 1 || coefficients < 1 || stride < 1) {
    throw ValidationError("prediction maps need k, m, stride >= 1");
  }
  const size_t n = cells();
  if (p.size() != n * categories || o.size() != n ||
      r.size() != n * coefficients) {
    throw ValidationError("prediction map arrays do not match dimensions");
  }
  for (float v : p) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ValidationError("class probabilities must lie in [0, 1]");
    }
  }
  for (float v : o) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ValidationError("centerness must lie in [0, 1]");
    }
  }
  for (float v : r) {
    if (!std::isfinite(v)) throw ValidationError("coefficients must be finite");
  }
}

std::span<const float> PredictionMaps::class_probabilities(int row,
                                                           int col) const {
  const size_t cell = static_cast<size_t>(row) * width + col;
  return {p.data() + cell * categories, static_cast<size_t>(categories)};
}

std::span<const float> PredictionMaps::coefficient_vector(int row,
                                                          int col) const {
  const size_t cell = static_cast<size_t>(row) * width + col;
  return {r.data() + cell * coefficients, static_cast<size_t>(coefficients)};
}

ScoreGrid ConfidenceScores(const PredictionMaps& maps) {
  maps.Validate();
  ScoreGrid grid;
  grid.height = maps.height;
  grid.width = maps.width;
  grid.score.resize(maps.cells());
  grid.category.resize(maps.cells());
  for (int row = 0; row < maps.height; ++row) {
    for (int col = 0; col < maps.width; ++col) {
      auto probs = maps.class_probabilities(row, col);
      int best = 0;
      for (int k = 1; k < maps.categories; ++k) {
        if (probs[k] > probs[best]) best = k;
      }
      const size_t cell = static_cast<size_t>(row) * maps.width + col;
      grid.category[cell] = best;
      grid.score[cell] =
          static_cast<double>(maps.o[cell]) * static_cast<double>(probs[best]);
    }
  }
  return grid;
}

std::vector<Candidate> CandidateFilter(const ScoreGrid& scores,
                                       double threshold) {
  CheckThreshold(threshold, "confidence threshold");
  std::vector<Candidate> out;
  for (int row = 0; row < scores.height; ++row) {
    for (int col = 0; col < scores.width; ++col) {
      const double s = scores.score[static_cast<size_t>(row) * scores.width + col];
      if (s >= threshold) out.push_back({row, col, s});
    }
  }
  const int width = scores.width;
  SortByScore(out, [width](const Candidate& c) {
    return static_cast<int64_t>(c.row) * width + c.col;
  });
  return out;
}

std::optional<Instance> DecodeInstance(const PredictionMaps& maps,
                                       const EigenBasis& basis, int row,
                                       int col, int image_width,
                                       int image_height, double radius_scale) {
  if (basis.m() != maps.coefficients) {
    throw ValidationError("basis M=" + std::to_string(basis.m()) +
                          " does not match map M=" +
                          std::to_string(maps.coefficients));
  }
  if (row < 0 || row >= maps.height || col < 0 || col >= maps.width) {
    throw ValidationError("pixel out of bounds");
  }
  if (!(radius_scale > 0.0) || !std::isfinite(radius_scale)) {
    throw ValidationError("radius scale must be positive");
  }
  auto coeff_span = maps.coefficient_vector(row, col);
  CoeffVector coeffs{{coeff_span.begin(), coeff_span.end()}};
  std::vector<double> radii = Decode(basis, coeffs);
  for (double& r : radii) r *= radius_scale;
  radii = ClampRadii(std::move(radii));

  Instance inst;
  inst.center = {(col + 0.5) * maps.stride, (row + 0.5) * maps.stride};
  inst.mask = RasterizeContour(inst.center, radii, image_width, image_height);
  if (inst.mask.Empty()) return std::nullopt;

  auto probs = maps.class_probabilities(row, col);
  int best = 0;
  for (int k = 1; k < maps.categories; ++k) {
    if (probs[k] > probs[best]) best = k;
  }
  inst.category = best;
  const size_t cell = static_cast<size_t>(row) * maps.width + col;
  inst.score =
      static_cast<double>(maps.o[cell]) * static_cast<double>(probs[best]);
  return inst;
}

std::vector<Instance> Nms(std::vector<Instance> candidates,
                          double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("NMS IoU threshold must lie in (0, 1]");
  }
  for (size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].score > candidates[i - 1].score) {
      throw ValidationError("NMS candidates must be sorted by score");
    }
  }
  std::vector<bool> removed(candidates.size(), false);
  std::vector<Instance> kept;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (removed[i]) continue;
    for (size_t j = i + 1; j < candidates.size(); ++j) {
      if (!removed[j] &&
          MaskIou(candidates[i].mask, candidates[j].mask) > iou_threshold) {
        removed[j] = true;
      }
    }
    kept.push_back(std::move(candidates[i]));
  }
  return kept;
}

std::vector<Instance> RunPostprocess(std::span<const PredictionMaps> levels,
                                     const EigenBasis& basis,
                                     const PostprocessConfig& config) {
  CheckThreshold(config.confidence_threshold, "confidence threshold");
  if (config.max_candidates < 1) {
    throw ValidationError("candidate cap must be >= 1");
  }
  if (levels.empty()) return {};
  const int image_width = config.image_width > 0
                              ? config.image_width
                              : levels[0].width * levels[0].stride;
  const int image_height = config.image_height > 0
                               ? config.image_height
                               : levels[0].height * levels[0].stride;

  struct Pooled {
    size_t level;
    Candidate cand;
    double score;
    int64_t cell;
  };
  std::vector<Pooled> pool;
  for (size_t l = 0; l < levels.size(); ++l) {
    const ScoreGrid grid = ConfidenceScores(levels[l]);
    for (const Candidate& c : CandidateFilter(grid, config.confidence_threshold)) {
      pool.push_back({l, c, c.score,
                      static_cast<int64_t>(c.row) * grid.width + c.col});
    }
  }
  SortByScore(pool, [](const Pooled& p) { return std::make_pair(p.level, p.cell); });
  if (pool.size() > static_cast<size_t>(config.max_candidates)) {
    pool.resize(config.max_candidates);
  }

  std::vector<std::optional<Instance>> decoded(pool.size());
  ParallelFor(pool.size(), config.threads, [&](size_t i) {
    const Pooled& p = pool[i];
    decoded[i] = DecodeInstance(levels[p.level], basis, p.cand.row,
                                p.cand.col, image_width, image_height,
                                config.radius_scale);
  });
  std::vector<Instance> instances;
  for (auto& d : decoded) {
    if (d) instances.push_back(std::move(*d));
  }
  return Nms(std::move(instances), config.nms_iou_threshold);
}

std::vector<Instance> RunPostprocess(const PredictionMaps& maps,
                                     const EigenBasis& basis,
                                     const PostprocessConfig& config) {
  return RunPostprocess(std::span<const PredictionMaps>(&maps, 1), basis,
                        config);
}

}  // namespace eigencontour
