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

#ifndef EIGENCONTOUR_TESTS_AP_ORACLE_H_
#define EIGENCONTOUR_TESTS_AP_ORACLE_H_

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "eigencontour/eval.h"
#include "oracles.h"

namespace eigencontour::oracle {

inline Instance Det(int category, double score, Mask mask) {
  Instance inst;
  inst.category = category;
  inst.score = score;
  inst.mask = std::move(mask);
  return inst;
}

// Exhaustive PR evaluation: the interpolated precision at recall level j/100
// is the best precision over every prefix of the ranking whose recall reaches
// that level.
inline double OracleAp(const std::vector<ImageEval>& images, double thr) {
  std::vector<int> categories;
  for (const auto& img : images)
    for (const auto& g : img.ground_truth) categories.push_back(g.category);
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
  if (categories.empty()) return 0.0;

  double sum = 0.0;
  for (int cat : categories) {
    struct Ranked { double score; size_t image; size_t det; };
    std::vector<Ranked> ranked;
    int num_gt = 0;
    for (size_t i = 0; i < images.size(); ++i) {
      for (size_t d = 0; d < images[i].detections.size(); ++d)
        if (images[i].detections[d].category == cat)
          ranked.push_back({images[i].detections[d].score, i, d});
      for (const auto& g : images[i].ground_truth) num_gt += g.category == cat;
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    std::vector<std::vector<bool>> used(images.size());
    for (size_t i = 0; i < images.size(); ++i)
      used[i].assign(images[i].ground_truth.size(), false);
    std::vector<std::pair<double, double>> points;  // (recall, precision)
    int tp = 0;
    for (size_t k = 0; k < ranked.size(); ++k) {
      const ImageEval& img = images[ranked[k].image];
      const Mask& dm = img.detections[ranked[k].det].mask;
      int best = -1;
      double best_iou = -1.0;
      for (size_t g = 0; g < img.ground_truth.size(); ++g) {
        if (img.ground_truth[g].category != cat || used[ranked[k].image][g]) continue;
        const double iou = MaskIou(dm, img.ground_truth[g].mask);
        if (iou >= thr && iou > best_iou) {
          best = static_cast<int>(g);
          best_iou = iou;
        }
      }
      if (best >= 0) {
        used[ranked[k].image][best] = true;
        ++tp;
      }
      points.push_back({double(tp) / num_gt, double(tp) / double(k + 1)});
    }
    double cat_sum = 0.0;
    for (int j = 0; j <= 100; ++j) {
      double p = 0.0;
      for (const auto& [r, prec] : points)
        if (r >= j / 100.0) p = std::max(p, prec);
      cat_sum += p;
    }
    sum += cat_sum / 101.0;
  }
  return sum / static_cast<double>(categories.size());
}

// Random micro-scene: GT rectangles in disjoint 8x8 cells of a 32x32 image,
// detections jittered around them plus some spurious boxes.
inline ImageEval RandomScene(std::mt19937_64& rng) {
  ImageEval img;
  std::vector<int> cells(16);
  for (int i = 0; i < 16; ++i) cells[i] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  const int gts = static_cast<int>(rng() % 6);
  for (int g = 0; g < gts; ++g) {
    const int x = (cells[g] % 4) * 8, y = (cells[g] / 4) * 8;
    img.ground_truth.push_back({static_cast<int>(rng() % 2),
                                RectMask(32, 32, x + 1, y + 1, x + 7, y + 7)});
  }
  const int dets = static_cast<int>(rng() % 6);
  for (int d = 0; d < dets; ++d) {
    int x0, y0;
    int category = static_cast<int>(rng() % 2);
    if (gts > 0 && rng() % 3 != 0) {
      const int g = static_cast<int>(rng() % gts);
      x0 = (cells[g] % 4) * 8 + static_cast<int>(rng() % 3);
      y0 = (cells[g] / 4) * 8 + static_cast<int>(rng() % 3);
      if (rng() % 4 != 0) category = img.ground_truth[g].category;
    } else {
      x0 = static_cast<int>(rng() % 26);
      y0 = static_cast<int>(rng() % 26);
    }
    const int w = 4 + static_cast<int>(rng() % 4), h = 4 + static_cast<int>(rng() % 4);
    img.detections.push_back(
        Det(category, Uniform(rng, 0.0, 1.0), RectMask(32, 32, x0, y0, x0 + w, y0 + h)));
  }
  return img;
}

}  // namespace eigencontour::oracle

#endif  // EIGENCONTOUR_TESTS_AP_ORACLE_H_
