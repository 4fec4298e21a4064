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

#include "eigencontour/eval.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "eigencontour/dataset.h"
#include "eigencontour/errors.h"
#include "ap_oracle.h"
#include "oracles.h"

namespace eigencontour {
namespace {

using oracle::Det;
using oracle::OracleAp;
using oracle::RandomScene;
using oracle::RectMask;
using oracle::Uniform;

TEST_CASE("thresholds") {
  const auto t = IouThresholds();
  CHECK(t.size() == 10);
  CHECK(t[0] == 0.5);
  CHECK(t[5] == 0.75);
  CHECK(t[9] == 0.95);
}

TEST_CASE("perfect detector") {
  std::vector<ImageEval> images(2);
  images[0].ground_truth = {{0, RectMask(16, 16, 0, 0, 5, 5)}, {1, RectMask(16, 16, 8, 8, 14, 14)}};
  images[1].ground_truth = {{0, RectMask(16, 16, 3, 3, 9, 9)}};
  for (auto& img : images)
    for (const auto& g : img.ground_truth) img.detections.push_back(Det(g.category, 1.0, g.mask));
  const EvalReport r = EvaluateAp(images);
  CHECK(r.ap == 1.0);
  CHECK(r.ap50 == 1.0);
  CHECK(r.ap75 == 1.0);
  CHECK(r.counts[9].fn == 0);
  CHECK(r.categories == std::vector<int>{0, 1});
}

TEST_CASE("no detections") {
  std::vector<ImageEval> images(1);
  images[0].ground_truth = {{0, RectMask(8, 8, 0, 0, 4, 4)}, {0, RectMask(8, 8, 4, 4, 8, 8)}};
  const EvalReport r = EvaluateAp(images);
  CHECK(r.ap == 0.0);
  for (const auto& c : r.counts) {
    CHECK(c.fn == 2);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
  }
}

TEST_CASE("two ground truths and three detections") {
  // Det 1 equals A; det 2 overlaps B at IoU 0.8; det 3 overlaps A at 0.6 but
  // A is already taken, so it is always a false positive.
  std::vector<ImageEval> images(1);
  images[0].ground_truth = {{0, RectMask(40, 10, 0, 0, 10, 10)},
                            {0, RectMask(40, 10, 20, 0, 30, 10)}};
  images[0].detections = {Det(0, 0.9, RectMask(40, 10, 0, 0, 10, 10)),
                          Det(0, 0.8, RectMask(40, 10, 20, 0, 28, 10)),
                          Det(0, 0.7, RectMask(40, 10, 0, 0, 6, 10))};
  const EvalReport r = EvaluateAp(images);
  // Thresholds 0.50..0.80: TP TP FP, every recall level at precision 1.
  // Thresholds 0.85..0.95: TP FP FP, recall stops at 0.5 (51 of 101 levels).
  for (int t = 0; t < 7; ++t) CHECK(r.ap_per_threshold[t] == 1.0);
  for (int t = 7; t < 10; ++t)
    CHECK(r.ap_per_threshold[t] == doctest::Approx(51.0 / 101.0).epsilon(1e-15));
  CHECK(r.ap == doctest::Approx((7.0 + 3.0 * 51.0 / 101.0) / 10.0).epsilon(1e-15));
  CHECK(r.counts[0].tp == 2);
  CHECK(r.counts[0].fp == 1);
  CHECK(r.counts[9].fn == 1);
  for (int t = 0; t < 10; ++t)
    CHECK(r.ap_per_threshold[t] == doctest::Approx(OracleAp(images, r.thresholds[t])));
}

TEST_CASE("randomized micro-benchmarks match the exhaustive oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ImageEval> images;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < count; ++i) images.push_back(RandomScene(rng));
    const EvalReport r = EvaluateAp(images);
    CHECK(r.ap >= 0.0);
    CHECK(r.ap <= r.ap50 + 1e-15);
    CHECK(r.ap50 <= 1.0);
    for (int t = 0; t < 10; ++t) {
      CHECK(r.ap_per_threshold[t] ==
            doctest::Approx(OracleAp(images, r.thresholds[t])).epsilon(1e-12));
      if (t > 0) CHECK(r.ap_per_threshold[t] <= r.ap_per_threshold[t - 1] + 1e-15);
    }
  }
}

TEST_CASE("a lower-scored duplicate never raises AP") {
  // Ground truths sit in disjoint cells, so a duplicate can only claim the
  // ground truth its original already claimed (or nothing).
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ImageEval> images = {RandomScene(rng), RandomScene(rng)};
    const EvalReport before = EvaluateAp(images);
    auto& dets = images[rng() % 2].detections;
    if (dets.empty()) continue;
    Instance dup = dets[rng() % dets.size()];
    dup.score *= Uniform(rng, 0.0, 1.0);
    dets.push_back(dup);
    const EvalReport after = EvaluateAp(images);
    CHECK(after.ap <= before.ap + 1e-15);
    for (int t = 0; t < 10; ++t)
      CHECK(after.ap_per_threshold[t] <= before.ap_per_threshold[t] + 1e-15);
  }
}

TEST_CASE("dimension mismatch is an error") {
  std::vector<ImageEval> images(1);
  images[0].ground_truth = {{0, RectMask(8, 8, 0, 0, 4, 4)}};
  images[0].detections = {Det(0, 0.5, RectMask(9, 8, 0, 0, 4, 4))};
  CHECK_THROWS_AS(EvaluateAp(images), ValidationError);
}

TEST_CASE("report json") {
  std::vector<ImageEval> images(1);
  images[0].ground_truth = {{0, RectMask(8, 8, 0, 0, 4, 4)}};
  const auto j = EvalReportToJson(EvaluateAp(images));
  CHECK(j["ap"] == 0.0);
  CHECK(j["iou_thresholds"].size() == 10);
}

std::vector<Mask> RandomPolygonMasks(std::mt19937_64& rng, int count) {
  std::vector<Mask> out;
  while (static_cast<int>(out.size()) < count) {
    Polygon p;
    for (int i = 0; i < 7; ++i)
      p.vertices.push_back({Uniform(rng, 4, 44), Uniform(rng, 4, 44)});
    Mask m = PolygonToMask(p, 48, 48);
    if (m.Area() >= 20) out.push_back(std::move(m));
  }
  return out;
}

TEST_CASE("compare_descriptors with m = n") {
  std::mt19937_64 rng(31);
  const auto corpus = RandomPolygonMasks(rng, 60);
  const ReconReport r = CompareDescriptors(corpus, 24, 24);
  CHECK(r.records.size() == 60);
  CHECK(std::abs(r.mean_iou_eigen - r.mean_iou_profile) <= 0.005);
  for (const auto& rec : r.records) {
    CHECK(rec.iou_eigen >= 0.0);
    CHECK(rec.iou_eigen <= 1.0);
  }
}

TEST_CASE("compare_descriptors on disks with m = 1") {
  std::vector<Mask> disks;
  for (double r : {120.0, 125.0, 130.0, 135.0}) {
    disks.push_back(oracle::DiskMask(300, 300, {150, 150}, r));
  }
  const ReconReport r = CompareDescriptors(disks, 360, 1);
  CHECK(r.mean_iou_eigen >= 0.99);
  CHECK(r.mean_iou_profile <= 1e-9);
}

TEST_CASE("compare_descriptors on the harmonic corpus") {
  SyntheticShapeSpec spec;
  spec.seed = 7;
  spec.amplitude = 0.3;
  spec.harmonic_count = 5;
  const auto corpus = GenerateSyntheticCorpus(spec, 120);
  const std::vector<int> ranks = {2, 4, 8, 11};
  const auto reports = CompareDescriptorsSweep(corpus.masks, 360, ranks);
  REQUIRE(reports.size() == 4);
  CHECK(reports[2].m == 8);
  CHECK(reports[2].mean_iou_eigen > reports[2].mean_iou_profile);
  for (size_t i = 1; i < reports.size(); ++i) {
    CHECK(reports[i].mean_iou_eigen >= reports[i - 1].mean_iou_eigen - 0.005);
    CHECK(reports[i].mean_l2_error <= reports[i - 1].mean_l2_error + 1e-6);
  }
  CHECK_THROWS_AS(CompareDescriptors(corpus.masks, 8, 9), ValidationError);
  CHECK_THROWS_AS(CompareDescriptors(std::vector<Mask>{}, 8, 2), ValidationError);
}

TEST_CASE("holdout and precomputed basis") {
  SyntheticShapeSpec spec;
  spec.seed = 3;
  spec.amplitude = 0.3;
  spec.harmonic_count = 3;
  const auto corpus = GenerateSyntheticCorpus(spec, 40);
  CompareOptions opts;
  opts.holdout_fraction = 0.25;
  const ReconReport held = CompareDescriptors(corpus.masks, 90, 4, opts);
  CHECK(held.records.size() == 10);
  CHECK(held.basis_corpus_size == 30);

  const ReconReport full = CompareDescriptors(corpus.masks, 90, 4);
  ContourMatrix a(90);
  for (const Mask& m : corpus.masks) a.AddColumn(CentroidContour(m, 90).radii);
  const ReconReport with = CompareDescriptorsWithBasis(corpus.masks, BuildBasis(a, 4));
  CHECK(with.mean_iou_eigen == full.mean_iou_eigen);
  CHECK(with.mean_iou_profile == full.mean_iou_profile);

  const std::vector<ReconReport> both = {full};
  const std::string csv = ReconReportCsv(both);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
  CHECK(ReconReportToJson(full, false).contains("mean_iou_eigen"));
}

}  // namespace
}  // namespace eigencontour
