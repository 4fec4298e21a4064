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
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>

#include "eigencontour/errors.h"
#include "eigencontour/parallel.h"

namespace eigencontour {

namespace {

struct RankedDetection {
  double score;
  size_t image;
  size_t detection;
};

// Mean of the precision envelope sampled at recall 0, 0.01, ..., 1.
double InterpolatedAp(const std::vector<bool>& is_tp, int64_t num_gt) {
  const size_t n = is_tp.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  int64_t tp = 0;
  for (size_t i = 0; i < n; ++i) {
    if (is_tp[i]) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int k = 0; k < kRecallPoints; ++k) {
    const double level = k / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[it - recall.begin()];
  }
  return sum / kRecallPoints;
}

// Scores instances [eval_begin, corpus.size()) against `basis`.
ReconReport EvaluateRank(std::span<const Mask> corpus,
                         const std::vector<StarContour>& contours,
                         const EigenBasis& basis, size_t eval_begin,
                         int threads) {
  const int n = basis.n();
  const int m = basis.m();
  ReconReport report;
  report.n = n;
  report.m = m;
  report.basis_corpus_size = basis.corpus_size();
  report.records.resize(corpus.size() - eval_begin);
  ParallelFor(report.records.size(), threads, [&](size_t k) {
    const size_t i = eval_begin + k;
    const Mask& mask = corpus[i];
    const StarContour& full = contours[i];
    ReconRecord rec;
    rec.index = static_cast<int>(i);
    if (m >= 3) {
      const StarContour profile = ExtractStarContour(mask, full.center, m);
      rec.iou_profile =
          MaskIou(mask, RasterizeContour(profile, mask.width(), mask.height()));
    }
    const std::vector<double> approx = Project(basis, full.radii);
    double sq = 0.0;
    for (int s = 0; s < n; ++s) {
      const double d = full.radii[s] - approx[s];
      sq += d * d;
    }
    rec.l2_error = std::sqrt(sq);
    rec.iou_eigen = MaskIou(
        mask, RasterizeContour(full.center, ClampRadii(approx), mask.width(),
                               mask.height()));
    report.records[k] = rec;
  });
  double eigen = 0.0;
  double profile = 0.0;
  double l2 = 0.0;
  for (const ReconRecord& rec : report.records) {
    eigen += rec.iou_eigen;
    profile += rec.iou_profile;
    l2 += rec.l2_error;
  }
  const double count = static_cast<double>(report.records.size());
  report.mean_iou_eigen = eigen / count;
  report.mean_iou_profile = profile / count;
  report.mean_l2_error = l2 / count;
  return report;
}

}  // namespace

std::array<double, kIouThresholdCount> IouThresholds() {
  std::array<double, kIouThresholdCount> t{};
  for (int i = 0; i < kIouThresholdCount; ++i) t[i] = (50 + 5 * i) / 100.0;
  return t;
}

EvalReport EvaluateAp(std::span<const ImageEval> images) {
  EvalReport report;
  report.thresholds = IouThresholds();

  // Category-matched IoU per image; -1 marks pairs of different categories.
  std::vector<std::vector<std::vector<double>>> ious(images.size());
  std::vector<int> categories;
  for (size_t i = 0; i < images.size(); ++i) {
    const ImageEval& img = images[i];
    for (const GroundTruth& gt : img.ground_truth) categories.push_back(gt.category);
    ious[i].assign(img.detections.size(),
                   std::vector<double>(img.ground_truth.size(), -1.0));
    for (size_t d = 0; d < img.detections.size(); ++d) {
      for (size_t g = 0; g < img.ground_truth.size(); ++g) {
        if (img.detections[d].category != img.ground_truth[g].category) continue;
        ious[i][d][g] = MaskIou(img.detections[d].mask, img.ground_truth[g].mask);
      }
    }
  }
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()),
                   categories.end());
  report.categories = categories;
  if (categories.empty()) return report;

  for (int t = 0; t < kIouThresholdCount; ++t) {
    const double threshold = report.thresholds[t];
    double ap_sum = 0.0;
    for (int category : categories) {
      std::vector<RankedDetection> ranked;
      int64_t num_gt = 0;
      for (size_t i = 0; i < images.size(); ++i) {
        for (size_t d = 0; d < images[i].detections.size(); ++d) {
          if (images[i].detections[d].category == category) {
            ranked.push_back({images[i].detections[d].score, i, d});
          }
        }
        for (const GroundTruth& gt : images[i].ground_truth) {
          if (gt.category == category) ++num_gt;
        }
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const RankedDetection& a, const RankedDetection& b) {
                         return a.score > b.score;
                       });
      std::vector<std::vector<bool>> matched(images.size());
      for (size_t i = 0; i < images.size(); ++i) {
        matched[i].assign(images[i].ground_truth.size(), false);
      }
      std::vector<bool> is_tp;
      is_tp.reserve(ranked.size());
      for (const RankedDetection& det : ranked) {
        const auto& row = ious[det.image][det.detection];
        int best = -1;
        for (size_t g = 0; g < row.size(); ++g) {
          if (matched[det.image][g] || row[g] < threshold) continue;
          if (best < 0 || row[g] > row[best]) best = static_cast<int>(g);
        }
        if (best >= 0) matched[det.image][best] = true;
        is_tp.push_back(best >= 0);
      }
      const int64_t tp = std::count(is_tp.begin(), is_tp.end(), true);
      report.counts[t].tp += tp;
      report.counts[t].fp += static_cast<int64_t>(is_tp.size()) - tp;
      report.counts[t].fn += num_gt - tp;
      ap_sum += InterpolatedAp(is_tp, num_gt);
    }
    report.ap_per_threshold[t] = ap_sum / static_cast<double>(categories.size());
  }
  double total = 0.0;
  for (double v : report.ap_per_threshold) total += v;
  report.ap = total / kIouThresholdCount;
  report.ap50 = report.ap_per_threshold[0];
  report.ap75 = report.ap_per_threshold[5];
  return report;
}

nlohmann::json EvalReportToJson(const EvalReport& report) {
  nlohmann::json j;
  j["ap"] = report.ap;
  j["ap50"] = report.ap50;
  j["ap75"] = report.ap75;
  j["iou_thresholds"] = report.thresholds;
  j["ap_per_threshold"] = report.ap_per_threshold;
  auto counts = nlohmann::json::array();
  for (const MatchCounts& c : report.counts) {
    counts.push_back({{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}});
  }
  j["counts"] = counts;
  j["categories"] = report.categories;
  return j;
}

std::vector<ReconReport> CompareDescriptorsSweep(std::span<const Mask> corpus,
                                                 int n,
                                                 std::span<const int> ranks,
                                                 const CompareOptions& options) {
  if (corpus.empty()) throw ValidationError("reconstruction corpus is empty");
  if (n < 3) throw ValidationError("sample count must be >= 3");
  for (int m : ranks) {
    if (m < 1 || m > n) {
      throw ValidationError("descriptor size must satisfy 1 <= m <= n, got " +
                            std::to_string(m));
    }
  }
  if (!(options.holdout_fraction >= 0.0 && options.holdout_fraction < 1.0)) {
    throw ValidationError("holdout fraction must lie in [0, 1)");
  }
  const size_t total = corpus.size();
  size_t train = total;
  size_t eval_begin = 0;
  if (options.holdout_fraction > 0.0) {
    const size_t held = static_cast<size_t>(
        std::ceil(options.holdout_fraction * static_cast<double>(total)));
    train = total - std::min(held, total - 1);
    eval_begin = train;
  }

  std::vector<StarContour> contours(total);
  ParallelFor(total, options.threads,
              [&](size_t i) { contours[i] = CentroidContour(corpus[i], n); });

  GramAccumulator gram(n, options.normalization, options.threads);
  for (size_t i = 0; i < train; ++i) gram.Add(contours[i].radii);
  const Spectrum spectrum = ComputeSpectrum(gram);

  std::vector<ReconReport> reports;
  for (int m : ranks) {
    reports.push_back(EvaluateRank(corpus, contours, TruncateSpectrum(spectrum, m),
                                   eval_begin, options.threads));
    reports.back().basis_corpus_size = static_cast<int64_t>(train);
  }
  return reports;
}

ReconReport CompareDescriptors(std::span<const Mask> corpus, int n, int m,
                               const CompareOptions& options) {
  const int ranks[] = {m};
  return std::move(CompareDescriptorsSweep(corpus, n, ranks, options).front());
}

ReconReport CompareDescriptorsWithBasis(std::span<const Mask> corpus,
                                        const EigenBasis& basis, int threads) {
  if (corpus.empty()) throw ValidationError("reconstruction corpus is empty");
  std::vector<StarContour> contours(corpus.size());
  ParallelFor(corpus.size(), threads, [&](size_t i) {
    contours[i] = CentroidContour(corpus[i], basis.n());
  });
  return EvaluateRank(corpus, contours, basis, 0, threads);
}

nlohmann::json ReconReportToJson(const ReconReport& report,
                                 bool include_records) {
  nlohmann::json j;
  j["n"] = report.n;
  j["m"] = report.m;
  j["basis_corpus_size"] = report.basis_corpus_size;
  j["evaluated"] = report.records.size();
  j["mean_iou_eigen"] = report.mean_iou_eigen;
  j["mean_iou_profile"] = report.mean_iou_profile;
  j["mean_l2_error"] = report.mean_l2_error;
  if (include_records) {
    auto records = nlohmann::json::array();
    for (const ReconRecord& r : report.records) {
      records.push_back({{"index", r.index},
                         {"iou_eigen", r.iou_eigen},
                         {"iou_profile", r.iou_profile},
                         {"l2_error", r.l2_error}});
    }
    j["records"] = records;
  }
  return j;
}

std::string ReconReportCsv(std::span<const ReconReport> reports) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "m,index,iou_eigen,iou_profile,l2_error\n";
  for (const ReconReport& report : reports) {
    for (const ReconRecord& r : report.records) {
      out << report.m << ',' << r.index << ',' << r.iou_eigen << ','
          << r.iou_profile << ',' << r.l2_error << '\n';
    }
  }
  return out.str();
}

}  // namespace eigencontour
