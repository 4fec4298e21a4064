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

#include "eigencontour/dataset.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <unordered_map>
#include <utility>

#include "byte_io.h"
#include "eigencontour/errors.h"

namespace eigencontour {

namespace {

using nlohmann::json;

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementations.
double Uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class AnnotationStream {
 public:
  AnnotationStream(const InstanceSink& sink, LoadStats& stats)
      : sink_(sink), stats_(stats) {}

  bool OnEvent(int depth, json::parse_event_t event, json& parsed) {
    if (depth == 1 && event == json::parse_event_t::key) {
      section_ = parsed.get<std::string>();
      return true;
    }
    if (depth == 1 && event == json::parse_event_t::array_end) {
      if (section_ == "images") images_done_ = true;
      if (section_ == "categories") FinishCategories();
      if (Ready()) DrainPending();
      return section_ != "annotations" && section_ != "images";
    }
    if (depth != 2 || event != json::parse_event_t::object_end) return true;
    if (section_ == "images") {
      AddImage(parsed);
      return false;
    }
    if (section_ == "categories") {
      AddCategory(parsed);
      return true;
    }
    if (section_ == "annotations") {
      const int64_t index = next_index_++;
      if (Ready()) {
        Process(parsed, index);
      } else {
        pending_.emplace_back(index, std::move(parsed));
      }
      return false;
    }
    return true;
  }

  void Finish() {
    if (!images_done_) throw ValidationError("COCO JSON: missing 'images'");
    if (!categories_done_) {
      throw ValidationError("COCO JSON: missing 'categories'");
    }
    DrainPending();
  }

 private:
  bool Ready() const { return images_done_ && categories_done_; }

  void AddImage(const json& image) {
    try {
      const int64_t id = image.at("id").get<int64_t>();
      const int w = image.at("width").get<int>();
      const int h = image.at("height").get<int>();
      if (w < 1 || h < 1) {
        throw ValidationError("image " + std::to_string(id) +
                              ": dimensions must be >= 1");
      }
      images_[id] = {w, h};
      stats_.images.push_back({id, {w, h}});
    } catch (const json::exception& e) {
      throw ValidationError("image #" + std::to_string(stats_.images.size()) +
                            ": " + e.what());
    }
  }

  void AddCategory(const json& category) {
    try {
      raw_category_ids_.push_back(category.at("id").get<int64_t>());
    } catch (const json::exception& e) {
      throw ValidationError("category #" +
                            std::to_string(raw_category_ids_.size()) + ": " +
                            e.what());
    }
  }

  void FinishCategories() {
    auto ids = raw_category_ids_;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (size_t i = 0; i < ids.size(); ++i) {
      category_index_[ids[i]] = static_cast<int>(i);
    }
    stats_.category_ids = ids;
    categories_done_ = true;
  }

  void DrainPending() {
    for (auto& [index, record] : pending_) Process(record, index);
    pending_.clear();
  }

  void Process(const json& record, int64_t index) {
    const auto fail = [&](const std::string& why) -> ValidationError {
      std::string who = "annotation #" + std::to_string(index);
      if (record.is_object() && record.contains("id") &&
          record["id"].is_number_integer()) {
        who += " (id " + std::to_string(record["id"].get<int64_t>()) + ")";
      }
      return ValidationError(who + ": " + why);
    };
    for (const char* field : {"image_id", "category_id", "segmentation"}) {
      if (!record.contains(field)) {
        throw fail(std::string("missing '") + field + "'");
      }
    }
    AnnotatedInstance inst;
    try {
      inst.image_id = record.at("image_id").get<int64_t>();
      inst.annotation_id = record.value("id", int64_t{-1});
      const int64_t category_id = record.at("category_id").get<int64_t>();
      auto cat = category_index_.find(category_id);
      if (cat == category_index_.end()) {
        throw fail("unknown category_id " + std::to_string(category_id));
      }
      inst.category = cat->second;
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    auto image = images_.find(inst.image_id);
    if (image == images_.end()) {
      throw fail("unknown image_id " + std::to_string(inst.image_id));
    }
    inst.image_width = image->second.first;
    inst.image_height = image->second.second;

    const json& seg = record.at("segmentation");
    if (seg.is_object()) {
      ++stats_.skipped_rle;
      stats_.warnings.push_back("annotation #" + std::to_string(index) +
                                ": RLE segmentation skipped");
      return;
    }
    if (!seg.is_array() || seg.empty()) {
      throw fail("segmentation must be a non-empty list of polygons");
    }
    for (const json& part : seg) {
      if (!part.is_array() || part.size() < 6 || part.size() % 2 != 0) {
        throw fail("polygon must be a flat list of >= 3 x,y pairs");
      }
      Polygon poly;
      for (size_t i = 0; i < part.size(); i += 2) {
        if (!part[i].is_number() || !part[i + 1].is_number()) {
          throw fail("polygon coordinates must be numbers");
        }
        poly.vertices.push_back({part[i].get<double>(), part[i + 1].get<double>()});
      }
      try {
        ValidatePolygon(poly);
      } catch (const ValidationError& e) {
        throw fail(e.what());
      }
      inst.polygons.push_back(std::move(poly));
    }
    Mask mask(inst.image_width, inst.image_height);
    for (const Polygon& poly : inst.polygons) {
      mask = MaskUnion(mask, PolygonToMask(poly, inst.image_width,
                                           inst.image_height));
    }
    if (mask.Empty()) {
      ++stats_.skipped_empty;
      return;
    }
    inst.mask = std::move(mask);
    ++stats_.instances;
    sink_(std::move(inst));
  }

  const InstanceSink& sink_;
  LoadStats& stats_;
  std::string section_;
  bool images_done_ = false;
  bool categories_done_ = false;
  int64_t next_index_ = 0;
  std::unordered_map<int64_t, std::pair<int, int>> images_;
  std::vector<int64_t> raw_category_ids_;
  std::unordered_map<int64_t, int> category_index_;
  std::vector<std::pair<int64_t, json>> pending_;
};

}  // namespace

LoadStats ParseAnnotations(std::string_view json_text,
                           const InstanceSink& sink) {
  LoadStats stats;
  AnnotationStream stream(sink, stats);
  json::parser_callback_t callback =
      [&stream](int depth, json::parse_event_t event, json& parsed) {
        return stream.OnEvent(depth, event, parsed);
      };
  json root;
  try {
    root = json::parse(json_text, callback);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ValidationError("COCO JSON must be an object");
  }
  stream.Finish();
  return stats;
}

LoadStats LoadAnnotations(const std::string& path, const InstanceSink& sink) {
  return ParseAnnotations(internal::ReadFile(path), sink);
}

std::vector<AnnotatedInstance> LoadAllAnnotations(const std::string& path,
                                                  LoadStats* stats) {
  std::vector<AnnotatedInstance> out;
  LoadStats s = LoadAnnotations(
      path, [&out](AnnotatedInstance&& inst) { out.push_back(std::move(inst)); });
  if (stats != nullptr) *stats = std::move(s);
  return out;
}

void SyntheticShapeSpec::Validate() const {
  if (harmonic_count < 0) throw ValidationError("harmonic_count must be >= 0");
  if (!(base_radius > 0.0) || !std::isfinite(base_radius)) {
    throw ValidationError("base_radius must be positive");
  }
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw ValidationError("amplitude must lie in [0, 1)");
  }
  if (width < 1 || height < 1) {
    throw ValidationError("image size must be >= 1");
  }
  if (samples < 3) throw ValidationError("samples must be >= 3");
}

SyntheticShapeSpec SyntheticSpecFromJson(const json& doc) {
  SyntheticShapeSpec spec;
  try {
    spec.seed = doc.value("seed", spec.seed);
    spec.harmonic_count = doc.value("harmonic_count", spec.harmonic_count);
    spec.base_radius = doc.value("base_radius", spec.base_radius);
    spec.amplitude = doc.value("amplitude", spec.amplitude);
    spec.width = doc.value("width", spec.width);
    spec.height = doc.value("height", spec.height);
    spec.samples = doc.value("samples", spec.samples);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synthetic spec: ") + e.what());
  }
  spec.Validate();
  return spec;
}

json SyntheticSpecToJson(const SyntheticShapeSpec& spec) {
  return {{"seed", spec.seed},
          {"harmonic_count", spec.harmonic_count},
          {"base_radius", spec.base_radius},
          {"amplitude", spec.amplitude},
          {"width", spec.width},
          {"height", spec.height},
          {"samples", spec.samples}};
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticShapeSpec& spec,
                                        int count) {
  spec.Validate();
  if (count < 0) throw ValidationError("corpus size must be >= 0");
  std::mt19937_64 rng(spec.seed);
  const Point2 center{spec.width / 2.0, spec.height / 2.0};
  const int h = spec.harmonic_count;

  SyntheticCorpus corpus;
  corpus.contours.reserve(count);
  corpus.masks.reserve(count);
  std::vector<double> amp(h);
  std::vector<double> phase(h);
  for (int k = 0; k < count; ++k) {
    // Weights decay with the harmonic order; the shape's total amplitude is
    // a uniform fraction of the allowed budget.
    double total = 0.0;
    for (int j = 0; j < h; ++j) {
      amp[j] = Uniform(rng) / (j + 1);
      total += amp[j];
      phase[j] = 2.0 * std::numbers::pi * Uniform(rng);
    }
    const double budget = spec.amplitude * (1.0 - Uniform(rng));
    for (int j = 0; j < h; ++j) {
      amp[j] = total > 0.0 ? budget * amp[j] / total : 0.0;
    }
    StarContour contour;
    contour.center = center;
    contour.radii.resize(spec.samples);
    for (int i = 0; i < spec.samples; ++i) {
      const double theta = SampleAngle(i, spec.samples);
      double wave = 0.0;
      for (int j = 0; j < h; ++j) {
        wave += amp[j] * std::cos((j + 1) * theta + phase[j]);
      }
      contour.radii[i] = spec.base_radius * (1.0 + wave);
    }
    corpus.masks.push_back(RasterizeContour(contour, spec.width, spec.height));
    corpus.contours.push_back(std::move(contour));
  }
  return corpus;
}

ContourMatrix CorpusToMatrix(const std::vector<StarContour>& contours) {
  if (contours.empty()) throw ValidationError("corpus is empty");
  const int n = contours.front().size();
  ContourMatrix matrix(n);
  for (size_t j = 0; j < contours.size(); ++j) {
    if (contours[j].size() != n) {
      throw ValidationError("contour " + std::to_string(j) + " has N=" +
                            std::to_string(contours[j].size()) +
                            ", expected " + std::to_string(n));
    }
    matrix.AddColumn(contours[j].radii);
  }
  return matrix;
}

}  // namespace eigencontour
