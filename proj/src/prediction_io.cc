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

#include "eigencontour/prediction_io.h"

#include "byte_io.h"
#include "eigencontour/base64.h"
#include "eigencontour/errors.h"
#include "eigencontour/mask_io.h"

namespace eigencontour {

namespace {
constexpr std::string_view kMagic = "ECPM";
constexpr uint32_t kMaxDimension = 1u << 16;
}  // namespace

std::string EncodePredictionMaps(const PredictionMaps& maps) {
  maps.Validate();
  internal::ByteWriter w;
  w.Bytes(kMagic);
  w.U32(kPredictionFormatVersion);
  w.U32(static_cast<uint32_t>(maps.height));
  w.U32(static_cast<uint32_t>(maps.width));
  w.U32(static_cast<uint32_t>(maps.categories));
  w.U32(static_cast<uint32_t>(maps.coefficients));
  w.U32(static_cast<uint32_t>(maps.stride));
  for (float v : maps.p) w.F32(v);
  for (float v : maps.o) w.F32(v);
  for (float v : maps.r) w.F32(v);
  return w.Release();
}

std::vector<PredictionMaps> DecodePredictionMaps(std::string_view bytes) {
  std::vector<PredictionMaps> levels;
  internal::ByteReader r(bytes, "prediction map file");
  while (r.remaining() > 0) {
    if (r.remaining() < 4 || r.Bytes(4) != kMagic) {
      throw ValidationError("not a prediction map file");
    }
    const uint32_t version = r.U32();
    if (version != kPredictionFormatVersion) {
      throw ValidationError("unsupported prediction map version " +
                            std::to_string(version));
    }
    uint32_t dims[5];
    for (uint32_t& d : dims) {
      d = r.U32();
      if (d > kMaxDimension) {
        throw ValidationError("prediction map dimension out of range");
      }
    }
    PredictionMaps maps;
    maps.height = static_cast<int>(dims[0]);
    maps.width = static_cast<int>(dims[1]);
    maps.categories = static_cast<int>(dims[2]);
    maps.coefficients = static_cast<int>(dims[3]);
    maps.stride = static_cast<int>(dims[4]);
    const size_t cells = static_cast<size_t>(dims[0]) * dims[1];
    r.Require(cells * (dims[2] + 1 + static_cast<size_t>(dims[3])) * 4);
    maps.p.resize(cells * dims[2]);
    maps.o.resize(cells);
    maps.r.resize(cells * dims[3]);
    for (float& v : maps.p) v = r.F32();
    for (float& v : maps.o) v = r.F32();
    for (float& v : maps.r) v = r.F32();
    maps.Validate();
    levels.push_back(std::move(maps));
  }
  if (levels.empty()) throw ValidationError("prediction map file is empty");
  return levels;
}

void SavePredictionMaps(std::span<const PredictionMaps> levels,
                        const std::string& path) {
  std::string bytes;
  for (const auto& maps : levels) bytes += EncodePredictionMaps(maps);
  internal::WriteFile(path, bytes);
}

std::vector<PredictionMaps> LoadPredictionMaps(const std::string& path) {
  return DecodePredictionMaps(internal::ReadFile(path));
}

nlohmann::json InstanceToJson(const Instance& instance) {
  nlohmann::json j;
  j["category"] = instance.category;
  j["score"] = instance.score;
  j["center"] = {instance.center.x, instance.center.y};
  j["mask"] = Base64Encode(EncodeMask(instance.mask));
  return j;
}

Instance InstanceFromJson(const nlohmann::json& record) {
  try {
    Instance inst;
    inst.category = record.at("category").get<int>();
    inst.score = record.at("score").get<double>();
    const auto& center = record.at("center");
    if (!center.is_array() || center.size() != 2) {
      throw ValidationError("instance center must be [x, y]");
    }
    inst.center = {center[0].get<double>(), center[1].get<double>()};
    inst.mask = DecodeMask(Base64Decode(record.at("mask").get<std::string>()));
    if (!(inst.score >= 0.0 && inst.score <= 1.0)) {
      throw ValidationError("instance score must lie in [0, 1]");
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed instance record: ") +
                          e.what());
  }
}

}  // namespace eigencontour
