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

// Prediction-map file: "ECPM", u32 version (1), u32 h, u32 w, u32 k, u32 m,
// u32 stride, then h*w*k float32 (P), h*w float32 (O) and h*w*m float32 (R),
// little-endian. Several records may be concatenated in one file; each is a
// feature level of the same image.
//
// Instances are exchanged as JSON lines:
//   {"category": int, "score": float, "center": [x, y],
//    "mask": "<base64 of ECMK bytes>"}
// with an optional integer "image_id" used by evaluation.

#ifndef EIGENCONTOUR_PREDICTION_IO_H_
#define EIGENCONTOUR_PREDICTION_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "eigencontour/postprocess.h"
#include "json.hpp"

namespace eigencontour {

inline constexpr uint32_t kPredictionFormatVersion = 1;

std::string EncodePredictionMaps(const PredictionMaps& maps);

// Decodes one or more concatenated records. Throws ValidationError on a bad
// magic, unknown version, truncation or invalid map contents.
std::vector<PredictionMaps> DecodePredictionMaps(std::string_view bytes);

void SavePredictionMaps(std::span<const PredictionMaps> levels,
                        const std::string& path);
std::vector<PredictionMaps> LoadPredictionMaps(const std::string& path);

nlohmann::json InstanceToJson(const Instance& instance);
Instance InstanceFromJson(const nlohmann::json& record);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_PREDICTION_IO_H_
