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

// Raw bit-packed mask format: "ECMK", u32 width, u32 height (little-endian),
// then ceil(width * height / 8) bytes. Pixels are packed in row-major order,
// most significant bit first; trailing pad bits are zero.

#ifndef EIGENCONTOUR_MASK_IO_H_
#define EIGENCONTOUR_MASK_IO_H_

#include <string>
#include <string_view>

#include "eigencontour/geometry.h"

namespace eigencontour {

std::string EncodeMask(const Mask& mask);

// Throws ValidationError on bad magic, truncation or trailing bytes.
Mask DecodeMask(std::string_view bytes);

void SaveMask(const Mask& mask, const std::string& path);
Mask LoadMask(const std::string& path);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_MASK_IO_H_
