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

#include "eigencontour/mask_io.h"

#include <vector>

#include "byte_io.h"
#include "eigencontour/errors.h"

namespace eigencontour {

namespace {
constexpr std::string_view kMagic = "ECMK";
}  // namespace

std::string EncodeMask(const Mask& mask) {
  internal::ByteWriter w;
  w.Bytes(kMagic);
  w.U32(static_cast<uint32_t>(mask.width()));
  w.U32(static_cast<uint32_t>(mask.height()));
  const auto& data = mask.data();
  std::string packed((data.size() + 7) / 8, '\0');
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i]) packed[i / 8] |= static_cast<char>(0x80u >> (i % 8));
  }
  w.Bytes(packed);
  return w.Release();
}

Mask DecodeMask(std::string_view bytes) {
  internal::ByteReader r(bytes, "mask");
  if (r.remaining() < 4 || r.Bytes(4) != kMagic) {
    throw ValidationError("not a mask file");
  }
  const uint32_t width = r.U32();
  const uint32_t height = r.U32();
  if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20)) {
    throw ValidationError("mask dimensions out of range");
  }
  const size_t count = static_cast<size_t>(width) * height;
  std::string_view packed = r.Bytes((count + 7) / 8);
  if (r.remaining() != 0) throw ValidationError("mask: trailing bytes");
  std::vector<uint8_t> data(count);
  for (size_t i = 0; i < count; ++i) {
    data[i] = (static_cast<uint8_t>(packed[i / 8]) >> (7 - i % 8)) & 1u;
  }
  return Mask(static_cast<int>(width), static_cast<int>(height),
              std::move(data));
}

void SaveMask(const Mask& mask, const std::string& path) {
  internal::WriteFile(path, EncodeMask(mask));
}

Mask LoadMask(const std::string& path) {
  return DecodeMask(internal::ReadFile(path));
}

}  // namespace eigencontour
