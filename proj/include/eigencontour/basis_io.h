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

// Basis file: "ECEB", u32 version (1), u32 n, u32 m, u8 normalize flag, then
// m float64 singular values and n*m float64 basis entries in column-major
// order, all little-endian. A JSON sidecar with the same stem records the
// corpus size and build parameters.

#ifndef EIGENCONTOUR_BASIS_IO_H_
#define EIGENCONTOUR_BASIS_IO_H_

#include <string>
#include <string_view>

#include "eigencontour/eigenspace.h"
#include "json.hpp"

namespace eigencontour {

inline constexpr uint32_t kBasisFormatVersion = 1;

std::string EncodeBasis(const EigenBasis& basis);

// Throws ValidationError("not an eigenbasis file") on a bad magic, and
// ValidationError on truncation, unknown version or a basis that violates
// its invariants.
EigenBasis DecodeBasis(std::string_view bytes);

void SaveBasis(const EigenBasis& basis, const std::string& path);
EigenBasis LoadBasis(const std::string& path);

// "dir/name.eceb" -> "dir/name.json".
std::string SidecarPath(const std::string& basis_path);

// Writes {"corpus_size", "n", "m", "normalize", "singular_values",
// "parameters"} next to the basis file.
void WriteBasisSidecar(const EigenBasis& basis, const std::string& basis_path,
                       const nlohmann::json& parameters);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_BASIS_IO_H_
