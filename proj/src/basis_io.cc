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

#include "eigencontour/basis_io.h"

#include <filesystem>
#include <vector>

#include "byte_io.h"
#include "eigencontour/errors.h"

namespace eigencontour {

namespace {
constexpr std::string_view kMagic = "ECEB";
constexpr uint32_t kMaxDimension = 1u << 16;
}  // namespace

std::string EncodeBasis(const EigenBasis& basis) {
  internal::ByteWriter w;
  w.Bytes(kMagic);
  w.U32(kBasisFormatVersion);
  w.U32(static_cast<uint32_t>(basis.n()));
  w.U32(static_cast<uint32_t>(basis.m()));
  w.U8(static_cast<uint8_t>(basis.normalization()));
  for (double s : basis.sigma()) w.F64(s);
  for (double v : basis.u()) w.F64(v);
  return w.Release();
}

EigenBasis DecodeBasis(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != kMagic) {
    throw ValidationError("not an eigenbasis file");
  }
  internal::ByteReader r(bytes.substr(4), "eigenbasis file");
  const uint32_t version = r.U32();
  if (version != kBasisFormatVersion) {
    throw ValidationError("unsupported eigenbasis version " +
                          std::to_string(version));
  }
  const uint32_t n = r.U32();
  const uint32_t m = r.U32();
  const uint8_t flag = r.U8();
  if (n > kMaxDimension || m > kMaxDimension) {
    throw ValidationError("eigenbasis dimensions out of range");
  }
  if (flag > static_cast<uint8_t>(Normalization::kMaxRadius)) {
    throw ValidationError("unknown normalize flag " + std::to_string(flag));
  }
  r.Require((static_cast<size_t>(m) + static_cast<size_t>(n) * m) * 8);
  std::vector<double> sigma(m);
  for (double& s : sigma) s = r.F64();
  std::vector<double> u(static_cast<size_t>(n) * m);
  for (double& v : u) v = r.F64();
  if (r.remaining() != 0) throw ValidationError("eigenbasis file: trailing bytes");
  return EigenBasis(static_cast<int>(n), static_cast<int>(m), std::move(u),
                    std::move(sigma), static_cast<Normalization>(flag));
}

void SaveBasis(const EigenBasis& basis, const std::string& path) {
  internal::WriteFile(path, EncodeBasis(basis));
}

EigenBasis LoadBasis(const std::string& path) {
  EigenBasis basis = DecodeBasis(internal::ReadFile(path));
  // The corpus size lives only in the sidecar; a missing or unreadable
  // sidecar leaves it at zero rather than failing the load.
  const std::string sidecar = SidecarPath(path);
  std::error_code ec;
  if (!std::filesystem::exists(sidecar, ec)) return basis;
  const auto doc = nlohmann::json::parse(internal::ReadFile(sidecar), nullptr,
                                         /*allow_exceptions=*/false);
  if (doc.is_object() && doc.contains("corpus_size") &&
      doc["corpus_size"].is_number_integer() &&
      doc["corpus_size"].get<int64_t>() >= 0) {
    std::vector<double> u = basis.u();
    std::vector<double> sigma = basis.sigma();
    return EigenBasis(basis.n(), basis.m(), std::move(u), std::move(sigma),
                      basis.normalization(), doc["corpus_size"].get<int64_t>());
  }
  return basis;
}

std::string SidecarPath(const std::string& basis_path) {
  std::filesystem::path p(basis_path);
  p.replace_extension(".json");
  return p.string();
}

void WriteBasisSidecar(const EigenBasis& basis, const std::string& basis_path,
                       const nlohmann::json& parameters) {
  nlohmann::json doc;
  doc["corpus_size"] = basis.corpus_size();
  doc["n"] = basis.n();
  doc["m"] = basis.m();
  doc["normalize"] = basis.normalization() == Normalization::kMaxRadius
                         ? "max-radius"
                         : "none";
  doc["singular_values"] = basis.sigma();
  doc["parameters"] = parameters;
  internal::WriteFile(SidecarPath(basis_path), doc.dump(2) + "\n");
}

}  // namespace eigencontour
