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

#ifndef EIGENCONTOUR_BASE64_H_
#define EIGENCONTOUR_BASE64_H_

#include <string>
#include <string_view>

namespace eigencontour {

// Standard alphabet with '=' padding.
std::string Base64Encode(std::string_view bytes);

// Throws ValidationError on characters outside the alphabet or bad padding.
std::string Base64Decode(std::string_view text);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_BASE64_H_
