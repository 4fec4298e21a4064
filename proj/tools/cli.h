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

#ifndef EIGENCONTOUR_TOOLS_CLI_H_
#define EIGENCONTOUR_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace eigencontour::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

// Runs one subcommand. args excludes the program name. Machine-readable
// output goes to `out`, progress and errors to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace eigencontour::cli

#endif  // EIGENCONTOUR_TOOLS_CLI_H_
