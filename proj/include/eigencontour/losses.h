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

// Reference values of the training loss terms. Every function returns a sum
// over its entries; averaging is left to the caller.

#ifndef EIGENCONTOUR_LOSSES_H_
#define EIGENCONTOUR_LOSSES_H_

#include <span>

#include "eigencontour/eigenspace.h"

namespace eigencontour {

inline constexpr double kFocalAlpha = 0.25;
inline constexpr double kFocalGamma = 2.0;

// ln(sum_i max(p_i, g_i) / sum_i min(p_i, g_i)). Throws ValidationError on a
// length mismatch, empty input, or "radii must be positive for polar IoU".
double PolarIouLoss(std::span<const double> predicted,
                    std::span<const double> target);

// Decodes both coefficient vectors, clamps the radii to kEmptyBinRadius and
// applies PolarIouLoss.
double CoeffLoss(const EigenBasis& basis, const CoeffVector& predicted,
                 const CoeffVector& target);

// Sum over entries of -alpha (1-p)^gamma ln p for targets equal to 1 and
// -(1-alpha) p^gamma ln(1-p) for targets equal to 0. Probabilities must lie in
// (0, 1), targets in {0, 1}, alpha in (0, 1) and gamma >= 0.
double FocalLoss(std::span<const double> probabilities,
                 std::span<const double> targets, double alpha = kFocalAlpha,
                 double gamma = kFocalGamma);

// -t ln o - (1-t) ln(1-o) for o in (0, 1), t in {0, 1}.
double BceLoss(double probability, double target);
double BceLoss(std::span<const double> probabilities,
               std::span<const double> targets);

struct LossBreakdown {
  double cls = 0.0;
  double cen = 0.0;
  double coeff = 0.0;
  double total = 0.0;
};

// Throws ValidationError if a component is negative or non-finite.
LossBreakdown TotalLoss(double cls, double cen, double coeff);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_LOSSES_H_
