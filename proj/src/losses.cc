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

#include "eigencontour/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "eigencontour/errors.h"

namespace eigencontour {

namespace {

void CheckProbability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError(std::string(what) + " must lie in (0, 1)");
  }
}

void CheckTarget(double t) {
  if (t != 0.0 && t != 1.0) throw ValidationError("targets must be 0 or 1");
}

void CheckSameLength(size_t a, size_t b) {
  if (a != b) {
    throw ValidationError("length mismatch: " + std::to_string(a) + " vs " +
                          std::to_string(b));
  }
}

}  // namespace

double PolarIouLoss(std::span<const double> predicted,
                    std::span<const double> target) {
  CheckSameLength(predicted.size(), target.size());
  if (predicted.empty()) throw ValidationError("polar IoU needs >= 1 ray");
  double hi = 0.0;
  double lo = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    const double p = predicted[i];
    const double g = target[i];
    if (!(p > 0.0) || !(g > 0.0) || !std::isfinite(p) || !std::isfinite(g)) {
      throw ValidationError("radii must be positive for polar IoU");
    }
    hi += std::max(p, g);
    lo += std::min(p, g);
  }
  return std::log(hi / lo);
}

double CoeffLoss(const EigenBasis& basis, const CoeffVector& predicted,
                 const CoeffVector& target) {
  const auto p = ClampRadii(Decode(basis, predicted));
  const auto g = ClampRadii(Decode(basis, target));
  return PolarIouLoss(p, g);
}

double FocalLoss(std::span<const double> probabilities,
                 std::span<const double> targets, double alpha, double gamma) {
  CheckSameLength(probabilities.size(), targets.size());
  CheckProbability(alpha, "alpha");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("gamma must be >= 0");
  }
  double sum = 0.0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    CheckProbability(p, "probability");
    CheckTarget(targets[i]);
    if (targets[i] == 1.0) {
      sum += -alpha * std::pow(1.0 - p, gamma) * std::log(p);
    } else {
      sum += -(1.0 - alpha) * std::pow(p, gamma) * std::log1p(-p);
    }
  }
  return sum;
}

double BceLoss(double probability, double target) {
  CheckProbability(probability, "probability");
  CheckTarget(target);
  return target == 1.0 ? -std::log(probability) : -std::log1p(-probability);
}

double BceLoss(std::span<const double> probabilities,
               std::span<const double> targets) {
  CheckSameLength(probabilities.size(), targets.size());
  double sum = 0.0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    sum += BceLoss(probabilities[i], targets[i]);
  }
  return sum;
}

LossBreakdown TotalLoss(double cls, double cen, double coeff) {
  for (double v : {cls, cen, coeff}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("loss components must be finite and >= 0");
    }
  }
  return {cls, cen, coeff, cls + cen + coeff};
}

}  // namespace eigencontour
