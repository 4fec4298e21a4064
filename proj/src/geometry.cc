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

#include "eigencontour/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "eigencontour/errors.h"

namespace eigencontour {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rays that graze a pixel corner up to rounding still count as touching it;
// measured in units of the angular step.
constexpr double kRayTouchSlack = 1e-9;

bool AllCollinear(const std::vector<Point2>& v) {
  const Point2& origin = v.front();
  size_t far = 0;
  double far_d2 = 0.0;
  for (size_t i = 1; i < v.size(); ++i) {
    const double dx = v[i].x - origin.x;
    const double dy = v[i].y - origin.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 > far_d2) {
      far_d2 = d2;
      far = i;
    }
  }
  if (far_d2 == 0.0) return true;
  const double ax = v[far].x - origin.x;
  const double ay = v[far].y - origin.y;
  for (const Point2& p : v) {
    const double cross = ax * (p.y - origin.y) - ay * (p.x - origin.x);
    if (std::abs(cross) > 1e-12 * far_d2) return false;
  }
  return true;
}

struct Crossing {
  double x;
  int direction;
};

}  // namespace

Mask::Mask(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ValidationError("mask dimensions must be >= 1, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
  data_.assign(static_cast<size_t>(width) * static_cast<size_t>(height), 0);
}

Mask::Mask(int width, int height, std::vector<uint8_t> data)
    : Mask(width, height) {
  if (data.size() != data_.size()) {
    throw ValidationError("mask data length " + std::to_string(data.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  for (uint8_t v : data) {
    if (v > 1) throw ValidationError("mask entries must be 0 or 1");
  }
  data_ = std::move(data);
}

int64_t Mask::Area() const {
  int64_t area = 0;
  for (uint8_t v : data_) area += v;
  return area;
}

void ValidatePolygon(const Polygon& poly) {
  if (poly.vertices.size() < 3) {
    throw ValidationError("polygon needs at least 3 vertices, got " +
                          std::to_string(poly.vertices.size()));
  }
  for (const Point2& p : poly.vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("polygon has a non-finite vertex");
    }
  }
}

double SignedArea(const Polygon& poly) {
  const auto& v = poly.vertices;
  double twice = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

void ValidateStarContour(const StarContour& contour) {
  if (contour.radii.size() < 3) {
    throw ValidationError("star contour needs at least 3 samples, got " +
                          std::to_string(contour.radii.size()));
  }
  if (!std::isfinite(contour.center.x) || !std::isfinite(contour.center.y)) {
    throw ValidationError("star contour center is not finite");
  }
  for (double r : contour.radii) {
    if (!std::isfinite(r) || r < 0.0) {
      throw ValidationError("star contour radii must be finite and >= 0");
    }
  }
}

double SampleAngle(int index, int count) {
  return kTwoPi * static_cast<double>(index) / static_cast<double>(count);
}

Mask PolygonToMask(const Polygon& poly, int width, int height,
                   bool* degenerate) {
  ValidatePolygon(poly);
  Mask mask(width, height);
  const auto& v = poly.vertices;
  const bool flat = AllCollinear(v);
  if (degenerate != nullptr) *degenerate = flat;
  if (flat) return mask;

  double min_y = v.front().y;
  double max_y = v.front().y;
  for (const Point2& p : v) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int row_begin =
      std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  const int row_end =
      std::min(height, static_cast<int>(std::ceil(max_y + 0.5)) + 1);

  std::vector<Crossing> crossings;
  for (int py = row_begin; py < row_end; ++py) {
    const double y = py + 0.5;
    crossings.clear();
    for (size_t i = 0; i < v.size(); ++i) {
      const Point2& a = v[i];
      const Point2& b = v[(i + 1) % v.size()];
      int direction = 0;
      if (a.y <= y && y < b.y) {
        direction = 1;
      } else if (b.y <= y && y < a.y) {
        direction = -1;
      } else {
        continue;
      }
      const double x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      crossings.push_back({x, direction});
    }
    if (crossings.size() < 2) continue;
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& l, const Crossing& r) { return l.x < r.x; });

    // Winding at a center equals the summed direction of crossings strictly
    // to its right; walk the spans between consecutive crossings.
    int right_sum = 0;
    for (const Crossing& c : crossings) right_sum += c.direction;
    for (size_t j = 1; j < crossings.size(); ++j) {
      right_sum -= crossings[j - 1].direction;
      if (right_sum == 0) continue;
      const double lo = std::ceil(crossings[j - 1].x - 0.5);
      const double hi = std::ceil(crossings[j].x - 0.5);
      const int px_begin = static_cast<int>(std::clamp(lo, 0.0, double(width)));
      const int px_end = static_cast<int>(std::clamp(hi, 0.0, double(width)));
      for (int px = px_begin; px < px_end; ++px) mask.set(px, py, true);
    }
  }
  return mask;
}

Point2 ComputeCenter(const Mask& mask) {
  double sum_x = 0.0;
  double sum_y = 0.0;
  int64_t count = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sum_x += x + 0.5;
      sum_y += y + 0.5;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("empty instance");
  return {sum_x / static_cast<double>(count),
          sum_y / static_cast<double>(count)};
}

StarContour ExtractStarContour(const Mask& mask, Point2 center, int n) {
  if (n < 3) {
    throw ValidationError("star contour needs at least 3 samples, got " +
                          std::to_string(n));
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw ValidationError("contour center is not finite");
  }
  const double step = kTwoPi / n;
  std::vector<double> radii(n, -1.0);
  bool any = false;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      any = true;
      const double d = std::hypot(x + 0.5 - center.x, y + 0.5 - center.y);
      const bool inside = center.x >= x && center.x <= x + 1 &&
                          center.y >= y && center.y <= y + 1;
      if (inside) {
        for (double& r : radii) r = std::max(r, d);
        continue;
      }
      // Rays meeting the closed square are those whose angle lies between
      // the extreme corner angles; the square subtends less than pi.
      const double mid = std::atan2(y + 0.5 - center.y, x + 0.5 - center.x);
      double lo = 0.0;
      double hi = 0.0;
      for (int corner = 0; corner < 4; ++corner) {
        const double cx = x + (corner & 1) - center.x;
        const double cy = y + (corner >> 1) - center.y;
        double delta = std::atan2(cy, cx) - mid;
        if (delta > std::numbers::pi) delta -= kTwoPi;
        if (delta < -std::numbers::pi) delta += kTwoPi;
        lo = std::min(lo, delta);
        hi = std::max(hi, delta);
      }
      const long first =
          static_cast<long>(std::ceil((mid + lo) / step - kRayTouchSlack));
      const long last =
          static_cast<long>(std::floor((mid + hi) / step + kRayTouchSlack));
      for (long i = first; i <= last; ++i) {
        const long ray = ((i % n) + n) % n;
        radii[ray] = std::max(radii[ray], d);
      }
    }
  }
  if (!any) throw ValidationError("empty instance");
  for (double& r : radii) {
    if (r < 0.0) r = kEmptyBinRadius;
  }
  return {center, std::move(radii)};
}

StarContour CentroidContour(const Mask& mask, int n) {
  return ExtractStarContour(mask, ComputeCenter(mask), n);
}

Polygon ContourPolygon(const Point2& center, std::span<const double> radii) {
  Polygon poly;
  poly.vertices.reserve(radii.size());
  const int n = static_cast<int>(radii.size());
  for (int i = 0; i < n; ++i) {
    const double r = std::max(radii[i], 0.0);
    const double angle = SampleAngle(i, n);
    poly.vertices.push_back(
        {center.x + r * std::cos(angle), center.y + r * std::sin(angle)});
  }
  return poly;
}

Mask RasterizeContour(const Point2& center, std::span<const double> radii,
                      int width, int height) {
  if (radii.size() < 3) {
    throw ValidationError("star contour needs at least 3 samples, got " +
                          std::to_string(radii.size()));
  }
  return PolygonToMask(ContourPolygon(center, radii), width, height);
}

Mask RasterizeContour(const StarContour& contour, int width, int height) {
  return RasterizeContour(contour.center, contour.radii, width, height);
}

double MaskIou(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError("mask dimension mismatch: " +
                          std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " +
                          std::to_string(b.width()) + "x" +
                          std::to_string(b.height()));
  }
  int64_t inter = 0;
  int64_t uni = 0;
  const auto& da = a.data();
  const auto& db = b.data();
  for (size_t i = 0; i < da.size(); ++i) {
    inter += da[i] & db[i];
    uni += da[i] | db[i];
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Mask MaskUnion(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError("mask dimension mismatch in union");
  }
  std::vector<uint8_t> data(a.data().size());
  for (size_t i = 0; i < data.size(); ++i) data[i] = a.data()[i] | b.data()[i];
  return Mask(a.width(), a.height(), std::move(data));
}

}  // namespace eigencontour
