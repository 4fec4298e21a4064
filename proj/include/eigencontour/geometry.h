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

// Polygons, binary instance masks and star-convex radial contours.
//
// Pixel (px, py) covers [px, px+1) x [py, py+1) and is represented by its
// center (px + 0.5, py + 0.5). Angles are measured from the +x axis toward
// +y; since image rows grow downward this is clockwise on screen. Sample i of
// an N-ray contour sits at angle 2*pi*i/N (zero-based).

#ifndef EIGENCONTOUR_GEOMETRY_H_
#define EIGENCONTOUR_GEOMETRY_H_

#include <cstdint>
#include <span>
#include <vector>

namespace eigencontour {

// Radius assigned to rays that meet no object pixel.
inline constexpr double kEmptyBinRadius = 1e-6;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Row-major binary occupancy grid for one instance.
class Mask {
 public:
  // All-zero mask. Throws ValidationError unless width, height >= 1.
  Mask(int width, int height);
  // Throws ValidationError if data.size() != width * height or any entry is
  // not 0/1.
  Mask(int width, int height, std::vector<uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<uint8_t>& data() const { return data_; }

  uint8_t at(int x, int y) const { return data_[Index(x, y)]; }
  void set(int x, int y, bool value) { data_[Index(x, y)] = value ? 1 : 0; }

  int64_t Area() const;
  bool Empty() const { return Area() == 0; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  size_t Index(int x, int y) const {
    return static_cast<size_t>(y) * static_cast<size_t>(width_) +
           static_cast<size_t>(x);
  }

  int width_;
  int height_;
  std::vector<uint8_t> data_;
};

// Implicitly closed polygon with at least three finite vertices.
struct Polygon {
  std::vector<Point2> vertices;
};

// Throws ValidationError if the polygon has < 3 vertices or a non-finite
// coordinate.
void ValidatePolygon(const Polygon& poly);

// Shoelace area, positive for vertices ordered toward +y from +x.
double SignedArea(const Polygon& poly);

// Center point plus N >= 3 non-negative radii at uniform angles.
struct StarContour {
  Point2 center;
  std::vector<double> radii;

  int size() const { return static_cast<int>(radii.size()); }
};

// Throws ValidationError unless radii.size() >= 3, all radii are finite and
// >= 0, and the center is finite.
void ValidateStarContour(const StarContour& contour);

// Angle of sample `index` out of `count`.
double SampleAngle(int index, int count);

// Fills every pixel whose center is inside `poly` under the nonzero winding
// rule. An edge is crossed by a scanline when the line lies in its half-open
// y-range, and a center counts the crossings strictly to its right, so a
// center exactly on an edge resolves the same way a brute-force winding
// number test does. A polygon whose vertices are all collinear yields an
// empty mask and sets *degenerate when provided.
Mask PolygonToMask(const Polygon& poly, int width, int height,
                   bool* degenerate = nullptr);

// Mean of the set pixel centers. Throws ValidationError("empty instance") for
// an empty mask.
Point2 ComputeCenter(const Mask& mask);

// Farthest-pixel radial profile. Ray i leaves `center` at theta_i and meets
// every set pixel whose closed unit square it touches; r_i is the largest
// center-to-pixel-center distance among those pixels. A pixel containing
// `center` meets every ray. Rays that meet no set pixel get kEmptyBinRadius.
StarContour ExtractStarContour(const Mask& mask, Point2 center, int n);

// ExtractStarContour around the mask centroid.
StarContour CentroidContour(const Mask& mask, int n);

// Vertices center + r_i * (cos theta_i, sin theta_i) of the contour.
// Negative radii are clamped to 0.
Polygon ContourPolygon(const Point2& center, std::span<const double> radii);

// Rasterizes the N-gon of a contour; negative radii are clamped to 0.
Mask RasterizeContour(const StarContour& contour, int width, int height);
Mask RasterizeContour(const Point2& center, std::span<const double> radii,
                      int width, int height);

// |a AND b| / |a OR b|, 0 when both are empty. Throws ValidationError on
// dimension mismatch.
double MaskIou(const Mask& a, const Mask& b);

// Element-wise union of equally sized masks.
Mask MaskUnion(const Mask& a, const Mask& b);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_GEOMETRY_H_
