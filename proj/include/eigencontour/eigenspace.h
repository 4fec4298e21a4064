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

// Eigencontour space: the leading left singular vectors of a matrix whose
// columns are star-convex contours, and the linear codec between radii and
// coefficients in that space.
//
// The singular vectors are obtained from the eigendecomposition of the N x N
// Gram matrix A * A^T, which is accumulated column by column so corpora with
// many contours never need to be held in memory. Singular values are the
// square roots of the Gram eigenvalues. Right singular vectors are never
// formed.

#ifndef EIGENCONTOUR_EIGENSPACE_H_
#define EIGENCONTOUR_EIGENSPACE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "eigencontour/geometry.h"

namespace eigencontour {

// A Gram eigenvalue at or below this fraction of the largest one is treated
// as zero when checking the requested rank.
inline constexpr double kRankTolerance = 1e-12;

// Jacobi sweeps stop once the off-diagonal Frobenius norm falls to this
// fraction of the Gram matrix norm.
inline constexpr double kJacobiTolerance = 1e-12;

enum class Normalization : uint8_t {
  kNone = 0,
  // Each contour is divided by its largest radius before accumulation.
  kMaxRadius = 1,
};

// N x L matrix of radii, one contour per column, stored column-major.
class ContourMatrix {
 public:
  explicit ContourMatrix(int n);

  // Throws ValidationError on a length mismatch or a negative or non-finite
  // radius.
  void AddColumn(std::span<const double> radii);

  int rows() const { return n_; }
  int cols() const { return static_cast<int>(values_.size() / n_); }
  double at(int row, int col) const {
    return values_[static_cast<size_t>(col) * n_ + row];
  }
  std::span<const double> column(int col) const {
    return {values_.data() + static_cast<size_t>(col) * n_,
            static_cast<size_t>(n_)};
  }

 private:
  int n_;
  std::vector<double> values_;
};

// Streaming accumulation of A * A^T. Columns are grouped into fixed-size
// chunks; each chunk's partial product may be computed on its own worker,
// but partials are always added in chunk order, so the result is bitwise
// independent of the thread count.
class GramAccumulator {
 public:
  static constexpr int kChunkColumns = 256;

  explicit GramAccumulator(int n,
                           Normalization normalization = Normalization::kNone,
                           int threads = 1);

  // Same validation as ContourMatrix::AddColumn.
  void Add(std::span<const double> radii);
  void Add(const ContourMatrix& matrix);

  int n() const { return n_; }
  int64_t columns() const { return columns_; }
  Normalization normalization() const { return normalization_; }

  // Flushes pending columns and returns the dense row-major Gram matrix.
  std::vector<double> Finish();

 private:
  void Flush();

  int n_;
  Normalization normalization_;
  int threads_;
  int64_t columns_ = 0;
  std::vector<double> pending_;
  std::vector<double> gram_;
};

// Full eigendecomposition of a Gram matrix: eigenvalues in descending order
// and the matching unit eigenvectors (column-major, n x n), each with its
// largest-magnitude entry positive (first such index on ties).
struct Spectrum {
  int n = 0;
  int64_t corpus_size = 0;
  Normalization normalization = Normalization::kNone;
  std::vector<double> eigenvalues;
  std::vector<double> vectors;
};

// Cyclic Jacobi on a symmetric row-major n x n matrix.
Spectrum SymmetricEigen(std::vector<double> matrix, int n);

Spectrum ComputeSpectrum(GramAccumulator& gram);
Spectrum ComputeSpectrum(const ContourMatrix& matrix,
                         Normalization normalization = Normalization::kNone,
                         int threads = 1);

// The first M eigencontours. Immutable once built.
class EigenBasis {
 public:
  // Throws ValidationError unless 1 <= m <= n, sizes agree, sigma is
  // positive and non-increasing, and columns are orthonormal to 1e-9.
  EigenBasis(int n, int m, std::vector<double> u, std::vector<double> sigma,
             Normalization normalization = Normalization::kNone,
             int64_t corpus_size = 0);

  int n() const { return n_; }
  int m() const { return m_; }
  // Column-major n x m.
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& sigma() const { return sigma_; }
  Normalization normalization() const { return normalization_; }
  // Number of contours the basis was built from; 0 when unknown.
  int64_t corpus_size() const { return corpus_size_; }

  std::span<const double> column(int j) const {
    return {u_.data() + static_cast<size_t>(j) * n_, static_cast<size_t>(n_)};
  }

  friend bool operator==(const EigenBasis&, const EigenBasis&) = default;

 private:
  int n_;
  int m_;
  std::vector<double> u_;
  std::vector<double> sigma_;
  Normalization normalization_;
  int64_t corpus_size_;
};

// Leading m eigenpairs of the spectrum. Throws ValidationError if m is out
// of [1, n] or beyond the corpus size, and "requested rank exceeds numerical
// rank" if eigenvalue m is at or below kRankTolerance times the largest.
EigenBasis TruncateSpectrum(const Spectrum& spectrum, int m);

EigenBasis BuildBasis(const ContourMatrix& matrix, int m,
                      Normalization normalization = Normalization::kNone,
                      int threads = 1);

struct CoeffVector {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  friend bool operator==(const CoeffVector&, const CoeffVector&) = default;
};

// c = U_M^T r. Throws ValidationError if r.size() != n.
CoeffVector Encode(const EigenBasis& basis, std::span<const double> radii);

// r = U_M c; entries may be negative. Throws ValidationError if
// c.size() != m.
std::vector<double> Decode(const EigenBasis& basis, const CoeffVector& coeffs);

// Orthogonal projection onto span(U_M).
std::vector<double> Project(const EigenBasis& basis,
                            std::span<const double> radii);

// Replaces every radius below `floor` with `floor`.
std::vector<double> ClampRadii(std::vector<double> radii,
                               double floor = kEmptyBinRadius);

struct ReconstructionQuality {
  double l2_error = 0.0;
  double iou = 0.0;
};

// l2_error = |r - U_M U_M^T r|; iou compares the rasterized original with the
// rasterized projection (negative radii clamped to 0).
ReconstructionQuality MeasureReconstruction(const EigenBasis& basis,
                                            const StarContour& contour,
                                            int width, int height);

}  // namespace eigencontour

#endif  // EIGENCONTOUR_EIGENSPACE_H_
