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

#include "eigencontour/eigenspace.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "eigencontour/errors.h"
#include "eigencontour/parallel.h"

namespace eigencontour {

namespace {

constexpr int kMaxJacobiSweeps = 100;

void ValidateRadii(std::span<const double> radii, int n) {
  if (static_cast<int>(radii.size()) != n) {
    throw ValidationError("contour length " + std::to_string(radii.size()) +
                          " does not match N=" + std::to_string(n));
  }
  for (double r : radii) {
    if (!std::isfinite(r) || r < 0.0) {
      throw ValidationError("contour radii must be finite and >= 0");
    }
  }
}

// Upper triangle of sum_j c_j c_j^T over the columns in [begin, end).
void AccumulateChunk(const double* cols, size_t count, int n, double* out) {
  for (size_t j = 0; j < count; ++j) {
    const double* c = cols + j * static_cast<size_t>(n);
    for (int r = 0; r < n; ++r) {
      const double cr = c[r];
      if (cr == 0.0) continue;
      double* row = out + static_cast<size_t>(r) * n;
      for (int s = r; s < n; ++s) row[s] += cr * c[s];
    }
  }
}

double FrobeniusNorm(const std::vector<double>& a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

double OffDiagonalNorm(const std::vector<double>& a, int n) {
  double sum = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int s = r + 1; s < n; ++s) {
      const double v = a[static_cast<size_t>(r) * n + s];
      sum += 2.0 * v * v;
    }
  }
  return std::sqrt(sum);
}

void NormalizeSign(std::span<double> v) {
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace

ContourMatrix::ContourMatrix(int n) : n_(n) {
  if (n < 3) {
    throw ValidationError("contour dimension must be >= 3, got " +
                          std::to_string(n));
  }
}

void ContourMatrix::AddColumn(std::span<const double> radii) {
  ValidateRadii(radii, n_);
  values_.insert(values_.end(), radii.begin(), radii.end());
}

GramAccumulator::GramAccumulator(int n, Normalization normalization,
                                 int threads)
    : n_(n), normalization_(normalization), threads_(ResolveThreads(threads)) {
  if (n < 3) {
    throw ValidationError("contour dimension must be >= 3, got " +
                          std::to_string(n));
  }
  gram_.assign(static_cast<size_t>(n) * n, 0.0);
}

void GramAccumulator::Add(std::span<const double> radii) {
  ValidateRadii(radii, n_);
  double scale = 1.0;
  if (normalization_ == Normalization::kMaxRadius) {
    const double peak = *std::max_element(radii.begin(), radii.end());
    if (peak > 0.0) scale = 1.0 / peak;
  }
  for (double r : radii) pending_.push_back(r * scale);
  ++columns_;
  const size_t window =
      static_cast<size_t>(threads_) * kChunkColumns * static_cast<size_t>(n_);
  if (pending_.size() >= window) Flush();
}

void GramAccumulator::Add(const ContourMatrix& matrix) {
  for (int j = 0; j < matrix.cols(); ++j) Add(matrix.column(j));
}

void GramAccumulator::Flush() {
  if (pending_.empty()) return;
  const size_t cols = pending_.size() / n_;
  const size_t chunks = (cols + kChunkColumns - 1) / kChunkColumns;
  const size_t nn = static_cast<size_t>(n_) * n_;
  std::vector<std::vector<double>> partials(chunks);
  ParallelFor(chunks, threads_, [&](size_t k) {
    partials[k].assign(nn, 0.0);
    const size_t begin = k * kChunkColumns;
    const size_t count = std::min<size_t>(kChunkColumns, cols - begin);
    AccumulateChunk(pending_.data() + begin * n_, count, n_,
                    partials[k].data());
  });
  for (const auto& p : partials) {
    for (size_t i = 0; i < nn; ++i) gram_[i] += p[i];
  }
  pending_.clear();
}

std::vector<double> GramAccumulator::Finish() {
  Flush();
  std::vector<double> full = gram_;
  for (int r = 0; r < n_; ++r) {
    for (int s = r + 1; s < n_; ++s) {
      full[static_cast<size_t>(s) * n_ + r] = full[static_cast<size_t>(r) * n_ + s];
    }
  }
  return full;
}

Spectrum SymmetricEigen(std::vector<double> a, int n) {
  const size_t nn = static_cast<size_t>(n) * n;
  if (n < 1 || a.size() != nn) {
    throw ValidationError("symmetric matrix has wrong size");
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw ValidationError("matrix has non-finite entry");
  }
  std::vector<double> v(nn, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

  auto at = [&](int r, int c) -> double& {
    return a[static_cast<size_t>(r) * n + c];
  };
  const double norm = FrobeniusNorm(a);
  const double target = kJacobiTolerance * norm;
  // Entries this small cannot move the off-diagonal norm above target.
  const double skip = 1e-2 * target / std::max(1, n);

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (OffDiagonalNorm(a, n) <= target) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= skip) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p);
          const double akq = at(k, q);
          const double new_kp = c * akp - s * akq;
          const double new_kq = s * akp + c * akq;
          at(k, p) = new_kp;
          at(p, k) = new_kp;
          at(k, q) = new_kq;
          at(q, k) = new_kq;
        }
        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        double* vp = v.data() + static_cast<size_t>(p) * n;
        double* vq = v.data() + static_cast<size_t>(q) * n;
        for (int k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }

  // v holds eigenvectors as contiguous columns (column-major).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int l, int r) { return at(l, l) > at(r, r); });

  Spectrum out;
  out.n = n;
  out.eigenvalues.resize(n);
  out.vectors.resize(nn);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    out.eigenvalues[k] = at(src, src);
    std::copy_n(v.begin() + static_cast<ptrdiff_t>(src) * n, n,
                out.vectors.begin() + static_cast<ptrdiff_t>(k) * n);
    NormalizeSign(std::span<double>(out.vectors.data() + static_cast<size_t>(k) * n,
                                    static_cast<size_t>(n)));
  }
  return out;
}

Spectrum ComputeSpectrum(GramAccumulator& gram) {
  Spectrum spectrum = SymmetricEigen(gram.Finish(), gram.n());
  spectrum.corpus_size = gram.columns();
  spectrum.normalization = gram.normalization();
  return spectrum;
}

Spectrum ComputeSpectrum(const ContourMatrix& matrix,
                         Normalization normalization, int threads) {
  GramAccumulator gram(matrix.rows(), normalization, threads);
  gram.Add(matrix);
  return ComputeSpectrum(gram);
}

EigenBasis::EigenBasis(int n, int m, std::vector<double> u,
                       std::vector<double> sigma, Normalization normalization,
                       int64_t corpus_size)
    : n_(n),
      m_(m),
      u_(std::move(u)),
      sigma_(std::move(sigma)),
      normalization_(normalization),
      corpus_size_(corpus_size) {
  if (n < 1 || m < 1 || m > n) {
    throw ValidationError("basis rank must satisfy 1 <= m <= n, got n=" +
                          std::to_string(n) + " m=" + std::to_string(m));
  }
  if (u_.size() != static_cast<size_t>(n) * m ||
      sigma_.size() != static_cast<size_t>(m)) {
    throw ValidationError("basis arrays do not match n and m");
  }
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(sigma_[i]) || sigma_[i] <= 0.0 ||
        (i > 0 && sigma_[i] > sigma_[i - 1])) {
      throw ValidationError(
          "singular values must be positive and non-increasing");
    }
  }
  double err = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double dot = 0.0;
      for (int k = 0; k < n; ++k) dot += u_[static_cast<size_t>(i) * n + k] * u_[static_cast<size_t>(j) * n + k];
      if (!std::isfinite(dot)) throw ValidationError("basis has non-finite entry");
      const double d = dot - (i == j ? 1.0 : 0.0);
      err += (i == j ? 1.0 : 2.0) * d * d;
    }
  }
  if (std::sqrt(err) > 1e-9) {
    throw ValidationError("basis columns are not orthonormal");
  }
}

EigenBasis TruncateSpectrum(const Spectrum& spectrum, int m) {
  const int n = spectrum.n;
  if (m < 1 || m > n) {
    throw ValidationError("rank must satisfy 1 <= m <= N=" + std::to_string(n) +
                          ", got " + std::to_string(m));
  }
  if (spectrum.corpus_size > 0 && m > spectrum.corpus_size) {
    throw ValidationError("rank " + std::to_string(m) + " exceeds corpus size " +
                          std::to_string(spectrum.corpus_size));
  }
  const double top = spectrum.eigenvalues.front();
  if (!(top > 0.0) || spectrum.eigenvalues[m - 1] <= kRankTolerance * top) {
    throw ValidationError("requested rank exceeds numerical rank");
  }
  std::vector<double> u(spectrum.vectors.begin(),
                        spectrum.vectors.begin() + static_cast<ptrdiff_t>(m) * n);
  std::vector<double> sigma(m);
  for (int i = 0; i < m; ++i) sigma[i] = std::sqrt(spectrum.eigenvalues[i]);
  return EigenBasis(n, m, std::move(u), std::move(sigma),
                    spectrum.normalization, spectrum.corpus_size);
}

EigenBasis BuildBasis(const ContourMatrix& matrix, int m,
                      Normalization normalization, int threads) {
  if (matrix.cols() < 1) throw ValidationError("contour matrix has no columns");
  return TruncateSpectrum(ComputeSpectrum(matrix, normalization, threads), m);
}

CoeffVector Encode(const EigenBasis& basis, std::span<const double> radii) {
  if (static_cast<int>(radii.size()) != basis.n()) {
    throw ValidationError("radii length " + std::to_string(radii.size()) +
                          " does not match basis N=" + std::to_string(basis.n()));
  }
  CoeffVector c;
  c.values.resize(basis.m());
  for (int j = 0; j < basis.m(); ++j) {
    auto col = basis.column(j);
    double dot = 0.0;
    for (int k = 0; k < basis.n(); ++k) dot += col[k] * radii[k];
    c.values[j] = dot;
  }
  return c;
}

std::vector<double> Decode(const EigenBasis& basis, const CoeffVector& coeffs) {
  if (coeffs.size() != basis.m()) {
    throw ValidationError("coefficient length " +
                          std::to_string(coeffs.size()) +
                          " does not match basis M=" +
                          std::to_string(basis.m()));
  }
  std::vector<double> r(basis.n(), 0.0);
  for (int j = 0; j < basis.m(); ++j) {
    auto col = basis.column(j);
    const double cj = coeffs.values[j];
    for (int k = 0; k < basis.n(); ++k) r[k] += cj * col[k];
  }
  return r;
}

std::vector<double> Project(const EigenBasis& basis,
                            std::span<const double> radii) {
  return Decode(basis, Encode(basis, radii));
}

std::vector<double> ClampRadii(std::vector<double> radii, double floor) {
  for (double& r : radii) r = std::max(r, floor);
  return radii;
}

ReconstructionQuality MeasureReconstruction(const EigenBasis& basis,
                                            const StarContour& contour,
                                            int width, int height) {
  ValidateStarContour(contour);
  std::vector<double> approx = Project(basis, contour.radii);
  double sum = 0.0;
  for (size_t i = 0; i < approx.size(); ++i) {
    const double d = contour.radii[i] - approx[i];
    sum += d * d;
  }
  ReconstructionQuality q;
  q.l2_error = std::sqrt(sum);
  const Mask original = RasterizeContour(contour, width, height);
  const Mask decoded =
      RasterizeContour(contour.center, ClampRadii(std::move(approx), 0.0),
                       width, height);
  q.iou = MaskIou(original, decoded);
  return q;
}

}  // namespace eigencontour
