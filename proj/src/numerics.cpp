// Copyright 2026 The toepsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "toepsolve/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "toepsolve/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace toepsolve {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::SingularSchurComplement: return "SingularSchurComplement";
    case ErrorCode::MissingOffset: return "MissingOffset";
    case ErrorCode::BlockShapeMismatch: return "BlockShapeMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

namespace {

// Interleaved (re, im) kernels. std::complex multiplication carries NaN
// recovery branches that block vectorization, so hot loops spell it out.
inline void axpy_raw(double ar, double ai, const double* x, double* y,
                     std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double xr = x[2 * j];
    const double xi = x[2 * j + 1];
    y[2 * j] += ar * xr - ai * xi;
    y[2 * j + 1] += ar * xi + ai * xr;
  }
}

inline const double* as_real(const cplx* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* as_real(cplx* p) { return reinterpret_cast<double*>(p); }

int initial_thread_count() {
  if (const char* env = std::getenv("TOEPSOLVE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{[] {
    const int n = initial_thread_count();
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
    return n;
  }()};
  return threads;
}

}  // namespace

int thread_count() noexcept { return thread_setting().load(); }

void set_thread_count(int threads) noexcept {
  if (threads < 1) threads = initial_thread_count();
  thread_setting().store(threads);
#ifdef _OPENMP
  omp_set_num_threads(threads);
#endif
}

DenseBlock::DenseBlock(std::size_t rows, std::size_t cols,
                       std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorCode::DimensionMismatch,
         "entries length " + std::to_string(data_.size()) + " != " +
             std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseBlock::DenseBlock(std::size_t rows, std::size_t cols,
                       std::initializer_list<cplx> row_major)
    : DenseBlock(rows, cols, std::vector<cplx>(row_major)) {}

DenseBlock DenseBlock::identity(std::size_t n) {
  DenseBlock id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

DenseBlock DenseBlock::row_range(std::size_t first, std::size_t count) const {
  if (first + count > rows_) fail(ErrorCode::ShapeError, "row range out of bounds");
  DenseBlock out(count, cols_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
              count * cols_, out.data_.begin());
  return out;
}

DenseBlock DenseBlock::col_range(std::size_t first, std::size_t count) const {
  return block(0, first, rows_, count);
}

void DenseBlock::set_rows(std::size_t first, const DenseBlock& src) {
  if (src.cols_ != cols_ || first + src.rows_ > rows_) {
    fail(ErrorCode::ShapeError, "set_rows shape mismatch");
  }
  std::copy(src.data_.begin(), src.data_.end(),
            data_.begin() + static_cast<std::ptrdiff_t>(first * cols_));
}

void DenseBlock::set_cols(std::size_t first, const DenseBlock& src) {
  if (src.rows_ != rows_) fail(ErrorCode::ShapeError, "set_cols shape mismatch");
  set_block(0, first, src);
}

void DenseBlock::set_block(std::size_t row, std::size_t col,
                           const DenseBlock& src) {
  if (row + src.rows_ > rows_ || col + src.cols_ > cols_) {
    fail(ErrorCode::ShapeError, "set_block out of bounds");
  }
  for (std::size_t i = 0; i < src.rows_; ++i) {
    std::copy_n(src.data_.begin() + static_cast<std::ptrdiff_t>(i * src.cols_),
                src.cols_,
                data_.begin() + static_cast<std::ptrdiff_t>((row + i) * cols_ + col));
  }
}

DenseBlock DenseBlock::block(std::size_t row, std::size_t col, std::size_t rows,
                             std::size_t cols) const {
  if (row + rows > rows_ || col + cols > cols_) {
    fail(ErrorCode::ShapeError, "block out of bounds");
  }
  DenseBlock out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>((row + i) * cols_ + col),
                cols, out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols));
  }
  return out;
}

DenseBlock DenseBlock::transposed() const {
  DenseBlock out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

DenseBlock DenseBlock::adjoint() const {
  DenseBlock out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

DenseBlock DenseBlock::conjugated() const {
  DenseBlock out = *this;
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

bool DenseBlock::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

DenseBlock& DenseBlock::operator+=(const DenseBlock& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    fail(ErrorCode::DimensionMismatch, "operator+= shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseBlock& DenseBlock::operator-=(const DenseBlock& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    fail(ErrorCode::DimensionMismatch, "operator-= shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseBlock& DenseBlock::operator*=(cplx scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

DenseBlock operator+(DenseBlock a, const DenseBlock& b) { return a += b; }
DenseBlock operator-(DenseBlock a, const DenseBlock& b) { return a -= b; }
DenseBlock operator*(cplx s, DenseBlock a) { return a *= s; }

LUFactors lu_factor(const DenseBlock& a) {
  if (!a.is_square()) {
    fail(ErrorCode::DimensionMismatch, "lu_factor needs a square matrix, got " +
                                           std::to_string(a.rows()) + "x" +
                                           std::to_string(a.cols()));
  }
  if (!a.all_finite()) fail(ErrorCode::InvalidArgument, "lu_factor: non-finite entry");

  const std::size_t n = a.rows();
  LUFactors f{a, std::vector<std::size_t>(n)};
  DenseBlock& lu = f.lu;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best >= kTinyPivot)) {
      fail(ErrorCode::SingularMatrix,
           "zero pivot at column " + std::to_string(k) + " of " + std::to_string(n));
    }
    f.pivots[k] = p;
    if (p != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(p).begin());
    }

    const cplx inv_pivot = 1.0 / lu(k, k);
    const std::size_t tail = n - k - 1;
    const double* pivot_row = as_real(lu.data() + k * n + k + 1);
#pragma omp parallel for schedule(static) if (tail > 64)
    for (std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(k + 1);
         ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const cplx l = lu(i, k) * inv_pivot;
      lu(i, k) = l;
      axpy_raw(-l.real(), -l.imag(), pivot_row, as_real(lu.data() + i * n + k + 1),
               tail);
    }
  }
  return f;
}

void lu_solve_inplace(const LUFactors& f, cplx* rhs, std::size_t cols) {
  const std::size_t n = f.side();
  const DenseBlock& lu = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    if (f.pivots[k] != k) {
      std::swap_ranges(rhs + k * cols, rhs + (k + 1) * cols, rhs + f.pivots[k] * cols);
    }
  }
  // L y = P b, unit diagonal
  for (std::size_t i = 1; i < n; ++i) {
    double* yi = as_real(rhs + i * cols);
    for (std::size_t j = 0; j < i; ++j) {
      const cplx l = lu(i, j);
      if (l == cplx{}) continue;
      axpy_raw(-l.real(), -l.imag(), as_real(rhs + j * cols), yi, cols);
    }
  }
  // U x = y
  for (std::size_t ii = n; ii-- > 0;) {
    double* xi = as_real(rhs + ii * cols);
    for (std::size_t j = ii + 1; j < n; ++j) {
      const cplx u = lu(ii, j);
      if (u == cplx{}) continue;
      axpy_raw(-u.real(), -u.imag(), as_real(rhs + j * cols), xi, cols);
    }
    const cplx inv = 1.0 / lu(ii, ii);
    for (std::size_t c = 0; c < cols; ++c) rhs[ii * cols + c] *= inv;
  }
}

void lu_solve_adjoint_inplace(const LUFactors& f, cplx* rhs, std::size_t cols) {
  // A = P^T L U, so A^H x = b  <=>  U^H L^H (P x) = b.
  const std::size_t n = f.side();
  const DenseBlock& lu = f.lu;
  for (std::size_t i = 0; i < n; ++i) {
    double* wi = as_real(rhs + i * cols);
    for (std::size_t j = 0; j < i; ++j) {
      const cplx u = std::conj(lu(j, i));
      if (u == cplx{}) continue;
      axpy_raw(-u.real(), -u.imag(), as_real(rhs + j * cols), wi, cols);
    }
    const cplx inv = 1.0 / std::conj(lu(i, i));
    for (std::size_t c = 0; c < cols; ++c) rhs[i * cols + c] *= inv;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double* zi = as_real(rhs + ii * cols);
    for (std::size_t j = ii + 1; j < n; ++j) {
      const cplx l = std::conj(lu(j, ii));
      if (l == cplx{}) continue;
      axpy_raw(-l.real(), -l.imag(), as_real(rhs + j * cols), zi, cols);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    if (f.pivots[k] != k) {
      std::swap_ranges(rhs + k * cols, rhs + (k + 1) * cols, rhs + f.pivots[k] * cols);
    }
  }
}

DenseBlock lu_solve(const LUFactors& f, const DenseBlock& rhs) {
  if (rhs.rows() != f.side()) {
    fail(ErrorCode::DimensionMismatch, "lu_solve: factor side " +
                                           std::to_string(f.side()) + " vs rhs rows " +
                                           std::to_string(rhs.rows()));
  }
  DenseBlock x = rhs;
  lu_solve_inplace(f, x.data(), x.cols());
  return x;
}

DenseBlock lu_solve_adjoint(const LUFactors& f, const DenseBlock& rhs) {
  if (rhs.rows() != f.side()) {
    fail(ErrorCode::DimensionMismatch, "lu_solve_adjoint: row mismatch");
  }
  DenseBlock x = rhs;
  lu_solve_adjoint_inplace(f, x.data(), x.cols());
  return x;
}

void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k, const cplx* a,
                     const cplx* b, cplx* c, int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0;
#pragma omp parallel for schedule(static) if (m * n * k > (1u << 18))
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* ci = as_real(c + i * n);
    for (std::size_t p = 0; p < k; ++p) {
      const cplx aip = a[i * k + p];
      if (aip == cplx{}) continue;
      axpy_raw(s * aip.real(), s * aip.imag(), as_real(b + p * n), ci, n);
    }
  }
}

DenseBlock matmul(const DenseBlock& a, const DenseBlock& b,
                  const DenseBlock& accumulate, int sign) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::DimensionMismatch,
         "matmul inner dimensions " + std::to_string(a.cols()) + " vs " +
             std::to_string(b.rows()));
  }
  DenseBlock c;
  if (accumulate.empty()) {
    c = DenseBlock(a.rows(), b.cols());
  } else {
    if (accumulate.rows() != a.rows() || accumulate.cols() != b.cols()) {
      fail(ErrorCode::DimensionMismatch, "matmul accumulate shape mismatch");
    }
    c = accumulate;
  }
  gemm_accumulate(a.rows(), b.cols(), a.cols(), a.data(), b.data(), c.data(), sign);
  return c;
}

Norms norms(const DenseBlock& v) {
  Norms out;
  double sum = 0.0;
  for (const cplx& x : v.values()) {
    const double m = std::norm(x);
    sum += m;
    out.max_abs = std::max(out.max_abs, std::abs(x));
  }
  out.frobenius = std::sqrt(sum);
  return out;
}

double frobenius(std::span<const cplx> v) {
  double sum = 0.0;
  for (const cplx& x : v) sum += std::norm(x);
  return std::sqrt(sum);
}

double frobenius(const DenseBlock& v) { return frobenius(v.values()); }

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "inner: length mismatch");
  double re = 0.0;
  double im = 0.0;
  const double* x = as_real(a.data());
  const double* y = as_real(b.data());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double xr = x[2 * j], xi = x[2 * j + 1];
    const double yr = y[2 * j], yi = y[2 * j + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "axpy: length mismatch");
  axpy_raw(alpha.real(), alpha.imag(), as_real(x.data()), as_real(y.data()), x.size());
}

double relative_difference(const DenseBlock& a, const DenseBlock& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, "relative_difference shape mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.data()[i] - b.data()[i]);
    den += std::norm(b.data()[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

namespace {

std::vector<std::vector<cplx>> columns_of(const DenseBlock& a) {
  std::vector<std::vector<cplx>> cols(a.cols(), std::vector<cplx>(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) cols[j][i] = a(i, j);
  return cols;
}

}  // namespace

DenseBlock orthonormal_columns(const DenseBlock& a) {
  auto cols = columns_of(a);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double original = frobenius(cols[j]);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const cplx h = inner(cols[i], cols[j]);
        axpy(-h, cols[i], cols[j]);
      }
    }
    const double nrm = frobenius(cols[j]);
    if (nrm <= 1e-13 * std::max(original, 1e-300)) {
      std::fill(cols[j].begin(), cols[j].end(), cplx{});
      continue;
    }
    for (auto& v : cols[j]) v /= nrm;
  }
  DenseBlock q(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) q(i, j) = cols[j][i];
  return q;
}

std::vector<double> singular_values(const DenseBlock& a) {
  // Rotate the columns of A (or A^H when wide) until mutually orthogonal;
  // the column norms are then the singular values.
  auto cols = columns_of(a.rows() >= a.cols() ? a : a.adjoint());
  const std::size_t n = cols.size();
  constexpr double eps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = std::real(inner(cols[p], cols[p]));
        const double beta = std::real(inner(cols[q], cols[q]));
        const cplx gamma = inner(cols[p], cols[q]);
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto& ap = cols[p];
        auto& aq = cols[q];
        for (std::size_t i = 0; i < ap.size(); ++i) {
          const cplx x = ap[i];
          const cplx y = phase * aq[i];
          ap[i] = c * x - s * y;
          aq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = frobenius(cols[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace toepsolve
