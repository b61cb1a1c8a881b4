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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace toepsolve {

using cplx = std::complex<double>;

/// Dense complex matrix stored row-major. Entry (i, j) lives at i * cols + j;
/// serialization and the FFT passes both rely on this order.
class DenseBlock {
 public:
  DenseBlock() = default;
  DenseBlock(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  DenseBlock(std::size_t rows, std::size_t cols, std::vector<cplx> data);
  DenseBlock(std::size_t rows, std::size_t cols,
             std::initializer_list<cplx> row_major);

  static DenseBlock zeros(std::size_t rows, std::size_t cols) {
    return DenseBlock(rows, cols);
  }
  static DenseBlock identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  cplx* data() noexcept { return data_.data(); }
  const cplx* data() const noexcept { return data_.data(); }
  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  /// Copy of rows [first, first + count).
  DenseBlock row_range(std::size_t first, std::size_t count) const;
  /// Copy of columns [first, first + count).
  DenseBlock col_range(std::size_t first, std::size_t count) const;
  void set_rows(std::size_t first, const DenseBlock& src);
  void set_cols(std::size_t first, const DenseBlock& src);
  void set_block(std::size_t row, std::size_t col, const DenseBlock& src);
  DenseBlock block(std::size_t row, std::size_t col, std::size_t rows,
                   std::size_t cols) const;

  DenseBlock transposed() const;
  DenseBlock adjoint() const;
  DenseBlock conjugated() const;

  bool all_finite() const noexcept;

  DenseBlock& operator+=(const DenseBlock& other);
  DenseBlock& operator-=(const DenseBlock& other);
  DenseBlock& operator*=(cplx scale);

  friend bool operator==(const DenseBlock&, const DenseBlock&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

DenseBlock operator+(DenseBlock a, const DenseBlock& b);
DenseBlock operator-(DenseBlock a, const DenseBlock& b);
DenseBlock operator*(cplx s, DenseBlock a);

/// Compact PA = LU with partial pivoting. `pivots[k]` is the row swapped
/// with row k at elimination step k.
struct LUFactors {
  DenseBlock lu;
  std::vector<std::size_t> pivots;

  std::size_t side() const noexcept { return lu.rows(); }
};

/// Pivots whose magnitude falls below this are treated as exact zeros.
inline constexpr double kTinyPivot = 1e-300;

LUFactors lu_factor(const DenseBlock& a);
DenseBlock lu_solve(const LUFactors& f, const DenseBlock& rhs);
/// Solves A^H X = RHS with the factors of A.
DenseBlock lu_solve_adjoint(const LUFactors& f, const DenseBlock& rhs);
/// In-place variant over a row-major panel of `cols` columns starting at
/// `rhs`; used to apply one factorization to many segments of a vector.
void lu_solve_inplace(const LUFactors& f, cplx* rhs, std::size_t cols);
void lu_solve_adjoint_inplace(const LUFactors& f, cplx* rhs, std::size_t cols);

/// accumulate + sign * a * b. An empty `accumulate` means zero.
DenseBlock matmul(const DenseBlock& a, const DenseBlock& b,
                  const DenseBlock& accumulate = {}, int sign = +1);
/// c += sign * a * b for raw row-major panels (a: m x k, b: k x n, c: m x n).
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k,
                     const cplx* a, const cplx* b, cplx* c, int sign = +1);

struct Norms {
  double frobenius = 0.0;
  double max_abs = 0.0;
};
Norms norms(const DenseBlock& v);
double frobenius(const DenseBlock& v);
double frobenius(std::span<const cplx> v);
/// Frobenius inner product sum(conj(a) * b).
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
/// y += alpha * x
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);

/// ||a - b||_F / ||b||_F (or the absolute difference when b is zero).
double relative_difference(const DenseBlock& a, const DenseBlock& b);

/// Orthonormal basis of the column space via modified Gram-Schmidt with one
/// reorthogonalization pass. Columns that vanish are replaced by zeros.
DenseBlock orthonormal_columns(const DenseBlock& a);

/// Singular values (descending) by one-sided Jacobi rotations.
std::vector<double> singular_values(const DenseBlock& a);

/// Worker threads used by the parallel kernels. Defaults to the
/// TOEPSOLVE_THREADS environment variable, else all cores.
int thread_count() noexcept;
void set_thread_count(int threads) noexcept;

}  // namespace toepsolve
