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

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "toepsolve/numerics.hpp"

namespace toepsolve {

/// Length of the circulant embedding of an n-block Toeplitz level.
constexpr std::size_t circulant_size(std::size_t n) noexcept { return 2 * n - 1; }

/// Slot of block offset `offset` in circulant order
/// [0, 1, ..., n-1, -(n-1), ..., -1].
constexpr std::size_t circulant_index(int offset, std::size_t n) noexcept {
  return offset >= 0 ? static_cast<std::size_t>(offset)
                     : static_cast<std::size_t>(static_cast<long>(2 * n - 1) + offset);
}

/// Inverse of circulant_index.
constexpr int circulant_offset(std::size_t index, std::size_t n) noexcept {
  return index < n ? static_cast<int>(index)
                   : static_cast<int>(index) - static_cast<int>(2 * n - 1);
}

/// Unique blocks R_{-(n1-1)} ... R_{n1-1} of a one-level block-Toeplitz
/// matrix, kept in circulant order.
class BlockGenerator1L {
 public:
  BlockGenerator1L() = default;
  BlockGenerator1L(std::size_t n1, std::size_t n0, std::vector<DenseBlock> column);

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n0() const noexcept { return n0_; }
  const std::vector<DenseBlock>& column() const noexcept { return column_; }
  /// Block R_offset for |offset| < n1.
  const DenseBlock& at(int offset) const;

  friend bool operator==(const BlockGenerator1L&, const BlockGenerator1L&) = default;

 private:
  std::size_t n1_ = 0;
  std::size_t n0_ = 0;
  std::vector<DenseBlock> column_;
};

BlockGenerator1L embed_1l(const std::map<int, DenseBlock>& blocks, std::size_t n1,
                          std::size_t n0);

/// Unique blocks of a two-level block-Toeplitz matrix. Level 2 (n2 blocks)
/// is the outer Toeplitz index, level 1 (n1 blocks) the inner one, and every
/// level-0 block is an unstructured n0 x n0 matrix.
class BlockGenerator2L {
 public:
  BlockGenerator2L() = default;
  BlockGenerator2L(std::size_t n2, std::vector<BlockGenerator1L> columns);

  /// Builds a generator by evaluating `block(d2, d1)` for every offset pair.
  static BlockGenerator2L from_offsets(
      std::size_t n2, std::size_t n1, std::size_t n0,
      const std::function<DenseBlock(int d2, int d1)>& block);

  std::size_t n2() const noexcept { return n2_; }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n0() const noexcept { return n0_; }
  std::size_t dimension() const noexcept { return n2_ * n1_ * n0_; }
  const std::vector<BlockGenerator1L>& columns() const noexcept { return columns_; }
  const BlockGenerator1L& level(int d2) const;
  const DenseBlock& at(int d2, int d1) const { return level(d2).at(d1); }

  /// (2 n2 - 1)(2 n1 - 1) n0^2
  std::size_t scalar_count() const noexcept;

  /// Generator of the transposed matrix: R'_{d2,d1} = R_{-d2,-d1}^T.
  BlockGenerator2L transposed() const;
  /// True when R_{-d2,-d1} == R_{d2,d1}^T for every offset (bitwise).
  bool is_transpose_symmetric() const;

  friend bool operator==(const BlockGenerator2L&, const BlockGenerator2L&) = default;

 private:
  std::size_t n2_ = 0;
  std::size_t n1_ = 0;
  std::size_t n0_ = 0;
  std::vector<BlockGenerator1L> columns_;
};

enum class FftDirection { Forward, Inverse };

/// For every residue class r mod n0, replaces rows r, r + n0, ... of each
/// column with their DFT. Forward is unnormalized; inverse scales by 1/length.
void block_fft_1l(DenseBlock& data, std::size_t n0, FftDirection direction);

/// Applies F_{n2} (x) F_{n1} (x) I_{n0} to each column: length-n1 transforms
/// inside every level-2 segment, then length-n2 transforms across segments.
void block_fft_2l(DenseBlock& data, std::size_t n2, std::size_t n1, std::size_t n0,
                  FftDirection direction);

/// Zero-padded operand of the circulant product. Each of the n2 segments of
/// length n1*n0 is followed by (n1-1)*n0 scratch rows, then the trailing
/// (n2-1)(2n1-1)n0 rows are scratch as well.
struct PaddedVector {
  std::size_t n2 = 0;
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  DenseBlock payload;
};

PaddedVector pad_rhs(const DenseBlock& u, std::size_t n2, std::size_t n1, std::size_t n0);
DenseBlock extract_result(const PaddedVector& v);

/// Block-diagonal Fourier representation of the circulant embedding: one
/// n0 x n0 block per point of the (2n2-1) x (2n1-1) frequency grid.
class SpectralOperator {
 public:
  SpectralOperator() = default;
  SpectralOperator(std::size_t n2, std::size_t n1, std::size_t n0, DenseBlock transformed);

  std::size_t n2() const noexcept { return n2_; }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n0() const noexcept { return n0_; }
  std::size_t dimension() const noexcept { return n2_ * n1_ * n0_; }
  std::size_t block_count() const noexcept {
    return circulant_size(n2_) * circulant_size(n1_);
  }
  DenseBlock diag_block(std::size_t i) const;
  const cplx* diag_block_data(std::size_t i) const {
    return transformed_.data() + i * n0_ * n0_;
  }

 private:
  std::size_t n2_ = 0;
  std::size_t n1_ = 0;
  std::size_t n0_ = 0;
  DenseBlock transformed_;  // stacked diagonal blocks, (block_count * n0) x n0
};

SpectralOperator precompute_spectral(const BlockGenerator2L& gen);

/// T u for any number of columns in u.
DenseBlock matvec(const SpectralOperator& op, const DenseBlock& u);

/// Dense realization of the two-level matrix; test and oracle use only.
DenseBlock assemble_dense(const BlockGenerator2L& gen);

}  // namespace toepsolve
