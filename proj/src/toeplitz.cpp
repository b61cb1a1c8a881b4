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

#include "toepsolve/toeplitz.hpp"

#include <cstdlib>
#include <string>
#include <utility>

#include "fft_backend.hpp"
#include "toepsolve/error.hpp"

namespace toepsolve {

namespace {

void check_offset(int offset, std::size_t n, const char* level) {
  if (static_cast<std::size_t>(std::abs(offset)) >= n) {
    fail(ErrorCode::IndexOutOfRange, std::string(level) + " offset " +
                                         std::to_string(offset) + " outside +/-" +
                                         std::to_string(n - 1));
  }
}

void scale(DenseBlock& data, double factor) {
  for (cplx& v : data.values()) v *= factor;
}

}  // namespace

BlockGenerator1L::BlockGenerator1L(std::size_t n1, std::size_t n0,
                                   std::vector<DenseBlock> column)
    : n1_(n1), n0_(n0), column_(std::move(column)) {
  if (n1_ == 0 || n0_ == 0) fail(ErrorCode::ShapeError, "empty generator level");
  if (column_.size() != circulant_size(n1_)) {
    fail(ErrorCode::ShapeError, "generator column holds " +
                                    std::to_string(column_.size()) + " blocks, expected " +
                                    std::to_string(circulant_size(n1_)));
  }
  for (const auto& b : column_) {
    if (b.rows() != n0_ || b.cols() != n0_) {
      fail(ErrorCode::BlockShapeMismatch,
           "block " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
               " in generator of side " + std::to_string(n0_));
    }
  }
}

const DenseBlock& BlockGenerator1L::at(int offset) const {
  check_offset(offset, n1_, "level-1");
  return column_[circulant_index(offset, n1_)];
}

BlockGenerator1L embed_1l(const std::map<int, DenseBlock>& blocks, std::size_t n1,
                          std::size_t n0) {
  if (n1 == 0) fail(ErrorCode::ShapeError, "n1 must be positive");
  std::vector<DenseBlock> column(circulant_size(n1));
  for (std::size_t idx = 0; idx < column.size(); ++idx) {
    const int offset = circulant_offset(idx, n1);
    auto it = blocks.find(offset);
    if (it == blocks.end()) {
      fail(ErrorCode::MissingOffset, "no block for offset " + std::to_string(offset));
    }
    if (it->second.rows() != n0 || it->second.cols() != n0) {
      fail(ErrorCode::BlockShapeMismatch,
           "block at offset " + std::to_string(offset) + " is not " +
               std::to_string(n0) + "x" + std::to_string(n0));
    }
    column[idx] = it->second;
  }
  return BlockGenerator1L(n1, n0, std::move(column));
}

BlockGenerator2L::BlockGenerator2L(std::size_t n2, std::vector<BlockGenerator1L> columns)
    : n2_(n2), columns_(std::move(columns)) {
  if (n2_ == 0) fail(ErrorCode::ShapeError, "n2 must be positive");
  if (columns_.size() != circulant_size(n2_)) {
    fail(ErrorCode::ShapeError, "level-2 column holds " + std::to_string(columns_.size()) +
                                    " entries, expected " +
                                    std::to_string(circulant_size(n2_)));
  }
  n1_ = columns_.front().n1();
  n0_ = columns_.front().n0();
  for (const auto& c : columns_) {
    if (c.n1() != n1_ || c.n0() != n0_) {
      fail(ErrorCode::BlockShapeMismatch, "level-1 generators disagree on (n1, n0)");
    }
  }
}

BlockGenerator2L BlockGenerator2L::from_offsets(
    std::size_t n2, std::size_t n1, std::size_t n0,
    const std::function<DenseBlock(int, int)>& block) {
  if (n2 == 0 || n1 == 0 || n0 == 0) fail(ErrorCode::ShapeError, "zero level size");
  std::vector<BlockGenerator1L> columns;
  columns.reserve(circulant_size(n2));
  for (std::size_t c2 = 0; c2 < circulant_size(n2); ++c2) {
    std::vector<DenseBlock> column;
    column.reserve(circulant_size(n1));
    for (std::size_t c1 = 0; c1 < circulant_size(n1); ++c1) {
      column.push_back(block(circulant_offset(c2, n2), circulant_offset(c1, n1)));
    }
    columns.emplace_back(n1, n0, std::move(column));
  }
  return BlockGenerator2L(n2, std::move(columns));
}

const BlockGenerator1L& BlockGenerator2L::level(int d2) const {
  check_offset(d2, n2_, "level-2");
  return columns_[circulant_index(d2, n2_)];
}

std::size_t BlockGenerator2L::scalar_count() const noexcept {
  return circulant_size(n2_) * circulant_size(n1_) * n0_ * n0_;
}

BlockGenerator2L BlockGenerator2L::transposed() const {
  return from_offsets(n2_, n1_, n0_,
                      [this](int d2, int d1) { return at(-d2, -d1).transposed(); });
}

bool BlockGenerator2L::is_transpose_symmetric() const {
  const int m2 = static_cast<int>(n2_);
  const int m1 = static_cast<int>(n1_);
  for (int d2 = -(m2 - 1); d2 < m2; ++d2)
    for (int d1 = -(m1 - 1); d1 < m1; ++d1)
      if (!(at(-d2, -d1) == at(d2, d1).transposed())) return false;
  return true;
}

void block_fft_1l(DenseBlock& data, std::size_t n0, FftDirection direction) {
  if (n0 == 0 || data.rows() % n0 != 0) {
    fail(ErrorCode::ShapeError, "rows " + std::to_string(data.rows()) +
                                    " not divisible by block side " + std::to_string(n0));
  }
  const std::size_t length = data.rows() / n0;
  const std::size_t width = data.cols();
  const bool inverse = direction == FftDirection::Inverse;
  detail::execute({length, n0 * width, n0 * width, 1, 0, inverse}, data.data());
  if (inverse && length > 1) scale(data, 1.0 / static_cast<double>(length));
}

void block_fft_2l(DenseBlock& data, std::size_t n2, std::size_t n1, std::size_t n0,
                  FftDirection direction) {
  if (n2 == 0 || n1 == 0 || n0 == 0 || data.rows() != n2 * n1 * n0) {
    fail(ErrorCode::ShapeError, "rows " + std::to_string(data.rows()) + " != " +
                                    std::to_string(n2) + "*" + std::to_string(n1) + "*" +
                                    std::to_string(n0));
  }
  const std::size_t width = data.cols();
  const bool inverse = direction == FftDirection::Inverse;
  const std::size_t segment = n1 * n0 * width;
  // Level 1 inside every level-2 segment, then level 2 across segments.
  detail::execute({n1, n0 * width, n0 * width, n2, segment, inverse}, data.data());
  detail::execute({n2, segment, segment, 1, 0, inverse}, data.data());
  if (inverse && n1 * n2 > 1) scale(data, 1.0 / static_cast<double>(n1 * n2));
}

PaddedVector pad_rhs(const DenseBlock& u, std::size_t n2, std::size_t n1, std::size_t n0) {
  if (u.rows() != n2 * n1 * n0 || u.cols() == 0) {
    fail(ErrorCode::ShapeError, "pad_rhs: expected " + std::to_string(n2 * n1 * n0) +
                                    " rows, got " + std::to_string(u.rows()));
  }
  const std::size_t l1 = circulant_size(n1);
  PaddedVector out{n2, n1, n0, DenseBlock(circulant_size(n2) * l1 * n0, u.cols())};
  const std::size_t seg = n1 * n0 * u.cols();
  for (std::size_t b = 0; b < n2; ++b) {
    std::copy_n(u.data() + b * seg, seg, out.payload.data() + b * l1 * n0 * u.cols());
  }
  return out;
}

DenseBlock extract_result(const PaddedVector& v) {
  const std::size_t l1 = circulant_size(v.n1);
  if (v.n0 == 0 || v.payload.rows() != circulant_size(v.n2) * l1 * v.n0) {
    fail(ErrorCode::ShapeError, "extract_result: payload is not circulant-extended");
  }
  const std::size_t width = v.payload.cols();
  DenseBlock out(v.n2 * v.n1 * v.n0, width);
  const std::size_t seg = v.n1 * v.n0 * width;
  for (std::size_t b = 0; b < v.n2; ++b) {
    std::copy_n(v.payload.data() + b * l1 * v.n0 * width, seg, out.data() + b * seg);
  }
  return out;
}

SpectralOperator::SpectralOperator(std::size_t n2, std::size_t n1, std::size_t n0,
                                   DenseBlock transformed)
    : n2_(n2), n1_(n1), n0_(n0), transformed_(std::move(transformed)) {
  if (transformed_.rows() != block_count() * n0_ || transformed_.cols() != n0_) {
    fail(ErrorCode::ShapeError, "spectral blocks have the wrong shape");
  }
}

DenseBlock SpectralOperator::diag_block(std::size_t i) const {
  if (i >= block_count()) fail(ErrorCode::IndexOutOfRange, "diag block index");
  return transformed_.row_range(i * n0_, n0_);
}

SpectralOperator precompute_spectral(const BlockGenerator2L& gen) {
  const std::size_t n0 = gen.n0();
  const std::size_t l1 = circulant_size(gen.n1());
  const std::size_t l2 = circulant_size(gen.n2());
  DenseBlock stacked(l2 * l1 * n0, n0);
  for (std::size_t c2 = 0; c2 < l2; ++c2) {
    const auto& column = gen.columns()[c2].column();
    for (std::size_t c1 = 0; c1 < l1; ++c1) {
      stacked.set_rows((c2 * l1 + c1) * n0, column[c1]);
    }
  }
  block_fft_2l(stacked, l2, l1, n0, FftDirection::Forward);
  return SpectralOperator(gen.n2(), gen.n1(), n0, std::move(stacked));
}

DenseBlock matvec(const SpectralOperator& op, const DenseBlock& u) {
  const std::size_t n0 = op.n0();
  const std::size_t l1 = circulant_size(op.n1());
  const std::size_t l2 = circulant_size(op.n2());
  PaddedVector work = pad_rhs(u, op.n2(), op.n1(), n0);
  block_fft_2l(work.payload, l2, l1, n0, FftDirection::Forward);

  const std::size_t width = u.cols();
  const std::size_t panel = n0 * width;
  const auto blocks = static_cast<std::ptrdiff_t>(op.block_count());
#pragma omp parallel
  {
    std::vector<cplx> scratch(panel);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < blocks; ++i) {
      cplx* segment = work.payload.data() + static_cast<std::size_t>(i) * panel;
      std::fill(scratch.begin(), scratch.end(), cplx{});
      gemm_accumulate(n0, width, n0, op.diag_block_data(static_cast<std::size_t>(i)),
                      segment, scratch.data());
      std::copy(scratch.begin(), scratch.end(), segment);
    }
  }

  block_fft_2l(work.payload, l2, l1, n0, FftDirection::Inverse);
  return extract_result(work);
}

DenseBlock assemble_dense(const BlockGenerator2L& gen) {
  const std::size_t n2 = gen.n2();
  const std::size_t n1 = gen.n1();
  const std::size_t n0 = gen.n0();
  DenseBlock full(n2 * n1 * n0, n2 * n1 * n0);
  for (std::size_t i = 0; i < n2; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const int d2 = static_cast<int>(i) - static_cast<int>(j);
      for (std::size_t p = 0; p < n1; ++p) {
        for (std::size_t q = 0; q < n1; ++q) {
          const int d1 = static_cast<int>(p) - static_cast<int>(q);
          full.set_block((i * n1 + p) * n0, (j * n1 + q) * n0, gen.at(d2, d1));
        }
      }
    }
  }
  return full;
}

}  // namespace toepsolve
