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

#include <string>

#include "toepsolve/error.hpp"
#include "toepsolve/solvers.hpp"

namespace toepsolve {

namespace {

LUFactors factor_or(const DenseBlock& a, ErrorCode code, const std::string& what) {
  try {
    return lu_factor(a);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix) throw;
    fail(code, what + " is singular; use the dense or iterative solver instead");
  }
}

}  // namespace

DenseBlock assemble_level1_block(const BlockGenerator2L& gen, int d2) {
  const std::size_t n1 = gen.n1();
  const std::size_t n0 = gen.n0();
  DenseBlock out(n1 * n0, n1 * n0);
  for (std::size_t p = 0; p < n1; ++p)
    for (std::size_t q = 0; q < n1; ++q)
      out.set_block(p * n0, q * n0, gen.at(d2, static_cast<int>(p) - static_cast<int>(q)));
  return out;
}

std::vector<DenseBlock> assemble_level1(const BlockGenerator2L& gen) {
  const int n2 = static_cast<int>(gen.n2());
  std::vector<DenseBlock> blocks;
  blocks.reserve(circulant_size(gen.n2()));
  for (int d2 = -(n2 - 1); d2 <= n2 - 1; ++d2) blocks.push_back(assemble_level1_block(gen, d2));
  return blocks;
}

DenseBlock rybicki_solve(const std::vector<DenseBlock>& blocks, const DenseBlock& y,
                         const RybickiObserver& observer) {
  if (blocks.empty() || blocks.size() % 2 == 0) {
    fail(ErrorCode::ShapeError, "need an odd number 2N-1 of Toeplitz blocks");
  }
  const std::size_t n = (blocks.size() + 1) / 2;
  const std::size_t s = blocks.front().rows();
  for (const auto& b : blocks) {
    if (b.rows() != s || b.cols() != s) fail(ErrorCode::BlockShapeMismatch, "Toeplitz blocks must share one square shape");
  }
  if (y.rows() != n * s) {
    fail(ErrorCode::DimensionMismatch, "right-hand side has " + std::to_string(y.rows()) +
                                           " rows, system has " + std::to_string(n * s));
  }
  const auto r = [&](long k) -> const DenseBlock& { return blocks[k + static_cast<long>(n) - 1]; };
  const auto y_block = [&](std::size_t i) { return y.row_range((i - 1) * s, s); };

  // Index 0 of x, g, h is unused so the code follows the 1-based recursion.
  std::vector<DenseBlock> x(2), g(2), h(2);
  const LUFactors f0 = factor_or(r(0), ErrorCode::SingularBlock, "diagonal block R_0");
  x[1] = lu_solve(f0, y_block(1));
  if (n > 1) {
    g[1] = lu_solve(f0, r(-1));
    h[1] = lu_solve(f0, r(1));
  }
  const auto report = [&](std::size_t m) {
    if (observer) observer(m, std::vector<DenseBlock>(x.begin() + 1, x.end()));
  };
  report(1);

  for (std::size_t m = 1; m < n; ++m) {
    const long m1 = static_cast<long>(m) + 1;
    DenseBlock den_xh = -1.0 * r(0);
    DenseBlock den_g = -1.0 * r(0);
    DenseBlock num_x = -1.0 * y_block(m + 1);
    for (std::size_t j = 1; j <= m; ++j) {
      const long lj = static_cast<long>(j);
      den_xh = matmul(r(m1 - lj), g[m + 1 - j], den_xh);
      den_g = matmul(r(lj - m1), h[m + 1 - j], den_g);
      num_x = matmul(r(m1 - lj), x[j], num_x);
    }
    const std::string step = " at step " + std::to_string(m);
    const LUFactors f_xh = factor_or(den_xh, ErrorCode::SingularDenominator, "denominator" + step);

    DenseBlock x_new = lu_solve(f_xh, num_x);
    for (std::size_t j = 1; j <= m; ++j) x[j] = matmul(g[m + 1 - j], x_new, x[j], -1);
    x.push_back(std::move(x_new));
    report(m + 1);
    if (m + 1 == n) break;

    const LUFactors f_g = factor_or(den_g, ErrorCode::SingularDenominator, "denominator" + step);
    DenseBlock num_g = -1.0 * r(-m1);
    DenseBlock num_h = -1.0 * r(m1);
    for (std::size_t j = 1; j <= m; ++j) {
      const long lj = static_cast<long>(j);
      num_g = matmul(r(lj - m1), g[j], num_g);
      num_h = matmul(r(m1 - lj), h[j], num_h);
    }
    DenseBlock g_new = lu_solve(f_g, num_g);
    DenseBlock h_new = lu_solve(f_xh, num_h);
    // Both updates read the previous generation.
    const std::vector<DenseBlock> g_old = g;
    const std::vector<DenseBlock> h_old = h;
    for (std::size_t j = 1; j <= m; ++j) {
      g[j] = matmul(h_old[m + 1 - j], g_new, g_old[j], -1);
      h[j] = matmul(g_old[m + 1 - j], h_new, h_old[j], -1);
    }
    g.push_back(std::move(g_new));
    h.push_back(std::move(h_new));
  }

  DenseBlock out(n * s, y.cols());
  for (std::size_t i = 1; i <= n; ++i) out.set_rows((i - 1) * s, x[i]);
  return out;
}

}  // namespace toepsolve
