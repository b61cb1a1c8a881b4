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

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "toepsolve/error.hpp"
#include "toepsolve/numerics.hpp"

namespace toepsolve {
namespace {

using testing::naive_matmul;
using testing::random_block;
using testing::well_conditioned;

constexpr cplx I{0.0, 1.0};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected toepsolve::Error";
  return ErrorCode::NoConvergence;
}

/// Rebuilds P^-1 L U from compact factors.
DenseBlock reconstruct(const LUFactors& f) {
  const std::size_t n = f.side();
  DenseBlock l = DenseBlock::identity(n);
  DenseBlock u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i) l(i, j) = f.lu(i, j);
      else u(i, j) = f.lu(i, j);
    }
  DenseBlock a = naive_matmul(l, u);
  for (std::size_t k = n; k-- > 0;) {
    if (f.pivots[k] != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(f.pivots[k], j));
    }
  }
  return a;
}

TEST(LuFactor, IdentityHasTrivialFactors) {
  const auto f = lu_factor(DenseBlock::identity(3));
  EXPECT_EQ(f.lu, DenseBlock::identity(3));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(f.pivots[k], k);
}

TEST(LuFactor, PermutationSwapsRows) {
  const DenseBlock p(2, 2, {0.0, 1.0, 1.0, 0.0});
  const auto f = lu_factor(p);
  EXPECT_EQ(f.pivots[0], 1u);
  const cplx a{1.5, -2.0};
  const cplx b{-0.25, 3.0};
  const DenseBlock x = lu_solve(f, DenseBlock(2, 1, {a, b}));
  EXPECT_EQ(x(0, 0), b);
  EXPECT_EQ(x(1, 0), a);
}

TEST(LuFactor, RandomRoundTrip) {
  std::mt19937_64 rng(11);
  const DenseBlock a = random_block(8, 8, rng);
  const DenseBlock x = random_block(8, 1, rng);
  const DenseBlock b = naive_matmul(a, x);
  EXPECT_LE(relative_difference(lu_solve(lu_factor(a), b), x), 1e-12);
}

TEST(LuFactor, SingularAndShapeErrors) {
  EXPECT_EQ(code_of([] { lu_factor(DenseBlock(2, 2)); }), ErrorCode::SingularMatrix);
  const DenseBlock tiny(2, 2, {1e-301, 0.0, 0.0, 1.0});
  EXPECT_EQ(code_of([&] { lu_factor(tiny); }), ErrorCode::SingularMatrix);
  EXPECT_EQ(code_of([] { lu_factor(DenseBlock(2, 3)); }), ErrorCode::DimensionMismatch);
  const DenseBlock nan_entry(1, 1, {std::nan("")});
  EXPECT_EQ(code_of([&] { lu_factor(nan_entry); }), ErrorCode::InvalidArgument);
}

TEST(LuSolve, IdentityAndScaling) {
  std::mt19937_64 rng(3);
  const DenseBlock b = random_block(4, 3, rng);
  EXPECT_EQ(lu_solve(lu_factor(DenseBlock::identity(4)), b), b);
  const DenseBlock two = 2.0 * DenseBlock::identity(4);
  const DenseBlock half = lu_solve(lu_factor(two), b);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(half.data()[i], b.data()[i] / 2.0);
}

TEST(LuSolve, ReconstructsIdentity) {
  std::mt19937_64 rng(5);
  const DenseBlock a = well_conditioned(12, rng);
  EXPECT_LE(relative_difference(lu_solve(lu_factor(a), a), DenseBlock::identity(12)), 1e-12);
}

TEST(LuSolve, DimensionMismatch) {
  const auto f = lu_factor(DenseBlock::identity(3));
  EXPECT_EQ(code_of([&] { lu_solve(f, DenseBlock(4, 1)); }), ErrorCode::DimensionMismatch);
}

TEST(LuSolve, AdjointSolve) {
  std::mt19937_64 rng(8);
  const DenseBlock a = well_conditioned(10, rng);
  const DenseBlock x = random_block(10, 2, rng);
  const DenseBlock b = naive_matmul(a.adjoint(), x);
  EXPECT_LE(relative_difference(lu_solve_adjoint(lu_factor(a), b), x), 1e-12);
}

TEST(Matmul, IdentityAndHandExample) {
  std::mt19937_64 rng(1);
  const DenseBlock a = random_block(3, 3, rng);
  EXPECT_EQ(matmul(a, DenseBlock::identity(3)), a);

  const DenseBlock l(2, 2, {1.0, I, 0.0, 1.0});
  const DenseBlock r(2, 2, {1.0, 0.0, I, 1.0});
  const DenseBlock expected(2, 2, {0.0, I, I, 1.0});
  EXPECT_EQ(matmul(l, r), expected);
}

TEST(Matmul, AccumulateWithNegativeSign) {
  std::mt19937_64 rng(2);
  const DenseBlock a = random_block(5, 7, rng);
  const DenseBlock b = random_block(7, 4, rng);
  const DenseBlock c = random_block(5, 4, rng);
  const DenseBlock oracle = c - naive_matmul(a, b);
  EXPECT_LE(relative_difference(matmul(a, b, c, -1), oracle), 1e-14);
  EXPECT_EQ(code_of([&] { matmul(a, a); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { matmul(a, b, DenseBlock(2, 2)); }), ErrorCode::DimensionMismatch);
}

TEST(Norms, BasicValues) {
  EXPECT_EQ(norms(DenseBlock(3, 3)).frobenius, 0.0);
  EXPECT_EQ(norms(DenseBlock(3, 3)).max_abs, 0.0);
  const DenseBlock one(1, 1, {cplx{3.0, 4.0}});
  EXPECT_DOUBLE_EQ(norms(one).frobenius, 5.0);
  EXPECT_DOUBLE_EQ(norms(one).max_abs, 5.0);

  std::mt19937_64 rng(4);
  const DenseBlock r = random_block(9, 6, rng);
  long double sum = 0;
  for (const cplx& v : r.values()) sum += std::norm(v);
  const double f = norms(r).frobenius;
  EXPECT_LE(std::abs(f * f - static_cast<double>(sum)) / static_cast<double>(sum), 1e-14);
}

TEST(NumericsProperty, SolveResidualOnRandomSystems) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng() % 48;
    const DenseBlock a = well_conditioned(n, rng);
    const DenseBlock b = random_block(n, 1 + rng() % 4, rng);
    const DenseBlock x = lu_solve(lu_factor(a), b);
    EXPECT_LE(relative_difference(naive_matmul(a, x), b), 1e-12) << "n=" << n;
  }
}

TEST(NumericsProperty, MatmulMatchesTripleLoop) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng() % 64;
    const std::size_t k = 1 + rng() % 64;
    const std::size_t n = 1 + rng() % 64;
    const DenseBlock a = random_block(m, k, rng);
    const DenseBlock b = random_block(k, n, rng);
    EXPECT_LE(relative_difference(matmul(a, b), naive_matmul(a, b)), 1e-13);
  }
}

TEST(NumericsProperty, FactorsReconstructMatrix) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const DenseBlock a = random_block(n, n, rng);
    EXPECT_LE(relative_difference(reconstruct(lu_factor(a)), a), 1e-13);
  }
}

TEST(SingularValues, DiagonalAndUnitary) {
  const DenseBlock d(3, 3, {cplx{0, 2}, 0, 0, 0, -5.0, 0, 0, 0, 1.0});
  const auto sv = singular_values(d);
  ASSERT_EQ(sv.size(), 3u);
  EXPECT_NEAR(sv[0], 5.0, 1e-14);
  EXPECT_NEAR(sv[1], 2.0, 1e-14);
  EXPECT_NEAR(sv[2], 1.0, 1e-14);

  std::mt19937_64 rng(6);
  const DenseBlock q = orthonormal_columns(random_block(10, 4, rng));
  EXPECT_LE(relative_difference(naive_matmul(q.adjoint(), q), DenseBlock::identity(4)), 1e-14);
  for (double s : singular_values(q)) EXPECT_NEAR(s, 1.0, 1e-13);
}

}  // namespace
}  // namespace toepsolve
