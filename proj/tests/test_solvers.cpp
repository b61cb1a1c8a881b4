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

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

#include "test_support.hpp"
#include "toepsolve/error.hpp"
#include "toepsolve/solvers.hpp"

namespace toepsolve {
namespace {

using testing::dominant_generator;
using testing::naive_matmul;
using testing::naive_solve;
using testing::random_block;
using testing::well_conditioned;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InvalidArgument;
}

double rel(const DenseBlock& a, const DenseBlock& b) { return relative_difference(a, b); }

BorderedSystem synthetic(std::size_t ny, std::size_t nx, std::size_t ne, std::size_t nb,
                         std::uint64_t seed = 1) {
  auto spec = ArrayProblemSpec::with_defaults(ny, nx, ne, seed);
  spec.nb = nb;
  return generate(spec);
}

// Bordered system around an arbitrary generator, border blocks random.
BorderedSystem with_border(BlockGenerator2L gen, std::size_t nb, std::mt19937_64& rng) {
  BorderedSystem sys;
  sys.spec.ny = gen.n2();
  sys.spec.nx = gen.n1();
  sys.spec.ne = gen.n0();
  sys.spec.nb = nb;
  sys.zb = random_block(nb, gen.dimension(), rng, 0.1);
  sys.zc = well_conditioned(nb, rng);
  sys.gen = std::move(gen);
  return sys;
}

DenseBlock dense_block_diag(const DenseBlock& segment, std::size_t copies, const DenseBlock& tail) {
  const std::size_t s = segment.rows();
  DenseBlock p(s * copies + tail.rows(), s * copies + tail.rows());
  for (std::size_t k = 0; k < copies; ++k) p.set_block(k * s, k * s, segment);
  if (tail.rows() > 0) p.set_block(s * copies, s * copies, tail);
  return p;
}

LinearMap dense_map(const DenseBlock& z) {
  return [z](const DenseBlock& x) { return naive_matmul(z, x); };
}

const LinearMap kIdentity = [](const DenseBlock& x) { return x; };

bool monotone(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1]) return false;
  return true;
}

// ---------------------------------------------------------------------------

TEST(BorderedOperator, NoBorderReducesToToeplitzMatvec) {
  std::mt19937_64 rng(1);
  const auto sys = synthetic(3, 2, 3, 0);
  const BorderedOperator op(sys);
  const DenseBlock x = random_block(sys.dimension(), 2, rng);
  EXPECT_EQ(op.apply(x), matvec(precompute_spectral(sys.gen), x));
}

TEST(BorderedOperator, UnitVectorsGiveDenseColumns) {
  const auto sys = synthetic(2, 2, 3, 6);
  const BorderedOperator op(sys);
  const DenseBlock z = assemble_full(sys);
  for (std::size_t j = 0; j < sys.dimension(); ++j) {
    DenseBlock e(sys.dimension(), 1);
    e(j, 0) = 1.0;
    EXPECT_LE(rel(op.apply(e), z.col_range(j, 1)), 1e-12) << j;
  }
}

TEST(BorderedOperator, RandomOperandMatchesDense) {
  std::mt19937_64 rng(2);
  const auto sys = synthetic(3, 3, 2, 12);
  const BorderedOperator op(sys);
  const DenseBlock x = random_block(sys.dimension(), 3, rng);
  EXPECT_LE(rel(op.apply(x), naive_matmul(assemble_full(sys), x)), 1e-12);
  EXPECT_EQ(code_of([&] { op.apply(DenseBlock(sys.dimension() + 1, 1)); }), ErrorCode::ShapeError);
}

TEST(BorderedOperator, AdjointMatchesDenseConjugateTranspose) {
  std::mt19937_64 rng(3);
  const auto symmetric = synthetic(2, 3, 2, 5);
  const auto general = with_border(testing::random_generator(3, 2, 2, rng), 4, rng);
  for (const auto* sys : {&symmetric, &general}) {
    const BorderedOperator op(*sys);
    const DenseBlock x = random_block(sys->dimension(), 2, rng);
    EXPECT_LE(rel(op.apply_adjoint(x), naive_matmul(assemble_full(*sys).adjoint(), x)), 1e-12);
  }
}

// ---------------------------------------------------------------------------

TEST(Preconditioner, NoneIsIdentity) {
  std::mt19937_64 rng(4);
  const auto sys = synthetic(2, 2, 2, 4);
  const DenseBlock v = random_block(sys.dimension(), 2, rng);
  EXPECT_EQ(apply_precond(build_identity(sys), v), v);
}

TEST(Preconditioner, PkSolvesEachElementSegment) {
  const auto sys = synthetic(2, 3, 4, 6);
  const auto ex = build_excitations(sys, 1);
  const Preconditioner p = build_pk(sys);
  EXPECT_EQ(p.stored_scalars(), 4u * 4u + 6u * 6u);
  const DenseBlock out = apply_precond(p, ex.v);
  const DenseBlock r00 = sys.gen.at(0, 0);
  for (std::size_t c = 0; c < 6; ++c) {
    for (std::size_t e = 0; e < 6; ++e) {
      const DenseBlock seg = ex.v.block(e * 4, c, 4, 1);
      EXPECT_LE(rel(out.block(e * 4, c, 4, 1), naive_solve(r00, seg)) , 1e-13);
    }
  }
}

TEST(Preconditioner, InvertsItsOwnBlockDiagonal) {
  std::mt19937_64 rng(5);
  const auto sys = synthetic(3, 2, 3, 4);
  const DenseBlock d = dense_block_diag(sys.gen.at(0, 0), 6, sys.zc);
  const DenseBlock w = random_block(sys.dimension(), 3, rng);
  EXPECT_LE(rel(apply_precond(build_pk(sys), naive_matmul(d, w)), w), 1e-12);
}

TEST(Preconditioner, PkAndPzMatchDenseOracles) {
  std::mt19937_64 rng(6);
  const auto sys = synthetic(3, 3, 3, 8);
  const DenseBlock v = random_block(sys.dimension(), 2, rng);
  const DenseBlock pk = dense_block_diag(sys.gen.at(0, 0), 9, sys.zc);
  EXPECT_LE(rel(apply_precond(build_pk(sys), v), naive_solve(pk, v)), 1e-12);
  const Preconditioner pz = build_pz(sys);
  EXPECT_EQ(pz.stored_scalars(), 9u * 9u + 8u * 8u);
  const DenseBlock pzd = dense_block_diag(assemble_level1_block(sys.gen, 0), 3, sys.zc);
  EXPECT_LE(rel(apply_precond(pz, v), naive_solve(pzd, v)), 1e-12);
  EXPECT_LE(rel(apply_precond_adjoint(pz, v), naive_solve(pzd.adjoint(), v)), 1e-12);
}

TEST(Preconditioner, PzOnTwoRowGridSolvesRowSegments) {
  std::mt19937_64 rng(7);
  const auto sys = synthetic(2, 4, 2, 0);
  const DenseBlock v = random_block(sys.dimension(), 1, rng);
  const DenseBlock row = assemble_level1_block(sys.gen, 0);
  const DenseBlock out = apply_precond(build_pz(sys), v);
  for (std::size_t r = 0; r < 2; ++r)
    EXPECT_LE(rel(out.row_range(r * 8, 8), naive_solve(row, v.row_range(r * 8, 8))), 1e-13);
}

TEST(Preconditioner, PzEqualsPkForSingleColumnArrays) {
  std::mt19937_64 rng(8);
  const auto sys = synthetic(4, 1, 3, 5);
  const DenseBlock v = random_block(sys.dimension(), 2, rng);
  EXPECT_EQ(apply_precond(build_pz(sys), v), apply_precond(build_pk(sys), v));
}

// ---------------------------------------------------------------------------

TEST(Gmres, IdentityConvergesInOneIteration) {
  std::mt19937_64 rng(9);
  const DenseBlock b = random_block(7, 1, rng);
  const auto r = gmres(kIdentity, kIdentity, b, {1e-12, 10, {}});
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1u);
  EXPECT_LE(rel(r.x, b), 1e-15);
}

TEST(Gmres, TwoByTwoDiagonalIsExactInTwoIterations) {
  const DenseBlock a(2, 2, {1.0, 0.0, 0.0, 2.0});
  const auto r = gmres(dense_map(a), kIdentity, DenseBlock(2, 1, {1.0, 1.0}), {1e-12, 10, {}});
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, 2u);
  EXPECT_NEAR(std::abs(r.x(0, 0) - 1.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(r.x(1, 0) - 0.5), 0.0, 1e-13);
}

TEST(Gmres, BlockDiagonalArrayNeedsOneIterationWithPk) {
  std::mt19937_64 rng(10);
  const DenseBlock r00 = well_conditioned(3, rng);
  BorderedSystem sys;
  sys.gen = BlockGenerator2L::from_offsets(3, 3, 3, [&](int d2, int d1) {
    return d2 == 0 && d1 == 0 ? r00 : DenseBlock(3, 3);
  });
  sys.spec = ArrayProblemSpec::with_defaults(3, 3, 3);
  sys.spec.nb = 0;
  sys.zb = DenseBlock(0, 27);
  const BorderedOperator op(sys);
  const Preconditioner p = build_pk(sys);
  const auto r = gmres(as_map(op), as_map(p), random_block(27, 1, rng), {1e-12, 10, {}});
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1u);
}

TEST(Gmres, SyntheticGridWithPkMeetsDenseResidual) {
  const auto sys = synthetic(4, 4, 4, 16);
  const BorderedOperator op(sys);
  const Preconditioner p = build_pk(sys);
  const auto ex = build_excitations(sys, 0);
  const DenseBlock b = ex.v.col_range(5, 1);
  const auto r = gmres(as_map(op), as_map(p), b, {1e-3, 500, {}});
  ASSERT_TRUE(r.report.converged);
  const DenseBlock res = b - naive_matmul(assemble_full(sys), r.x);
  EXPECT_LE(frobenius(res) / frobenius(b), 5e-3);
  EXPECT_NEAR(r.report.true_residual, frobenius(res) / frobenius(b), 1e-12);
  EXPECT_TRUE(monotone(r.report.residual_history));
  EXPECT_EQ(r.report.residual_history.size(), r.report.iterations + 1);
}

TEST(Gmres, DefaultGeneratorIsSolvableWithoutPreconditioning) {
  const auto sys = generate(ArrayProblemSpec::with_defaults(4, 4, 4, 3));
  const DenseBlock z = assemble_full(sys);
  const auto ex = build_excitations(sys, 2);
  const std::size_t cap = sys.dimension() / 2;
  const auto r = gmres(dense_map(z), kIdentity, ex.v.col_range(0, 1), {1e-6, cap, {}});
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, cap);
}

TEST(Gmres, RestartedRunConverges) {
  const auto sys = synthetic(3, 3, 3, 8);
  const BorderedOperator op(sys);
  const Preconditioner p = build_pz(sys);
  const DenseBlock b = build_excitations(sys, 1).v.col_range(4, 1);
  const auto full = gmres(as_map(op), as_map(p), b, {1e-8, 500, {}});
  const auto restarted = gmres(as_map(op), as_map(p), b, {1e-8, 500, 5});
  ASSERT_TRUE(restarted.report.converged);
  EXPECT_GE(restarted.report.iterations, full.report.iterations);
  EXPECT_LE(rel(restarted.x, full.x), 1e-6);
  EXPECT_EQ(restarted.report.memory.krylov, 5 * sys.dimension() * 16);
}

TEST(Gmres, ReportsNonConvergence) {
  const auto sys = synthetic(3, 3, 3, 8);
  const BorderedOperator op(sys);
  const auto r = gmres(as_map(op), kIdentity, build_excitations(sys, 0).v.col_range(0, 1),
                       {1e-12, 2, {}});
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 2u);
  EXPECT_GT(r.report.final_residual(), 1e-12);
}

TEST(Gmres, RejectsBadConfig) {
  const DenseBlock b(3, 1, {1.0, 2.0, 3.0});
  EXPECT_EQ(code_of([&] { gmres(kIdentity, kIdentity, b, {0.0, 10, {}}); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { gmres(kIdentity, kIdentity, b, {1e-3, 0, {}}); }),
            ErrorCode::InvalidArgument);
}

TEST(Gmres, PzBeatsPkAfterFirstIterationOnReferenceProblem) {
  const auto sys = synthetic(6, 6, 8, 96);
  const BorderedOperator op(sys);
  const DenseBlock b = build_excitations(sys, 0).v.col_range(14, 1);
  const auto pk = build_pk(sys);
  const auto pz = build_pz(sys);
  const auto rk = gmres(as_map(op), as_map(pk), b, {1e-3, 1, {}});
  const auto rz = gmres(as_map(op), as_map(pz), b, {1e-3, 1, {}});
  EXPECT_LE(rz.report.residual_history.at(1), rk.report.residual_history.at(1));
}

// ---------------------------------------------------------------------------

TEST(MultiRhs, SingleColumnVectorizedIsGmres) {
  const auto sys = synthetic(3, 3, 2, 6);
  const BorderedOperator op(sys);
  const Preconditioner p = build_pk(sys);
  const DenseBlock b = build_excitations(sys, 1).v.col_range(3, 1);
  const GmresConfig cfg{1e-6, 200, {}};
  const auto g = gmres(as_map(op), as_map(p), b, cfg);
  const auto v = solve_multi_rhs_vectorized(as_map(op), as_map(p), b, cfg);
  const auto s = solve_multi_rhs_sequential(as_map(op), as_map(p), b, cfg);
  EXPECT_EQ(v.x, g.x);
  EXPECT_EQ(v.report.residual_history, g.report.residual_history);
  EXPECT_EQ(s.x, g.x);
  EXPECT_EQ(s.report.residual_history, g.report.residual_history);
}

TEST(MultiRhs, VectorizedAndSequentialAgreeAndTallyKrylovMemory) {
  const auto sys = synthetic(3, 3, 3, 8);
  const BorderedOperator op(sys);
  const Preconditioner p = build_pk(sys);
  const DenseBlock v = build_excitations(sys, 0).v;
  const double tol = 1e-4;
  const GmresConfig cfg{tol, 500, {}};
  const auto vec = solve_multi_rhs_vectorized(as_map(op), as_map(p), v, cfg);
  const auto seq = solve_multi_rhs_sequential(as_map(op), as_map(p), v, cfg);
  ASSERT_TRUE(vec.report.converged);
  ASSERT_TRUE(seq.report.converged);
  const DenseBlock z = assemble_full(sys);
  const std::size_t m = v.cols(), dim = sys.dimension();
  for (std::size_t c = 0; c < m; ++c) {
    const DenseBlock b = v.col_range(c, 1);
    const DenseBlock xv = vec.x.col_range(c, 1);
    const DenseBlock xs = seq.x.col_range(c, 1);
    EXPECT_LE(frobenius(b - naive_matmul(z, xv)) / frobenius(b), 10 * tol) << c;
    EXPECT_LE(frobenius(b - naive_matmul(z, xs)) / frobenius(b), 10 * tol) << c;
    EXPECT_LE(rel(xv, xs), 10 * tol) << c;
  }
  EXPECT_EQ(vec.report.memory.krylov, vec.report.iterations * m * dim * 16);
  EXPECT_EQ(seq.report.memory.krylov, seq.report.iterations * dim * 16);
  EXPECT_LT(seq.report.memory.krylov, vec.report.memory.krylov);
  EXPECT_EQ(seq.columns.size(), m);
  EXPECT_EQ(vec.report.column_residuals.size(), m);
  EXPECT_TRUE(monotone(vec.report.residual_history));
  for (const auto& c : seq.columns) EXPECT_TRUE(monotone(c.residual_history));
}

// ---------------------------------------------------------------------------

TEST(Level1, SingleColumnGivesGeneratorBlocks) {
  std::mt19937_64 rng(11);
  const auto gen = testing::random_generator(3, 1, 2, rng);
  const auto blocks = assemble_level1(gen);
  ASSERT_EQ(blocks.size(), 5u);
  for (int n = -2; n <= 2; ++n) EXPECT_EQ(blocks[n + 2], gen.at(n, 0));
}

TEST(Level1, EntriesFollowGeneratorAndReassembleToDense) {
  std::mt19937_64 rng(12);
  const auto gen = testing::random_generator(3, 3, 2, rng);
  const auto blocks = assemble_level1(gen);
  std::size_t scalars = 0;
  for (const auto& b : blocks) scalars += b.size();
  EXPECT_EQ(scalars, 5u * 6u * 6u);
  for (int n = -2; n <= 2; ++n)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = 0; q < 3; ++q)
        EXPECT_EQ(blocks[n + 2].block(p * 2, q * 2, 2, 2), gen.at(n, int(p) - int(q)));
  DenseBlock full(18, 18);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) full.set_block(i * 6, j * 6, blocks[i - j + 2]);
  EXPECT_EQ(full, assemble_dense(gen));
}

// Dense block-Toeplitz matrix with block (i, j) = blocks[i - j + n - 1].
DenseBlock toeplitz_dense(const std::vector<DenseBlock>& blocks) {
  const std::size_t n = (blocks.size() + 1) / 2;
  const std::size_t s = blocks[0].rows();
  DenseBlock t(n * s, n * s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t.set_block(i * s, j * s, blocks[i + n - 1 - j]);
  return t;
}

TEST(Rybicki, SingleBlockIsOneSolve) {
  std::mt19937_64 rng(13);
  const std::vector<DenseBlock> blocks{well_conditioned(4, rng)};
  const DenseBlock y = random_block(4, 2, rng);
  EXPECT_LE(rel(rybicki_solve(blocks, y), naive_solve(blocks[0], y)), 1e-14);
}

TEST(Rybicki, ScalarToeplitzMatchesDenseSolve) {
  std::mt19937_64 rng(14);
  for (std::size_t n : {2u, 3u, 6u, 17u, 32u}) {
    std::vector<DenseBlock> blocks;
    for (std::size_t k = 0; k < 2 * n - 1; ++k) blocks.push_back(random_block(1, 1, rng, 0.3));
    blocks[n - 1](0, 0) += 3.0;
    const DenseBlock y = random_block(n, 1, rng);
    EXPECT_LE(rel(rybicki_solve(blocks, y), naive_solve(toeplitz_dense(blocks), y)), 1e-11) << n;
  }
}

TEST(Rybicki, SymmetricPairBlocksHaveSmallResidualAndLeadingInvariant) {
  std::mt19937_64 rng(15);
  const std::size_t n = 4, s = 6;
  std::vector<DenseBlock> blocks(2 * n - 1);
  blocks[n - 1] = well_conditioned(s, rng, 12.0);
  blocks[n - 1] = blocks[n - 1] + blocks[n - 1].transposed();
  for (std::size_t k = 1; k < n; ++k) {
    blocks[n - 1 + k] = random_block(s, s, rng, 0.5);
    blocks[n - 1 - k] = blocks[n - 1 + k].transposed();
  }
  const DenseBlock y = random_block(n * s, 3, rng);
  const DenseBlock t = toeplitz_dense(blocks);
  std::size_t calls = 0;
  const DenseBlock x = rybicki_solve(blocks, y, [&](std::size_t m, const std::vector<DenseBlock>& xs) {
    ++calls;
    ASSERT_EQ(xs.size(), m);
    DenseBlock lead(m * s, y.cols());
    for (std::size_t i = 0; i < m; ++i) lead.set_rows(i * s, xs[i]);
    const DenseBlock tm = t.block(0, 0, m * s, m * s);
    const DenseBlock ym = y.row_range(0, m * s);
    EXPECT_LE(frobenius(naive_matmul(tm, lead) - ym) / frobenius(ym), 1e-10) << m;
  });
  EXPECT_EQ(calls, n);
  EXPECT_LE(frobenius(naive_matmul(t, x) - y) / frobenius(y), 1e-10);
  EXPECT_EQ(rybicki_solve(blocks, y), x);
}

TEST(Rybicki, NonsymmetricBlocksMatchDense) {
  std::mt19937_64 rng(16);
  const auto gen = dominant_generator(5, 2, 3, rng);
  const auto blocks = assemble_level1(gen);
  const DenseBlock y = random_block(gen.dimension(), 2, rng);
  EXPECT_LE(rel(rybicki_solve(blocks, y), naive_solve(assemble_dense(gen), y)), 1e-11);
}

TEST(Rybicki, SingularCasesAreDiagnosed) {
  const DenseBlock one(1, 1, {1.0});
  const DenseBlock y(2, 1, {1.0, 2.0});
  EXPECT_EQ(code_of([&] { rybicki_solve({one, DenseBlock(1, 1), one}, y); }),
            ErrorCode::SingularBlock);
  EXPECT_EQ(code_of([&] { rybicki_solve({one, one, one}, y); }), ErrorCode::SingularDenominator);
  EXPECT_EQ(code_of([&] { rybicki_solve({one, one}, y); }), ErrorCode::ShapeError);
  EXPECT_EQ(code_of([&] { rybicki_solve({one, one, one}, DenseBlock(3, 1)); }),
            ErrorCode::DimensionMismatch);
}

// ---------------------------------------------------------------------------

TEST(Schur, NoBorderIsInnerSolve) {
  std::mt19937_64 rng(17);
  const auto sys = synthetic(3, 2, 2, 0);
  const DenseBlock v = random_block(sys.dimension(), 2, rng);
  const auto r = schur_solve(sys, v, InnerSolver::Rybicki);
  EXPECT_EQ(r.x, rybicki_solve(assemble_level1(sys.gen), v));
}

TEST(Schur, ZeroCouplingDecouples) {
  std::mt19937_64 rng(18);
  auto sys = synthetic(2, 2, 3, 5);
  sys.zb = DenseBlock(5, 12);
  const DenseBlock v = random_block(sys.dimension(), 2, rng);
  const auto r = schur_solve(sys, v, InnerSolver::Dense);
  EXPECT_LE(rel(r.x.row_range(12, 5), naive_solve(sys.zc, v.row_range(12, 5))), 1e-13);
  EXPECT_LE(rel(r.x.row_range(0, 12), naive_solve(assemble_dense(sys.gen), v.row_range(0, 12))),
            1e-13);
}

TEST(Schur, MatchesDenseOracleOnBorderedGrid) {
  const auto sys = synthetic(3, 3, 4, 8);
  const DenseBlock v = build_excitations(sys, 0).v;
  const DenseBlock oracle = naive_solve(assemble_full(sys), v);
  for (auto inner : {InnerSolver::Rybicki, InnerSolver::Dense}) {
    const auto r = schur_solve(sys, v, inner);
    EXPECT_LE(rel(r.x, oracle), 1e-10);
  }
  const auto r = schur_solve(sys, v, InnerSolver::Rybicki);
  EXPECT_EQ(r.report.memory.level1, 5u * 12u * 12u * 16u);
  EXPECT_EQ(r.report.memory.generator, 5u * 5u * 16u * 16u);
  EXPECT_EQ(r.report.memory.dense_equivalent, 44u * 44u * 16u);
  EXPECT_LE(rel(dense_solve(sys, v).x, oracle), 1e-12);
}

TEST(Schur, RejectsWrongRhsShape) {
  const auto sys = synthetic(2, 2, 2, 3);
  EXPECT_EQ(code_of([&] { schur_solve(sys, DenseBlock(5, 1), InnerSolver::Rybicki); }),
            ErrorCode::ShapeError);
}

// ---------------------------------------------------------------------------

std::vector<double> eigen_singular_values(const DenseBlock& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
  return {s.data(), s.data() + s.size()};
}

TEST(Spectrum, ExactPreconditionerGivesUnitValues) {
  const auto sys = synthetic(2, 2, 3, 6);
  const BorderedOperator op(sys);
  const auto sv = spectrum_estimate(op, build_full(sys), {10, 5, 1, 3});
  ASSERT_EQ(sv.size(), 10u);
  for (double s : sv) EXPECT_NEAR(s, 1.0, 1e-8);
}

// The sample of count + oversample vectors spans the whole range here, so
// the estimate is exact up to rounding.
TEST(Spectrum, TopValuesMatchDenseSvd) {
  const auto sys = synthetic(2, 2, 3, 2);
  const BorderedOperator op(sys);
  const DenseBlock z = assemble_full(sys);
  for (auto kind : {PrecondKind::None, PrecondKind::PK, PrecondKind::PZ}) {
    const Preconditioner p = build_preconditioner(sys, kind);
    const auto exact = eigen_singular_values(apply_precond(p, z));
    const auto sv = spectrum_estimate(op, p, {5, 10, 2, 9});
    ASSERT_EQ(sv.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(sv[i], exact[i], 1e-6 * exact[i]) << i;
  }
}

// With the default border the spectrum is flat, so a two-pass estimate is
// only approximate; it still never exceeds the true values.
TEST(Spectrum, FlatSpectrumEstimatesAreOrderedLowerBounds) {
  const auto sys = synthetic(2, 2, 3, 32);
  const BorderedOperator op(sys);
  const DenseBlock z = assemble_full(sys);
  const Preconditioner p = build_pk(sys);
  const auto exact = eigen_singular_values(apply_precond(p, z));
  const auto sv = spectrum_estimate(op, p, {5, 10, 2, 9});
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_LE(sv[i], exact[i] * (1 + 1e-12)) << i;
    EXPECT_GE(sv[i], 0.9 * exact[i]) << i;
    if (i > 0) EXPECT_LE(sv[i], sv[i - 1]);
  }
  EXPECT_GE(sv.back(), 0.0);
}

TEST(Spectrum, GeneralGeneratorUsesTransposedPath) {
  std::mt19937_64 rng(19);
  const auto sys = with_border(dominant_generator(2, 3, 2, rng, 0.8), 4, rng);
  const BorderedOperator op(sys);
  const auto exact = eigen_singular_values(assemble_full(sys));
  const auto sv = spectrum_estimate(op, build_identity(sys), {3, 13, 2, 1});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(sv[i], exact[i], 1e-6 * exact[i]);
}

TEST(Spectrum, CountAboveDimensionIsShapeError) {
  const auto sys = synthetic(1, 2, 2, 2);
  const BorderedOperator op(sys);
  EXPECT_EQ(code_of([&] { spectrum_estimate(op, build_pk(sys), {7, 2, 1, 0}); }),
            ErrorCode::ShapeError);
}

}  // namespace
}  // namespace toepsolve
