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

#include "stopwatch.hpp"
#include "toepsolve/error.hpp"
#include "toepsolve/solvers.hpp"

namespace toepsolve {

std::size_t generator_bytes(const ArrayProblemSpec& s) {
  return circulant_size(s.ny) * circulant_size(s.nx) * s.ne * s.ne * kBytesPerScalar;
}

std::size_t dense_bytes(const ArrayProblemSpec& s) {
  return s.dimension() * s.dimension() * kBytesPerScalar;
}

std::size_t level1_bytes(const ArrayProblemSpec& s) {
  const std::size_t side = s.nx * s.ne;
  return circulant_size(s.ny) * side * side * kBytesPerScalar;
}

namespace {

void check_rhs(const BorderedSystem& sys, const DenseBlock& v) {
  if (v.rows() != sys.dimension() || v.cols() == 0) {
    fail(ErrorCode::ShapeError, "right-hand side has " + std::to_string(v.rows()) +
                                    " rows, system dimension is " +
                                    std::to_string(sys.dimension()));
  }
}

void base_memory(const BorderedSystem& sys, SolveReport& rep) {
  rep.memory.generator = generator_bytes(sys.spec);
  rep.memory.dense_equivalent = dense_bytes(sys.spec);
}

}  // namespace

SolveResult schur_solve(const BorderedSystem& sys, const DenseBlock& v, InnerSolver inner) {
  check_rhs(sys, v);
  const detail::Stopwatch total;
  SolveReport rep;
  base_memory(sys, rep);
  const std::size_t na = sys.array_unknowns();
  const std::size_t nb = sys.border_unknowns();
  const std::size_t w = v.cols();

  DenseBlock rhs(na, w + nb);
  rhs.set_block(0, 0, v.row_range(0, na));
  if (nb > 0) rhs.set_block(0, w, sys.zb.transposed());

  DenseBlock uf;
  if (inner == InnerSolver::Rybicki) {
    const detail::Stopwatch fill;
    const std::vector<DenseBlock> blocks = assemble_level1(sys.gen);
    rep.timings.precond_build = fill.seconds();
    rep.memory.level1 = level1_bytes(sys.spec);
    uf = rybicki_solve(blocks, rhs);
  } else {
    const detail::Stopwatch fill;
    const DenseBlock za = assemble_dense(sys.gen);
    rep.timings.precond_build = fill.seconds();
    rep.memory.level1 = na * na * kBytesPerScalar;
    uf = lu_solve(lu_factor(za), rhs);
  }

  DenseBlock x(na + nb, w);
  if (nb == 0) {
    x = std::move(uf);
  } else {
    const DenseBlock u = uf.col_range(0, w);
    const DenseBlock f = uf.col_range(w, nb);
    LUFactors schur;
    try {
      schur = lu_factor(matmul(sys.zb, f, sys.zc, -1));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularMatrix) throw;
      fail(ErrorCode::SingularSchurComplement, std::string("Z_C - Z_B Z_A^-1 Z_B^T: ") + e.what());
    }
    const DenseBlock ic = lu_solve(schur, matmul(sys.zb, u, v.row_range(na, nb), -1));
    x.set_rows(0, matmul(f, ic, u, -1));
    x.set_rows(na, ic);
  }
  rep.timings.total = total.seconds();
  rep.converged = true;
  return {std::move(x), std::move(rep)};
}

SolveResult dense_solve(const BorderedSystem& sys, const DenseBlock& v, std::size_t oracle_cap) {
  check_rhs(sys, v);
  const detail::Stopwatch total;
  SolveReport rep;
  base_memory(sys, rep);
  const detail::Stopwatch fill;
  const DenseBlock z = assemble_full(sys, oracle_cap);
  rep.timings.precond_build = fill.seconds();
  DenseBlock x = lu_solve(lu_factor(z), v);
  rep.timings.total = total.seconds();
  rep.converged = true;
  return {std::move(x), std::move(rep)};
}

}  // namespace toepsolve
