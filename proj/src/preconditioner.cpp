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

std::shared_ptr<const LUFactors> border_factors(const BorderedSystem& sys) {
  if (sys.border_unknowns() == 0) return nullptr;
  return std::make_shared<const LUFactors>(lu_factor(sys.zc));
}

Preconditioner block_diagonal(const BorderedSystem& sys, PrecondKind kind,
                              const DenseBlock& segment) {
  Preconditioner p;
  p.kind = kind;
  p.array_unknowns = sys.array_unknowns();
  p.border_unknowns = sys.border_unknowns();
  p.segment_lu = std::make_shared<const LUFactors>(lu_factor(segment));
  p.border_lu = border_factors(sys);
  return p;
}

using PanelSolve = void (*)(const LUFactors&, cplx*, std::size_t);

DenseBlock apply_with(const Preconditioner& p, const DenseBlock& v, PanelSolve solve) {
  if (v.rows() != p.dimension()) {
    fail(ErrorCode::ShapeError, "preconditioner side " + std::to_string(p.dimension()) +
                                    " does not match " + std::to_string(v.rows()) + " rows");
  }
  DenseBlock out = v;
  if (p.kind == PrecondKind::None) return out;
  const std::size_t w = v.cols();
  if (p.kind == PrecondKind::Full) {
    solve(*p.segment_lu, out.data(), w);
    return out;
  }
  const std::size_t s = p.segment_size();
  const auto segments = static_cast<long>(p.array_unknowns / s);
  const LUFactors& f = *p.segment_lu;
#pragma omp parallel for schedule(static)
  for (long k = 0; k < segments; ++k) solve(f, out.data() + k * s * w, w);
  if (p.border_lu) solve(*p.border_lu, out.data() + p.array_unknowns * w, w);
  return out;
}

}  // namespace

std::size_t Preconditioner::stored_scalars() const noexcept {
  std::size_t n = 0;
  if (segment_lu) n += segment_lu->side() * segment_lu->side();
  if (border_lu) n += border_lu->side() * border_lu->side();
  return n;
}

Preconditioner build_identity(const BorderedSystem& sys) {
  Preconditioner p;
  p.array_unknowns = sys.array_unknowns();
  p.border_unknowns = sys.border_unknowns();
  return p;
}

Preconditioner build_pk(const BorderedSystem& sys) {
  return block_diagonal(sys, PrecondKind::PK, sys.gen.at(0, 0));
}

Preconditioner build_pz(const BorderedSystem& sys) {
  return block_diagonal(sys, PrecondKind::PZ, assemble_level1_block(sys.gen, 0));
}

Preconditioner build_full(const BorderedSystem& sys, std::size_t oracle_cap) {
  Preconditioner p = build_identity(sys);
  p.kind = PrecondKind::Full;
  p.segment_lu = std::make_shared<const LUFactors>(lu_factor(assemble_full(sys, oracle_cap)));
  return p;
}

Preconditioner build_preconditioner(const BorderedSystem& sys, PrecondKind kind) {
  switch (kind) {
    case PrecondKind::None:
      return build_identity(sys);
    case PrecondKind::PK:
      return build_pk(sys);
    case PrecondKind::PZ:
      return build_pz(sys);
    case PrecondKind::Full:
      return build_full(sys);
  }
  fail(ErrorCode::InvalidArgument, "unknown preconditioner kind");
}

DenseBlock apply_precond(const Preconditioner& p, const DenseBlock& v) {
  return apply_with(p, v, &lu_solve_inplace);
}

DenseBlock apply_precond_adjoint(const Preconditioner& p, const DenseBlock& v) {
  return apply_with(p, v, &lu_solve_adjoint_inplace);
}

}  // namespace toepsolve
