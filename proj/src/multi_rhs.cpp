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

#include <algorithm>
#include <cmath>

#include "stopwatch.hpp"
#include "toepsolve/solvers.hpp"

namespace toepsolve {

SolveResult solve_multi_rhs_vectorized(const LinearMap& a, const LinearMap& precond,
                                       const DenseBlock& v, const GmresConfig& cfg) {
  // The stacked problem (I (x) Z) vec(X) = vec(V) is exactly GMRES on the
  // block with Frobenius inner products.
  return gmres(a, precond, v, cfg);
}

SequentialResult solve_multi_rhs_sequential(const LinearMap& a, const LinearMap& precond,
                                            const DenseBlock& v, const GmresConfig& cfg) {
  const detail::Stopwatch total;
  SequentialResult out{DenseBlock(v.rows(), v.cols()), {}, {}};
  SolveReport& rep = out.report;
  rep.converged = true;
  double res2 = 0.0;
  double rhs2 = 0.0;
  for (std::size_t c = 0; c < v.cols(); ++c) {
    const DenseBlock b = v.col_range(c, 1);
    SolveResult col = gmres(a, precond, b, cfg);
    out.x.set_cols(c, col.x);
    const double bn = frobenius(b);
    res2 += std::pow(col.report.true_residual * (bn == 0.0 ? 1.0 : bn), 2);
    rhs2 += bn * bn;
    rep.column_residuals.push_back(col.report.true_residual);
    rep.converged = rep.converged && col.report.converged;
    rep.timings.matvec_total += col.report.timings.matvec_total;
    rep.timings.orthogonalization += col.report.timings.orthogonalization;
    if (col.report.iterations >= rep.iterations) {
      rep.iterations = col.report.iterations;
      rep.residual_history = col.report.residual_history;
    }
    rep.memory.krylov = std::max(rep.memory.krylov, col.report.memory.krylov);
    out.columns.push_back(std::move(col.report));
  }
  rep.true_residual = rhs2 == 0.0 ? std::sqrt(res2) : std::sqrt(res2 / rhs2);
  rep.timings.total = total.seconds();
  return out;
}

}  // namespace toepsolve
