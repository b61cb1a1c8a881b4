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
#include <random>
#include <string>

#include "toepsolve/error.hpp"
#include "toepsolve/solvers.hpp"

namespace toepsolve {

std::vector<double> spectrum_estimate(const BorderedOperator& op, const Preconditioner& p,
                                      const SpectrumConfig& cfg) {
  const std::size_t n = op.dimension();
  if (cfg.count == 0 || cfg.count > n) {
    fail(ErrorCode::ShapeError, "requested " + std::to_string(cfg.count) +
                                    " singular values of a dimension-" + std::to_string(n) +
                                    " operator");
  }
  if (p.dimension() != n) fail(ErrorCode::ShapeError, "preconditioner does not match operator");

  const auto forward = [&](const DenseBlock& x) { return apply_precond(p, op.apply(x)); };
  // (P^-1 Z)^H = Z^H P^-H
  const auto adjoint = [&](const DenseBlock& x) {
    return op.apply_adjoint(apply_precond_adjoint(p, x));
  };

  const std::size_t l = std::min(n, cfg.count + cfg.oversample);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  DenseBlock omega(n, l);
  for (auto& z : omega.values()) z = cplx(normal(rng), normal(rng));

  DenseBlock q = orthonormal_columns(forward(omega));
  for (std::size_t it = 0; it < cfg.power_iters; ++it) {
    q = orthonormal_columns(forward(orthonormal_columns(adjoint(q))));
  }
  // B = Q^H A; B^H = A^H Q has the same singular values.
  std::vector<double> sv = singular_values(adjoint(q));
  sv.resize(cfg.count);
  return sv;
}

}  // namespace toepsolve
