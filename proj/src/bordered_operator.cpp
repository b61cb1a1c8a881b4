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

DenseBlock apply_with(const SpectralOperator& array_op, const DenseBlock& zb_top,
                      const DenseBlock& zb_bottom, const DenseBlock& zc, const DenseBlock& x) {
  const std::size_t na = array_op.dimension();
  const std::size_t nb = zc.rows();
  if (x.rows() != na + nb) {
    fail(ErrorCode::ShapeError, "operand has " + std::to_string(x.rows()) +
                                    " rows, operator dimension is " + std::to_string(na + nb));
  }
  if (nb == 0) return matvec(array_op, x);
  const DenseBlock xa = x.row_range(0, na);
  const DenseBlock xc = x.row_range(na, nb);
  DenseBlock out(na + nb, x.cols());
  out.set_rows(0, matmul(zb_top, xc, matvec(array_op, xa)));
  out.set_rows(na, matmul(zc, xc, matmul(zb_bottom, xa)));
  return out;
}

}  // namespace

BorderedOperator::BorderedOperator(const BorderedSystem& sys)
    : spectral_(precompute_spectral(sys.gen)),
      zb_(sys.zb),
      zbt_(sys.zb.transposed()),
      zc_(sys.zc),
      zct_(sys.zc.transposed()) {
  if (zb_.rows() != zc_.rows() || zb_.cols() != sys.gen.dimension() || !zc_.is_square()) {
    fail(ErrorCode::ShapeError, "border blocks do not match the array generator");
  }
  if (!sys.gen.is_transpose_symmetric()) {
    transposed_ = std::make_shared<SpectralOperator>(precompute_spectral(sys.gen.transposed()));
  }
}

DenseBlock BorderedOperator::apply(const DenseBlock& x) const {
  return apply_with(spectral_, zbt_, zb_, zc_, x);
}

DenseBlock BorderedOperator::apply_adjoint(const DenseBlock& x) const {
  // Z^H x = conj(Z^T conj(x)), Z^T = [[Z_A^T, Z_B^T], [Z_B, Z_C^T]].
  const SpectralOperator& t = transposed_ ? *transposed_ : spectral_;
  return apply_with(t, zbt_, zb_, zct_, x.conjugated()).conjugated();
}

}  // namespace toepsolve
