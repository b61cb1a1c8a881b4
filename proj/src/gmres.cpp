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
#include "toepsolve/error.hpp"
#include "toepsolve/solvers.hpp"

namespace toepsolve {

namespace {

struct Givens {
  double c = 1.0;
  cplx s = 0.0;

  void apply(cplx& x, cplx& y) const {
    const cplx t = c * x + s * y;
    y = -std::conj(s) * x + c * y;
    x = t;
  }
};

// Rotation zeroing b in [a; b]; returns the rotated a.
Givens make_givens(cplx a, cplx b, cplx& r) {
  const double aa = std::abs(a);
  const double bb = std::abs(b);
  if (bb == 0.0) {
    r = a;
    return {1.0, 0.0};
  }
  if (aa == 0.0) {
    r = b;
    return {0.0, std::conj(b) / bb};
  }
  const double t = std::hypot(aa, bb);
  const cplx phase = a / aa;
  r = phase * t;
  return {aa / t, phase * std::conj(b) / t};
}

// Relative size of h_{j+1,j} below which the Krylov space is invariant.
constexpr double kBreakdown = 1e-14;

}  // namespace

SolveResult gmres(const LinearMap& a, const LinearMap& precond, const DenseBlock& rhs,
                  const GmresConfig& cfg) {
  if (!(cfg.tol > 0.0)) fail(ErrorCode::InvalidArgument, "GMRES tolerance must be positive");
  if (cfg.max_iter == 0) fail(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  if (cfg.restart && *cfg.restart == 0) fail(ErrorCode::InvalidArgument, "restart must be >= 1");
  if (rhs.empty()) fail(ErrorCode::ShapeError, "empty right-hand side");

  const detail::Stopwatch total;
  SolveReport rep;
  auto timed = [&rep](const LinearMap& f, const DenseBlock& v) {
    const detail::Stopwatch t;
    DenseBlock out = f(v);
    rep.timings.matvec_total += t.seconds();
    if (out.rows() != v.rows() || out.cols() != v.cols()) {
      fail(ErrorCode::ShapeError, "linear map changed the operand shape");
    }
    return out;
  };

  DenseBlock x(rhs.rows(), rhs.cols());
  DenseBlock r = timed(precond, rhs);
  const double bnorm = frobenius(r);
  rep.residual_history.push_back(bnorm == 0.0 ? 0.0 : 1.0);
  rep.converged = bnorm == 0.0;

  const std::size_t cycle = cfg.restart.value_or(cfg.max_iter);
  std::size_t peak_basis = 0;
  double beta = bnorm;

  while (!rep.converged && rep.iterations < cfg.max_iter) {
    const std::size_t m = std::min(cycle, cfg.max_iter - rep.iterations);
    std::vector<DenseBlock> v;
    v.push_back(r);
    v.back() *= 1.0 / beta;
    std::vector<std::vector<cplx>> h;  // rotated Hessenberg columns
    std::vector<Givens> rot;
    std::vector<cplx> g(m + 1, 0.0);
    g[0] = beta;

    std::size_t j = 0;
    while (j < m) {
      DenseBlock w = timed(precond, timed(a, v[j]));
      const detail::Stopwatch ortho;
      const double w0 = frobenius(w);
      std::vector<cplx> col(j + 2, 0.0);
      for (std::size_t i = 0; i <= j; ++i) {
        col[i] = inner(v[i].values(), w.values());
        axpy(-col[i], v[i].values(), w.values());
      }
      const double hn = frobenius(w);
      col[j + 1] = hn;
      for (std::size_t i = 0; i < j; ++i) rot[i].apply(col[i], col[i + 1]);
      cplx diag;
      rot.push_back(make_givens(col[j], col[j + 1], diag));
      col[j] = diag;
      col[j + 1] = 0.0;
      rot[j].apply(g[j], g[j + 1]);
      h.push_back(std::move(col));
      ++j;
      ++rep.iterations;

      const double res = std::abs(g[j]) / bnorm;
      rep.residual_history.push_back(res);
      const bool lucky = hn <= kBreakdown * w0;
      if (!lucky && j < m) {
        w *= 1.0 / hn;
        v.push_back(std::move(w));
      }
      rep.timings.orthogonalization += ortho.seconds();
      if (res <= cfg.tol || lucky) {
        rep.converged = true;
        break;
      }
    }

    // Back substitution on the triangular factor, then x += V y.
    const detail::Stopwatch ortho;
    std::vector<cplx> y(j);
    for (std::size_t i = j; i-- > 0;) {
      cplx s = g[i];
      for (std::size_t k = i + 1; k < j; ++k) s -= h[k][i] * y[k];
      if (h[i][i] == cplx(0.0)) fail(ErrorCode::SingularMatrix, "GMRES least-squares factor is singular");
      y[i] = s / h[i][i];
    }
    for (std::size_t i = 0; i < j; ++i) axpy(y[i], v[i].values(), x.values());
    rep.timings.orthogonalization += ortho.seconds();
    peak_basis = std::max(peak_basis, j);

    if (rep.converged || rep.iterations >= cfg.max_iter) break;
    r = timed(precond, rhs - timed(a, x));
    beta = frobenius(r);
    if (beta / bnorm <= cfg.tol) rep.converged = true;
  }

  const DenseBlock res = rhs - timed(a, x);
  const double rn = frobenius(rhs);
  rep.true_residual = rn == 0.0 ? frobenius(res) : frobenius(res) / rn;
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    const double bc = frobenius(rhs.col_range(c, 1));
    const double rc = frobenius(res.col_range(c, 1));
    rep.column_residuals.push_back(bc == 0.0 ? rc : rc / bc);
  }
  rep.memory.krylov = peak_basis * rhs.size() * kBytesPerScalar;
  rep.timings.total = total.seconds();
  return {std::move(x), std::move(rep)};
}

LinearMap as_map(const BorderedOperator& op) {
  return [&op](const DenseBlock& x) { return op.apply(x); };
}

LinearMap as_map(const Preconditioner& p) {
  return [&p](const DenseBlock& x) { return apply_precond(p, x); };
}

}  // namespace toepsolve
