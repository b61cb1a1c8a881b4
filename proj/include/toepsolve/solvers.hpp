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

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "toepsolve/numerics.hpp"
#include "toepsolve/problems.hpp"
#include "toepsolve/toeplitz.hpp"

namespace toepsolve {

inline constexpr std::size_t kBytesPerScalar = sizeof(cplx);

// ---------------------------------------------------------------------------
// Bordered operator

/// Fast action of [[Z_A, Z_B^T], [Z_B, Z_C]] with Z_A applied through its
/// spectral representation.
class BorderedOperator {
 public:
  explicit BorderedOperator(const BorderedSystem& sys);

  std::size_t array_unknowns() const noexcept { return spectral_.dimension(); }
  std::size_t border_unknowns() const noexcept { return zc_.rows(); }
  std::size_t dimension() const noexcept { return array_unknowns() + border_unknowns(); }
  const SpectralOperator& spectral() const noexcept { return spectral_; }

  /// Z x for any number of columns.
  DenseBlock apply(const DenseBlock& x) const;
  /// Z^H x. Uses the transposed generator, which is the generator itself
  /// for transpose-symmetric systems.
  DenseBlock apply_adjoint(const DenseBlock& x) const;

 private:
  SpectralOperator spectral_;
  std::shared_ptr<const SpectralOperator> transposed_;
  DenseBlock zb_;
  DenseBlock zbt_;
  DenseBlock zc_;
  DenseBlock zct_;
};

// ---------------------------------------------------------------------------
// Preconditioners

enum class PrecondKind { None, PK, PZ, Full };

/// Block-diagonal left preconditioner. The array part is tiled by identical
/// segments that share one factorization; the border uses LU(Z_C). `Full`
/// holds the LU of the whole dense matrix and is meant for small checks.
struct Preconditioner {
  PrecondKind kind = PrecondKind::None;
  std::size_t array_unknowns = 0;
  std::size_t border_unknowns = 0;
  std::shared_ptr<const LUFactors> segment_lu;
  std::shared_ptr<const LUFactors> border_lu;

  std::size_t dimension() const noexcept { return array_unknowns + border_unknowns; }
  std::size_t segment_size() const noexcept { return segment_lu ? segment_lu->side() : 0; }
  /// Scalars held by the factors (segment and border).
  std::size_t stored_scalars() const noexcept;
};

Preconditioner build_identity(const BorderedSystem& sys);
/// Element self block R_{0,0}.
Preconditioner build_pk(const BorderedSystem& sys);
/// Row self block: the one-level block-Toeplitz matrix of level-2 offset 0.
Preconditioner build_pz(const BorderedSystem& sys);
Preconditioner build_full(const BorderedSystem& sys, std::size_t oracle_cap = kDefaultOracleCap);
Preconditioner build_preconditioner(const BorderedSystem& sys, PrecondKind kind);

DenseBlock apply_precond(const Preconditioner& p, const DenseBlock& v);
/// P^{-H} v
DenseBlock apply_precond_adjoint(const Preconditioner& p, const DenseBlock& v);

// ---------------------------------------------------------------------------
// GMRES

struct GmresConfig {
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  std::optional<std::size_t> restart;
};

struct PhaseTimings {
  double precond_build = 0.0;
  double matvec_total = 0.0;  // operator and preconditioner applications
  double orthogonalization = 0.0;
  double total = 0.0;
};

struct MemoryEstimate {
  std::size_t generator = 0;
  std::size_t dense_equivalent = 0;
  std::size_t krylov = 0;
  std::size_t preconditioner = 0;
  std::size_t level1 = 0;
};

struct SolveReport {
  std::size_t iterations = 0;
  /// ||P^{-1} r_j|| / ||P^{-1} b|| for j = 0..iterations; entry 0 is the
  /// starting residual.
  std::vector<double> residual_history;
  PhaseTimings timings;
  MemoryEstimate memory;
  bool converged = false;
  /// ||b - A x||_F / ||b||_F over all columns, recomputed at exit.
  double true_residual = std::numeric_limits<double>::quiet_NaN();
  /// The same quantity for each column separately.
  std::vector<double> column_residuals;

  double final_residual() const noexcept {
    return residual_history.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : residual_history.back();
  }
};

using LinearMap = std::function<DenseBlock(const DenseBlock&)>;

struct SolveResult {
  DenseBlock x;
  SolveReport report;
};

/// Left-preconditioned GMRES with modified Gram-Schmidt Arnoldi. The
/// iterate is the whole block `rhs`; with several columns this is the global
/// Krylov method (Frobenius inner products over all columns). Does not throw
/// on non-convergence; check `report.converged`.
SolveResult gmres(const LinearMap& a, const LinearMap& precond, const DenseBlock& rhs,
                  const GmresConfig& cfg);

LinearMap as_map(const BorderedOperator& op);
LinearMap as_map(const Preconditioner& p);

/// One global-Krylov solve over all columns of v.
SolveResult solve_multi_rhs_vectorized(const LinearMap& a, const LinearMap& precond,
                                       const DenseBlock& v, const GmresConfig& cfg);

struct SequentialResult {
  DenseBlock x;
  SolveReport report;  // iterations and krylov bytes are the per-column peak
  std::vector<SolveReport> columns;
};

/// Independent GMRES per column.
SequentialResult solve_multi_rhs_sequential(const LinearMap& a, const LinearMap& precond,
                                            const DenseBlock& v, const GmresConfig& cfg);

// ---------------------------------------------------------------------------
// Direct solvers

/// Assembled one-level block T^[1]_{d2} of side n1 * n0.
DenseBlock assemble_level1_block(const BlockGenerator2L& gen, int d2);
/// T^[1]_n for n = -(n2-1) .. n2-1; element n + n2 - 1 holds offset n.
std::vector<DenseBlock> assemble_level1(const BlockGenerator2L& gen);

/// Called after each completed step with the number of solved leading block
/// rows and the current solution blocks x_1 .. x_M.
using RybickiObserver = std::function<void(std::size_t m, const std::vector<DenseBlock>& x)>;

/// Solves the block-Toeplitz system sum_j R_{i-j} x_j = y_i by the block
/// Rybicki bordering recursion. `blocks` uses the assemble_level1 ordering
/// and y stacks the block rows.
DenseBlock rybicki_solve(const std::vector<DenseBlock>& blocks, const DenseBlock& y,
                         const RybickiObserver& observer = {});

enum class InnerSolver { Rybicki, Dense };

/// Eliminates the array unknowns via the Schur complement of Z_A. The
/// report carries timings (precond_build = level-1 fill) and memory.
SolveResult schur_solve(const BorderedSystem& sys, const DenseBlock& v, InnerSolver inner);

/// Dense LU of the assembled system.
SolveResult dense_solve(const BorderedSystem& sys, const DenseBlock& v,
                        std::size_t oracle_cap = kDefaultOracleCap);

// ---------------------------------------------------------------------------
// Spectrum

struct SpectrumConfig {
  std::size_t count = 10;
  std::size_t oversample = 10;
  std::size_t power_iters = 2;
  std::uint64_t seed = 0;
};

/// Randomized SVD estimate of the leading singular values of P^{-1} Z,
/// descending.
std::vector<double> spectrum_estimate(const BorderedOperator& op, const Preconditioner& p,
                                      const SpectrumConfig& cfg);

// ---------------------------------------------------------------------------
// Memory tallies

std::size_t generator_bytes(const ArrayProblemSpec& s);
std::size_t dense_bytes(const ArrayProblemSpec& s);
std::size_t level1_bytes(const ArrayProblemSpec& s);

}  // namespace toepsolve
