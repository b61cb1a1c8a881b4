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

#include "toepsolve/toepsolve.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <new>
#include <random>
#include <string>

#include "stopwatch.hpp"
#include "toepsolve/error.hpp"
#include "toepsolve/problems.hpp"
#include "toepsolve/solvers.hpp"

using namespace toepsolve;

struct tps_problem {
  BorderedSystem sys;
};

struct tps_solution {
  DenseBlock x;
  SolveReport rep;
  double construction = 0.0;
  double solve = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
};

namespace {

thread_local std::string g_last_error;

tps_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return TPS_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return TPS_ERR_DIMENSION_MISMATCH;
    case ErrorCode::ShapeError: return TPS_ERR_SHAPE;
    case ErrorCode::SingularMatrix: return TPS_ERR_SINGULAR_MATRIX;
    case ErrorCode::SingularBlock: return TPS_ERR_SINGULAR_BLOCK;
    case ErrorCode::SingularDenominator: return TPS_ERR_SINGULAR_DENOMINATOR;
    case ErrorCode::SingularSchurComplement: return TPS_ERR_SINGULAR_SCHUR_COMPLEMENT;
    case ErrorCode::MissingOffset: return TPS_ERR_MISSING_OFFSET;
    case ErrorCode::BlockShapeMismatch: return TPS_ERR_BLOCK_SHAPE_MISMATCH;
    case ErrorCode::InvalidSpec: return TPS_ERR_INVALID_SPEC;
    case ErrorCode::IndexOutOfRange: return TPS_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::TooLargeForOracle: return TPS_ERR_TOO_LARGE_FOR_ORACLE;
    case ErrorCode::IoError: return TPS_ERR_IO;
    case ErrorCode::FormatVersionMismatch: return TPS_ERR_FORMAT_VERSION;
    case ErrorCode::ChecksumMismatch: return TPS_ERR_CHECKSUM;
    case ErrorCode::NoConvergence: return TPS_ERR_NO_CONVERGENCE;
  }
  return TPS_ERR_INTERNAL;
}

template <typename F>
tps_status guarded(F&& body) {
  g_last_error.clear();
  try {
    (void)thread_count();  // applies TOEPSOLVE_THREADS before the first parallel region
    return body();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TPS_ERR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TPS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

ArrayProblemSpec to_spec(const tps_problem_spec& s) {
  ArrayProblemSpec spec;
  spec.ny = s.ny;
  spec.nx = s.nx;
  spec.ne = s.ne;
  spec.nb = s.nb;
  spec.wavenumber = s.wavenumber;
  spec.pitch = s.pitch;
  spec.regularization = s.regularization;
  spec.diagonal_shift = s.diagonal_shift;
  spec.seed = s.seed;
  return spec;
}

tps_problem_spec from_spec(const ArrayProblemSpec& s) {
  return {s.ny, s.nx, s.ne, s.nb, s.wavenumber, s.pitch, s.regularization, s.diagonal_shift,
          s.seed};
}

PrecondKind to_kind(tps_precond p) {
  switch (p) {
    case TPS_PRECOND_NONE: return PrecondKind::None;
    case TPS_PRECOND_PK: return PrecondKind::PK;
    case TPS_PRECOND_PZ: return PrecondKind::PZ;
    case TPS_PRECOND_FULL: return PrecondKind::Full;
  }
  fail(ErrorCode::InvalidArgument, "unknown preconditioner " + std::to_string(int(p)));
}

Preconditioner make_precond(const BorderedSystem& sys, tps_precond p, std::size_t cap) {
  const PrecondKind kind = to_kind(p);
  return kind == PrecondKind::Full ? build_full(sys, cap) : build_preconditioner(sys, kind);
}

// Runs the configured multi-RHS strategy and returns (x, report).
SolveResult run_krylov(const LinearMap& a, const LinearMap& p, const DenseBlock& v,
                       const GmresConfig& cfg, tps_rhs_mode mode) {
  if (mode == TPS_RHS_SEQUENTIAL) {
    SequentialResult r = solve_multi_rhs_sequential(a, p, v, cfg);
    return {std::move(r.x), std::move(r.report)};
  }
  if (mode != TPS_RHS_VECTORIZED) fail(ErrorCode::InvalidArgument, "unknown rhs mode");
  return solve_multi_rhs_vectorized(a, p, v, cfg);
}

size_t copy_out(const std::vector<double>& src, double* out, size_t capacity) {
  if (out != nullptr) std::copy_n(src.begin(), std::min(capacity, src.size()), out);
  return src.size();
}

}  // namespace

extern "C" {

const char* tps_version(void) { return TOEPSOLVE_VERSION_STRING; }

const char* tps_status_name(tps_status status) {
  switch (status) {
    case TPS_OK: return "ok";
    case TPS_ERR_NO_CONVERGENCE: return "NoConvergence";
    case TPS_ERR_OUT_OF_MEMORY: return "OutOfMemory";
    case TPS_ERR_INTERNAL: return "Internal";
    default: break;
  }
  if (status > TPS_OK && status < TPS_ERR_NO_CONVERGENCE) {
    return to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  }
  return "Unknown";
}

const char* tps_last_error(void) { return g_last_error.c_str(); }

void tps_set_threads(int threads) { set_thread_count(threads); }
int tps_get_threads(void) { return thread_count(); }

tps_problem_spec tps_problem_spec_default(size_t ny, size_t nx, size_t ne, uint64_t seed) {
  return from_spec(ArrayProblemSpec::with_defaults(ny, nx, ne, seed));
}

tps_status tps_problem_generate(const tps_problem_spec* spec, tps_problem** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = new tps_problem{generate(to_spec(*spec))};
    return TPS_OK;
  });
}

tps_status tps_problem_load(const char* path, tps_problem** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tps_problem{load(path)};
    return TPS_OK;
  });
}

tps_status tps_problem_save(const tps_problem* problem, const char* path) {
  return guarded([&] {
    require(problem, "problem");
    require(path, "path");
    save(problem->sys, path);
    return TPS_OK;
  });
}

void tps_problem_free(tps_problem* problem) { delete problem; }

tps_status tps_problem_get_spec(const tps_problem* problem, tps_problem_spec* out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    *out = from_spec(problem->sys.spec);
    return TPS_OK;
  });
}

size_t tps_problem_dimension(const tps_problem* problem) {
  return problem == nullptr ? 0 : problem->sys.dimension();
}

tps_status tps_problem_checksum(const tps_problem* problem, uint64_t* out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    const std::vector<std::uint8_t> bytes = serialize(problem->sys);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(bytes[bytes.size() - 8 + i]) << (8 * i);
    *out = v;
    return TPS_OK;
  });
}

tps_solve_options tps_solve_options_default(void) {
  tps_solve_options o;
  o.method = TPS_METHOD_MLFFT;
  o.precond = TPS_PRECOND_PK;
  o.rhs_mode = TPS_RHS_VECTORIZED;
  o.tol = 1e-3;
  o.max_iter = 1000;
  o.restart = 0;
  o.rhs_index = -1;
  o.feed_index = 0;
  o.oracle_cap = kDefaultOracleCap;
  return o;
}

tps_status tps_solve(const tps_problem* problem, const tps_solve_options* options,
                     tps_solution** out) {
  return guarded([&] {
    require(problem, "problem");
    require(options, "options");
    require(out, "out");
    *out = nullptr;
    const BorderedSystem& sys = problem->sys;
    const tps_solve_options& o = *options;

    const ExcitationSet ex = build_excitations(sys, o.feed_index);
    DenseBlock v = ex.v;
    if (o.rhs_index >= 0) {
      if (static_cast<std::size_t>(o.rhs_index) >= ex.v.cols()) {
        fail(ErrorCode::IndexOutOfRange, "rhs index " + std::to_string(o.rhs_index) +
                                             " outside " + std::to_string(ex.v.cols()) +
                                             " excitations");
      }
      v = ex.v.col_range(static_cast<std::size_t>(o.rhs_index), 1);
    }
    GmresConfig cfg{o.tol, o.max_iter, {}};
    if (o.restart > 0) cfg.restart = o.restart;

    auto sol = std::make_unique<tps_solution>();
    switch (o.method) {
      case TPS_METHOD_DENSE: {
        SolveResult r = dense_solve(sys, v, o.oracle_cap);
        sol->construction = r.report.timings.precond_build;
        sol->solve = r.report.timings.total - sol->construction;
        sol->x = std::move(r.x);
        sol->rep = std::move(r.report);
        break;
      }
      case TPS_METHOD_RYBICKI: {
        SolveResult r = schur_solve(sys, v, InnerSolver::Rybicki);
        sol->construction = r.report.timings.precond_build;
        sol->solve = r.report.timings.total;  // includes the level-1 fill
        sol->x = std::move(r.x);
        sol->rep = std::move(r.report);
        break;
      }
      case TPS_METHOD_GMRES_DENSE:
      case TPS_METHOD_MLFFT: {
        const detail::Stopwatch build;
        std::unique_ptr<BorderedOperator> op;
        DenseBlock z;
        LinearMap a;
        if (o.method == TPS_METHOD_MLFFT) {
          op = std::make_unique<BorderedOperator>(sys);
          a = as_map(*op);
        } else {
          z = assemble_full(sys, o.oracle_cap);
          a = [&z](const DenseBlock& x) { return matmul(z, x); };
        }
        const Preconditioner p = make_precond(sys, o.precond, o.oracle_cap);
        sol->construction = build.seconds();
        SolveResult r = run_krylov(a, as_map(p), v, cfg, o.rhs_mode);
        sol->solve = r.report.timings.total;
        sol->residual = r.report.final_residual();
        sol->x = std::move(r.x);
        sol->rep = std::move(r.report);
        sol->rep.timings.precond_build = sol->construction;
        sol->rep.memory.preconditioner = p.stored_scalars() * kBytesPerScalar;
        break;
      }
      default:
        fail(ErrorCode::InvalidArgument, "unknown method " + std::to_string(int(o.method)));
    }
    sol->rep.memory.generator = generator_bytes(sys.spec);
    sol->rep.memory.dense_equivalent = dense_bytes(sys.spec);

    if (std::isnan(sol->rep.true_residual)) {
      // Direct methods: residual through the fast operator, outside the timings.
      const DenseBlock res = v - BorderedOperator(sys).apply(sol->x);
      sol->rep.true_residual = frobenius(res) / frobenius(v);
      sol->rep.column_residuals.clear();
      for (std::size_t c = 0; c < v.cols(); ++c) {
        sol->rep.column_residuals.push_back(frobenius(res.col_range(c, 1)) /
                                            frobenius(v.col_range(c, 1)));
      }
    }
    const bool converged = sol->rep.converged;
    const std::size_t iterations = sol->rep.iterations;
    *out = sol.release();
    if (!converged) {
      char tol[32];
      std::snprintf(tol, sizeof tol, "%g", o.tol);
      g_last_error = std::string("GMRES did not reach tol ") + tol + " in " +
                     std::to_string(iterations) + " iterations";
      return TPS_ERR_NO_CONVERGENCE;
    }
    return TPS_OK;
  });
}

void tps_solution_free(tps_solution* solution) { delete solution; }

tps_status tps_solution_report(const tps_solution* solution, tps_report* out) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    const SolveReport& r = solution->rep;
    *out = tps_report{};
    out->rows = solution->x.rows();
    out->cols = solution->x.cols();
    out->iterations = r.iterations;
    out->converged = r.converged ? 1 : 0;
    out->residual = solution->residual;
    out->true_residual = r.true_residual;
    out->construction_seconds = solution->construction;
    out->solve_seconds = solution->solve;
    out->matvec_seconds = r.timings.matvec_total;
    out->orthogonalization_seconds = r.timings.orthogonalization;
    out->mem_generator = r.memory.generator;
    out->mem_dense_equivalent = r.memory.dense_equivalent;
    out->mem_krylov = r.memory.krylov;
    out->mem_preconditioner = r.memory.preconditioner;
    out->mem_level1 = r.memory.level1;
    return TPS_OK;
  });
}

size_t tps_solution_history(const tps_solution* solution, double* out, size_t capacity) {
  return solution == nullptr ? 0 : copy_out(solution->rep.residual_history, out, capacity);
}

size_t tps_solution_column_residuals(const tps_solution* solution, double* out,
                                     size_t capacity) {
  return solution == nullptr ? 0 : copy_out(solution->rep.column_residuals, out, capacity);
}

tps_status tps_solution_currents(const tps_solution* solution, double* out, size_t capacity) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    const std::size_t need = 2 * solution->x.size();
    if (capacity < need) {
      fail(ErrorCode::DimensionMismatch, "need " + std::to_string(need) + " doubles, got " +
                                             std::to_string(capacity));
    }
    const auto values = solution->x.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[2 * i] = values[i].real();
      out[2 * i + 1] = values[i].imag();
    }
    return TPS_OK;
  });
}

tps_status tps_solution_save(const tps_solution* solution, const char* path) {
  return guarded([&] {
    require(solution, "solution");
    require(path, "path");
    save_currents(solution->x, path);
    return TPS_OK;
  });
}

tps_status tps_solution_compare(const tps_solution* a, const tps_solution* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    if (a->x.rows() != b->x.rows() || a->x.cols() != b->x.cols()) {
      fail(ErrorCode::DimensionMismatch, "solutions have different shapes");
    }
    *out = relative_difference(a->x, b->x);
    return TPS_OK;
  });
}

tps_status tps_currents_compare_files(const char* path_a, const char* path_b, double* out) {
  return guarded([&] {
    require(path_a, "path_a");
    require(path_b, "path_b");
    require(out, "out");
    const DenseBlock a = load_currents(path_a);
    const DenseBlock b = load_currents(path_b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      fail(ErrorCode::DimensionMismatch, "current files have different shapes");
    }
    *out = relative_difference(a, b);
    return TPS_OK;
  });
}

tps_status tps_time_matvec(const tps_problem* problem, size_t repeats, double* out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    if (repeats == 0) fail(ErrorCode::InvalidArgument, "repeats must be >= 1");
    const SpectralOperator op = precompute_spectral(problem->sys.gen);
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    DenseBlock u(op.dimension(), 1);
    for (auto& z : u.values()) z = cplx(uni(rng), uni(rng));
    (void)matvec(op, u);  // plan creation and first touch
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < repeats; ++i) {
      const detail::Stopwatch t;
      const DenseBlock r = matvec(op, u);
      best = std::min(best, t.seconds());
      if (!r.all_finite()) fail(ErrorCode::InvalidArgument, "non-finite product");
    }
    *out = best;
    return TPS_OK;
  });
}

tps_spectrum_options tps_spectrum_options_default(void) {
  tps_spectrum_options o;
  o.precond = TPS_PRECOND_PK;
  o.count = 200;
  o.oversample = 10;
  o.power_iters = 2;
  o.seed = 0;
  return o;
}

tps_status tps_spectrum(const tps_problem* problem, const tps_spectrum_options* options,
                        double* values, size_t capacity) {
  return guarded([&] {
    require(problem, "problem");
    require(options, "options");
    require(values, "values");
    if (capacity < options->count) {
      fail(ErrorCode::DimensionMismatch, "output holds " + std::to_string(capacity) +
                                             " values, " + std::to_string(options->count) +
                                             " requested");
    }
    const BorderedSystem& sys = problem->sys;
    const BorderedOperator op(sys);
    const Preconditioner p = make_precond(sys, options->precond, kDefaultOracleCap);
    const auto sv = spectrum_estimate(
        op, p, {options->count, options->oversample, options->power_iters, options->seed});
    std::copy(sv.begin(), sv.end(), values);
    return TPS_OK;
  });
}

}  // extern "C"
