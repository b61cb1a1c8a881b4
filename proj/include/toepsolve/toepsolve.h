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

/* C interface of the toepsolve library. All functions return a tps_status;
 * on failure a description is available from tps_last_error() on the same
 * thread. Objects are opaque and must be released with the matching free. */

#ifndef TOEPSOLVE_TOEPSOLVE_H_
#define TOEPSOLVE_TOEPSOLVE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TOEPSOLVE_BUILDING_LIBRARY)
#define TPS_API __attribute__((visibility("default")))
#else
#define TPS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tps_status {
  TPS_OK = 0,
  TPS_ERR_INVALID_ARGUMENT,
  TPS_ERR_DIMENSION_MISMATCH,
  TPS_ERR_SHAPE,
  TPS_ERR_SINGULAR_MATRIX,
  TPS_ERR_SINGULAR_BLOCK,
  TPS_ERR_SINGULAR_DENOMINATOR,
  TPS_ERR_SINGULAR_SCHUR_COMPLEMENT,
  TPS_ERR_MISSING_OFFSET,
  TPS_ERR_BLOCK_SHAPE_MISMATCH,
  TPS_ERR_INVALID_SPEC,
  TPS_ERR_INDEX_OUT_OF_RANGE,
  TPS_ERR_TOO_LARGE_FOR_ORACLE,
  TPS_ERR_IO,
  TPS_ERR_FORMAT_VERSION,
  TPS_ERR_CHECKSUM,
  TPS_ERR_NO_CONVERGENCE,
  TPS_ERR_OUT_OF_MEMORY,
  TPS_ERR_INTERNAL
} tps_status;

typedef struct tps_problem tps_problem;
typedef struct tps_solution tps_solution;

TPS_API const char* tps_version(void);
TPS_API const char* tps_status_name(tps_status status);
/* Message of the last failed call on this thread; empty after success. */
TPS_API const char* tps_last_error(void);

/* Worker threads for parallel kernels; <= 0 restores the default. */
TPS_API void tps_set_threads(int threads);
TPS_API int tps_get_threads(void);

/* ---- problems ---------------------------------------------------------- */

typedef struct tps_problem_spec {
  size_t ny;
  size_t nx;
  size_t ne;
  size_t nb;
  double wavenumber;
  double pitch;
  double regularization;
  double diagonal_shift;
  uint64_t seed;
} tps_problem_spec;

/* Defaults: nb = 8 (nx + ny), k = pi, pitch 1, a = pitch / 10, shift 1. */
TPS_API tps_problem_spec tps_problem_spec_default(size_t ny, size_t nx, size_t ne,
                                                  uint64_t seed);

TPS_API tps_status tps_problem_generate(const tps_problem_spec* spec, tps_problem** out);
TPS_API tps_status tps_problem_load(const char* path, tps_problem** out);
TPS_API tps_status tps_problem_save(const tps_problem* problem, const char* path);
TPS_API void tps_problem_free(tps_problem* problem);

TPS_API tps_status tps_problem_get_spec(const tps_problem* problem, tps_problem_spec* out);
/* Total unknowns ny nx ne + nb; 0 for a null handle. */
TPS_API size_t tps_problem_dimension(const tps_problem* problem);
/* FNV-1a 64 of the serialized payload, as stored in the file trailer. */
TPS_API tps_status tps_problem_checksum(const tps_problem* problem, uint64_t* out);

/* ---- solving ----------------------------------------------------------- */

typedef enum tps_method {
  TPS_METHOD_DENSE = 0,       /* LU of the assembled matrix */
  TPS_METHOD_GMRES_DENSE = 1, /* GMRES with a dense matvec */
  TPS_METHOD_RYBICKI = 2,     /* block Rybicki + Schur complement */
  TPS_METHOD_MLFFT = 3        /* GMRES with the FFT matvec */
} tps_method;

typedef enum tps_precond {
  TPS_PRECOND_NONE = 0,
  TPS_PRECOND_PK = 1,  /* element self block */
  TPS_PRECOND_PZ = 2,  /* row self block */
  TPS_PRECOND_FULL = 3 /* LU of the whole system; small problems only */
} tps_precond;

typedef enum tps_rhs_mode {
  TPS_RHS_VECTORIZED = 0, /* one global Krylov solve over all columns */
  TPS_RHS_SEQUENTIAL = 1  /* one GMRES per column */
} tps_rhs_mode;

typedef struct tps_solve_options {
  tps_method method;
  tps_precond precond;
  tps_rhs_mode rhs_mode;
  double tol;
  size_t max_iter;
  size_t restart;    /* 0: no restart */
  int64_t rhs_index; /* < 0: every element excited in turn */
  size_t feed_index;
  size_t oracle_cap; /* unknowns above which dense methods refuse */
} tps_solve_options;

TPS_API tps_solve_options tps_solve_options_default(void);

/* On TPS_ERR_NO_CONVERGENCE *out still receives the last iterate. */
TPS_API tps_status tps_solve(const tps_problem* problem, const tps_solve_options* options,
                             tps_solution** out);
TPS_API void tps_solution_free(tps_solution* solution);

typedef struct tps_report {
  size_t rows;
  size_t cols;
  size_t iterations;
  int converged;
  double residual;      /* final preconditioned residual (iterative) */
  double true_residual; /* ||V - Z I||_F / ||V||_F */
  double construction_seconds;
  double solve_seconds;
  double matvec_seconds;
  double orthogonalization_seconds;
  uint64_t mem_generator;
  uint64_t mem_dense_equivalent;
  uint64_t mem_krylov;
  uint64_t mem_preconditioner;
  uint64_t mem_level1;
} tps_report;

TPS_API tps_status tps_solution_report(const tps_solution* solution, tps_report* out);
/* Residual history; returns its length and copies min(length, capacity). */
TPS_API size_t tps_solution_history(const tps_solution* solution, double* out, size_t capacity);
/* Per-column true residuals, same convention. */
TPS_API size_t tps_solution_column_residuals(const tps_solution* solution, double* out,
                                             size_t capacity);
/* Currents as interleaved (re, im) pairs, row-major; capacity in doubles. */
TPS_API tps_status tps_solution_currents(const tps_solution* solution, double* out,
                                         size_t capacity);
TPS_API tps_status tps_solution_save(const tps_solution* solution, const char* path);

/* ||a - b||_F / ||b||_F */
TPS_API tps_status tps_solution_compare(const tps_solution* a, const tps_solution* b,
                                        double* out);
/* Same for two saved current files. */
TPS_API tps_status tps_currents_compare_files(const char* path_a, const char* path_b,
                                              double* out);

/* Fastest of `repeats` single-column products with the FFT array operator,
 * in seconds. */
TPS_API tps_status tps_time_matvec(const tps_problem* problem, size_t repeats, double* out);

/* ---- spectrum ---------------------------------------------------------- */

typedef struct tps_spectrum_options {
  tps_precond precond;
  size_t count;
  size_t oversample;
  size_t power_iters;
  uint64_t seed;
} tps_spectrum_options;

TPS_API tps_spectrum_options tps_spectrum_options_default(void);

/* Leading singular values of P^-1 Z, descending; capacity >= count. */
TPS_API tps_status tps_spectrum(const tps_problem* problem, const tps_spectrum_options* options,
                                double* values, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif /* TOEPSOLVE_TOEPSOLVE_H_ */
