// Copyright 2026 The fctn-rtc Authors
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


/* C interface to the fctn library. Every function returns an fctn_status;
 * on failure fctn_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). Objects are opaque handles
 * released with their _free function; strings returned through char** are
 * released with fctn_string_free. Structured inputs and reports are JSON.
 * Tensors are column-major (first index fastest). */

#ifndef FCTN_FCTN_H
#define FCTN_FCTN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FCTN_API __declspec(dllexport)
#else
#define FCTN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fctn_status {
  FCTN_OK = 0,
  FCTN_INVALID_ARGUMENT = 1,
  FCTN_IO_ERROR = 2,
  FCTN_SOLVER_ABORT = 3,
  FCTN_INTERNAL_ERROR = 4
} fctn_status;

typedef struct fctn_tensor fctn_tensor;
typedef struct fctn_factors fctn_factors;

FCTN_API const char* fctn_last_error(void);
FCTN_API const char* fctn_version(void);
FCTN_API void fctn_string_free(char* s);

/* Tensors. */
FCTN_API fctn_status fctn_tensor_create(size_t order, const size_t* dims, const double* data,
                                        fctn_tensor** out);
FCTN_API void fctn_tensor_free(fctn_tensor* t);
FCTN_API size_t fctn_tensor_order(const fctn_tensor* t);
/* Writes fctn_tensor_order(t) sizes to dims. */
FCTN_API void fctn_tensor_dims(const fctn_tensor* t, size_t* dims);
FCTN_API size_t fctn_tensor_size(const fctn_tensor* t);
FCTN_API const double* fctn_tensor_data(const fctn_tensor* t);
FCTN_API fctn_status fctn_tensor_load(const char* path, fctn_tensor** out);
FCTN_API fctn_status fctn_tensor_save(const fctn_tensor* t, const char* path);

/* FCTN factor sets. A rank matrix is order x order, row-major; only the
 * strict upper triangle is read. */
FCTN_API void fctn_factors_free(fctn_factors* f);
FCTN_API fctn_status fctn_factors_load(const char* dir, fctn_factors** out);
FCTN_API fctn_status fctn_factors_save(const fctn_factors* f, const char* dir);
FCTN_API fctn_status fctn_factors_compose(const fctn_factors* f, fctn_tensor** out);

/* Synthetic exact-rank data: U(0,1) factors and their composition. */
FCTN_API fctn_status fctn_synth(size_t order, const size_t* dims, const size_t* rank_matrix,
                                uint64_t seed, fctn_tensor** x0, fctn_factors** factors);

/* Salt-and-pepper corruption at density sap, then an exact-count uniform
 * mask at sampling_ratio. observed is zero off the mask; mask holds 0/1;
 * e_true is corrupted - x. Any output pointer may be NULL. */
FCTN_API fctn_status fctn_corrupt(const fctn_tensor* x, double sap, double sampling_ratio,
                                  uint64_t seed, fctn_tensor** observed, fctn_tensor** mask,
                                  fctn_tensor** e_true);

/* SVD-based decomposition at the given rank. truncation_json receives
 * {"truncation_error": [...]} when not NULL. */
FCTN_API fctn_status fctn_decompose(const fctn_tensor* x, const size_t* rank_matrix,
                                    fctn_factors** out, char** truncation_json);

/* Robust completion. solver is "rc" or "rnc"; config_json is an overlay
 * over the defaults (NULL for none). out_dir may be NULL; otherwise the run
 * manifest, iteration log and x.fct1 / e.fct1 are written there. report_json
 * receives {"iters", "converged", "lambda", "scale", "wall_time"}. */
FCTN_API fctn_status fctn_solve(const char* solver, const fctn_tensor* observed,
                                const fctn_tensor* mask, const char* config_json,
                                const char* out_dir, fctn_tensor** x, fctn_tensor** e,
                                char** report_json);

/* {"rel_error", "mpsnr", "mssim"} of x against x0; frames on modes
 * (frame_rows, frame_cols), both tensors used as given. */
FCTN_API fctn_status fctn_metrics(const fctn_tensor* x, const fctn_tensor* x0, size_t frame_rows,
                                  size_t frame_cols, char** report_json);

/* One synthetic experiment. spec_json: {"shape", "rank" (integer or
 * matrix), "sampling_ratio", "sap_density", "seed", "solver", "config"}. */
FCTN_API fctn_status fctn_run_experiment(const char* spec_json, const char* out_dir,
                                         char** report_json);

/* Grid sweep. spec_json: {"sizes", "rank_fractions", "sampling_ratios",
 * "sap_densities", "order", "trials", "seed", "solver", "config", "jobs"};
 * missing keys take the defaults. report_json receives the cell table. */
FCTN_API fctn_status fctn_sweep(const char* spec_json, const char* out_dir, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* FCTN_FCTN_H */
