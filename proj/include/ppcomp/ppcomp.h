// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
/*
 * ppcomp C API.
 *
 * Off-grid aware spatial covariance estimation for hybrid MIMO training:
 * the COMP baseline, the perturbed variant PPCOMP, and the Monte-Carlo
 * sweep driver. All objects are opaque handles; every fallible call
 * returns a ppc_status and leaves a message retrievable through
 * ppc_last_error() on the calling thread.
 *
 * Complex matrices cross the boundary as interleaved (re, im) doubles in
 * column-major order, so an m x n matrix occupies 2*m*n doubles.
 */
#ifndef PPCOMP_PPCOMP_H
#define PPCOMP_PPCOMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(PPC_BUILDING_LIBRARY)
#define PPC_API __attribute__((visibility("default")))
#else
#define PPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ppc_status {
    PPC_OK = 0,
    PPC_ERR_INVALID_ARGUMENT = 1,
    PPC_ERR_DIMENSION = 2,
    PPC_ERR_NOT_HERMITIAN = 3,
    PPC_ERR_CONFIG = 4,
    PPC_ERR_IO = 5,
    PPC_ERR_CHECK_FAILED = 6,
    PPC_ERR_INTERNAL = 7
} ppc_status;

typedef enum ppc_algorithm { PPC_ALG_COMP = 0, PPC_ALG_PPCOMP = 1 } ppc_algorithm;

typedef enum ppc_gamma_mode { PPC_GAMMA_JOINT = 0, PPC_GAMMA_PER_PAIR = 1 } ppc_gamma_mode;

typedef struct ppc_config ppc_config;
typedef struct ppc_estimate ppc_estimate;

typedef struct ppc_solver_options {
    double epsilon_rel;
    size_t k_max;
    size_t p_max;
    double step_init;
    double step_shrink;
    double grad_tol;
    ppc_gamma_mode gamma_mode;
} ppc_solver_options;

typedef struct ppc_sweep_summary {
    size_t rows;
    size_t failed;
} ppc_sweep_summary;

typedef struct ppc_smoke_summary {
    int passed;
    double min_eta;
    size_t rows;
    size_t failed;
} ppc_smoke_summary;

PPC_API const char* ppc_version(void);

/* Message for the most recent failure on this thread ("" if none). */
PPC_API const char* ppc_last_error(void);

PPC_API const char* ppc_status_string(ppc_status status);

/* ---- experiment configuration ---------------------------------------- */

PPC_API ppc_status ppc_config_load(const char* path, ppc_config** out);
PPC_API ppc_status ppc_config_parse(const char* json_text, ppc_config** out);
PPC_API void ppc_config_free(ppc_config* cfg);
PPC_API ppc_status ppc_config_set_master_seed(ppc_config* cfg, uint64_t seed);
/* Number of raw.csv rows the sweep will emit. */
PPC_API ppc_status ppc_config_row_count(const ppc_config* cfg, size_t* rows);

/* ---- sweeps ------------------------------------------------------------ */

/* Runs the sweep and writes raw.csv, agg.csv and meta.json into out_dir.
 * workers == 0 uses the hardware concurrency. */
PPC_API ppc_status ppc_run_sweep(const ppc_config* cfg, const char* out_dir, unsigned workers,
                                 ppc_sweep_summary* summary);

/* On-grid noiseless self-check. Returns PPC_ERR_CHECK_FAILED when any
 * estimate falls below eta = 0.99; summary is filled either way. */
PPC_API ppc_status ppc_smoke(unsigned workers, ppc_smoke_summary* summary);

/* ---- direct estimation ------------------------------------------------- */

/* Defaults with k_max = 2 * n_paths. */
PPC_API void ppc_solver_options_default(size_t n_paths, ppc_solver_options* opts);

/* Estimates the M*N x M*N channel covariance from an m x m measurement
 * covariance r_y and the m x (M*N) sensing operator phi, over cosine-uniform
 * grids of grid_ue AoA and grid_bs AoD points. opts may be NULL. */
PPC_API ppc_status ppc_estimate_covariance(ppc_algorithm algorithm, const double* r_y, size_t m,
                                           const double* phi, size_t n_bs, size_t n_ue,
                                           size_t grid_ue, size_t grid_bs,
                                           const ppc_solver_options* opts, ppc_estimate** out);
PPC_API void ppc_estimate_free(ppc_estimate* est);
/* M*N. */
PPC_API size_t ppc_estimate_dimension(const ppc_estimate* est);
/* Copies the covariance into out (2 * dim * dim doubles). */
PPC_API ppc_status ppc_estimate_covariance_copy(const ppc_estimate* est, double* out, size_t len);
PPC_API size_t ppc_estimate_support_size(const ppc_estimate* est);
/* Fills up to capacity entries of dictionary indices and final angles. */
PPC_API ppc_status ppc_estimate_support(const ppc_estimate* est, size_t* indices, double* aoa,
                                        double* aod, size_t capacity);
/* |R_res|_F^2 / |R_y|_F^2 after the last outer iteration. */
PPC_API double ppc_estimate_relative_residual(const ppc_estimate* est);

/* ---- metrics ----------------------------------------------------------- */

PPC_API ppc_status ppc_relative_efficiency(const double* r_hat, const double* r_true, size_t dim,
                                           size_t rank, double* eta);
PPC_API ppc_status ppc_nmse(const double* r_hat, const double* r_true, size_t dim, double* out);

#ifdef __cplusplus
}
#endif

#endif /* PPCOMP_PPCOMP_H */
