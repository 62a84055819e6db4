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
#include "ppcomp/ppcomp.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <string>

#include "config.hpp"
#include "estimators.hpp"
#include "experiment.hpp"
#include "metrics.hpp"

struct ppc_config {
    ppcomp::ExperimentConfig cfg;
};

struct ppc_estimate {
    ppcomp::CovarianceEstimate est;
};

namespace {

thread_local std::string g_last_error;

ppc_status fail(ppc_status code, const std::string& what)
{
    g_last_error = what;
    return code;
}

template <class F>
ppc_status guarded(F&& body)
{
    g_last_error.clear();
    try {
        return body();
    } catch (const ppcomp::NotHermitianError& e) {
        return fail(PPC_ERR_NOT_HERMITIAN, e.what());
    } catch (const ppcomp::DimensionError& e) {
        return fail(PPC_ERR_DIMENSION, e.what());
    } catch (const ppcomp::ConfigError& e) {
        return fail(PPC_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(PPC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(PPC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(PPC_ERR_IO, e.what());
    } catch (const std::runtime_error& e) {
        return fail(PPC_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(PPC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PPC_ERR_INTERNAL, "unknown exception");
    }
}

ppcomp::CMatrix read_matrix(const double* data, std::size_t rows, std::size_t cols)
{
    ppcomp::CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t k = 2 * (c * rows + r);
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {data[k], data[k + 1]};
        }
    return m;
}

ppcomp::SolverOptions to_options(const ppc_solver_options& o)
{
    ppcomp::SolverOptions s;
    s.epsilon_rel = o.epsilon_rel;
    s.k_max = o.k_max;
    s.p_max = o.p_max;
    s.step_init = o.step_init;
    s.step_shrink = o.step_shrink;
    s.grad_tol = o.grad_tol;
    s.gamma_mode = o.gamma_mode == PPC_GAMMA_PER_PAIR ? ppcomp::GammaMode::PerPair
                                                          : ppcomp::GammaMode::Joint;
    return s;
}

} // namespace

extern "C" {

const char* ppc_version(void)
{
    return PPCOMP_VERSION_STRING;
}

const char* ppc_last_error(void)
{
    return g_last_error.c_str();
}

const char* ppc_status_string(ppc_status status)
{
    switch (status) {
    case PPC_OK: return "ok";
    case PPC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PPC_ERR_DIMENSION: return "dimension mismatch";
    case PPC_ERR_NOT_HERMITIAN: return "matrix not Hermitian";
    case PPC_ERR_CONFIG: return "configuration error";
    case PPC_ERR_IO: return "I/O error";
    case PPC_ERR_CHECK_FAILED: return "check failed";
    case PPC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

ppc_status ppc_config_load(const char* path, ppc_config** out)
{
    return guarded([&] {
        if (!path || !out)
            return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
        *out = new ppc_config{ppcomp::load_config(path)};
        return PPC_OK;
    });
}

ppc_status ppc_config_parse(const char* json_text, ppc_config** out)
{
    return guarded([&] {
        if (!json_text || !out)
            return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
        *out = new ppc_config{ppcomp::parse_config_text(json_text)};
        return PPC_OK;
    });
}

void ppc_config_free(ppc_config* cfg)
{
    delete cfg;
}

ppc_status ppc_config_set_master_seed(ppc_config* cfg, uint64_t seed)
{
    if (!cfg)
        return fail(PPC_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.master_seed = seed;
    return PPC_OK;
}

ppc_status ppc_config_row_count(const ppc_config* cfg, size_t* rows)
{
    if (!cfg || !rows)
        return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
    *rows = ppcomp::sweep_points(cfg->cfg).size() * cfg->cfg.trials * cfg->cfg.algorithms.size();
    return PPC_OK;
}

ppc_status ppc_run_sweep(const ppc_config* cfg, const char* out_dir, unsigned workers,
                         ppc_sweep_summary* summary)
{
    return guarded([&] {
        if (!cfg || !out_dir)
            return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
        const auto res = ppcomp::run_and_write(cfg->cfg, out_dir, workers);
        if (summary) {
            summary->rows = res.rows.size();
            summary->failed = 0;
            for (const auto& r : res.rows)
                summary->failed += r.failed ? 1 : 0;
        }
        return PPC_OK;
    });
}

ppc_status ppc_smoke(unsigned workers, ppc_smoke_summary* summary)
{
    return guarded([&] {
        const auto rep = ppcomp::run_smoke(workers);
        if (summary) {
            summary->passed = rep.passed ? 1 : 0;
            summary->min_eta = rep.min_eta;
            summary->rows = rep.rows;
            summary->failed = rep.failed;
        }
        if (!rep.passed)
            return fail(PPC_ERR_CHECK_FAILED,
                        "smoke check failed: min eta " + std::to_string(rep.min_eta) + ", " +
                            std::to_string(rep.failed) + " failed rows");
        return PPC_OK;
    });
}

void ppc_solver_options_default(size_t n_paths, ppc_solver_options* opts)
{
    if (!opts)
        return;
    const auto d = ppcomp::SolverOptions::defaults_for(n_paths);
    opts->epsilon_rel = d.epsilon_rel;
    opts->k_max = d.k_max;
    opts->p_max = d.p_max;
    opts->step_init = d.step_init;
    opts->step_shrink = d.step_shrink;
    opts->grad_tol = d.grad_tol;
    opts->gamma_mode = PPC_GAMMA_JOINT;
}

ppc_status ppc_estimate_covariance(ppc_algorithm algorithm, const double* r_y, size_t m,
                                   const double* phi, size_t n_bs, size_t n_ue, size_t grid_ue,
                                   size_t grid_bs, const ppc_solver_options* opts,
                                   ppc_estimate** out)
{
    return guarded([&] {
        if (!r_y || !phi || !out)
            return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
        if (m == 0 || n_bs == 0 || n_ue == 0)
            return fail(PPC_ERR_DIMENSION, "dimensions must be positive");
        if (algorithm != PPC_ALG_COMP && algorithm != PPC_ALG_PPCOMP)
            return fail(PPC_ERR_INVALID_ARGUMENT, "unknown algorithm");
        const ppcomp::CMatrix ry = read_matrix(r_y, m, m);
        const ppcomp::CMatrix ph = read_matrix(phi, m, n_bs * n_ue);
        const ppcomp::Dictionary dict = ppcomp::build_dictionary(
            ppcomp::build_grid(grid_ue), ppcomp::build_grid(grid_bs), {n_bs, n_ue});
        ppcomp::SolverOptions so;
        if (opts)
            so = to_options(*opts);
        const auto alg = algorithm == PPC_ALG_PPCOMP ? ppcomp::Algorithm::PPCOMP
                                                     : ppcomp::Algorithm::COMP;
        *out = new ppc_estimate{ppcomp::estimate(alg, ry, dict, ph, so)};
        return PPC_OK;
    });
}

void ppc_estimate_free(ppc_estimate* est)
{
    delete est;
}

size_t ppc_estimate_dimension(const ppc_estimate* est)
{
    return est ? static_cast<size_t>(est->est.r_h_hat.rows()) : 0;
}

ppc_status ppc_estimate_covariance_copy(const ppc_estimate* est, double* out, size_t len)
{
    if (!est || !out)
        return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
    const auto& r = est->est.r_h_hat;
    const auto n = static_cast<size_t>(r.size());
    if (len < 2 * n)
        return fail(PPC_ERR_DIMENSION, "output buffer too small");
    std::memcpy(out, r.data(), 2 * n * sizeof(double));
    return PPC_OK;
}

size_t ppc_estimate_support_size(const ppc_estimate* est)
{
    return est ? est->est.support.size() : 0;
}

ppc_status ppc_estimate_support(const ppc_estimate* est, size_t* indices, double* aoa, double* aod,
                                size_t capacity)
{
    if (!est)
        return fail(PPC_ERR_INVALID_ARGUMENT, "null estimate");
    const auto& s = est->est.support;
    const size_t n = std::min(capacity, s.size());
    for (size_t i = 0; i < n; ++i) {
        if (indices)
            indices[i] = s.indices[i];
        if (aoa)
            aoa[i] = s.current_angles[i].rx;
        if (aod)
            aod[i] = s.current_angles[i].tx;
    }
    return PPC_OK;
}

double ppc_estimate_relative_residual(const ppc_estimate* est)
{
    return est ? est->est.relative_residual() : 0.0;
}

ppc_status ppc_relative_efficiency(const double* r_hat, const double* r_true, size_t dim,
                                   size_t rank, double* eta)
{
    return guarded([&] {
        if (!r_hat || !r_true || !eta)
            return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
        *eta = ppcomp::relative_efficiency(read_matrix(r_hat, dim, dim), read_matrix(r_true, dim, dim),
                                           rank);
        return PPC_OK;
    });
}

ppc_status ppc_nmse(const double* r_hat, const double* r_true, size_t dim, double* out)
{
    return guarded([&] {
        if (!r_hat || !r_true || !out)
            return fail(PPC_ERR_INVALID_ARGUMENT, "null argument");
        *out = ppcomp::nmse(read_matrix(r_hat, dim, dim), read_matrix(r_true, dim, dim));
        return PPC_OK;
    });
}

} // extern "C"
