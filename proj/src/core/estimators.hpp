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
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "channel.hpp"
#include "grid.hpp"
#include "types.hpp"

namespace ppcomp {

enum class GammaMode {
    Joint,        ///< Gamma = V^+ R (V^+)^H over all selected atoms
    PerPair, ///< per-pair single-vector pseudo-inverses
};

enum class Algorithm { COMP, PPCOMP };

const char* to_string(Algorithm a);

struct SolverOptions {
    double epsilon_rel = 1e-3;
    std::size_t k_max = 8;
    std::size_t p_max = 50;
    double step_init = 0.25;  ///< first step as a fraction of the cell width
    double step_shrink = 0.5; ///< backtracking factor
    double grad_tol = 1e-6;   ///< radians
    double min_rel_decrease = 1e-8;
    std::size_t max_shrinks = 20;
    double collapse_correlation = 0.999;
    GammaMode gamma_mode = GammaMode::Joint;

    /// Defaults with k_max = 2 * n_paths.
    static SolverOptions defaults_for(std::size_t n_paths);
    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Selected atoms and their current fit.
struct SupportState {
    std::vector<std::size_t> indices;
    std::vector<AnglePair> base_angles;
    std::vector<AnglePair> current_angles;
    std::vector<CellBounds> bounds;
    CMatrix gamma; // k x k Hermitian

    std::size_t size() const { return indices.size(); }
    /// Adds dictionary column j at its grid point.
    void push(const Dictionary& dict, std::size_t j);
    /// Lower/upper feasible angle for entry l.
    AnglePair lower_limit(std::size_t l) const;
    AnglePair upper_limit(std::size_t l) const;
    bool feasible(std::size_t l, double slack = 1e-12) const;
};

struct EstimateDiagnostics {
    bool rank_deficient = false;   ///< V lost column rank in some gamma fit
    std::size_t frozen_atoms = 0;  ///< atoms frozen after collapsing onto another
    bool sensing_rank_deficient = false;
};

struct CovarianceEstimate {
    CMatrix r_h_hat;
    SupportState support;
    std::vector<double> residual_history; ///< |R_res|_F^2 after each outer iteration
    std::vector<std::size_t> solver_iterations;
    double initial_energy = 0.0;          ///< |R_y|_F^2
    EstimateDiagnostics diagnostics;

    double final_residual() const
    {
        return residual_history.empty() ? initial_energy : residual_history.back();
    }
    double relative_residual() const
    {
        return initial_energy > 0.0 ? final_residual() / initial_energy : 0.0;
    }
};

/// Accepted iterate of the perturbation solver, for inspection in tests.
struct SolverIterate {
    std::size_t iteration = 0;
    const std::vector<AnglePair>* angles = nullptr;
    double residual = 0.0;
};
using SolverObserver = std::function<void(const SolverIterate&)>;

struct SolverReport {
    std::size_t iterations = 0;
    std::vector<double> residuals; ///< starting point first
    bool rank_deficient = false;
    std::size_t frozen = 0;
};

/// Sample covariance (1/T) sum_t y_t y_t^H. Throws on an empty snapshot set.
CMatrix sample_covariance(const SnapshotSet& snaps);
CMatrix sample_covariance(const CMatrix& measurements);

/// Index of the non-excluded column maximising |d_j^H R d_j|; ties go to the
/// lowest index. Throws std::invalid_argument if every column is excluded.
std::size_t project_select(const CMatrix& r_res, const CMatrix& composed,
                           std::span<const std::size_t> excluded);

struct GammaFit {
    CMatrix gamma;
    bool rank_deficient = false;
};

/// Least-squares weights for compressed atoms (columns of v).
GammaFit gamma_ls(const CMatrix& r_y, const CMatrix& v, GammaMode mode = GammaMode::Joint);

/// Columns phi * a_res(angles_l).
CMatrix compressed_atoms(std::span<const AnglePair> angles, const CMatrix& phi, ArrayDims dims);

/// R_y - V Gamma V^H with V = phi * [a_res(angles_l)].
CMatrix residual_covariance(const CMatrix& r_y, const SupportState& support, const CMatrix& phi,
                            ArrayDims dims);

struct Directions {
    RVector rx;
    RVector tx;
};

/// Negative half-gradient of |R_res|_F^2 with respect to each atom's AoA
/// and AoD, Gamma held fixed.
Directions gradient_directions(const SupportState& support, const CMatrix& r_res,
                               const CMatrix& phi, ArrayDims dims);

/// Alternating Gamma / bounded angle descent on the selected atoms. The
/// returned state has gamma fitted at its final angles.
SupportState perturbation_solver(const CMatrix& r_y, const SupportState& support,
                                 const CMatrix& phi, ArrayDims dims, const SolverOptions& opts,
                                 SolverReport* report = nullptr,
                                 const SolverObserver& observer = {});

/// sum_{l,q} Gamma_lq a_res(l) a_res(q)^H, Hermitian-symmetrised.
CMatrix assemble_covariance(const SupportState& support, ArrayDims dims);

/// Greedy covariance OMP with bounded angle perturbation of the support.
/// composed must equal phi * dict.atoms; pass an empty matrix to have it
/// computed here.
CovarianceEstimate ppcomp(const CMatrix& r_y, const Dictionary& dict, const CMatrix& phi,
                          const SolverOptions& opts, const CMatrix& composed = {});

/// Baseline: same greedy loop with every atom fixed at its grid point.
CovarianceEstimate comp(const CMatrix& r_y, const Dictionary& dict, const CMatrix& phi,
                        const SolverOptions& opts, const CMatrix& composed = {});

CovarianceEstimate estimate(Algorithm alg, const CMatrix& r_y, const Dictionary& dict,
                            const CMatrix& phi, const SolverOptions& opts,
                            const CMatrix& composed = {});

} // namespace ppcomp
