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
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace ppcomp {

/// Cosine-uniform angular grid: cos(angles[i]) = 1 - 2 i / G, i = 0..G-1.
struct AngularGrid {
    std::vector<double> angles;

    std::size_t size() const { return angles.size(); }
};

/// Half-distances to the neighbouring grid points, in radians. The cell of
/// grid point t is [t - lower, t + upper].
struct PerturbationBounds {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return lower + upper; }
};

struct CellBounds {
    PerturbationBounds rx;
    PerturbationBounds tx;
};

AngularGrid build_grid(std::size_t size);

/// Throws std::out_of_range for index >= grid.size().
PerturbationBounds perturbation_bounds(const AngularGrid& grid, std::size_t index);

/// Index of the cell containing theta, using half-open cells [lo, hi). Returns
/// grid.size() when theta lies outside every cell.
std::size_t locate_cell(const AngularGrid& grid, double theta);

/// vec(a_UE(rx) a_BS(tx)^H) = conj(a_BS(tx)) kron a_UE(rx), length M*N.
CVector atom(double theta_rx, double theta_tx, ArrayDims dims);
CVector atom_derivative_rx(double theta_rx, double theta_tx, ArrayDims dims);
CVector atom_derivative_tx(double theta_rx, double theta_tx, ArrayDims dims);

/// Virtual-channel dictionary Psi = conj(A_BS) kron A_UE.
///
/// Column j pairs receive index j % G_UE with transmit index j / G_UE, i.e.
/// j = i_tx * G_UE + i_rx, which is the column-major vec() of a virtual
/// channel whose rows are indexed by AoA.
struct Dictionary {
    AngularGrid grid_rx;
    AngularGrid grid_tx;
    ArrayDims dims;
    CMatrix steering_ue; // N x G_UE
    CMatrix steering_bs; // M x G_BS
    CMatrix atoms;       // M*N x G_UE*G_BS

    std::size_t size() const { return grid_rx.size() * grid_tx.size(); }
    std::size_t column_index(std::size_t i_rx, std::size_t i_tx) const
    {
        return i_tx * grid_rx.size() + i_rx;
    }
    std::size_t rx_index(std::size_t j) const { return j % grid_rx.size(); }
    std::size_t tx_index(std::size_t j) const { return j / grid_rx.size(); }
    AnglePair angles(std::size_t j) const
    {
        return {grid_rx.angles.at(rx_index(j)), grid_tx.angles.at(tx_index(j))};
    }
    CellBounds bounds(std::size_t j) const
    {
        return {perturbation_bounds(grid_rx, rx_index(j)),
                perturbation_bounds(grid_tx, tx_index(j))};
    }
};

Dictionary build_dictionary(const AngularGrid& grid_rx, const AngularGrid& grid_tx, ArrayDims dims);

/// Hybrid training operator phi = F^T kron W^H, (M_RF*N_RF) x (M*N).
struct SensingOperator {
    CMatrix f;   // M x M_RF precoders
    CMatrix w;   // N x N_RF combiners
    CMatrix phi;
    Eigen::Index rank = 0;

    std::size_t measurements() const { return static_cast<std::size_t>(phi.rows()); }
    bool full_rank() const { return rank == std::min(phi.rows(), phi.cols()); }
};

/// Unit-modulus random phases: F entries exp(j u)/sqrt(M), W entries exp(j v)/sqrt(N).
SensingOperator build_sensing(std::size_t n_bs, std::size_t n_rf_bs, std::size_t n_ue,
                              std::size_t n_rf_ue, Rng& rng);

/// Wraps explicit precoder/combiner banks.
SensingOperator make_sensing(CMatrix f, CMatrix w);

/// phi * Psi, computed through the Kronecker factors
/// (F^T conj(A_BS)) kron (W^H A_UE).
CMatrix composed_dictionary(const Dictionary& dict, const SensingOperator& sensing);

} // namespace ppcomp
