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

#include "grid.hpp"
#include "rng.hpp"
#include "steering.hpp"
#include "types.hpp"

namespace ppcomp {

enum class ArrayRole { BS, UE };

/// Half-wavelength uniform linear array.
struct ArrayGeometry {
    std::size_t n_antennas = 1;
    ArrayRole role = ArrayRole::BS;
};

/// Multipath component angles. Path p = k * L + l for cluster k, path l.
struct MpcSet {
    std::size_t n_clusters = 1;
    std::size_t paths_per_cluster = 1;
    std::vector<double> aoa;
    std::vector<double> aod;
    double beta = 1.0;

    std::size_t n_paths() const { return n_clusters * paths_per_cluster; }
    AnglePair path(std::size_t p) const { return {aoa[p], aod[p]}; }
};

/// Ground-truth channel. channel_matrices[t] is N x M (UE rows, BS columns).
struct ChannelRealization {
    MpcSet mpcs;
    ArrayDims dims;
    CMatrix gains; // n_paths x T
    std::vector<CMatrix> channel_matrices;

    std::size_t snapshots() const { return static_cast<std::size_t>(gains.cols()); }
    /// Column-stacked vec(H_t).
    CVector vec_channel(std::size_t t) const;
};

/// Compressed measurements, one column per snapshot.
struct SnapshotSet {
    CMatrix measurements; // m x T
    double noise_variance = 0.0;

    std::size_t snapshots() const { return static_cast<std::size_t>(measurements.cols()); }
    std::size_t length() const { return static_cast<std::size_t>(measurements.rows()); }
};

/// Draws K*L angle pairs i.i.d. uniform on [0, pi); beta = sqrt(K*L).
MpcSet draw_mpcs(std::size_t n_clusters, std::size_t paths_per_cluster, Rng& rng);

/// Same structure with angles drawn uniformly from the grid points.
MpcSet draw_on_grid_mpcs(std::size_t n_clusters, std::size_t paths_per_cluster,
                         const AngularGrid& grid_rx, const AngularGrid& grid_tx, Rng& rng);

/// H_t = (1/beta) * sum_p gains(p, t) * a_UE(aoa_p) a_BS(aod_p)^H.
ChannelRealization realize_channel_with_gains(const MpcSet& mpcs, ArrayGeometry bs,
                                              ArrayGeometry ue, CMatrix gains);

/// Gains i.i.d. CN(0, 1), drawn snapshot by snapshot so a shorter record
/// from the same seed is a prefix of a longer one.
ChannelRealization realize_channel(const MpcSet& mpcs, ArrayGeometry bs, ArrayGeometry ue,
                                   std::size_t n_snapshots, Rng& rng);

/// y_t = phi * vec(H_t) + (I_{M_RF} kron W^H) n_t with n_t ~ CN(0, sigma2 I).
SnapshotSet generate_snapshots(const ChannelRealization& chan, const SensingOperator& phi,
                               double sigma2, Rng& rng);

/// Noise-free part phi * vec(H_t) for every snapshot.
CMatrix noiseless_measurements(const ChannelRealization& chan, const SensingOperator& phi);

} // namespace ppcomp
