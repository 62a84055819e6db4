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
#include "channel.hpp"

#include <cmath>
#include <utility>

namespace ppcomp {

CVector steering_vector(double theta, std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("steering_vector: antenna count must be positive");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double c = std::cos(theta);
    CVector a(static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < n; ++m)
        a(static_cast<Eigen::Index>(m)) = scale * std::polar(1.0, kPi * static_cast<double>(m) * c);
    return a;
}

CVector steering_derivative(double theta, std::size_t n)
{
    CVector a = steering_vector(theta, n);
    const double s = std::sin(theta);
    for (std::size_t m = 0; m < n; ++m)
        a(static_cast<Eigen::Index>(m)) *= cdouble(0.0, -kPi * static_cast<double>(m) * s);
    return a;
}

CVector ChannelRealization::vec_channel(std::size_t t) const
{
    const CMatrix& h = channel_matrices.at(t);
    return Eigen::Map<const CVector>(h.data(), h.size());
}

MpcSet draw_mpcs(std::size_t n_clusters, std::size_t paths_per_cluster, Rng& rng)
{
    if (n_clusters == 0 || paths_per_cluster == 0)
        throw std::invalid_argument("draw_mpcs: cluster and path counts must be positive");
    MpcSet s;
    s.n_clusters = n_clusters;
    s.paths_per_cluster = paths_per_cluster;
    const std::size_t n = s.n_paths();
    s.aoa.reserve(n);
    s.aod.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
        s.aoa.push_back(rng.uniform(0.0, kPi));
        s.aod.push_back(rng.uniform(0.0, kPi));
    }
    s.beta = std::sqrt(static_cast<double>(n));
    return s;
}

MpcSet draw_on_grid_mpcs(std::size_t n_clusters, std::size_t paths_per_cluster,
                         const AngularGrid& grid_rx, const AngularGrid& grid_tx, Rng& rng)
{
    if (n_clusters == 0 || paths_per_cluster == 0)
        throw std::invalid_argument("draw_on_grid_mpcs: cluster and path counts must be positive");
    MpcSet s;
    s.n_clusters = n_clusters;
    s.paths_per_cluster = paths_per_cluster;
    const std::size_t n = s.n_paths();
    // distinct grid cells so every path maps to its own atom
    std::vector<std::pair<std::size_t, std::size_t>> used;
    while (s.aoa.size() < n) {
        const std::size_t i_rx = rng.index(grid_rx.size());
        const std::size_t i_tx = rng.index(grid_tx.size());
        bool dup = false;
        for (const auto& u : used)
            dup = dup || (u.first == i_rx && u.second == i_tx);
        if (dup && used.size() < grid_rx.size() * grid_tx.size())
            continue;
        used.emplace_back(i_rx, i_tx);
        s.aoa.push_back(grid_rx.angles[i_rx]);
        s.aod.push_back(grid_tx.angles[i_tx]);
    }
    s.beta = std::sqrt(static_cast<double>(n));
    return s;
}

ChannelRealization realize_channel_with_gains(const MpcSet& mpcs, ArrayGeometry bs,
                                              ArrayGeometry ue, CMatrix gains)
{
    const std::size_t n_paths = mpcs.n_paths();
    if (mpcs.aoa.size() != n_paths || mpcs.aod.size() != n_paths)
        throw DimensionError("realize_channel: angle lists do not match K*L");
    if (static_cast<std::size_t>(gains.rows()) != n_paths || gains.cols() < 1)
        throw DimensionError("realize_channel: gains must be (K*L) x T with T >= 1");

    ChannelRealization chan;
    chan.mpcs = mpcs;
    chan.dims = {bs.n_antennas, ue.n_antennas};
    chan.gains = std::move(gains);

    std::vector<CMatrix> outer;
    outer.reserve(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        outer.push_back(steering_vector(mpcs.aoa[p], ue.n_antennas) *
                        steering_vector(mpcs.aod[p], bs.n_antennas).adjoint());
    }

    const std::size_t n_snap = chan.snapshots();
    chan.channel_matrices.reserve(n_snap);
    for (std::size_t t = 0; t < n_snap; ++t) {
        CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(ue.n_antennas),
                                  static_cast<Eigen::Index>(bs.n_antennas));
        for (std::size_t p = 0; p < n_paths; ++p)
            h += chan.gains(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t)) * outer[p];
        h /= mpcs.beta;
        chan.channel_matrices.push_back(std::move(h));
    }
    return chan;
}

ChannelRealization realize_channel(const MpcSet& mpcs, ArrayGeometry bs, ArrayGeometry ue,
                                   std::size_t n_snapshots, Rng& rng)
{
    if (n_snapshots == 0)
        throw std::invalid_argument("realize_channel: snapshot count must be positive");
    const auto n_paths = static_cast<Eigen::Index>(mpcs.n_paths());
    CMatrix gains(n_paths, static_cast<Eigen::Index>(n_snapshots));
    for (Eigen::Index t = 0; t < gains.cols(); ++t)
        for (Eigen::Index p = 0; p < n_paths; ++p)
            gains(p, t) = rng.complex_normal(1.0);
    return realize_channel_with_gains(mpcs, bs, ue, std::move(gains));
}

CMatrix noiseless_measurements(const ChannelRealization& chan, const SensingOperator& phi)
{
    if (static_cast<std::size_t>(phi.phi.cols()) != chan.dims.channel_length() ||
        static_cast<std::size_t>(phi.f.rows()) != chan.dims.bs ||
        static_cast<std::size_t>(phi.w.rows()) != chan.dims.ue)
        throw DimensionError("sensing operator does not match the channel dimensions");
    const std::size_t n_snap = chan.snapshots();
    CMatrix y(phi.phi.rows(), static_cast<Eigen::Index>(n_snap));
    for (std::size_t t = 0; t < n_snap; ++t)
        y.col(static_cast<Eigen::Index>(t)) = phi.phi * chan.vec_channel(t);
    return y;
}

SnapshotSet generate_snapshots(const ChannelRealization& chan, const SensingOperator& phi,
                               double sigma2, Rng& rng)
{
    if (sigma2 < 0.0)
        throw std::invalid_argument("generate_snapshots: noise variance must be nonnegative");
    SnapshotSet out;
    out.measurements = noiseless_measurements(chan, phi);
    out.noise_variance = sigma2;
    if (sigma2 == 0.0)
        return out;

    const Eigen::Index n_rf_bs = phi.f.cols();
    const Eigen::Index n_ue = phi.w.rows();
    const Eigen::Index n_rf_ue = phi.w.cols();
    const CMatrix wh = phi.w.adjoint();
    CVector n(n_ue);
    for (Eigen::Index t = 0; t < out.measurements.cols(); ++t) {
        // block c of the combined noise is W^H n_{t,c}, matching the row
        // order of F^T kron W^H
        for (Eigen::Index c = 0; c < n_rf_bs; ++c) {
            for (Eigen::Index i = 0; i < n_ue; ++i)
                n(i) = rng.complex_normal(sigma2);
            out.measurements.col(t).segment(c * n_rf_ue, n_rf_ue) += wh * n;
        }
    }
    return out;
}

} // namespace ppcomp
