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
#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace ppcomp {

namespace {

// Columns of the Hermitian input's singular vectors, largest singular value
// first. Equal singular values keep the eigensolver's order.
CMatrix top_singular_vectors(const CMatrix& x, std::size_t rank)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(x));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("relative_efficiency: eigendecomposition failed");
    const RVector& vals = eig.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(vals.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(vals(a)) > std::abs(vals(b));
    });
    CMatrix u(x.rows(), static_cast<Eigen::Index>(rank));
    for (std::size_t i = 0; i < rank; ++i)
        u.col(static_cast<Eigen::Index>(i)) = eig.eigenvectors().col(order[i]);
    return u;
}

} // namespace

GroundTruthCovariance true_covariance(const ChannelRealization& chan, TruthSource source)
{
    const std::size_t n_paths = chan.mpcs.n_paths();
    const auto dim = static_cast<Eigen::Index>(chan.dims.channel_length());
    CMatrix atoms(dim, static_cast<Eigen::Index>(n_paths));
    for (std::size_t p = 0; p < n_paths; ++p) {
        const AnglePair a = chan.mpcs.path(p);
        atoms.col(static_cast<Eigen::Index>(p)) = atom(a.rx, a.tx, chan.dims);
    }
    const double beta2 = chan.mpcs.beta * chan.mpcs.beta;

    GroundTruthCovariance out;
    out.source = source;
    if (source == TruthSource::Ensemble) {
        out.r_h = hermitian_part(atoms * atoms.adjoint() / beta2);
        return out;
    }

    const std::size_t n_snap = chan.snapshots();
    if (n_snap == 0)
        throw std::invalid_argument("true_covariance: no snapshots");
    CMatrix h(dim, static_cast<Eigen::Index>(n_snap));
    for (std::size_t t = 0; t < n_snap; ++t)
        h.col(static_cast<Eigen::Index>(t)) = chan.vec_channel(t);
    CMatrix direct = h * h.adjoint() / static_cast<double>(n_snap);

    const CMatrix gamma = chan.gains * chan.gains.adjoint();
    const CMatrix expanded =
        atoms * gamma * atoms.adjoint() / (static_cast<double>(n_snap) * beta2);

    const double scale = std::max(1.0, direct.norm());
    if ((direct - expanded).norm() > 1e-10 * scale)
        throw std::logic_error("true_covariance: snapshot average and path expansion disagree");

    out.r_h = hermitian_part(direct);
    return out;
}

double relative_efficiency(const CMatrix& r_hat, const CMatrix& r_true, std::size_t rank)
{
    if (r_hat.rows() != r_true.rows() || r_hat.cols() != r_true.cols() ||
        r_true.rows() != r_true.cols())
        throw DimensionError("relative_efficiency: matrices must be square and the same size");
    if (rank == 0 || rank > static_cast<std::size_t>(r_true.rows()))
        throw std::invalid_argument("relative_efficiency: rank must be in [1, dimension]");
    if (r_true.norm() == 0.0)
        throw std::invalid_argument("relative_efficiency: true covariance is zero");

    const CMatrix u_hat = top_singular_vectors(r_hat, rank);
    const CMatrix u = top_singular_vectors(r_true, rank);
    const double num = (u_hat.adjoint() * r_true * u_hat).trace().real();
    const double den = (u.adjoint() * r_true * u).trace().real();
    if (!(den > 0.0))
        throw std::invalid_argument("relative_efficiency: true covariance has no positive power");
    double eta = num / den;
    constexpr double kRoundoff = 1e-10;
    if (eta > 1.0 && eta < 1.0 + kRoundoff)
        eta = 1.0;
    if (eta < 0.0 && eta > -kRoundoff)
        eta = 0.0;
    return eta;
}

double nmse(const CMatrix& r_hat, const CMatrix& r_true)
{
    if (r_hat.rows() != r_true.rows() || r_hat.cols() != r_true.cols())
        throw DimensionError("nmse: matrices differ in shape");
    const double den = r_true.squaredNorm();
    if (den == 0.0)
        throw std::invalid_argument("nmse: true covariance is zero");
    return (r_hat - r_true).squaredNorm() / den;
}

} // namespace ppcomp
