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
#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "steering.hpp"

namespace ppcomp {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector kron(const CVector& a, const CVector& b)
{
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

} // namespace

AngularGrid build_grid(std::size_t size)
{
    if (size < 2)
        throw std::invalid_argument("build_grid: grid size must be at least 2");
    AngularGrid g;
    g.angles.reserve(size);
    const double step = 2.0 / static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i)
        g.angles.push_back(std::acos(1.0 - step * static_cast<double>(i)));
    return g;
}

PerturbationBounds perturbation_bounds(const AngularGrid& grid, std::size_t index)
{
    const std::size_t g = grid.size();
    if (index >= g)
        throw std::out_of_range("perturbation_bounds: index " + std::to_string(index) +
                                " outside grid of size " + std::to_string(g));
    const auto& a = grid.angles;
    PerturbationBounds b;
    b.lower = index == 0 ? 0.0 : (a[index] - a[index - 1]) / 2.0;
    b.upper = index + 1 == g ? (kPi - a[index]) / 2.0 : (a[index + 1] - a[index]) / 2.0;
    return b;
}

std::size_t locate_cell(const AngularGrid& grid, double theta)
{
    const auto& a = grid.angles;
    if (a.empty() || theta < a.front())
        return grid.size();
    // last cell's upper edge
    const PerturbationBounds last = perturbation_bounds(grid, a.size() - 1);
    if (theta >= a.back() + last.upper)
        return grid.size();
    // cells are [midpoint(i-1,i), midpoint(i,i+1)); find first grid point whose
    // upper midpoint exceeds theta
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        if (theta < a[i] + (a[i + 1] - a[i]) / 2.0)
            return i;
    }
    return a.size() - 1;
}

CVector atom(double theta_rx, double theta_tx, ArrayDims dims)
{
    return kron(CVector(steering_vector(theta_tx, dims.bs).conjugate()),
                steering_vector(theta_rx, dims.ue));
}

CVector atom_derivative_rx(double theta_rx, double theta_tx, ArrayDims dims)
{
    return kron(CVector(steering_vector(theta_tx, dims.bs).conjugate()),
                steering_derivative(theta_rx, dims.ue));
}

CVector atom_derivative_tx(double theta_rx, double theta_tx, ArrayDims dims)
{
    return kron(CVector(steering_derivative(theta_tx, dims.bs).conjugate()),
                steering_vector(theta_rx, dims.ue));
}

Dictionary build_dictionary(const AngularGrid& grid_rx, const AngularGrid& grid_tx, ArrayDims dims)
{
    if (grid_rx.size() < 2 || grid_tx.size() < 2)
        throw std::invalid_argument("build_dictionary: grid sizes must be at least 2");
    if (dims.bs == 0 || dims.ue == 0)
        throw std::invalid_argument("build_dictionary: antenna counts must be positive");
    Dictionary d;
    d.grid_rx = grid_rx;
    d.grid_tx = grid_tx;
    d.dims = dims;
    const auto g_ue = static_cast<Eigen::Index>(grid_rx.size());
    const auto g_bs = static_cast<Eigen::Index>(grid_tx.size());
    d.steering_ue.resize(static_cast<Eigen::Index>(dims.ue), g_ue);
    d.steering_bs.resize(static_cast<Eigen::Index>(dims.bs), g_bs);
    for (Eigen::Index i = 0; i < g_ue; ++i)
        d.steering_ue.col(i) = steering_vector(grid_rx.angles[static_cast<std::size_t>(i)], dims.ue);
    for (Eigen::Index i = 0; i < g_bs; ++i)
        d.steering_bs.col(i) = steering_vector(grid_tx.angles[static_cast<std::size_t>(i)], dims.bs);
    d.atoms = kron(CMatrix(d.steering_bs.conjugate()), d.steering_ue);
    return d;
}

SensingOperator make_sensing(CMatrix f, CMatrix w)
{
    if (f.rows() < 1 || f.cols() < 1 || w.rows() < 1 || w.cols() < 1)
        throw DimensionError("make_sensing: empty precoder or combiner bank");
    if (f.cols() > f.rows() || w.cols() > w.rows())
        throw DimensionError("make_sensing: more RF chains than antennas");
    SensingOperator s;
    s.f = std::move(f);
    s.w = std::move(w);
    s.phi = kron(CMatrix(s.f.transpose()), CMatrix(s.w.adjoint()));
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(s.phi);
    s.rank = cod.rank();
    return s;
}

SensingOperator build_sensing(std::size_t n_bs, std::size_t n_rf_bs, std::size_t n_ue,
                              std::size_t n_rf_ue, Rng& rng)
{
    if (n_rf_bs == 0 || n_rf_ue == 0 || n_rf_bs > n_bs || n_rf_ue > n_ue)
        throw std::invalid_argument("build_sensing: need 1 <= M_RF <= M and 1 <= N_RF <= N");
    const double sf = 1.0 / std::sqrt(static_cast<double>(n_bs));
    const double sw = 1.0 / std::sqrt(static_cast<double>(n_ue));
    CMatrix f(static_cast<Eigen::Index>(n_bs), static_cast<Eigen::Index>(n_rf_bs));
    CMatrix w(static_cast<Eigen::Index>(n_ue), static_cast<Eigen::Index>(n_rf_ue));
    for (Eigen::Index c = 0; c < f.cols(); ++c)
        for (Eigen::Index r = 0; r < f.rows(); ++r)
            f(r, c) = std::polar(sf, rng.uniform(0.0, 2.0 * kPi));
    for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            w(r, c) = std::polar(sw, rng.uniform(0.0, 2.0 * kPi));
    return make_sensing(std::move(f), std::move(w));
}

CMatrix composed_dictionary(const Dictionary& dict, const SensingOperator& sensing)
{
    if (static_cast<std::size_t>(sensing.f.rows()) != dict.dims.bs ||
        static_cast<std::size_t>(sensing.w.rows()) != dict.dims.ue)
        throw DimensionError("composed_dictionary: sensing operator and dictionary disagree on M, N");
    const CMatrix tx = sensing.f.transpose() * dict.steering_bs.conjugate();
    const CMatrix rx = sensing.w.adjoint() * dict.steering_ue;
    return kron(tx, rx);
}

} // namespace ppcomp
