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
#include <catch2/catch_amalgamated.hpp>

#include "metrics.hpp"
#include "test_support.hpp"

using namespace ppcomp;
using namespace ppcomp::testing;
using Catch::Approx;

TEST_CASE("true_covariance", "[metrics]")
{
    SECTION("single path, unit gains")
    {
        MpcSet s;
        s.aoa = {0.9};
        s.aod = {1.7};
        const auto ch = realize_channel_with_gains(s, {8, ArrayRole::BS}, {4, ArrayRole::UE},
                                                   CMatrix::Ones(1, 6));
        const CVector a = atom_oracle(0.9, 1.7, 8, 4);
        const auto truth = true_covariance(ch, TruthSource::Sample);
        CHECK(truth.source == TruthSource::Sample);
        CHECK((truth.r_h - a * a.adjoint()).norm() < 1e-13);
    }
    SECTION("sample form agrees with an independent snapshot average")
    {
        Rng r(19);
        for (int k = 0; k < 10; ++k) {
            const MpcSet s = draw_mpcs(2, 2, r);
            const auto ch = realize_channel(s, {6, ArrayRole::BS}, {4, ArrayRole::UE}, 15, r);
            CMatrix avg = CMatrix::Zero(24, 24);
            for (std::size_t t = 0; t < 15; ++t) {
                const CMatrix& h = ch.channel_matrices[t];
                const CVector v = Eigen::Map<const CVector>(h.data(), h.size());
                avg += v * v.adjoint();
            }
            avg /= 15.0;
            const CMatrix rh = true_covariance(ch, TruthSource::Sample).r_h;
            CHECK((rh - avg).norm() < 1e-10 * avg.norm());
            CHECK(hermitian_asymmetry(rh) < 1e-14);
        }
    }
    SECTION("ensemble trace")
    {
        Rng r(2);
        const MpcSet s = draw_mpcs(2, 2, r);
        const auto ch = realize_channel(s, {16, ArrayRole::BS}, {8, ArrayRole::UE}, 3, r);
        const auto truth = true_covariance(ch, TruthSource::Ensemble);
        CHECK(truth.source == TruthSource::Ensemble);
        CHECK(truth.r_h.trace().real() == Approx(1.0).epsilon(1e-13));
        Eigen::SelfAdjointEigenSolver<CMatrix> es(truth.r_h);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
}

TEST_CASE("relative_efficiency examples", "[metrics]")
{
    std::mt19937_64 g(1);
    const CMatrix r = random_psd(g, 6, 3);
    CHECK(relative_efficiency(r, r, 3) == Approx(1.0).margin(1e-12));

    CVector u = CVector::Zero(4), v = CVector::Zero(4);
    u(0) = 1;
    v(2) = 1;
    CHECK(relative_efficiency(v * v.adjoint(), u * u.adjoint(), 1) == Approx(0.0).margin(1e-15));

    CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
    a.diagonal() << 3.0, 1.0;
    b.diagonal() << 1.0, 3.0;
    CHECK(relative_efficiency(b, a, 1) == Approx(1.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(relative_efficiency(r, CMatrix::Zero(6, 6), 1), std::invalid_argument);
    CHECK_THROWS_AS(relative_efficiency(r, r, 0), std::invalid_argument);
    CHECK_THROWS_AS(relative_efficiency(r, r, 7), std::invalid_argument);
}

TEST_CASE("relative_efficiency properties", "[metrics][property]")
{
    std::mt19937_64 g(7);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Index n = 3 + Eigen::Index(g() % 8);
        // rank within the estimate's rank keeps its dominant subspace unique
        const Eigen::Index est_rank = 1 + Eigen::Index(g() % std::size_t(n));
        const std::size_t rank = 1 + g() % std::size_t(est_rank);
        const CMatrix truth = random_psd(g, n, 1 + Eigen::Index(g() % std::size_t(n)));
        const CMatrix est = random_psd(g, n, est_rank);
        const double eta = relative_efficiency(est, truth, rank);
        CHECK(eta >= 0.0);
        CHECK(eta <= 1.0 + 1e-10);
        const double c = uniform(g, 0.01, 100);
        CHECK(relative_efficiency(c * est, truth, rank) == Approx(eta).margin(1e-10));
        const CMatrix q = random_unitary(g, n);
        CHECK(relative_efficiency(q * est * q.adjoint(), q * truth * q.adjoint(), rank) ==
              Approx(eta).margin(1e-10));
    }
}

TEST_CASE("nmse", "[metrics]")
{
    std::mt19937_64 g(3);
    const CMatrix r = random_psd(g, 5, 2);
    CHECK(nmse(r, r) == 0.0);
    CHECK(nmse(CMatrix::Zero(5, 5), r) == Approx(1.0).epsilon(1e-15));
    CHECK(nmse(2.0 * r, r) == Approx(1.0).epsilon(1e-14));
    CHECK(nmse(random_psd(g, 5, 2), r) > 0.0);
    CHECK_THROWS_AS(nmse(r, CMatrix::Zero(5, 5)), std::invalid_argument);
    CHECK_THROWS(nmse(r, CMatrix::Zero(4, 4)));
}
