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

#include "channel.hpp"
#include "types.hpp"

namespace ppcomp {

enum class TruthSource {
    Sample,   ///< (1/T) sum_t vec(H_t) vec(H_t)^H over the realised snapshots
    Ensemble, ///< expectation over the gain distribution
};

struct GroundTruthCovariance {
    CMatrix r_h;
    TruthSource source = TruthSource::Sample;
};

/// Sample mode evaluates both the snapshot average and the path expansion
/// sum_{l,q} Gamma_lq a_l a_q^H / (T beta^2) and throws std::logic_error if
/// they disagree beyond 1e-10 (relative).
GroundTruthCovariance true_covariance(const ChannelRealization& chan, TruthSource source);

/// Trace ratio tr(U_hat^H R U_hat) / tr(U^H R U) over the top-rank singular
/// subspaces of r_hat and r_true.
double relative_efficiency(const CMatrix& r_hat, const CMatrix& r_true, std::size_t rank);

/// |r_hat - r_true|_F^2 / |r_true|_F^2.
double nmse(const CMatrix& r_hat, const CMatrix& r_true);

} // namespace ppcomp
