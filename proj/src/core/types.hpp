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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ppcomp {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when operand shapes do not agree (e.g. sensing operator columns
/// versus the vectorised channel length).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a covariance input is not Hermitian within tolerance.
class NotHermitianError : public std::invalid_argument {
public:
    explicit NotHermitianError(const std::string& what) : std::invalid_argument(what) {}
};

/// Angle-of-arrival / angle-of-departure pair in radians.
struct AnglePair {
    double rx = 0.0;
    double tx = 0.0;

    friend bool operator==(const AnglePair&, const AnglePair&) = default;
};

/// Antenna counts on both link ends. bs is M (transmit side), ue is N.
struct ArrayDims {
    std::size_t bs = 0;
    std::size_t ue = 0;

    std::size_t channel_length() const { return bs * ue; }
};

/// Frobenius norm of X - X^H divided by max(1, |X|_F).
inline double hermitian_asymmetry(const CMatrix& x)
{
    const double scale = std::max(1.0, x.norm());
    return (x - x.adjoint()).norm() / scale;
}

inline CMatrix hermitian_part(const CMatrix& x)
{
    return 0.5 * (x + x.adjoint());
}

} // namespace ppcomp
