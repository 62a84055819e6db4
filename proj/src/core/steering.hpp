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

#include "types.hpp"

namespace ppcomp {

/// Array response of an n-element half-wavelength ULA:
/// [a]_m = exp(j*pi*m*cos(theta)) / sqrt(n), m = 0..n-1.
CVector steering_vector(double theta, std::size_t n);

/// Exact theta-derivative of steering_vector.
CVector steering_derivative(double theta, std::size_t n);

} // namespace ppcomp
