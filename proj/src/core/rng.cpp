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

#include "rng.hpp"

#include <cmath>

namespace ppcomp {

double Rng::uniform(double lo, double hi)
{
    // generate_canonical is in [0, 1); keep the half-open contract explicit
    std::uniform_real_distribution<double> dist(lo, hi);
    double v = dist(engine_);
    return v < hi ? v : lo;
}

cdouble Rng::complex_normal(double variance)
{
    std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
    const double re = dist(engine_);
    const double im = dist(engine_);
    return {re, im};
}

std::size_t Rng::index(std::size_t n)
{
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords)
{
    std::uint64_t h = mix64(base);
    for (std::uint64_t c : coords)
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    return h;
}

} // namespace ppcomp
