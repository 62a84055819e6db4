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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "estimators.hpp"
#include "metrics.hpp"

namespace ppcomp {

/// Raised for malformed or inconsistent configuration files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RfChains {
    std::size_t bs = 1; ///< M_RF
    std::size_t ue = 1; ///< N_RF

    std::size_t measurements() const { return bs * ue; }
};

struct GridSize {
    std::size_t ue = 32; ///< G_UE (AoA)
    std::size_t bs = 32; ///< G_BS (AoD)
};

struct ExperimentConfig {
    std::size_t M = 16;
    std::size_t N = 8;
    std::vector<RfChains> rf_chains{{4, 3}};
    std::size_t K = 2;
    std::size_t L = 2;
    std::vector<GridSize> grid_sizes{{32, 32}};
    std::vector<std::size_t> snapshot_counts{100};
    std::vector<double> snr_db{10.0}; ///< +inf means noiseless
    std::size_t trials = 100;
    std::vector<Algorithm> algorithms{Algorithm::COMP, Algorithm::PPCOMP};
    SolverOptions solver = SolverOptions::defaults_for(4);
    std::size_t metric_rank = 4;
    std::uint64_t master_seed = 1;
    TruthSource ground_truth = TruthSource::Sample;
    bool on_grid_paths = false;

    /// Names of defaults that stand in for unstated choices.
    std::vector<std::string> assumptions;

    std::size_t n_paths() const { return K * L; }
    void validate() const;
};

/// Parses a JSON document whose keys mirror ExperimentConfig. Unknown keys
/// are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Normalised echo of a configuration, as written to the run manifest.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Default (M_RF, N_RF) split for a measurement count m.
RfChains factor_measurements(std::size_t m, std::size_t n_bs, std::size_t n_ue);

} // namespace ppcomp
