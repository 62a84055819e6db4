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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace ppcomp {

/// One coordinate of the sweep.
struct SweepPoint {
    GridSize grid;
    RfChains rf;
    std::size_t snapshots = 1;
    double snr_db = 10.0;
};

struct TrialResult {
    GridSize grid;
    std::size_t snapshots = 0;
    std::size_t measurements = 0;
    double snr_db = 0.0;
    Algorithm algorithm = Algorithm::COMP;
    std::size_t trial = 0;
    double eta = 0.0;
    double nmse = 0.0;
    std::size_t support_size = 0;
    double final_residual = 0.0; ///< |R_res|_F^2 / |R_y|_F^2
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;      ///< channel realisation seed
    bool failed = false;
    std::string error;
};

struct Aggregate {
    GridSize grid;
    std::size_t snapshots = 0;
    std::size_t measurements = 0;
    double snr_db = 0.0;
    Algorithm algorithm = Algorithm::COMP;
    std::size_t count = 0;
    std::size_t excluded = 0;
    double eta_mean = 0.0;
    double eta_std = 0.0;
    double nmse_mean = 0.0;
    double nmse_std = 0.0;
};

struct SweepResult {
    std::vector<TrialResult> rows; ///< enumeration order
    std::vector<Aggregate> aggregates;
};

/// Seed of the channel realisation for a trial. Angles and gains depend only
/// on (master_seed, trial), so every coordinate of a sweep sees the same
/// propagation environment and comparisons across coordinates are paired.
std::uint64_t channel_seed(std::uint64_t master_seed, std::size_t trial);

/// Shared read-only dictionaries, one per grid size.
class DictionaryCache {
public:
    DictionaryCache(const ExperimentConfig& cfg);
    const Dictionary& get(GridSize g) const;

private:
    std::map<std::pair<std::size_t, std::size_t>, Dictionary> dicts_;
};

/// Runs every configured algorithm on one shared realisation.
std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, const SweepPoint& point,
                                   std::size_t trial, const DictionaryCache& dicts);

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

using RowSink = std::function<void(const TrialResult&)>;

/// Runs the full Cartesian product on up to 'workers' threads. Rows are
/// passed to 'sink' (serialised, completion order) as they finish and
/// returned sorted in enumeration order.
SweepResult run_sweep(const ExperimentConfig& cfg, unsigned workers, const RowSink& sink = {});

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& rows);

/// Writes raw.csv, agg.csv and meta.json into out_dir (created if missing).
/// Throws std::runtime_error on I/O failure.
void write_outputs(const SweepResult& result, const ExperimentConfig& cfg,
                   const std::filesystem::path& out_dir);

/// Runs a sweep, streaming rows to out_dir/raw.partial.csv, then writes
/// the sorted outputs.
SweepResult run_and_write(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                          unsigned workers);

std::string raw_csv_header();
std::string format_raw_row(const TrialResult& r);
std::string agg_csv_header();
std::string format_number(double v);

/// Small on-grid, noiseless configuration where both algorithms must
/// recover the covariance exactly.
ExperimentConfig smoke_config();

struct SmokeReport {
    bool passed = false;
    double min_eta = 0.0;
    std::size_t rows = 0;
    std::size_t failed = 0;
};

SmokeReport run_smoke(unsigned workers);

} // namespace ppcomp
