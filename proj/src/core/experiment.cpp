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
#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace ppcomp {

namespace {

std::uint64_t snr_bits(double snr_db)
{
    return std::bit_cast<std::uint64_t>(snr_db);
}

TrialResult blank_row(const SweepPoint& point, Algorithm alg, std::size_t trial, std::uint64_t seed)
{
    TrialResult r;
    r.grid = point.grid;
    r.snapshots = point.snapshots;
    r.measurements = point.rf.measurements();
    r.snr_db = point.snr_db;
    r.algorithm = alg;
    r.trial = trial;
    r.seed = seed;
    return r;
}

void mark_failed(TrialResult& r, const std::string& why)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.failed = true;
    r.error = why;
    r.eta = nan;
    r.nmse = nan;
    r.final_residual = nan;
    r.support_size = 0;
}

} // namespace

std::uint64_t channel_seed(std::uint64_t master_seed, std::size_t trial)
{
    return derive_seed(master_seed, {0x63686e6cULL, trial});
}

DictionaryCache::DictionaryCache(const ExperimentConfig& cfg)
{
    for (const auto& g : cfg.grid_sizes) {
        const auto key = std::make_pair(g.ue, g.bs);
        if (!dicts_.contains(key))
            dicts_.emplace(key, build_dictionary(build_grid(g.ue), build_grid(g.bs), {cfg.M, cfg.N}));
    }
}

const Dictionary& DictionaryCache::get(GridSize g) const
{
    return dicts_.at({g.ue, g.bs});
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg)
{
    std::vector<SweepPoint> pts;
    for (const auto& g : cfg.grid_sizes)
        for (const auto& rf : cfg.rf_chains)
            for (std::size_t t : cfg.snapshot_counts)
                for (double snr : cfg.snr_db)
                    pts.push_back({g, rf, t, snr});
    return pts;
}

std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, const SweepPoint& point,
                                   std::size_t trial, const DictionaryCache& dicts)
{
    const std::uint64_t seed = channel_seed(cfg.master_seed, trial);
    std::vector<TrialResult> rows;
    for (Algorithm alg : cfg.algorithms)
        rows.push_back(blank_row(point, alg, trial, seed));

    try {
        const Dictionary& dict = dicts.get(point.grid);
        const ArrayGeometry bs{cfg.M, ArrayRole::BS};
        const ArrayGeometry ue{cfg.N, ArrayRole::UE};

        Rng chan_rng(seed);
        const MpcSet mpcs = cfg.on_grid_paths
                                ? draw_on_grid_mpcs(cfg.K, cfg.L, dict.grid_rx, dict.grid_tx, chan_rng)
                                : draw_mpcs(cfg.K, cfg.L, chan_rng);
        const ChannelRealization chan = realize_channel(mpcs, bs, ue, point.snapshots, chan_rng);

        Rng sens_rng(derive_seed(seed, {1, point.rf.bs, point.rf.ue}));
        const SensingOperator sensing = build_sensing(cfg.M, point.rf.bs, cfg.N, point.rf.ue, sens_rng);

        double sigma2 = 0.0;
        if (std::isfinite(point.snr_db)) {
            const CMatrix y0 = noiseless_measurements(chan, sensing);
            const double signal = y0.squaredNorm() / static_cast<double>(point.snapshots);
            // E|(I kron W^H) n|^2 = sigma2 * M_RF * |W|_F^2
            const double noise_gain = static_cast<double>(point.rf.bs) * sensing.w.squaredNorm();
            sigma2 = signal / (std::pow(10.0, point.snr_db / 10.0) * noise_gain);
        }
        Rng noise_rng(derive_seed(seed, {2, point.rf.bs, point.rf.ue, snr_bits(point.snr_db)}));
        const SnapshotSet snaps = generate_snapshots(chan, sensing, sigma2, noise_rng);
        const CMatrix r_y = sample_covariance(snaps);
        const GroundTruthCovariance truth = true_covariance(chan, cfg.ground_truth);
        const CMatrix composed = composed_dictionary(dict, sensing);

        for (TrialResult& row : rows) {
            const auto start = std::chrono::steady_clock::now();
            try {
                const CovarianceEstimate est =
                    estimate(row.algorithm, r_y, dict, sensing.phi, cfg.solver, composed);
                row.eta = relative_efficiency(est.r_h_hat, truth.r_h, cfg.metric_rank);
                row.nmse = nmse(est.r_h_hat, truth.r_h);
                row.support_size = est.support.size();
                row.final_residual = est.relative_residual();
            } catch (const std::exception& e) {
                mark_failed(row, e.what());
            }
            row.wall_time_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        }
    } catch (const std::exception& e) {
        for (TrialResult& row : rows)
            mark_failed(row, e.what());
    }
    return rows;
}

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& rows)
{
    std::vector<Aggregate> out;
    std::vector<std::vector<const TrialResult*>> members;
    for (const TrialResult& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Aggregate& a) {
            return a.grid.ue == r.grid.ue && a.grid.bs == r.grid.bs && a.snapshots == r.snapshots &&
                   a.measurements == r.measurements && snr_bits(a.snr_db) == snr_bits(r.snr_db) &&
                   a.algorithm == r.algorithm;
        });
        if (it == out.end()) {
            Aggregate a;
            a.grid = r.grid;
            a.snapshots = r.snapshots;
            a.measurements = r.measurements;
            a.snr_db = r.snr_db;
            a.algorithm = r.algorithm;
            out.push_back(a);
            members.emplace_back();
            it = out.end() - 1;
        }
        members[static_cast<std::size_t>(it - out.begin())].push_back(&r);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        Aggregate& a = out[i];
        double se = 0.0, sn = 0.0;
        for (const TrialResult* r : members[i]) {
            if (r->failed) {
                ++a.excluded;
                continue;
            }
            ++a.count;
            se += r->eta;
            sn += r->nmse;
        }
        if (a.count == 0) {
            a.eta_mean = a.nmse_mean = a.eta_std = a.nmse_std = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        a.eta_mean = se / static_cast<double>(a.count);
        a.nmse_mean = sn / static_cast<double>(a.count);
        double ve = 0.0, vn = 0.0;
        for (const TrialResult* r : members[i]) {
            if (r->failed)
                continue;
            ve += (r->eta - a.eta_mean) * (r->eta - a.eta_mean);
            vn += (r->nmse - a.nmse_mean) * (r->nmse - a.nmse_mean);
        }
        const double dof = a.count > 1 ? static_cast<double>(a.count - 1) : 1.0;
        a.eta_std = std::sqrt(ve / dof);
        a.nmse_std = std::sqrt(vn / dof);
    }
    return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg, unsigned workers, const RowSink& sink)
{
    cfg.validate();
    const DictionaryCache dicts(cfg);
    const std::vector<SweepPoint> points = sweep_points(cfg);
    const std::size_t n_units = points.size() * cfg.trials;
    std::vector<std::vector<TrialResult>> results(n_units);

    std::atomic<std::size_t> next{0};
    std::mutex sink_mutex;
    auto work = [&] {
        for (std::size_t u = next++; u < n_units; u = next++) {
            const SweepPoint& pt = points[u / cfg.trials];
            results[u] = run_trial(cfg, pt, u % cfg.trials, dicts);
            if (sink) {
                std::lock_guard lock(sink_mutex);
                for (const auto& r : results[u])
                    sink(r);
            }
        }
    };

    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_units, 1)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i)
            pool.emplace_back(work);
    }

    SweepResult out;
    out.rows.reserve(n_units * cfg.algorithms.size());
    for (auto& unit : results)
        for (auto& r : unit)
            out.rows.push_back(std::move(r));
    out.aggregates = aggregate(out.rows);
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string raw_csv_header()
{
    return "grid_rx,grid_tx,T,m,snr_db,algorithm,trial,eta,nmse,support_size,final_residual,"
           "wall_time_ms,seed";
}

std::string format_raw_row(const TrialResult& r)
{
    std::string s;
    s += std::to_string(r.grid.ue) + ',' + std::to_string(r.grid.bs) + ',';
    s += std::to_string(r.snapshots) + ',' + std::to_string(r.measurements) + ',';
    s += format_number(r.snr_db) + ',' + to_string(r.algorithm) + ',' + std::to_string(r.trial) + ',';
    s += format_number(r.eta) + ',' + format_number(r.nmse) + ',';
    s += std::to_string(r.support_size) + ',' + format_number(r.final_residual) + ',';
    s += format_number(r.wall_time_ms) + ',' + std::to_string(r.seed);
    return s;
}

std::string agg_csv_header()
{
    return "grid_rx,grid_tx,T,m,snr_db,algorithm,n,excluded,eta_mean,eta_std,nmse_mean,nmse_std";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace

void write_outputs(const SweepResult& result, const ExperimentConfig& cfg,
                   const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + out_dir.string() +
                                 "': " + ec.message());

    std::string raw = raw_csv_header() + '\n';
    for (const auto& r : result.rows)
        raw += format_raw_row(r) + '\n';
    write_text(out_dir / "raw.csv", raw);

    std::string agg = agg_csv_header() + '\n';
    for (const auto& a : result.aggregates) {
        agg += std::to_string(a.grid.ue) + ',' + std::to_string(a.grid.bs) + ',' +
               std::to_string(a.snapshots) + ',' + std::to_string(a.measurements) + ',' +
               format_number(a.snr_db) + ',' + to_string(a.algorithm) + ',' +
               std::to_string(a.count) + ',' + std::to_string(a.excluded) + ',' +
               format_number(a.eta_mean) + ',' + format_number(a.eta_std) + ',' +
               format_number(a.nmse_mean) + ',' + format_number(a.nmse_std) + '\n';
    }
    write_text(out_dir / "agg.csv", agg);

    nlohmann::json meta;
    meta["version"] = PPCOMP_VERSION_STRING;
    meta["config"] = config_to_json(cfg);
    meta["assumptions"] = cfg.assumptions;
    meta["seed_scheme"] = "channel seed = f(master_seed, trial); sensing and noise seeds derived "
                          "from the channel seed and the RF / SNR coordinates";
    meta["rows"] = result.rows.size();
    std::size_t failed = 0;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& r : result.rows) {
        if (!r.failed)
            continue;
        ++failed;
        failures.push_back({{"algorithm", to_string(r.algorithm)},
                            {"trial", r.trial},
                            {"T", r.snapshots},
                            {"m", r.measurements},
                            {"error", r.error}});
    }
    meta["failed"] = failed;
    meta["failures"] = failures;
    write_text(out_dir / "meta.json", meta.dump(2) + '\n');
}

SweepResult run_and_write(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                          unsigned workers)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + out_dir.string() +
                                 "': " + ec.message());
    const auto partial_path = out_dir / "raw.partial.csv";
    std::ofstream partial(partial_path, std::ios::trunc);
    if (!partial)
        throw std::runtime_error("cannot open '" + partial_path.string() + "' for writing");
    partial << raw_csv_header() << '\n';

    SweepResult result = run_sweep(cfg, workers, [&](const TrialResult& r) {
        partial << format_raw_row(r) << '\n';
        partial.flush();
    });
    partial.close();

    write_outputs(result, cfg, out_dir);
    std::filesystem::remove(partial_path, ec);
    return result;
}

ExperimentConfig smoke_config()
{
    ExperimentConfig cfg;
    cfg.M = 8;
    cfg.N = 4;
    cfg.rf_chains = {{8, 4}};
    cfg.K = 1;
    cfg.L = 2;
    cfg.grid_sizes = {{4, 8}};
    cfg.snapshot_counts = {64};
    cfg.snr_db = {std::numeric_limits<double>::infinity()};
    cfg.trials = 8;
    cfg.algorithms = {Algorithm::COMP, Algorithm::PPCOMP};
    cfg.solver = SolverOptions::defaults_for(cfg.n_paths());
    cfg.metric_rank = cfg.n_paths();
    cfg.master_seed = 2019;
    cfg.on_grid_paths = true;
    cfg.assumptions = {"beta_sqrt_KL", "smoke_on_grid_noiseless"};
    return cfg;
}

SmokeReport run_smoke(unsigned workers)
{
    const ExperimentConfig cfg = smoke_config();
    const SweepResult res = run_sweep(cfg, workers);
    SmokeReport rep;
    rep.rows = res.rows.size();
    rep.min_eta = std::numeric_limits<double>::infinity();
    for (const auto& r : res.rows) {
        if (r.failed) {
            ++rep.failed;
            continue;
        }
        rep.min_eta = std::min(rep.min_eta, r.eta);
    }
    rep.passed = rep.failed == 0 && rep.rows > 0 && rep.min_eta > 0.99;
    return rep;
}

} // namespace ppcomp
