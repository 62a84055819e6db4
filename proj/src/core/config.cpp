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
#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace ppcomp {

namespace {

using nlohmann::json;

std::size_t as_count(const json& v, const std::string& key)
{
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw ConfigError("'" + key + "' must be a positive integer");
    return v.get<std::size_t>();
}

double as_positive(const json& v, const std::string& key)
{
    if (!v.is_number() || !(v.get<double>() > 0.0))
        throw ConfigError("'" + key + "' must be a positive number");
    return v.get<double>();
}

std::vector<std::size_t> as_count_list(const json& v, const std::string& key)
{
    std::vector<std::size_t> out;
    if (v.is_array()) {
        for (const auto& e : v)
            out.push_back(as_count(e, key));
    } else {
        out.push_back(as_count(v, key));
    }
    if (out.empty())
        throw ConfigError("'" + key + "' must not be empty");
    return out;
}

double parse_snr(const json& v)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "noiseless")
            return std::numeric_limits<double>::infinity();
    }
    throw ConfigError("'snr_db' entries must be numbers or \"inf\"");
}

Algorithm parse_algorithm(const json& v)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "COMP")
            return Algorithm::COMP;
        if (s == "PPCOMP")
            return Algorithm::PPCOMP;
    }
    throw ConfigError("'algorithms' entries must be \"COMP\" or \"PPCOMP\"");
}

void parse_solver(const json& doc, SolverOptions& opts, bool& k_max_given)
{
    if (!doc.is_object())
        throw ConfigError("'solver' must be an object");
    for (const auto& [key, v] : doc.items()) {
        if (key == "epsilon_rel")
            opts.epsilon_rel = as_positive(v, key);
        else if (key == "k_max") {
            opts.k_max = as_count(v, key);
            k_max_given = true;
        } else if (key == "p_max")
            opts.p_max = as_count(v, key);
        else if (key == "step_init")
            opts.step_init = as_positive(v, key);
        else if (key == "step_shrink")
            opts.step_shrink = as_positive(v, key);
        else if (key == "grad_tol")
            opts.grad_tol = as_positive(v, key);
        else if (key == "gamma_mode") {
            const auto s = v.is_string() ? v.get<std::string>() : std::string();
            if (s == "joint")
                opts.gamma_mode = GammaMode::Joint;
            else if (s == "per_pair")
                opts.gamma_mode = GammaMode::PerPair;
            else
                throw ConfigError("'solver.gamma_mode' must be \"joint\" or \"per_pair\"");
        } else
            throw ConfigError("unknown key 'solver." + key + "'");
    }
}

} // namespace

RfChains factor_measurements(std::size_t m, std::size_t n_bs, std::size_t n_ue)
{
    if (m == 4 && n_bs >= 2 && n_ue >= 2)
        return {2, 2};
    if (m == 8 && n_bs >= 4 && n_ue >= 2)
        return {4, 2};
    if (m == 12 && n_bs >= 4 && n_ue >= 3)
        return {4, 3};
    // otherwise the most balanced split that fits both arrays
    RfChains best{0, 0};
    for (std::size_t bs = 1; bs <= n_bs; ++bs) {
        if (m % bs != 0 || m / bs > n_ue)
            continue;
        const std::size_t ue = m / bs;
        const auto gap = [](RfChains r) { return r.bs > r.ue ? r.bs - r.ue : r.ue - r.bs; };
        if (best.bs == 0 || gap({bs, ue}) < gap(best) || (gap({bs, ue}) == gap(best) && bs > best.bs))
            best = {bs, ue};
    }
    if (best.bs == 0)
        throw ConfigError("measurement count " + std::to_string(m) +
                          " cannot be split into M_RF <= M and N_RF <= N");
    return best;
}

void ExperimentConfig::validate() const
{
    if (M == 0 || N == 0 || K == 0 || L == 0 || trials == 0)
        throw ConfigError("M, N, K, L and trials must be positive");
    if (rf_chains.empty() || grid_sizes.empty() || snapshot_counts.empty() || snr_db.empty() ||
        algorithms.empty())
        throw ConfigError("sweep lists must not be empty");
    for (const auto& rf : rf_chains)
        if (rf.bs == 0 || rf.ue == 0 || rf.bs > M || rf.ue > N)
            throw ConfigError("RF chains must satisfy 1 <= M_RF <= M and 1 <= N_RF <= N");
    for (const auto& g : grid_sizes)
        if (g.ue < 2 || g.bs < 2)
            throw ConfigError("grid sizes must be at least 2");
    for (double s : snr_db)
        if (std::isnan(s))
            throw ConfigError("snr_db must not be NaN");
    if (metric_rank == 0 || metric_rank > M * N)
        throw ConfigError("metric_rank must lie in [1, M*N]");
    try {
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("configuration must be a JSON object");
    ExperimentConfig cfg;
    cfg.assumptions.clear();
    bool k_max_given = false;
    bool rank_given = false;
    bool grid_given = false;
    std::vector<std::size_t> m_rf, n_rf, measurements;
    std::set<std::string> required{"M", "N", "K", "L", "snapshot_counts", "snr_db", "trials"};

    for (const auto& [key, v] : doc.items()) {
        required.erase(key);
        if (key == "M")
            cfg.M = as_count(v, key);
        else if (key == "N")
            cfg.N = as_count(v, key);
        else if (key == "M_RF")
            m_rf = as_count_list(v, key);
        else if (key == "N_RF")
            n_rf = as_count_list(v, key);
        else if (key == "measurements")
            measurements = as_count_list(v, key);
        else if (key == "K")
            cfg.K = as_count(v, key);
        else if (key == "L")
            cfg.L = as_count(v, key);
        else if (key == "grid_sizes") {
            grid_given = true;
            cfg.grid_sizes.clear();
            if (!v.is_array() || v.empty())
                throw ConfigError("'grid_sizes' must be a non-empty list");
            for (const auto& g : v) {
                if (g.is_array() && g.size() == 2)
                    cfg.grid_sizes.push_back({as_count(g[0], key), as_count(g[1], key)});
                else
                    cfg.grid_sizes.push_back({as_count(g, key), as_count(g, key)});
            }
        } else if (key == "snapshot_counts")
            cfg.snapshot_counts = as_count_list(v, key);
        else if (key == "snr_db") {
            cfg.snr_db.clear();
            if (v.is_array()) {
                for (const auto& e : v)
                    cfg.snr_db.push_back(parse_snr(e));
            } else {
                cfg.snr_db.push_back(parse_snr(v));
            }
        } else if (key == "trials")
            cfg.trials = as_count(v, key);
        else if (key == "algorithms") {
            cfg.algorithms.clear();
            if (!v.is_array())
                throw ConfigError("'algorithms' must be a list");
            for (const auto& e : v)
                cfg.algorithms.push_back(parse_algorithm(e));
        } else if (key == "solver")
            parse_solver(v, cfg.solver, k_max_given);
        else if (key == "metric_rank") {
            cfg.metric_rank = as_count(v, key);
            rank_given = true;
        } else if (key == "master_seed") {
            if (!v.is_number_unsigned())
                throw ConfigError("'master_seed' must be a nonnegative integer");
            cfg.master_seed = v.get<std::uint64_t>();
        } else if (key == "ground_truth") {
            const auto s = v.is_string() ? v.get<std::string>() : std::string();
            if (s == "sample")
                cfg.ground_truth = TruthSource::Sample;
            else if (s == "ensemble")
                cfg.ground_truth = TruthSource::Ensemble;
            else
                throw ConfigError("'ground_truth' must be \"sample\" or \"ensemble\"");
        } else if (key == "on_grid_paths") {
            if (!v.is_boolean())
                throw ConfigError("'on_grid_paths' must be a boolean");
            cfg.on_grid_paths = v.get<bool>();
        } else
            throw ConfigError("unknown key '" + key + "'");
    }
    if (!required.empty())
        throw ConfigError("missing required key '" + *required.begin() + "'");

    cfg.rf_chains.clear();
    if (!measurements.empty()) {
        if (!m_rf.empty() || !n_rf.empty())
            throw ConfigError("give either 'measurements' or 'M_RF'/'N_RF', not both");
        for (std::size_t m : measurements)
            cfg.rf_chains.push_back(factor_measurements(m, cfg.M, cfg.N));
        cfg.assumptions.emplace_back("rf_chain_factorization_default");
    } else {
        if (m_rf.empty() || n_rf.empty())
            throw ConfigError("missing 'M_RF'/'N_RF' (or 'measurements')");
        if (m_rf.size() != n_rf.size() && m_rf.size() != 1 && n_rf.size() != 1)
            throw ConfigError("'M_RF' and 'N_RF' lists must have equal length");
        const std::size_t n = std::max(m_rf.size(), n_rf.size());
        for (std::size_t i = 0; i < n; ++i)
            cfg.rf_chains.push_back({m_rf[m_rf.size() == 1 ? 0 : i], n_rf[n_rf.size() == 1 ? 0 : i]});
    }

    if (!grid_given)
        cfg.assumptions.emplace_back("grid_size_defaulted_to_32x32");
    if (!k_max_given)
        cfg.solver.k_max = 2 * cfg.n_paths();
    if (!rank_given)
        cfg.metric_rank = cfg.n_paths();
    cfg.assumptions.emplace_back("beta_sqrt_KL");
    cfg.assumptions.emplace_back("snr_at_combined_measurement");
    cfg.assumptions.emplace_back("sensing_operator_redrawn_per_trial");
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json config_to_json(const ExperimentConfig& cfg)
{
    json j;
    j["M"] = cfg.M;
    j["N"] = cfg.N;
    json mrf = json::array(), nrf = json::array();
    for (const auto& rf : cfg.rf_chains) {
        mrf.push_back(rf.bs);
        nrf.push_back(rf.ue);
    }
    j["M_RF"] = mrf;
    j["N_RF"] = nrf;
    j["K"] = cfg.K;
    j["L"] = cfg.L;
    json grids = json::array();
    for (const auto& g : cfg.grid_sizes)
        grids.push_back({g.ue, g.bs});
    j["grid_sizes"] = grids;
    j["snapshot_counts"] = cfg.snapshot_counts;
    json snr = json::array();
    for (double s : cfg.snr_db)
        snr.push_back(std::isinf(s) ? json("inf") : json(s));
    j["snr_db"] = snr;
    j["trials"] = cfg.trials;
    json algs = json::array();
    for (auto a : cfg.algorithms)
        algs.push_back(to_string(a));
    j["algorithms"] = algs;
    j["solver"] = {
        {"epsilon_rel", cfg.solver.epsilon_rel},
        {"k_max", cfg.solver.k_max},
        {"p_max", cfg.solver.p_max},
        {"step_init", cfg.solver.step_init},
        {"step_shrink", cfg.solver.step_shrink},
        {"grad_tol", cfg.solver.grad_tol},
        {"gamma_mode", cfg.solver.gamma_mode == GammaMode::Joint ? "joint" : "per_pair"},
    };
    j["metric_rank"] = cfg.metric_rank;
    j["master_seed"] = cfg.master_seed;
    j["ground_truth"] = cfg.ground_truth == TruthSource::Sample ? "sample" : "ensemble";
    j["on_grid_paths"] = cfg.on_grid_paths;
    return j;
}

} // namespace ppcomp
