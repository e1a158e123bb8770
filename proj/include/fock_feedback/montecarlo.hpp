/*
   Copyright 2026 The fock-feedback Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <atomic>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fock_feedback/trajectory.hpp"

namespace fockfb {

/// What to do with realizations that never settle within the horizon.
enum class CensorPolicy { Exclude, ClampToHorizon };

inline const char *to_string(CensorPolicy p)
{
    return p == CensorPolicy::Exclude ? "exclude" : "clamp_to_horizon";
}

struct SweepConfig {
    std::vector<double> epsilons;
    int realizations = 1;
    RunConfig base_run; // epsilon and seed fields are overridden per task
    std::uint64_t master_seed = 0;
    CensorPolicy censor_policy = CensorPolicy::Exclude;
    int workers = 1;
};

/// One Table-style row of settling statistics.
struct SweepRow {
    double epsilon = 0.0;
    double mean_ks = 0.0;
    double stddev_ks = 0.0; // population standard deviation
    int settled = 0;
    int censored = 0;
    int realizations = 0;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
};

/// Batched sweep over gain values. Realization (e, i) runs with the seed
/// hash3(master_seed, e, i), so the result is a pure function of the
/// configuration: execution order and worker count cannot affect it, and
/// growing `realizations` only appends samples.
inline SweepSummary run_sweep(const SweepConfig &cfg)
{
    if (cfg.epsilons.empty())
        throw std::invalid_argument("run_sweep: empty epsilon grid");
    if (cfg.realizations < 1)
        throw std::invalid_argument("run_sweep: realizations < 1");

    const std::size_t n_eps = cfg.epsilons.size();
    const std::size_t n_tasks =
        n_eps * static_cast<std::size_t>(cfg.realizations);
    std::vector<std::optional<int>> settling(n_tasks);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;

    const auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_tasks)
                return;
            const std::size_t e = t / static_cast<std::size_t>(cfg.realizations);
            const std::size_t i = t % static_cast<std::size_t>(cfg.realizations);
            try {
                RunConfig rc = cfg.base_run;
                rc.controller.epsilon = cfg.epsilons[e];
                rc.seed = rng::hash3(cfg.master_seed, e, i);
                settling[t] = simulate_closed_loop(rc).settled_at;
            } catch (const std::exception &ex) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty()) {
                    std::ostringstream os;
                    os << "run_sweep: epsilon=" << cfg.epsilons[e]
                       << " realization=" << i << ": " << ex.what();
                    first_error = os.str();
                }
                return;
            }
        }
    };

    const int n_workers = std::max(1, cfg.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    if (!first_error.empty())
        throw std::runtime_error(first_error);

    // Order-insensitive reduction: always in (epsilon, realization) order.
    SweepSummary summary;
    summary.rows.reserve(n_eps);
    for (std::size_t e = 0; e < n_eps; ++e) {
        SweepRow row;
        row.epsilon = cfg.epsilons[e];
        row.realizations = cfg.realizations;
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(cfg.realizations));
        for (int i = 0; i < cfg.realizations; ++i) {
            const auto &ks =
                settling[e * static_cast<std::size_t>(cfg.realizations) +
                         static_cast<std::size_t>(i)];
            if (ks) {
                ++row.settled;
                samples.push_back(static_cast<double>(*ks));
            } else {
                ++row.censored;
                if (cfg.censor_policy == CensorPolicy::ClampToHorizon)
                    samples.push_back(
                        static_cast<double>(cfg.base_run.horizon));
            }
        }
        if (samples.empty()) {
            row.mean_ks = std::numeric_limits<double>::quiet_NaN();
            row.stddev_ks = std::numeric_limits<double>::quiet_NaN();
        } else {
            double sum = 0.0;
            for (double s : samples)
                sum += s;
            row.mean_ks = sum / static_cast<double>(samples.size());
            double sq = 0.0;
            for (double s : samples)
                sq += (s - row.mean_ks) * (s - row.mean_ks);
            row.stddev_ks =
                std::sqrt(sq / static_cast<double>(samples.size()));
        }
        summary.rows.push_back(row);
    }
    return summary;
}

inline void write_sweep_csv(
    std::ostream &os, const SweepSummary &summary,
    const std::vector<std::pair<std::string, std::string>> &metadata = {})
{
    for (const auto &[key, value] : metadata)
        os << "# " << key << "=" << value << "\n";
    os << "epsilon,mean_ks,stddev_ks,settled,censored,realizations\n";
    for (const SweepRow &r : summary.rows) {
        os << detail::format_double(r.epsilon) << ','
           << detail::format_double(r.mean_ks) << ','
           << detail::format_double(r.stddev_ks) << ',' << r.settled << ','
           << r.censored << ',' << r.realizations << "\n";
    }
}

/// JSON document embedding the full configuration (including the master
/// seed) next to the per-epsilon rows.
inline nlohmann::json sweep_to_json(const SweepConfig &cfg,
                                    const SweepSummary &summary)
{
    nlohmann::json j;
    j["config"]["epsilons"] = cfg.epsilons;
    j["config"]["realizations"] = cfg.realizations;
    j["config"]["master_seed"] = cfg.master_seed;
    j["config"]["censor_policy"] = to_string(cfg.censor_policy);
    j["config"]["workers"] = cfg.workers;
    j["config"]["horizon"] = cfg.base_run.horizon;
    j["config"]["settle_threshold"] = cfg.base_run.settle_threshold;
    j["config"]["stop_when_absorbed"] = cfg.base_run.stop_when_absorbed;
    j["config"]["params"]["phi0"] = cfg.base_run.params.phi0;
    j["config"]["params"]["phiR"] = cfg.base_run.params.phiR;
    j["config"]["params"]["theta0"] = cfg.base_run.params.theta0;
    j["config"]["params"]["nbar"] = cfg.base_run.params.nbar;
    j["config"]["stddev_convention"] = "population";
    if (const auto *d = std::get_if<DiagonalState>(&cfg.base_run.initial_state))
        j["config"]["initial_populations"] = d->probs();
    j["rows"] = nlohmann::json::array();
    for (const SweepRow &r : summary.rows) {
        nlohmann::json row;
        row["epsilon"] = r.epsilon;
        row["mean_ks"] = r.mean_ks;
        row["stddev_ks"] = r.stddev_ks;
        row["settled"] = r.settled;
        row["censored"] = r.censored;
        row["realizations"] = r.realizations;
        j["rows"].push_back(row);
    }
    return j;
}

} // namespace fockfb
