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

#include <cstdio>
#include <ostream>
#include <variant>

#include "fock_feedback/lyapunov.hpp"
#include "fock_feedback/rng.hpp"

namespace fockfb {

using State = std::variant<DiagonalState, DensityMatrix>;

/// One seeded closed-loop run.
struct RunConfig {
    State initial_state = DiagonalState::point_mass(0);
    InteractionParams params;
    ControllerConfig controller;
    int horizon = 120;
    std::uint64_t seed = 0;
    double settle_threshold = 0.9;
    int capacity = kDefaultCapacity;
    /// Stop once the goal population exceeds absorb_threshold; the
    /// remaining suffix is then settled for any threshold below it.
    /// Intended for sweeps where only the settling time matters.
    bool stop_when_absorbed = false;
    double absorb_threshold = 1.0 - 1e-13;
};

/// Per-step record: the state quantities refer to rho_k before the
/// update, u_k and y_k to the pulse applied at step k.
struct StepRecord {
    int k = 0;
    Control u = Control::Probe;
    Outcome y = Outcome::Ground;
    double p_g = 0.0;
    double pop_below = 0.0; // population at n < nbar
    double pop_goal = 0.0;  // population at n = nbar
    double pop_above = 0.0; // population at n > nbar
    double v_eps = 0.0;
    int n_max = 0;
};

struct Trajectory {
    std::vector<StepRecord> records;
    std::optional<int> settled_at;
    State final_state = DiagonalState::point_mass(0);
    bool absorbed = false; // run ended early in the absorbed regime
};

/// Settling time: the smallest k such that pop_goal stays above the
/// threshold for every recorded step from k on. Absent when the suffix
/// condition never holds within the horizon (censored run).
inline std::optional<int> settling_time(const Trajectory &traj,
                                        double threshold)
{
    const auto &r = traj.records;
    const int m = static_cast<int>(r.size());
    int last_bad = -1;
    for (int j = m - 1; j >= 0; --j) {
        if (!(r[static_cast<std::size_t>(j)].pop_goal > threshold)) {
            last_bad = j;
            break;
        }
    }
    if (last_bad == m - 1 && !traj.absorbed)
        return std::nullopt;
    return last_bad + 1;
}

namespace detail {

struct Populations {
    double below = 0.0, goal = 0.0, above = 0.0;
};

inline Populations split_populations(const DiagonalState &d, int nbar)
{
    Populations p;
    for (int n = 0; n < d.dim(); ++n) {
        if (n < nbar)
            p.below += d[n];
        else if (n == nbar)
            p.goal += d[n];
        else
            p.above += d[n];
    }
    return p;
}

template <class StateT>
Trajectory simulate_loop(StateT rho, const RunConfig &cfg)
{
    Trajectory traj;
    traj.records.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int k = 0; k < cfg.horizon; ++k) {
        DiagonalState diag = [&] {
            if constexpr (std::is_same_v<StateT, DiagonalState>)
                return rho;
            else
                return dephase(rho);
        }();
        const Populations pops =
            split_populations(diag, cfg.controller.nbar);
        const LyapunovReport report =
            q_values(diag, cfg.params, cfg.controller);
        const Control u = report.chosen;
        const double p_g =
            outcome_probability(diag, u, Outcome::Ground, cfg.params);

        // One uniform variate per step; an impossible branch is never
        // sampled.
        Outcome y;
        if (p_g <= kImpossibleProbability)
            y = Outcome::Excited;
        else if (1.0 - p_g <= kImpossibleProbability)
            y = Outcome::Ground;
        else
            y = rng::uniform01(cfg.seed, 0, static_cast<std::uint64_t>(k)) <
                        p_g
                    ? Outcome::Ground
                    : Outcome::Excited;

        StepRecord rec;
        rec.k = k;
        rec.u = u;
        rec.y = y;
        rec.p_g = p_g;
        rec.pop_below = pops.below;
        rec.pop_goal = pops.goal;
        rec.pop_above = pops.above;
        rec.v_eps = report.v_eps;
        rec.n_max = support_stats(diag).n_max;
        traj.records.push_back(rec);

        if constexpr (std::is_same_v<StateT, DiagonalState>)
            rho = diagonal_step(rho, u, y, cfg.params, cfg.capacity)
                      .compacted();
        else
            rho = markov_step(rho, u, y, cfg.params, cfg.capacity)
                      .compacted();

        if (cfg.stop_when_absorbed) {
            const DiagonalState after = [&] {
                if constexpr (std::is_same_v<StateT, DiagonalState>)
                    return rho;
                else
                    return dephase(rho);
            }();
            if (split_populations(after, cfg.controller.nbar).goal >
                cfg.absorb_threshold) {
                traj.absorbed = true;
                break;
            }
        }
    }
    traj.final_state = State{std::move(rho)};
    traj.settled_at = settling_time(traj, cfg.settle_threshold);
    return traj;
}

inline std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace detail

/// Closed-loop realization: u_k = feedback(rho_k), y_k sampled from the
/// outcome distribution with the counter-based stream of cfg.seed, state
/// updated through the diagonal fast path when the initial state is
/// diagonal (the loop preserves diagonality) and through the dense path
/// otherwise. Identical seeds give identical trajectories.
inline Trajectory simulate_closed_loop(const RunConfig &cfg)
{
    if (cfg.horizon < 1)
        throw std::invalid_argument("simulate_closed_loop: horizon < 1");
    if (!(cfg.settle_threshold > 0.0 && cfg.settle_threshold < 1.0))
        throw std::invalid_argument(
            "simulate_closed_loop: settle_threshold outside (0, 1)");
    return std::visit(
        [&](const auto &initial) {
            return detail::simulate_loop(initial, cfg);
        },
        cfg.initial_state);
}

/// CSV serialization; metadata pairs are embedded as leading '#' comment
/// lines so the run can be reproduced from the file alone.
inline void write_trajectory_csv(
    std::ostream &os, const Trajectory &traj,
    const std::vector<std::pair<std::string, std::string>> &metadata = {})
{
    for (const auto &[key, value] : metadata)
        os << "# " << key << "=" << value << "\n";
    os << "k,u,y,p_g,pop_below,pop_goal,pop_above,v_eps,n_max\n";
    for (const StepRecord &r : traj.records) {
        os << r.k << ',' << to_int(r.u) << ',' << to_char(r.y) << ','
           << detail::format_double(r.p_g) << ','
           << detail::format_double(r.pop_below) << ','
           << detail::format_double(r.pop_goal) << ','
           << detail::format_double(r.pop_above) << ','
           << detail::format_double(r.v_eps) << ',' << r.n_max << "\n";
    }
}

} // namespace fockfb
