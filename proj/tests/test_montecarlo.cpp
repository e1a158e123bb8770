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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fock_feedback/montecarlo.hpp"

namespace fockfb {
namespace {

const InteractionParams kParams = InteractionParams::benchmark();

SweepConfig small_sweep(int realizations, std::uint64_t master_seed = 9000)
{
    SweepConfig cfg;
    cfg.epsilons = {0.0, 1e3};
    cfg.realizations = realizations;
    cfg.master_seed = master_seed;
    cfg.base_run.initial_state = DiagonalState::uniform(0, 15);
    cfg.base_run.params = kParams;
    cfg.base_run.controller = ControllerConfig{kParams.nbar, 0.0};
    cfg.base_run.horizon = 600;
    cfg.base_run.stop_when_absorbed = true;
    return cfg;
}

std::string to_csv(const SweepSummary &s)
{
    std::ostringstream os;
    write_sweep_csv(os, s);
    return os.str();
}

TEST(RunSweep, SingleRealizationHasZeroSpread)
{
    SweepConfig cfg = small_sweep(1);
    const SweepSummary s = run_sweep(cfg);
    ASSERT_EQ(s.rows.size(), 2u);
    for (const SweepRow &row : s.rows) {
        EXPECT_EQ(row.settled + row.censored, 1);
        if (row.settled == 1) {
            EXPECT_EQ(row.mean_ks, std::round(row.mean_ks));
            EXPECT_EQ(row.stddev_ks, 0.0);
        }
    }
}

TEST(RunSweep, RerunIsBitIdentical)
{
    SweepConfig cfg = small_sweep(12);
    EXPECT_EQ(to_csv(run_sweep(cfg)), to_csv(run_sweep(cfg)));
}

TEST(RunSweep, WorkerCountDoesNotChangeTheAnswer)
{
    SweepConfig serial = small_sweep(12);
    SweepConfig parallel = small_sweep(12);
    parallel.workers = 3;
    EXPECT_EQ(to_csv(run_sweep(serial)), to_csv(run_sweep(parallel)));
}

TEST(RunSweep, SeedingMatchesSingleRunReplay)
{
    SweepConfig cfg = small_sweep(4);
    const SweepSummary s = run_sweep(cfg);
    for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
        double sum = 0.0;
        int settled = 0;
        for (int i = 0; i < cfg.realizations; ++i) {
            RunConfig rc = cfg.base_run;
            rc.controller.epsilon = cfg.epsilons[e];
            rc.seed = rng::hash3(cfg.master_seed, e,
                                 static_cast<std::uint64_t>(i));
            const auto ks = simulate_closed_loop(rc).settled_at;
            if (ks) {
                ++settled;
                sum += static_cast<double>(*ks);
            }
        }
        EXPECT_EQ(s.rows[e].settled, settled);
        if (settled > 0)
            EXPECT_NEAR(s.rows[e].mean_ks,
                        sum / static_cast<double>(settled), 1e-12);
    }
}

TEST(RunSweep, AccountingAndRangeInvariants)
{
    SweepConfig cfg = small_sweep(20);
    const SweepSummary s = run_sweep(cfg);
    for (const SweepRow &row : s.rows) {
        EXPECT_EQ(row.settled + row.censored, row.realizations);
        if (row.settled > 0) {
            EXPECT_GE(row.mean_ks, 0.0);
            EXPECT_LT(row.mean_ks,
                      static_cast<double>(cfg.base_run.horizon));
        }
    }
}

TEST(RunSweep, CensorPoliciesDifferUnderTightHorizon)
{
    SweepConfig cfg = small_sweep(16);
    cfg.base_run.horizon = 8; // almost nothing settles this fast
    cfg.base_run.stop_when_absorbed = false;
    const SweepSummary excluded = run_sweep(cfg);
    cfg.censor_policy = CensorPolicy::ClampToHorizon;
    const SweepSummary clamped = run_sweep(cfg);
    for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
        EXPECT_EQ(excluded.rows[e].censored, clamped.rows[e].censored);
        ASSERT_GT(excluded.rows[e].censored, 0);
        if (excluded.rows[e].settled == 0) {
            EXPECT_TRUE(std::isnan(excluded.rows[e].mean_ks));
            EXPECT_EQ(clamped.rows[e].mean_ks, 8.0);
        } else {
            EXPECT_GT(clamped.rows[e].mean_ks, excluded.rows[e].mean_ks);
        }
    }
}

TEST(RunSweep, RejectsDegenerateConfigs)
{
    SweepConfig cfg = small_sweep(1);
    cfg.epsilons.clear();
    EXPECT_THROW(run_sweep(cfg), std::invalid_argument);
    cfg = small_sweep(0);
    EXPECT_THROW(run_sweep(cfg), std::invalid_argument);
}

TEST(SweepCsv, SchemaAndRowCount)
{
    const SweepSummary s = run_sweep(small_sweep(2));
    std::ostringstream os;
    write_sweep_csv(os, s, {{"master_seed", "9000"}});
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "# master_seed=9000");
    std::getline(is, line);
    EXPECT_EQ(line, "epsilon,mean_ks,stddev_ks,settled,censored,realizations");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, 2);
}

TEST(SweepJson, EmbedsReproducibleConfig)
{
    const SweepConfig cfg = small_sweep(2, 31337);
    const nlohmann::json j = sweep_to_json(cfg, run_sweep(cfg));
    EXPECT_EQ(j["config"]["master_seed"], 31337);
    EXPECT_EQ(j["config"]["realizations"], 2);
    EXPECT_EQ(j["config"]["censor_policy"], "exclude");
    EXPECT_EQ(j["config"]["params"]["nbar"], kParams.nbar);
    EXPECT_EQ(j["config"]["initial_populations"].size(), 16u);
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_EQ(j["rows"][0]["epsilon"], 0.0);
    EXPECT_EQ(j["rows"][1]["epsilon"], 1e3);
}

} // namespace
} // namespace fockfb
