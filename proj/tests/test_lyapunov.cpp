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

#include "fock_feedback/lyapunov.hpp"
#include "fock_feedback/sampling.hpp"

namespace fockfb {
namespace {

const InteractionParams kParams = InteractionParams::benchmark();
const ControllerConfig kCfg0{kParams.nbar, 0.0};
const ControllerConfig kCfg{kParams.nbar, 1e3};

double sin2_pulse(int n)
{
    const double s = std::sin(0.5 * kParams.theta0 * std::sqrt(n));
    return s * s;
}

TEST(LyapunovValue, GoalPointMass)
{
    const DiagonalState goal = DiagonalState::point_mass(kParams.nbar);
    EXPECT_DOUBLE_EQ(lyapunov_value(goal, kCfg), -kCfg.epsilon);
}

TEST(LyapunovValue, UniformInitialCondition)
{
    // (1/16) sum_{n=0}^{15} (n-10)^2 = 440/16
    EXPECT_NEAR(lyapunov_value(DiagonalState::uniform(0, 15), kCfg0), 27.5,
                1e-12);
}

TEST(LyapunovValue, OneAboveGoal)
{
    EXPECT_DOUBLE_EQ(
        lyapunov_value(DiagonalState::point_mass(kParams.nbar + 1), kCfg0),
        1.0);
}

TEST(LyapunovValue, OnlySeesTheDiagonal)
{
    std::mt19937_64 gen(47);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = random_density_matrix(gen, 9);
        EXPECT_NEAR(lyapunov_value(rho, kCfg),
                    lyapunov_value(dephase(rho), kCfg), 1e-10);
    }
}

TEST(ExpectedLyapunov, GoalIsQndFixedPoint)
{
    const DiagonalState goal = DiagonalState::point_mass(kParams.nbar);
    EXPECT_NEAR(expected_lyapunov(goal, Control::Probe, kParams, kCfg),
                -kCfg.epsilon, 1e-9);
}

TEST(ExpectedLyapunov, InjectionFromGoalTwoBranchValue)
{
    const DiagonalState goal = DiagonalState::point_mass(kParams.nbar);
    // Ground branch reaches d = 1 with probability sin^2; excited branch
    // stays at the goal with d = 0.
    EXPECT_NEAR(expected_lyapunov(goal, Control::Up, kParams, kCfg0),
                sin2_pulse(kParams.nbar + 1), 1e-12);
}

TEST(ExpectedLyapunov, ProbeConservesDistanceTerm)
{
    std::mt19937_64 gen(53);
    for (int trial = 0; trial < 20; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, 17);
        EXPECT_NEAR(expected_lyapunov(d, Control::Probe, kParams, kCfg0),
                    distance_term(d, kCfg0), 1e-10);
    }
}

TEST(QValues, GoalPointMassInjectionPenalty)
{
    const DiagonalState goal = DiagonalState::point_mass(kParams.nbar);
    const LyapunovReport r = q_values(goal, kParams, kCfg);
    EXPECT_NEAR(r.q_v_of(Control::Up), -sin2_pulse(kParams.nbar + 1), 1e-12);
    EXPECT_LT(r.q_v_of(Control::Up), 0.0);
}

TEST(QValues, AboveGoalRemovalGain)
{
    const int n = kParams.nbar + 4;
    const LyapunovReport r =
        q_values(DiagonalState::point_mass(n), kParams, kCfg);
    const double expected =
        (2.0 * (n - kParams.nbar) - 1.0) * sin2_pulse(n);
    EXPECT_NEAR(r.q_v_of(Control::Down), expected, 1e-10);
    EXPECT_GT(r.q_v_of(Control::Down), 0.0);
}

TEST(QValues, PulseQwVanishesOnFockStates)
{
    for (int n : {0, 3, 10, 25}) {
        const LyapunovReport r =
            q_values(DiagonalState::point_mass(n), kParams, kCfg);
        EXPECT_NEAR(r.q_w_of(Control::Up), 0.0, 1e-12);
        EXPECT_NEAR(r.q_w_of(Control::Down), 0.0, 1e-12);
    }
}

TEST(QValues, ReportIsInternallyConsistent)
{
    std::mt19937_64 gen(59);
    const DiagonalState d = random_diagonal_state(gen, 0, 14);
    const LyapunovReport r = q_values(d, kParams, kCfg);
    EXPECT_DOUBLE_EQ(r.v_eps, r.v + kCfg.epsilon * r.w);
    for (Control u : kAllControls)
        EXPECT_NEAR(r.q_v_eps_of(u),
                    r.q_v_of(u) + kCfg.epsilon * r.q_w_of(u), 1e-12);
}

TEST(QvClosedForm, ProbeIsIdenticallyZero)
{
    std::mt19937_64 gen(61);
    for (int trial = 0; trial < 10; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, 23);
        EXPECT_EQ(q_v_closed_form(d, Control::Probe, kParams, kCfg0), 0.0);
    }
}

TEST(QvClosedForm, VacuumRemovalVanishes)
{
    EXPECT_EQ(q_v_closed_form(DiagonalState::point_mass(0), Control::Down,
                              kParams, kCfg0),
              0.0);
}

TEST(QvClosedForm, MatchesExpectationOracle)
{
    std::mt19937_64 gen(67);
    std::uniform_int_distribution<int> hi(0, 29);
    for (int trial = 0; trial < 100; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, hi(gen));
        for (Control u : {Control::Up, Control::Down}) {
            const double oracle = distance_term(d, kCfg0) -
                                  expected_lyapunov(d, u, kParams, kCfg0);
            EXPECT_NEAR(q_v_closed_form(d, u, kParams, kCfg0), oracle,
                        1e-10);
        }
    }
}

TEST(QvClosedForm, SupportsNonQuadraticWeights)
{
    ControllerConfig cfg = kCfg0;
    cfg.distance_weight = [&](int n) {
        return std::abs(static_cast<double>(n - kParams.nbar));
    };
    std::mt19937_64 gen(71);
    const DiagonalState d = random_diagonal_state(gen, 0, 19);
    for (Control u : {Control::Up, Control::Down}) {
        const double oracle = distance_term(d, cfg) -
                              expected_lyapunov(d, u, kParams, cfg);
        EXPECT_NEAR(q_v_closed_form(d, u, kParams, cfg), oracle, 1e-10);
    }
}

TEST(Feedback, PointMassPolicy)
{
    EXPECT_EQ(feedback(DiagonalState::point_mass(kParams.nbar + 3), kParams,
                       kCfg),
              Control::Down);
    EXPECT_EQ(feedback(DiagonalState::point_mass(kParams.nbar - 3), kParams,
                       kCfg),
              Control::Up);
    EXPECT_EQ(feedback(DiagonalState::point_mass(kParams.nbar), kParams,
                       kCfg),
              Control::Probe);
}

TEST(Feedback, InvariantUnderSharedOffsetInWeight)
{
    ControllerConfig shifted = kCfg;
    shifted.distance_weight = [&](int n) {
        const double x = static_cast<double>(n - kParams.nbar);
        return x * x + 100.0;
    };
    std::mt19937_64 gen(73);
    for (int trial = 0; trial < 50; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, 24);
        EXPECT_EQ(feedback(d, kParams, kCfg),
                  feedback(d, kParams, shifted));
    }
}

TEST(Feedback, AgreesBetweenDenseAndDephasedState)
{
    std::mt19937_64 gen(79);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = random_density_matrix(gen, 10);
        EXPECT_EQ(feedback(rho, kParams, kCfg),
                  feedback(dephase(rho), kParams, kCfg));
    }
}

TEST(QwIdentities, BoundedByOne)
{
    std::mt19937_64 gen(83);
    for (int trial = 0; trial < 100; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, 24);
        for (Control u : kAllControls)
            EXPECT_LE(std::abs(q_w(d, u, kParams)), 1.0 + 1e-12);
    }
}

TEST(QwIdentities, ProbeIsNonnegativeWithStabilizingPhase)
{
    std::mt19937_64 gen(89);
    for (int trial = 0; trial < 200; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, 24);
        EXPECT_GE(q_w(d, Control::Probe, kParams), -1e-12);
    }
}

TEST(QwIdentities, StrictlyPositiveOnWellMixedStates)
{
    std::mt19937_64 gen(97);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(12, 0.0);
        std::uniform_int_distribution<int> pick(0, 11);
        int i = pick(gen), j = pick(gen);
        if (i == j)
            j = (j + 1) % 12;
        p[static_cast<std::size_t>(i)] = 0.45;
        p[static_cast<std::size_t>(j)] = 0.55;
        EXPECT_GT(q_w(DiagonalState(std::move(p)), Control::Probe, kParams),
                  0.0);
    }
}

TEST(Supermartingale, ChosenControlNeverIncreasesVEps)
{
    std::mt19937_64 gen(101);
    for (int trial = 0; trial < 200; ++trial) {
        const DiagonalState d = random_diagonal_state(gen, 0, 29);
        const LyapunovReport r = q_values(d, kParams, kCfg);
        EXPECT_GE(r.q_v_eps_of(r.chosen), -1e-12);
    }
}

TEST(Supermartingale, VanishesExactlyAtTheGoal)
{
    const LyapunovReport r =
        q_values(DiagonalState::point_mass(kParams.nbar), kParams, kCfg);
    EXPECT_NEAR(r.q_v_eps_of(r.chosen), 0.0, 1e-12);
}

TEST(WindowStart, ScanModeFindsPaperWindow)
{
    const int nbar = window_start(kParams.theta0, 4, 20, 0.4,
                                  WindowMode::Scan);
    EXPECT_GT(nbar, 20);
    for (int n = nbar; n < nbar + 4; ++n)
        EXPECT_TRUE(in_band(kParams.theta0, 0.4, n));
}

TEST(WindowStart, ConstructiveModeSatisfiesMembership)
{
    for (int n0 : {1, 4, 7, 16}) {
        for (double a : {0.1, 0.4}) {
            const int nbar = window_start(kParams.theta0, n0, 20, a,
                                          WindowMode::Constructive);
            EXPECT_GT(nbar, 20);
            for (int n = nbar; n < nbar + n0; ++n)
                EXPECT_TRUE(in_band(kParams.theta0, a, n, 1e-12));
        }
    }
}

TEST(WindowStart, ScanNeverBeatsConstructiveFromTheSameThreshold)
{
    const int constructive = window_start(kParams.theta0, 6, 30, 0.25,
                                          WindowMode::Constructive);
    const int scanned =
        window_start(kParams.theta0, 6, 30, 0.25, WindowMode::Scan);
    EXPECT_LE(scanned, constructive);
}

TEST(WindowStart, ScanLimitSignalsNotFound)
{
    EXPECT_THROW(window_start(kParams.theta0, 50, 20, 0.1, WindowMode::Scan,
                              /*scan_limit=*/40),
                 WindowNotFound);
}

TEST(BoundM0, CertificateInvariants)
{
    const BoundCertificate cert =
        bound_m0(1e3, 15, 0, kParams.nbar, kParams.theta0, 0.4);
    EXPECT_EQ(cert.N0, 16);
    EXPECT_EQ(cert.m0, cert.Nbar + 15);
    EXPECT_GT(cert.m0, 15 + 0 + kParams.nbar + 1);
    EXPECT_GT(cert.Nbar, cert.N);
    for (int n = cert.Nbar; n < cert.Nbar + cert.N0; ++n)
        EXPECT_TRUE(in_band(kParams.theta0, cert.a, n, 1e-12));
}

TEST(BoundM0, RejectsZeroGain)
{
    EXPECT_THROW(bound_m0(0.0, 15, 0, 10, kParams.theta0),
                 std::invalid_argument);
}

TEST(BoundM0, ThresholdDivergesTowardTheHalfLimit)
{
    // N scales like 2 epsilon / (1/2 - a), so a near 1/2 is expensive.
    const BoundCertificate near_half =
        bound_m0(1e3, 15, 0, kParams.nbar, kParams.theta0, 0.49);
    const BoundCertificate moderate =
        bound_m0(1e3, 15, 0, kParams.nbar, kParams.theta0, 0.1);
    EXPECT_GT(near_half.N, moderate.N);
}

TEST(BoundM0, RemovalDominatesAtTheCeiling)
{
    const BoundCertificate cert =
        bound_m0(1e3, 15, 0, kParams.nbar, kParams.theta0, 0.4);
    std::mt19937_64 gen(103);
    for (int trial = 0; trial < 10; ++trial) {
        const DiagonalState d =
            random_diagonal_state(gen, cert.m0 - 15, cert.m0);
        const LyapunovReport r =
            q_values(d, kParams, ControllerConfig{kParams.nbar, 1e3});
        EXPECT_GT(r.q_v_eps_of(Control::Down),
                  std::max(r.q_v_eps_of(Control::Probe),
                           r.q_v_eps_of(Control::Up)));
    }
}

TEST(BoundM0, InjectionNeverPaysAboveTheGoalBand)
{
    // n_length <= n0 and n_max >= n0 + nbar forces n_min >= nbar.
    std::mt19937_64 gen(107);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> hi(15 + kParams.nbar,
                                              15 + kParams.nbar + 30);
        const int top = hi(gen);
        const DiagonalState d = random_diagonal_state(gen, top - 15, top);
        EXPECT_LE(q_v_closed_form(d, Control::Up, kParams, kCfg0), 1e-12);
    }
}

} // namespace
} // namespace fockfb
