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

#include <algorithm>
#include <optional>

#include "fock_feedback/kraus.hpp"

namespace fockfb {

/// Configuration of the Lyapunov feedback: goal photon number, gain
/// epsilon multiplying the purity term, tie-break preference order for
/// the argmin, and the distance weight d(n). The default weight is the
/// quadratic (n - nbar)^2; any d with d(nbar) = 0, increasing above nbar
/// and decreasing below it, works.
struct ControllerConfig {
    int nbar = 0;
    double epsilon = 0.0;
    std::array<Control, 3> tie_break = {Control::Probe, Control::Down,
                                        Control::Up};
    std::function<double(int)> distance_weight = nullptr;

    double d(int n) const
    {
        if (distance_weight)
            return distance_weight(n);
        const double x = static_cast<double>(n - nbar);
        return x * x;
    }
};

/// Relative tolerance for argmin ties, scaled by the spread of the three
/// expected values.
inline constexpr double kTieTolerance = 1e-12;

namespace detail {

inline int control_index(Control u) { return to_int(u) + 1; }

} // namespace detail

/// W(rho) = -sum_n rho_nn^2; the purity term of the Lyapunov function.
inline double purity_term(const DiagonalState &d)
{
    double s = 0.0;
    for (int n = 0; n < d.dim(); ++n)
        s += d[n] * d[n];
    return -s;
}

/// V(rho) = sum_n rho_nn d(n); the distance term.
inline double distance_term(const DiagonalState &state,
                            const ControllerConfig &cfg)
{
    double s = 0.0;
    for (int n = 0; n < state.dim(); ++n)
        s += state[n] * cfg.d(n);
    return s;
}

/// V_eps(rho) = sum_n rho_nn d(n) - eps sum_n rho_nn^2.
inline double lyapunov_value(const DiagonalState &state,
                             const ControllerConfig &cfg)
{
    return distance_term(state, cfg) + cfg.epsilon * purity_term(state);
}

inline double lyapunov_value(const DensityMatrix &state,
                             const ControllerConfig &cfg)
{
    // Only the diagonal enters: V_eps(rho) = V_eps(dephase(rho)).
    return lyapunov_value(dephase(state), cfg);
}

/// E[V_eps(rho') | rho, u], explicitly over the two outcome branches. A
/// branch whose probability is numerically impossible contributes zero.
inline double expected_lyapunov(const DiagonalState &state, Control u,
                                const InteractionParams &params,
                                const ControllerConfig &cfg)
{
    double acc = 0.0;
    for (Outcome y : kAllOutcomes) {
        const double p = outcome_probability(state, u, y, params);
        if (p <= kImpossibleProbability)
            continue;
        // A lookahead branch grows by at most one level; it is not
        // subject to the trajectory buffer cap.
        acc += p * lyapunov_value(
                       diagonal_step(state, u, y, params, state.dim() + 1),
                       cfg);
    }
    return acc;
}

inline double expected_lyapunov(const DensityMatrix &state, Control u,
                                const InteractionParams &params,
                                const ControllerConfig &cfg)
{
    double acc = 0.0;
    for (Outcome y : kAllOutcomes) {
        const double p = outcome_probability(state, u, y, params);
        if (p <= kImpossibleProbability)
            continue;
        acc += p * lyapunov_value(markov_step(state, u, y, params), cfg);
    }
    return acc;
}

/// Q_W(rho, u) = W(rho) - E[W(rho') | rho, u].
inline double q_w(const DiagonalState &state, Control u,
                  const InteractionParams &params)
{
    double expected = 0.0;
    for (Outcome y : kAllOutcomes) {
        const double p = outcome_probability(state, u, y, params);
        if (p <= kImpossibleProbability)
            continue;
        expected += p * purity_term(
                            diagonal_step(state, u, y, params, state.dim() + 1));
    }
    return purity_term(state) - expected;
}

/// Closed form of Q_V(rho, u) = V(rho) - E[V(rho') | rho, u], written
/// with the d(n +- 1) - d(n) differences so it holds for any admissible
/// distance weight:
///   Q_V(rho, 0)  = 0,
///   Q_V(rho, +1) = -sum_n rho_nn [d(n+1) - d(n)] sin^2(theta0/2 sqrt(n+1)),
///   Q_V(rho, -1) = -sum_n rho_nn [d(n-1) - d(n)] sin^2(theta0/2 sqrt(n)).
inline double q_v_closed_form(const DiagonalState &d, Control u,
                              const InteractionParams &params,
                              const ControllerConfig &cfg)
{
    using detail::pulse_angle;
    using detail::sin2;
    if (u == Control::Probe)
        return 0.0;
    double acc = 0.0;
    for (int n = 0; n < d.dim(); ++n) {
        if (u == Control::Up) {
            acc -= d[n] * (cfg.d(n + 1) - cfg.d(n)) *
                   sin2(pulse_angle(params, n + 1));
        } else if (n >= 1) {
            // n = 0 drops out with sin^2(0) = 0.
            acc -= d[n] * (cfg.d(n - 1) - cfg.d(n)) *
                   sin2(pulse_angle(params, n));
        }
    }
    return acc;
}

/// One controller evaluation: V, W, V_eps, the three Q-functions per
/// control, and the chosen control.
struct LyapunovReport {
    double v = 0.0;
    double w = 0.0;
    double v_eps = 0.0;
    std::array<double, 3> q_v = {};     // indexed Down, Probe, Up
    std::array<double, 3> q_w = {};
    std::array<double, 3> q_v_eps = {};
    Control chosen = Control::Probe;

    double q_v_of(Control u) const { return q_v[detail::control_index(u)]; }
    double q_w_of(Control u) const { return q_w[detail::control_index(u)]; }
    double q_v_eps_of(Control u) const
    {
        return q_v_eps[detail::control_index(u)];
    }
};

namespace detail {

/// Argmax of Q_{V_eps} (equivalently argmin of the expected Lyapunov
/// value); ties within kTieTolerance of the spread break by preference
/// order.
inline Control pick_control(const std::array<double, 3> &q_v_eps,
                            const std::array<Control, 3> &tie_break)
{
    const double best = *std::max_element(q_v_eps.begin(), q_v_eps.end());
    const double worst = *std::min_element(q_v_eps.begin(), q_v_eps.end());
    const double tol = kTieTolerance * std::max(best - worst, 1.0);
    for (Control u : tie_break)
        if (q_v_eps[control_index(u)] >= best - tol)
            return u;
    return Control::Probe; // unreachable
}

} // namespace detail

/// Evaluate the controller on a diagonal state. Q_V and Q_W are computed
/// from the explicit two-branch expectations; the closed-form Q_V is the
/// independent cross-check.
inline LyapunovReport q_values(const DiagonalState &state,
                               const InteractionParams &params,
                               const ControllerConfig &cfg)
{
    LyapunovReport r;
    r.v = distance_term(state, cfg);
    r.w = purity_term(state);
    r.v_eps = r.v + cfg.epsilon * r.w;
    for (Control u : kAllControls) {
        double ev = 0.0, ew = 0.0;
        for (Outcome y : kAllOutcomes) {
            const double p = outcome_probability(state, u, y, params);
            if (p <= kImpossibleProbability)
                continue;
            const DiagonalState next =
                diagonal_step(state, u, y, params, state.dim() + 1);
            ev += p * distance_term(next, cfg);
            ew += p * purity_term(next);
        }
        const int i = detail::control_index(u);
        r.q_v[i] = r.v - ev;
        r.q_w[i] = r.w - ew;
        r.q_v_eps[i] = r.q_v[i] + cfg.epsilon * r.q_w[i];
    }
    r.chosen = detail::pick_control(r.q_v_eps, cfg.tie_break);
    return r;
}

inline LyapunovReport q_values(const DensityMatrix &state,
                               const InteractionParams &params,
                               const ControllerConfig &cfg)
{
    // The feedback only sees populations (Delta-commutation).
    return q_values(dephase(state), params, cfg);
}

inline Control feedback(const DiagonalState &state,
                        const InteractionParams &params,
                        const ControllerConfig &cfg)
{
    return q_values(state, params, cfg).chosen;
}

inline Control feedback(const DensityMatrix &state,
                        const InteractionParams &params,
                        const ControllerConfig &cfg)
{
    return q_values(dephase(state), params, cfg).chosen;
}

/// Whether sin^2(theta0/2 sqrt(n)) lies in [1/2 - a, 1/2 + a].
inline bool in_band(double theta0, double a, long long n, double slack = 0.0)
{
    const double s2 =
        detail::sin2(0.5 * theta0 * std::sqrt(static_cast<double>(n)));
    return s2 >= 0.5 - a - slack && s2 <= 0.5 + a + slack;
}

enum class WindowMode { Constructive, Scan };

/// Smallest photon number Nbar > N starting a run of N0 consecutive
/// levels whose sin^2(theta0/2 sqrt(n)) stays in the band [1/2-a, 1/2+a].
///
/// Constructive mode builds the window around eta(l) = [2/theta0
/// (l pi/2 + pi/4)]^2 for a large even l (padding N0 to even); scan mode
/// searches linearly and is the oracle for the constructive route.
inline int window_start(double theta0, int N0, int N, double a,
                        WindowMode mode = WindowMode::Constructive,
                        long long scan_limit = 50'000'000)
{
    if (theta0 == 0.0)
        throw std::invalid_argument("window_start: theta0 = 0");
    if (!(a > 0.0 && a < 0.5))
        throw std::invalid_argument("window_start: a outside (0, 1/2)");
    if (N0 < 1 || N < 1)
        throw std::invalid_argument("window_start: N0 and N must be positive");
    const double t = std::abs(theta0);

    if (mode == WindowMode::Scan) {
        int run = 0;
        for (long long n = N + 1; n <= scan_limit; ++n) {
            run = in_band(theta0, a, n) ? run + 1 : 0;
            if (run >= N0)
                return static_cast<int>(n - N0 + 1);
        }
        throw WindowNotFound("window_start: no band window below scan limit");
    }

    const int n0e = (N0 % 2 == 0) ? N0 : N0 + 1;
    const double h = std::numbers::pi / 4.0 - std::asin(std::sqrt(0.5 - a));
    const auto eta = [t](long long l) {
        const double x =
            (2.0 / t) * (l * std::numbers::pi / 2.0 + std::numbers::pi / 4.0);
        return x * x;
    };
    for (long long l = 0;; l += 2) {
        const double e = eta(l);
        if (e > 0.5 * n0e + N &&
            t * n0e / (8.0 * std::sqrt(e - 0.5 * n0e)) <= h) {
            const long long nbar =
                static_cast<long long>(std::floor(e)) - n0e / 2 + 1;
            return static_cast<int>(nbar);
        }
        if (l > scan_limit)
            throw WindowNotFound("window_start: constructive search exhausted");
    }
}

/// Constructive support bound for the closed loop.
struct BoundCertificate {
    int m0 = 0;        // support ceiling
    int Nbar = 0;      // band window start
    int N0 = 0;        // requested window length, n0 + r0 + 1
    int N = 0;         // lower threshold fed to the window search
    double a = 0.0;    // band half-width
    int n0 = 0;        // initial support length
    int r0 = 0;        // initial support offset
};

/// Build the support bound m0: any diagonal state with support length at
/// most n0 whose top level reaches m0 makes the photon-removal control
/// strictly dominant, so closed-loop trajectories never climb past m0.
inline BoundCertificate bound_m0(double epsilon, int n0, int r0, int nbar,
                                 double theta0, double a = 0.4)
{
    if (epsilon <= 0.0)
        throw std::invalid_argument("bound_m0: epsilon must be positive");
    if (!(a > 0.0 && a < 0.5))
        throw std::invalid_argument("bound_m0: a outside (0, 1/2)");
    if (n0 < 0 || r0 < 0 || nbar < 0)
        throw std::invalid_argument("bound_m0: negative support parameters");
    const int n_threshold = static_cast<int>(
        std::ceil(0.5 * (2.0 * epsilon / (0.5 - a) + 2.0 * nbar + 1.0)));
    const int window_len = n0 + r0 + 1;
    const int nbar_window = window_start(theta0, window_len, n_threshold, a,
                                         WindowMode::Constructive);
    BoundCertificate cert;
    cert.m0 = nbar_window + n0 + r0;
    cert.Nbar = nbar_window;
    cert.N0 = window_len;
    cert.N = n_threshold;
    cert.a = a;
    cert.n0 = n0;
    cert.r0 = r0;
    return cert;
}

} // namespace fockfb
