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

#include <array>
#include <cmath>
#include <numbers>

#include "fock_feedback/fock_core.hpp"

namespace fockfb {

/// Control input of the sampled loop. Probe runs the dispersive (QND)
/// interaction; Up / Down inject or remove a single photon via the
/// resonant interaction.
enum class Control : int { Down = -1, Probe = 0, Up = +1 };

/// Measured energy state of the probe atom after the interaction.
enum class Outcome { Ground, Excited };

inline constexpr std::array<Control, 3> kAllControls = {
    Control::Down, Control::Probe, Control::Up};
inline constexpr std::array<Outcome, 2> kAllOutcomes = {Outcome::Ground,
                                                        Outcome::Excited};

inline int to_int(Control u) { return static_cast<int>(u); }
inline char to_char(Outcome y) { return y == Outcome::Ground ? 'g' : 'e'; }

/// An outcome with probability at or below this is treated as impossible:
/// sampling never selects it and forcing it raises ImpossibleOutcome.
inline constexpr double kImpossibleProbability = 1e-14;

/// Default hard cap on the state buffer. Closed-loop support is provably
/// confined well below this, so hitting it signals a controller bug.
inline constexpr int kDefaultCapacity = 512;

/// Control-pulse parameters: dispersive phase per photon phi0, reference
/// phase phiR, resonant pulse angle theta0, and the goal photon number.
struct InteractionParams {
    double phi0 = 0.0;
    double phiR = 0.0;
    double theta0 = 0.0;
    int nbar = 0;

    /// Stabilizing choice of the reference phase: phiR = pi/2 - nbar*phi0.
    static InteractionParams theorem_compliant(double phi0, double theta0,
                                               int nbar)
    {
        return InteractionParams{phi0, std::numbers::pi / 2.0 - nbar * phi0,
                                 theta0, nbar};
    }

    /// The benchmark parameter set: phi0 = 0.252*3.14 and
    /// theta0 = 3.14*2/sqrt(nbar+1), with 3.14 standing in for pi so
    /// that phi0/pi and (theta0/pi)^2 are irrational. Pass true_pi to
    /// use pi itself instead (sensitivity variant).
    static InteractionParams benchmark(int nbar = 10, bool true_pi = false)
    {
        const double p = true_pi ? std::numbers::pi : 3.14;
        return theorem_compliant(0.252 * p, p * 2.0 / std::sqrt(nbar + 1.0),
                                 nbar);
    }
};

namespace detail {

// Half-angle weights entering every matrix element.
inline double probe_angle(const InteractionParams &p, int n)
{
    return 0.5 * (p.phi0 * n + p.phiR);
}
inline double pulse_angle(const InteractionParams &p, int n)
{
    return 0.5 * p.theta0 * std::sqrt(static_cast<double>(n));
}
inline double sin2(double x)
{
    const double s = std::sin(x);
    return s * s;
}
inline double cos2(double x)
{
    const double c = std::cos(x);
    return c * c;
}

} // namespace detail

/// Matrix of M_y(u) on a dim-dimensional truncation. The output space is
/// dim+1 for (Up, Ground), dim-1 for (Down, Excited) and dim otherwise.
/// All entries are real. The weight of the photon-removal channel at
/// n = 0 follows the sin(0)/0 = 1 convention and vanishes with sin(0).
inline Eigen::MatrixXd kraus_element(Control u, Outcome y,
                                     const InteractionParams &params, int dim)
{
    if (dim < 1)
        throw std::invalid_argument("kraus_element: dim < 1");
    using detail::probe_angle;
    using detail::pulse_angle;
    switch (u) {
    case Control::Probe: {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
        for (int n = 0; n < dim; ++n)
            m(n, n) = (y == Outcome::Ground)
                          ? std::cos(probe_angle(params, n))
                          : std::sin(probe_angle(params, n));
        return m;
    }
    case Control::Up: {
        if (y == Outcome::Ground) {
            // |n> -> sin(theta0/2 sqrt(n+1)) |n+1>
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim + 1, dim);
            for (int n = 0; n < dim; ++n)
                m(n + 1, n) = std::sin(pulse_angle(params, n + 1));
            return m;
        }
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
        for (int n = 0; n < dim; ++n)
            m(n, n) = std::cos(pulse_angle(params, n + 1));
        return m;
    }
    case Control::Down: {
        if (y == Outcome::Ground) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
            for (int n = 0; n < dim; ++n)
                m(n, n) = std::cos(pulse_angle(params, n));
            return m;
        }
        // |n> -> sin(theta0/2 sqrt(n)) |n-1>, annihilating |0>
        const int rows = std::max(dim - 1, 1);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, dim);
        for (int n = 1; n < dim; ++n)
            m(n - 1, n) = std::sin(pulse_angle(params, n));
        return m;
    }
    }
    throw std::logic_error("kraus_element: unreachable");
}

/// Tr(M_y(u) rho M_y(u)^dag) through the diagonal closed forms; only the
/// populations enter, for any u.
inline double outcome_probability(const DiagonalState &rho, Control u,
                                  Outcome y, const InteractionParams &params)
{
    using detail::cos2;
    using detail::probe_angle;
    using detail::pulse_angle;
    using detail::sin2;
    double p = 0.0;
    for (int n = 0; n < rho.dim(); ++n) {
        double w = 0.0;
        switch (u) {
        case Control::Probe:
            w = (y == Outcome::Ground) ? cos2(probe_angle(params, n))
                                       : sin2(probe_angle(params, n));
            break;
        case Control::Up:
            w = (y == Outcome::Ground) ? sin2(pulse_angle(params, n + 1))
                                       : cos2(pulse_angle(params, n + 1));
            break;
        case Control::Down:
            w = (y == Outcome::Ground) ? cos2(pulse_angle(params, n))
                                       : sin2(pulse_angle(params, n));
            break;
        }
        p += rho[n] * w;
    }
    return p;
}

inline double outcome_probability(const DensityMatrix &rho, Control u,
                                  Outcome y, const InteractionParams &params)
{
    // Probabilities only see the diagonal.
    return outcome_probability(dephase(rho), u, y, params);
}

/// One step of the measurement back-action on a general density matrix:
/// rho -> M_y(u) rho M_y(u)^dag / Tr(.). The buffer grows by one slot on
/// (Up, Ground) and shrinks by one on (Down, Excited).
inline DensityMatrix markov_step(const DensityMatrix &rho, Control u,
                                 Outcome y, const InteractionParams &params,
                                 int capacity = kDefaultCapacity)
{
    if (u == Control::Up && y == Outcome::Ground && rho.dim() + 1 > capacity)
        throw CapacityExceeded("markov_step: buffer would exceed capacity");
    const Eigen::MatrixXd m = kraus_element(u, y, params, rho.dim());
    Eigen::MatrixXcd out = m * rho.entries() * m.transpose();
    const double tr = out.trace().real();
    if (tr <= kImpossibleProbability) {
        std::ostringstream os;
        os << "markov_step: outcome " << to_char(y) << " with u=" << to_int(u)
           << " has probability " << tr;
        throw ImpossibleOutcome(os.str());
    }
    out /= tr;
    // Exact re-hermitization keeps rounding from accumulating.
    out = 0.5 * (out + Eigen::MatrixXcd(out.adjoint()));
    return DensityMatrix(std::move(out));
}

/// Diagonal fast path of markov_step: the six closed-form population
/// updates, no matrix products. Down-shifts keep the buffer size (the
/// freed top slot becomes an exact zero); compaction is explicit.
inline DiagonalState diagonal_step(const DiagonalState &d, Control u,
                                   Outcome y, const InteractionParams &params,
                                   int capacity = kDefaultCapacity)
{
    using detail::cos2;
    using detail::probe_angle;
    using detail::pulse_angle;
    using detail::sin2;
    const int dim = d.dim();
    const bool grows = (u == Control::Up && y == Outcome::Ground);
    if (grows && dim + 1 > capacity)
        throw CapacityExceeded("diagonal_step: buffer would exceed capacity");
    std::vector<double> out(static_cast<std::size_t>(grows ? dim + 1 : dim),
                            0.0);
    switch (u) {
    case Control::Probe:
        for (int n = 0; n < dim; ++n)
            out[n] = d[n] * ((y == Outcome::Ground)
                                 ? cos2(probe_angle(params, n))
                                 : sin2(probe_angle(params, n)));
        break;
    case Control::Up:
        if (y == Outcome::Ground) {
            for (int n = 1; n <= dim; ++n)
                out[n] = d[n - 1] * sin2(pulse_angle(params, n));
        } else {
            for (int n = 0; n < dim; ++n)
                out[n] = d[n] * cos2(pulse_angle(params, n + 1));
        }
        break;
    case Control::Down:
        if (y == Outcome::Ground) {
            for (int n = 0; n < dim; ++n)
                out[n] = d[n] * cos2(pulse_angle(params, n));
        } else {
            for (int n = 0; n + 1 < dim; ++n)
                out[n] = d[n + 1] * sin2(pulse_angle(params, n + 1));
        }
        break;
    }
    double tr = 0.0;
    for (double v : out)
        tr += v;
    if (tr <= kImpossibleProbability) {
        std::ostringstream os;
        os << "diagonal_step: outcome " << to_char(y) << " with u=" << to_int(u)
           << " has probability " << tr;
        throw ImpossibleOutcome(os.str());
    }
    for (double &v : out)
        v /= tr;
    return DiagonalState(std::move(out));
}

} // namespace fockfb
