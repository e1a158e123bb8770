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

#include <random>

#include "fock_feedback/fock_core.hpp"

namespace fockfb {

/// Random diagonal state with support inside [n_lo, n_hi]; the endpoint
/// populations are kept strictly positive so support_stats is exact.
inline DiagonalState random_diagonal_state(std::mt19937_64 &gen, int n_lo,
                                           int n_hi)
{
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    std::vector<double> p(static_cast<std::size_t>(n_hi) + 1, 0.0);
    double sum = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
        p[static_cast<std::size_t>(n)] = unif(gen);
        sum += p[static_cast<std::size_t>(n)];
    }
    for (double &v : p)
        v /= sum;
    return DiagonalState(std::move(p));
}

/// Random full-rank density matrix (normalized Ginibre square).
inline DensityMatrix random_density_matrix(std::mt19937_64 &gen, int dim)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n)
            a(m, n) = std::complex<double>(normal(gen), normal(gen));
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + Eigen::MatrixXcd(rho.adjoint()));
    return DensityMatrix(std::move(rho));
}

/// Whether x is within tol of a fraction with denominator <= max_den.
/// Used to detect parameter choices that violate the irrationality
/// assumptions behind the strictness results.
inline bool is_near_rational(double x, int max_den = 64, double tol = 1e-9)
{
    for (int q = 1; q <= max_den; ++q) {
        const double scaled = x * q;
        if (std::abs(scaled - std::round(scaled)) <= tol * q)
            return true;
    }
    return false;
}

} // namespace fockfb
