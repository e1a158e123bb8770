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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "fock_feedback/errors.hpp"

namespace fockfb {

inline constexpr double kDefaultZeroTolerance = 1e-12;

/// Photon-number support of a diagonal state.
struct SupportStats {
    int n_min = 0;
    int n_max = 0;
    int n_length = 0; // n_max - n_min
};

/// Probability vector over photon numbers 0..n_max of a truncated Fock
/// space. Immutable after construction; entries are the populations
/// rho_nn of a diagonal density operator.
class DiagonalState {
  public:
    explicit DiagonalState(std::vector<double> probs)
        : probs_(std::move(probs))
    {
        if (probs_.empty())
            throw std::invalid_argument("DiagonalState: empty population vector");
        double sum = 0.0;
        for (std::size_t n = 0; n < probs_.size(); ++n) {
            if (probs_[n] < -kDefaultZeroTolerance) {
                std::ostringstream os;
                os << "DiagonalState: negative population " << probs_[n]
                   << " at n=" << n;
                throw std::invalid_argument(os.str());
            }
            if (probs_[n] < 0.0)
                probs_[n] = 0.0;
            sum += probs_[n];
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "DiagonalState: populations sum to " << sum;
            throw std::invalid_argument(os.str());
        }
    }

    /// Point mass |n><n| embedded in a buffer of the given size.
    static DiagonalState point_mass(int n, int dim = -1)
    {
        if (dim < 0)
            dim = n + 1;
        std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
        p.at(static_cast<std::size_t>(n)) = 1.0;
        return DiagonalState(std::move(p));
    }

    /// Uniform mixture over photon numbers n_lo..n_hi inclusive.
    static DiagonalState uniform(int n_lo, int n_hi)
    {
        std::vector<double> p(static_cast<std::size_t>(n_hi) + 1, 0.0);
        const double w = 1.0 / static_cast<double>(n_hi - n_lo + 1);
        for (int n = n_lo; n <= n_hi; ++n)
            p[static_cast<std::size_t>(n)] = w;
        return DiagonalState(std::move(p));
    }

    int dim() const { return static_cast<int>(probs_.size()); }
    double operator[](int n) const
    {
        return probs_[static_cast<std::size_t>(n)];
    }
    const std::vector<double> &probs() const { return probs_; }

    /// Copy with exactly-zero trailing slots removed.
    DiagonalState compacted() const
    {
        std::size_t d = probs_.size();
        while (d > 1 && probs_[d - 1] == 0.0)
            --d;
        if (d == probs_.size())
            return *this;
        return DiagonalState(std::vector<double>(probs_.begin(),
                                                 probs_.begin() +
                                                     static_cast<long>(d)));
    }

  private:
    std::vector<double> probs_;
};

/// Hermitian, PSD, unit-trace complex matrix on a truncated Fock space.
/// Hermiticity and trace are checked at construction; positivity is an
/// O(d^3) eigenvalue check reserved for verification paths.
class DensityMatrix {
  public:
    explicit DensityMatrix(Eigen::MatrixXcd entries)
        : entries_(std::move(entries))
    {
        if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
            throw std::invalid_argument("DensityMatrix: not square");
        const double herm_err =
            (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
        if (herm_err > 1e-10) {
            std::ostringstream os;
            os << "DensityMatrix: Hermiticity violated by " << herm_err;
            throw std::invalid_argument(os.str());
        }
        const double tr_err = std::abs(entries_.trace() - std::complex<double>(1.0));
        if (tr_err > 1e-9) {
            std::ostringstream os;
            os << "DensityMatrix: trace off by " << tr_err;
            throw std::invalid_argument(os.str());
        }
    }

    static DensityMatrix pure(int n, int dim = -1)
    {
        if (dim < 0)
            dim = n + 1;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        m(n, n) = 1.0;
        return DensityMatrix(std::move(m));
    }

    /// Embed a diagonal state as a diagonal density matrix.
    static DensityMatrix embed(const DiagonalState &d)
    {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d.dim(), d.dim());
        for (int n = 0; n < d.dim(); ++n)
            m(n, n) = d[n];
        return DensityMatrix(std::move(m));
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXcd &entries() const { return entries_; }
    std::complex<double> operator()(int m, int n) const
    {
        return entries_(m, n);
    }

    bool is_positive_semidefinite(double tol = 1e-9) const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            entries_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() >= -tol;
    }

    /// Copy with all-zero trailing rows/columns removed.
    DensityMatrix compacted() const
    {
        int d = dim();
        while (d > 1 &&
               entries_.row(d - 1).cwiseAbs().maxCoeff() == 0.0 &&
               entries_.col(d - 1).cwiseAbs().maxCoeff() == 0.0)
            --d;
        if (d == dim())
            return *this;
        return DensityMatrix(entries_.topLeftCorner(d, d));
    }

  private:
    Eigen::MatrixXcd entries_;
};

/// Diagonal of f(N + shift) on a state_dim-dimensional truncation:
/// g(n) = f(n + shift) when n + shift >= 0, and g(n) = 0 otherwise.
inline std::vector<double>
apply_number_function(const std::function<double(int)> &f, int shift,
                      int state_dim)
{
    if (state_dim < 1)
        throw std::invalid_argument("apply_number_function: state_dim < 1");
    std::vector<double> g(static_cast<std::size_t>(state_dim));
    for (int n = 0; n < state_dim; ++n)
        g[static_cast<std::size_t>(n)] = (n + shift >= 0) ? f(n + shift) : 0.0;
    return g;
}

/// The dephasing map: keep the populations, drop every coherence.
inline DiagonalState dephase(const DensityMatrix &rho)
{
    std::vector<double> p(static_cast<std::size_t>(rho.dim()));
    for (int n = 0; n < rho.dim(); ++n)
        p[static_cast<std::size_t>(n)] = rho(n, n).real();
    return DiagonalState(std::move(p));
}

inline SupportStats support_stats(const DiagonalState &state,
                                  double zero_tolerance = kDefaultZeroTolerance)
{
    int lo = -1, hi = -1;
    for (int n = 0; n < state.dim(); ++n) {
        if (state[n] > zero_tolerance) {
            if (lo < 0)
                lo = n;
            hi = n;
        }
    }
    if (lo < 0)
        throw AllZeroError("support_stats: no population above tolerance");
    return SupportStats{lo, hi, hi - lo};
}

/// Hilbert-Schmidt distance; the smaller operand is padded with zeros.
inline double hs_distance(const DensityMatrix &a, const DensityMatrix &b)
{
    const int d = std::max(a.dim(), b.dim());
    double acc = 0.0;
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            const std::complex<double> am =
                (m < a.dim() && n < a.dim()) ? a(m, n) : 0.0;
            const std::complex<double> bm =
                (m < b.dim() && n < b.dim()) ? b(m, n) : 0.0;
            acc += std::norm(am - bm);
        }
    }
    return std::sqrt(acc);
}

} // namespace fockfb
