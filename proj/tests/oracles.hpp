// SPDX-License-Identifier: Apache-2.0
//
// pilotload: pilot book construction and load-region analysis
// Copyright (C) 2026 The pilotload authors
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

// Reference implementations used only by the tests. They follow the textbook
// definitions with plain loops and share no code with the library.

#ifndef PILOTLOAD_TESTS_ORACLES_HPP
#define PILOTLOAD_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "pilotload/netmodel.hpp"

namespace oracle {

inline std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// x majorizes z: every prefix sum of x dominates, totals agree. Inputs sorted descending.
inline bool majorizes(const std::vector<double>& x, const std::vector<double>& z, double tol = 1e-12)
{
    double sx = 0.0, sz = 0.0;
    for (std::size_t m = 0; m + 1 < x.size(); ++m) {
        sx += x[m];
        sz += z[m];
        if (sx < sz - tol * std::max(1.0, std::abs(sz)))
            return false;
    }
    const double tx = std::accumulate(x.begin(), x.end(), 0.0);
    const double tz = std::accumulate(z.begin(), z.end(), 0.0);
    return std::abs(tx - tz) <= tol * std::max(1.0, std::abs(tz));
}

/// Solves g / (1 + g) = z for g by bisection.
inline double eb_inverse(double z)
{
    double lo = 0.0, hi = 1.0;
    while (hi / (1.0 + hi) < z)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid / (1.0 + mid) < z ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// diag(U^T diag(x) U), one entry at a time.
inline std::vector<double> rotated_diagonal(const Eigen::MatrixXd& U, const std::vector<double>& x)
{
    std::vector<double> out(static_cast<std::size_t>(U.cols()), 0.0);
    for (Eigen::Index k = 0; k < U.cols(); ++k)
        for (Eigen::Index i = 0; i < U.rows(); ++i)
            out[static_cast<std::size_t>(k)] += U(i, k) * U(i, k) * x[static_cast<std::size_t>(i)];
    return out;
}

/// Largest |eigenvalue| from a general dense eigensolver.
inline double dense_radius(const Eigen::MatrixXd& M)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Gram entry by explicit dot product.
inline double rho(const Eigen::MatrixXd& Q, int u, int v)
{
    double s = 0.0;
    for (Eigen::Index r = 0; r < Q.rows(); ++r)
        s += Q(r, u) * Q(r, v);
    return s;
}

/// delta_u = sum_v p_v beta(v, cell u) rho_vu^2 + sigma_n^2
inline std::vector<double> delta(const Eigen::MatrixXd& Q, const std::vector<double>& p, const pilotload::NetworkConfig& cfg)
{
    const int n = cfg.total_users();
    std::vector<double> d(static_cast<std::size_t>(n), cfg.uplink_noise);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            const double r = rho(Q, u, v);
            d[static_cast<std::size_t>(u)] += p[static_cast<std::size_t>(v)] * cfg.gain(v, u / cfg.users_per_cell) * r * r;
        }
    return d;
}

/// Finite-Nt SINR of user u, written out term by term with eta^2 = p beta.
inline double closed_form_sinr(const Eigen::MatrixXd& Q, const std::vector<double>& P, const std::vector<double>& p,
    const std::vector<double>& d, const pilotload::NetworkConfig& cfg, int u, double nt)
{
    const int n = cfg.total_users();
    const int K = cfg.users_per_cell;
    const auto uu = static_cast<std::size_t>(u);
    const int l = u / K;
    const double eta2_own = p[uu] * cfg.gain(u, l);
    const double num = eta2_own * cfg.gain(u, l) * P[uu];
    double contamination = 0.0, received = cfg.downlink_noise;
    for (int v = 0; v < n; ++v) {
        const auto vv = static_cast<std::size_t>(v);
        const int m = v / K;
        const double b = cfg.gain(u, m);
        received += b * P[vv];
        if (v != u) {
            const double r = rho(Q, u, v);
            contamination += r * r * (p[uu] * b) * b * P[vv] / d[vv];
        }
    }
    return num / (d[uu] * (contamination + received / nt));
}

/// Random tau x n book with unit-norm columns.
inline Eigen::MatrixXd random_book(std::mt19937_64& rng, int tau, int n)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXd Q(tau, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < tau; ++r)
            Q(r, c) = g(rng);
        Q.col(c).normalize();
    }
    return Q;
}

/// Random descending vector in (lo, hi).
inline std::vector<double> random_descending(std::mt19937_64& rng, int k, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> z(static_cast<std::size_t>(k));
    for (auto& v : z)
        v = u(rng);
    std::sort(z.begin(), z.end(), std::greater<>());
    return z;
}

} // namespace oracle

#endif
