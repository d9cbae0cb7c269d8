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

#ifndef PILOTLOAD_MAJORIZATION_HPP
#define PILOTLOAD_MAJORIZATION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace pilotload {

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kOrthoTolerance = 1e-9;

/// Effective bandwidth gamma / (1 + gamma). An infinite target maps to 1.
inline double effective_bandwidth(double gamma)
{
    if (!(gamma > 0.0))
        throw Error(ErrorKind::NonPositiveTarget, "SINR target must be > 0");
    if (std::isinf(gamma))
        return 1.0;
    return gamma / (1.0 + gamma);
}

/// Inverse of effective_bandwidth on [0, 1]; 1 maps to +inf.
inline double target_from_bandwidth(double z)
{
    if (!(z >= 0.0) || z > 1.0)
        throw Error(ErrorKind::InvalidArgument, "effective bandwidth must lie in [0, 1]");
    if (z == 1.0)
        return std::numeric_limits<double>::infinity();
    return z / (1.0 - z);
}

inline Eigen::VectorXd effective_bandwidths(const Eigen::VectorXd& gamma)
{
    Eigen::VectorXd z(gamma.size());
    for (Eigen::Index i = 0; i < gamma.size(); ++i)
        z[i] = effective_bandwidth(gamma[i]);
    return z;
}

/// z_k = gamma_k / (1 + gamma_k), descending.
struct EbVector {
    Eigen::VectorXd values;
};

/// tau leading entries equal to `level`, the rest zero.
struct CapVector {
    Eigen::VectorXd values;
    double level = 0.0;
    int rank = 0;
};

struct OrthoFactor {
    Eigen::MatrixXd U;
    int rotation_count = 0;
};

/// Sorts the targets of one cell and maps them to a descending EbVector.
inline EbVector make_eb_vector(const Eigen::VectorXd& gamma)
{
    std::vector<double> z(static_cast<std::size_t>(gamma.size()));
    for (Eigen::Index i = 0; i < gamma.size(); ++i)
        z[static_cast<std::size_t>(i)] = effective_bandwidth(gamma[i]);
    std::sort(z.begin(), z.end(), std::greater<>());
    return {Eigen::Map<Eigen::VectorXd>(z.data(), gamma.size())};
}

namespace detail {

inline bool is_descending(const Eigen::VectorXd& v)
{
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1])
            return false;
    return true;
}

inline double sum_scale(const Eigen::VectorXd& v) { return std::max(1.0, v.cwiseAbs().sum()); }

} // namespace detail

/// Does x majorize z? Both must be descending and of equal length. Partial
/// sums of x must dominate those of z and the totals must agree to 1e-12.
inline bool majorizes(const Eigen::VectorXd& x, const Eigen::VectorXd& z)
{
    if (x.size() != z.size())
        throw Error(ErrorKind::LengthMismatch, "majorization needs equal lengths");
    if (!detail::is_descending(x) || !detail::is_descending(z))
        throw Error(ErrorKind::NotSorted, "majorization needs descending vectors");
    const double tol = kSumTolerance * std::max(detail::sum_scale(x), detail::sum_scale(z));
    double sx = 0.0;
    double sz = 0.0;
    for (Eigen::Index m = 0; m < x.size(); ++m) {
        sx += x[m];
        sz += z[m];
        if (m + 1 < x.size() && sx < sz - tol)
            return false;
    }
    return std::abs(sx - sz) <= tol;
}

inline bool majorizes(const CapVector& x, const EbVector& z) { return majorizes(x.values, z.values); }

/// The flat-spectrum vector with level sum(z) / tau in the first tau slots.
/// It majorizes z exactly when z_1 <= level; callers check that.
inline CapVector cap_vector(const EbVector& z, int tau)
{
    const auto k = z.values.size();
    if (tau < 1 || tau > k)
        throw Error(ErrorKind::TauOutOfRange, "tau must satisfy 1 <= tau <= K");
    CapVector x;
    x.rank = tau;
    x.level = z.values.sum() / tau;
    x.values = Eigen::VectorXd::Zero(k);
    x.values.head(tau).setConstant(x.level);
    return x;
}

/// Orthogonal U with diag(U^T diag(x) U) = z, built from at most K-1 plane
/// rotations (a chain of T-transforms).
///
/// The free coordinates are kept mutually uncoupled. Step k fixes the largest
/// remaining target t = z_k using the pair of free values that bracket it most
/// tightly (a = smallest value >= t, b = largest value <= t, lowest index on
/// ties). The rotation has cos^2 = (t - b) / (a - b); coordinate a is fixed at t
/// and coordinate b takes a + b - t. If some free value already equals t the
/// coordinate is fixed without rotating. Columns of U are returned in target
/// order. Rotation sign convention: positive cosine, U' = U G with
/// G = [[c, -s], [s, c]] on the (a, b) plane.
inline OrthoFactor schur_horn_factor(const Eigen::VectorXd& x, const Eigen::VectorXd& z)
{
    if (!majorizes(x, z))
        throw Error(ErrorKind::MajorizationViolation, "x does not majorize z");

    const auto k = static_cast<std::size_t>(x.size());
    const double tie = 1e-15 * detail::sum_scale(x);

    OrthoFactor out;
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(x.size(), x.size());
    std::vector<double> value(x.data(), x.data() + x.size());
    std::vector<Eigen::Index> free_coords(k);
    for (std::size_t i = 0; i < k; ++i)
        free_coords[i] = static_cast<Eigen::Index>(i);
    std::vector<Eigen::Index> coord_of_target(k, 0);
    auto val = [&](Eigen::Index c) { return value[static_cast<std::size_t>(c)]; };

    for (std::size_t step = 0; step + 1 < k; ++step) {
        const double t = z[static_cast<Eigen::Index>(step)];
        auto above = free_coords.end();
        auto below = free_coords.end();
        for (auto it = free_coords.begin(); it != free_coords.end(); ++it)
            if (val(*it) >= t - tie && (above == free_coords.end() || val(*it) < val(*above)))
                above = it;
        for (auto it = free_coords.begin(); it != free_coords.end(); ++it)
            if (it != above && val(*it) <= t + tie && (below == free_coords.end() || val(*it) > val(*below)))
                below = it;
        if (above == free_coords.end() || below == free_coords.end())
            throw Error(ErrorKind::MajorizationViolation, "no bracketing pair for target");

        const Eigen::Index ca = *above;
        const Eigen::Index cb = *below;
        const double a = val(ca);
        const double b = val(cb);

        if (a - t > tie && a - b > tie) {
            const double c2 = std::clamp((t - b) / (a - b), 0.0, 1.0);
            const double c = std::sqrt(c2);
            const double s = std::sqrt(1.0 - c2);
            const Eigen::VectorXd ua = U.col(ca);
            const Eigen::VectorXd ub = U.col(cb);
            U.col(ca) = c * ua + s * ub;
            U.col(cb) = -s * ua + c * ub;
            value[static_cast<std::size_t>(cb)] = a + b - t;
            ++out.rotation_count;
        }
        value[static_cast<std::size_t>(ca)] = t;
        coord_of_target[step] = ca;
        free_coords.erase(above);
    }
    coord_of_target[k - 1] = free_coords.front();

    out.U.resize(x.size(), x.size());
    for (std::size_t j = 0; j < k; ++j)
        out.U.col(static_cast<Eigen::Index>(j)) = U.col(coord_of_target[j]);
    return out;
}

inline OrthoFactor schur_horn_factor(const CapVector& x, const EbVector& z)
{
    return schur_horn_factor(x.values, z.values);
}

} // namespace pilotload

#endif
