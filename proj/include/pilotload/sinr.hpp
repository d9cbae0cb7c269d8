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

#ifndef PILOTLOAD_SINR_HPP
#define PILOTLOAD_SINR_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "errors.hpp"
#include "netmodel.hpp"

namespace pilotload {

enum class SinrMode { Finite, Asymptotic, AsymptoticLowerBound, MonteCarlo };

inline std::string_view to_string(SinrMode m)
{
    switch (m) {
    case SinrMode::Finite: return "finite";
    case SinrMode::Asymptotic: return "asymptotic";
    case SinrMode::AsymptoticLowerBound: return "asymptotic-bound";
    case SinrMode::MonteCarlo: return "monte-carlo";
    }
    return "finite";
}

struct SinrResult {
    Eigen::VectorXd sinr;
    SinrMode mode = SinrMode::Finite;
    std::optional<double> antennas;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    /// 95% half-widths; empty for closed forms.
    Eigen::VectorXd ci_halfwidth;
};

// Denominators at or below this (relative to the user's signal term) are treated
// as zero and give +inf.
inline constexpr double kDivisionGuard = 1e-12;

namespace detail {

inline void check_sizes(const PilotBook& book, const PowerAllocation& power, const NetworkConfig& cfg)
{
    check_book(book, cfg);
    const auto n = cfg.total_users();
    if (power.uplink.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "uplink power vector has the wrong length");
    if (power.downlink.size() != 0 && power.downlink.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "downlink power vector has the wrong length");
}

inline void check_downlink(const PowerAllocation& power)
{
    if (!power.downlink_set())
        throw Error(ErrorKind::UnsetPower, "downlink powers are not set");
}

inline Eigen::MatrixXd squared_gram(const PilotBook& book) { return book.gram().array().square().matrix(); }

/// Pilot-contamination term of user u: sum_{v != u} rho_uv^2 p_u beta(u, m(v))^2 P_v / delta_v.
inline double contamination(int u, const Eigen::MatrixXd& rho2, const PowerAllocation& power,
    const Eigen::VectorXd& ratio, const NetworkConfig& cfg)
{
    double acc = 0.0;
    for (int v = 0; v < cfg.total_users(); ++v) {
        if (v == u)
            continue;
        const double b = cfg.gain(u, cfg.cell_of(v));
        acc += rho2(u, v) * power.uplink[u] * b * b * ratio[v];
    }
    return acc;
}

} // namespace detail

inline DeltaVector delta_vector(const PilotBook& book, const PowerAllocation& power, const NetworkConfig& cfg)
{
    detail::check_sizes(book, power, cfg);
    const Eigen::MatrixXd rho2 = detail::squared_gram(book);
    const int n = cfg.total_users();
    DeltaVector d;
    d.values.resize(n);
    for (int u = 0; u < n; ++u) {
        const int l = cfg.cell_of(u);
        double acc = cfg.uplink_noise;
        for (int v = 0; v < n; ++v)
            acc += power.uplink[v] * cfg.gain(v, l) * rho2(v, u);
        d.values[u] = acc;
    }
    return d;
}

/// Closed-form achievable SINR with Nt antennas, LS estimation and MRT.
/// The signal term is eta_{u,l}^2 beta_{u,l} P_u, which reduces to beta_{u,l} P_u
/// under uplink power control.
inline SinrResult sinr_finite(const PilotBook& book, const PowerAllocation& power, const DeltaVector& delta,
    const NetworkConfig& cfg, double antennas)
{
    detail::check_sizes(book, power, cfg);
    detail::check_downlink(power);
    if (!(antennas >= 1.0))
        throw Error(ErrorKind::InvalidArgument, "Nt must be >= 1");
    const int n = cfg.total_users();
    if (delta.values.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "delta has the wrong length");

    const Eigen::MatrixXd rho2 = detail::squared_gram(book);
    const Eigen::VectorXd ratio = power.downlink.cwiseQuotient(delta.values);

    SinrResult out;
    out.mode = SinrMode::Finite;
    out.antennas = antennas;
    out.sinr.resize(n);
    for (int u = 0; u < n; ++u) {
        const int l = cfg.cell_of(u);
        const double signal = power.uplink[u] * cfg.gain(u, l) * cfg.gain(u, l) * power.downlink[u];
        double received = cfg.downlink_noise;
        for (int v = 0; v < n; ++v)
            received += cfg.gain(u, cfg.cell_of(v)) * power.downlink[v];
        const double den = delta.values[u] * (detail::contamination(u, rho2, power, ratio, cfg) + received / antennas);
        out.sinr[u] = den <= kDivisionGuard * std::max(1.0, signal) ? std::numeric_limits<double>::infinity()
                                                                    : signal / den;
    }
    return out;
}

/// Nt -> infinity limit of sinr_finite; +inf for contamination-free users.
inline SinrResult sinr_asymptotic(
    const PilotBook& book, const PowerAllocation& power, const DeltaVector& delta, const NetworkConfig& cfg)
{
    detail::check_sizes(book, power, cfg);
    detail::check_downlink(power);
    const int n = cfg.total_users();
    if (delta.values.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "delta has the wrong length");

    const Eigen::MatrixXd rho2 = detail::squared_gram(book);
    const Eigen::VectorXd ratio = power.downlink.cwiseQuotient(delta.values);

    SinrResult out;
    out.mode = SinrMode::Asymptotic;
    out.sinr.resize(n);
    for (int u = 0; u < n; ++u) {
        const int l = cfg.cell_of(u);
        const double signal = power.uplink[u] * cfg.gain(u, l) * cfg.gain(u, l) * power.downlink[u];
        const double den = delta.values[u] * detail::contamination(u, rho2, power, ratio, cfg);
        out.sinr[u] = den <= kDivisionGuard * std::max(1.0, signal) ? std::numeric_limits<double>::infinity()
                                                                    : signal / den;
    }
    return out;
}

/// Asymptotic SINR with the cross-cell gain factors dropped (valid under uplink
/// power control):
///   P_u / (delta_u q_u^T (sum_v P_v/delta_v q_v q_v^T) q_u - P_u)
inline SinrResult sinr_lower_bound_asym(
    const PilotBook& book, const PowerAllocation& power, const DeltaVector& delta, const NetworkConfig& cfg)
{
    detail::check_sizes(book, power, cfg);
    detail::check_downlink(power);
    const int n = cfg.total_users();
    if (delta.values.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "delta has the wrong length");

    const Eigen::VectorXd ratio = power.downlink.cwiseQuotient(delta.values);
    const Eigen::MatrixXd S = book.Q * ratio.asDiagonal() * book.Q.transpose();

    SinrResult out;
    out.mode = SinrMode::AsymptoticLowerBound;
    out.sinr.resize(n);
    for (int u = 0; u < n; ++u) {
        const double pu = power.downlink[u];
        const double den = delta.values[u] * book.Q.col(u).dot(S * book.Q.col(u)) - pu;
        out.sinr[u] = den <= kDivisionGuard * std::max(1.0, pu) ? std::numeric_limits<double>::infinity() : pu / den;
    }
    return out;
}

} // namespace pilotload

#endif
