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

#ifndef PILOTLOAD_GWBE_HPP
#define PILOTLOAD_GWBE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "majorization.hpp"
#include "netmodel.hpp"

namespace pilotload {

inline constexpr double kBudgetTolerance = 1e-12;

namespace detail {

// Per-cell budget tau / L and the majorization cap 1 / L on any single user.
inline double cell_budget(const NetworkConfig& cfg) { return static_cast<double>(cfg.pilot_length) / cfg.cells; }
inline double cell_cap(const NetworkConfig& cfg) { return 1.0 / cfg.cells; }

inline Eigen::VectorXd rescale_cell(const Eigen::VectorXd& z, double budget, bool allow_shrink)
{
    const double s = z.sum();
    double factor = budget / s;
    if (!allow_shrink)
        factor = std::max(factor, 1.0);
    return z * factor;
}

inline void check_cap(const Eigen::VectorXd& zhat, const NetworkConfig& cfg, int cell)
{
    const double cap = cell_cap(cfg);
    if (zhat.maxCoeff() > cap + kBudgetTolerance)
        throw Error(ErrorKind::MajorizationCapViolation,
            "cell " + std::to_string(cell + 1) + ": largest effective bandwidth " + std::to_string(zhat.maxCoeff())
                + " exceeds 1/L = " + std::to_string(cap));
}

inline Eigen::VectorXd targets_from_bandwidths(const Eigen::VectorXd& z)
{
    Eigen::VectorXd g(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        g[i] = target_from_bandwidth(std::min(z[i], 1.0));
    return g;
}

} // namespace detail

/// Raises every cell's targets onto the per-cell boundary sum eb = tau/L by
/// uniform scaling in the effective-bandwidth domain.
inline SinrTargets inflate_targets(const SinrTargets& targets, const NetworkConfig& cfg)
{
    check_targets(targets, cfg);
    const double budget = detail::cell_budget(cfg);
    const int k = cfg.users_per_cell;

    SinrTargets out = targets;
    Eigen::VectorXd inflated(targets.gamma.size());
    for (int l = 0; l < cfg.cells; ++l) {
        const Eigen::VectorXd z = effective_bandwidths(targets.cell(l));
        if (z.sum() > budget * (1.0 + kBudgetTolerance))
            throw Error(ErrorKind::RegionViolation,
                "cell " + std::to_string(l + 1) + " uses " + std::to_string(z.sum()) + " of its "
                    + std::to_string(budget) + " budget");
        const Eigen::VectorXd zhat = detail::rescale_cell(z, budget, false);
        detail::check_cap(zhat, cfg, l);
        inflated.segment(l * k, k) = detail::targets_from_bandwidths(zhat);
    }
    out.inflated = std::move(inflated);
    return out;
}

/// Alternative to inflate_targets for cells where uniform scaling would break
/// the cap: zhat = min(1/L, theta z) with theta >= 1 found by bisection.
/// Succeeds whenever the per-cell budget holds and every eb(gamma) <= 1/L.
inline SinrTargets inflate_targets_clipped(const SinrTargets& targets, const NetworkConfig& cfg)
{
    check_targets(targets, cfg);
    const double budget = detail::cell_budget(cfg);
    const double cap = detail::cell_cap(cfg);
    const int k = cfg.users_per_cell;

    SinrTargets out = targets;
    Eigen::VectorXd inflated(targets.gamma.size());
    for (int l = 0; l < cfg.cells; ++l) {
        const Eigen::VectorXd z = effective_bandwidths(targets.cell(l));
        if (z.sum() > budget * (1.0 + kBudgetTolerance))
            throw Error(ErrorKind::RegionViolation,
                "cell " + std::to_string(l + 1) + " uses " + std::to_string(z.sum()) + " of its "
                    + std::to_string(budget) + " budget");
        detail::check_cap(z, cfg, l);
        auto filled = [&](double theta) { return (theta * z).cwiseMin(cap).eval(); };
        double lo = 1.0;
        double hi = cap / z.minCoeff();
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (filled(mid).sum() < budget ? lo : hi) = mid;
        }
        Eigen::VectorXd zhat = filled(hi);
        // Land exactly on the boundary by spreading the rounding over unclipped users.
        const double gap = budget - zhat.sum();
        const Eigen::Index free_count = (zhat.array() < cap).count();
        if (free_count > 0)
            for (Eigen::Index j = 0; j < k; ++j)
                if (zhat[j] < cap)
                    zhat[j] += gap / static_cast<double>(free_count);
        detail::check_cap(zhat, cfg, l);
        inflated.segment(l * k, k) = detail::targets_from_bandwidths(zhat);
    }
    out.inflated = std::move(inflated);
    return out;
}

/// Uses caller-chosen inflated targets (e.g. hand-picked values rounded for
/// publication). Each cell is projected onto sum eb = tau/L by uniform
/// eb-scaling, and the result must still dominate the requirements.
inline SinrTargets with_explicit_inflation(
    const SinrTargets& targets, const Eigen::VectorXd& proposed, const NetworkConfig& cfg)
{
    check_targets(targets, cfg);
    if (proposed.size() != targets.gamma.size())
        throw Error(ErrorKind::DimensionMismatch, "proposed inflated targets have the wrong length");
    const double budget = detail::cell_budget(cfg);
    const int k = cfg.users_per_cell;

    SinrTargets out = targets;
    Eigen::VectorXd inflated(targets.gamma.size());
    for (int l = 0; l < cfg.cells; ++l) {
        const Eigen::VectorXd z = effective_bandwidths(proposed.segment(l * k, k));
        const Eigen::VectorXd zhat = detail::rescale_cell(z, budget, true);
        detail::check_cap(zhat, cfg, l);
        const Eigen::VectorXd g = detail::targets_from_bandwidths(zhat);
        for (int j = 0; j < k; ++j)
            if (g[j] < targets.gamma[l * k + j] * (1.0 - kBudgetTolerance))
                throw Error(ErrorKind::RegionViolation,
                    "cell " + std::to_string(l + 1) + ": projected target falls below the requirement");
        inflated.segment(l * k, k) = g;
    }
    out.inflated = std::move(inflated);
    return out;
}

struct GwbeDesignReport {
    PilotBook pilot_book;
    SinrTargets inflated_targets;
    Eigen::VectorXd per_cell_B;
    PowerAllocation power;
    /// Column norms of B^{1/2} V Z^{-1/2} before normc, flat user order.
    Eigen::VectorXd raw_column_norms;
    std::vector<int> rotation_counts;

    /// z-hat per user, flat order.
    Eigen::VectorXd weights() const { return effective_bandwidths(inflated_targets.effective()); }
};

/// Load-achieving pilot construction, one cell at a time. Targets without an
/// inflated vector are inflated first.
inline GwbeDesignReport gwbe_design(const SinrTargets& targets, const NetworkConfig& cfg)
{
    validate(cfg);
    check_targets(targets, cfg);
    const int k = cfg.users_per_cell;
    const int tau = cfg.pilot_length;
    if (tau > k)
        throw Error(ErrorKind::TauOutOfRange, "GWBE construction needs tau <= K");

    GwbeDesignReport report;
    report.inflated_targets = targets.inflated ? targets : inflate_targets(targets, cfg);
    const Eigen::VectorXd& gamma_hat = *report.inflated_targets.inflated;

    report.pilot_book.Q.resize(tau, cfg.total_users());
    report.pilot_book.design = PilotDesign::GWBE;
    report.pilot_book.users_per_cell = k;
    report.per_cell_B.resize(cfg.cells);
    report.raw_column_norms.resize(cfg.total_users());
    report.rotation_counts.assign(static_cast<std::size_t>(cfg.cells), 0);

    for (int l = 0; l < cfg.cells; ++l) {
        const Eigen::VectorXd g = gamma_hat.segment(l * k, k);
        std::vector<int> order(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g[a] > g[b]; });

        EbVector z;
        z.values.resize(k);
        for (int j = 0; j < k; ++j)
            z.values[j] = effective_bandwidth(g[order[static_cast<std::size_t>(j)]]);
        if (z.values.minCoeff() <= 1e-14)
            throw Error(ErrorKind::NumericalRankLoss, "effective bandwidth too close to zero");

        const CapVector x = cap_vector(z, tau);
        const OrthoFactor factor = schur_horn_factor(x, z);
        report.per_cell_B[l] = x.level;
        report.rotation_counts[static_cast<std::size_t>(l)] = factor.rotation_count;

        // Rows of U at the tau nonzero entries of x.
        const Eigen::MatrixXd V = factor.U.topRows(tau);
        Eigen::MatrixXd raw = std::sqrt(x.level) * V * z.values.cwiseSqrt().cwiseInverse().asDiagonal();
        for (int j = 0; j < k; ++j) {
            const int user = order[static_cast<std::size_t>(j)];
            const double norm = raw.col(j).norm();
            report.raw_column_norms[l * k + user] = norm;
            report.pilot_book.Q.col(l * k + user) = raw.col(j) / norm;
        }
    }

    report.power = uplink_power_control(cfg);
    return report;
}

/// P_u = delta_u * gamma_hat_u / (1 + gamma_hat_u)
inline PowerAllocation gwbe_power_allocation(const GwbeDesignReport& report, const DeltaVector& delta)
{
    const Eigen::VectorXd w = report.weights();
    if (delta.values.size() != w.size())
        throw Error(ErrorKind::DimensionMismatch, "delta does not match the design");
    PowerAllocation pa = report.power;
    pa.downlink = delta.values.cwiseProduct(w);
    return pa;
}

/// Q_l diag(w_l) Q_l^T for cell l.
inline Eigen::MatrixXd weighted_cell_gram(const PilotBook& book, const Eigen::VectorXd& weights, int l)
{
    const auto [first, count] = book.cell_block(l);
    const Eigen::MatrixXd Ql = book.Q.middleCols(first, count);
    return Ql * weights.segment(first, count).asDiagonal() * Ql.transpose();
}

/// max over cells of ||Q_l diag(w_l) Q_l^T - B_l I||_max with B_l = sum(w_l) / tau.
inline double cell_gram_residual(const PilotBook& book, const Eigen::VectorXd& weights)
{
    const int tau = book.pilot_length();
    double worst = 0.0;
    for (int l = 0; l < book.cells(); ++l) {
        const auto [first, count] = book.cell_block(l);
        const double b = weights.segment(first, count).sum() / tau;
        const Eigen::MatrixXd r = weighted_cell_gram(book, weights, l) - b * Eigen::MatrixXd::Identity(tau, tau);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

/// ||sum_l Q_l diag(w_l) Q_l^T - I||_max
inline double network_gram_residual(const PilotBook& book, const Eigen::VectorXd& weights)
{
    const int tau = book.pilot_length();
    const Eigen::MatrixXd s = book.Q * weights.asDiagonal() * book.Q.transpose();
    return (s - Eigen::MatrixXd::Identity(tau, tau)).cwiseAbs().maxCoeff();
}

} // namespace pilotload

#endif
