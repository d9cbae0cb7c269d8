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

#ifndef PILOTLOAD_BASELINE_HPP
#define PILOTLOAD_BASELINE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "netmodel.hpp"

namespace pilotload {

/// Regular simplex: tau + 1 unit vectors in R^tau with pairwise correlation
/// -1/tau. Built from the Helmert basis of the zero-sum subspace.
inline Eigen::MatrixXd simplex_frame(int tau)
{
    const int n = tau + 1;
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(tau, n);
    for (int r = 0; r < tau; ++r) {
        const double k = r + 1;
        const double scale = 1.0 / std::sqrt(k * (k + 1.0));
        for (int c = 0; c <= r; ++c)
            F(r, c) = scale;
        F(r, r + 1) = -k * scale;
    }
    return F * std::sqrt(static_cast<double>(n) / tau);
}

/// Real harmonic tight frame of n unit vectors in R^tau (n >= tau):
/// Q Q^T = (n / tau) I. Odd tau uses the constant row plus frequencies
/// 1..(tau-1)/2; even tau uses the half-integer frequencies 1/2..tau/2-1/2.
inline Eigen::MatrixXd harmonic_frame(int n, int tau)
{
    if (n < tau)
        throw Error(ErrorKind::InfeasibleFrame, "a tight frame needs at least tau vectors");
    Eigen::MatrixXd F(tau, n);
    int row = 0;
    double first_freq = 0.5;
    if (tau % 2 == 1) {
        F.row(row++).setOnes();
        first_freq = 1.0;
    }
    for (double f = first_freq; row < tau; f += 1.0) {
        for (int k = 0; k < n; ++k) {
            const double angle = 2.0 * std::numbers::pi * f * k / n;
            F(row, k) = std::numbers::sqrt2 * std::cos(angle);
            F(row + 1, k) = std::numbers::sqrt2 * std::sin(angle);
        }
        row += 2;
    }
    return F / std::sqrt(static_cast<double>(tau));
}

/// n unit vectors in R^tau meeting the Welch bound with equality. n = tau gives
/// the identity, n = tau + 1 the simplex, anything larger a harmonic frame.
inline Eigen::MatrixXd wbe_frame(int n, int tau)
{
    if (n < tau || tau < 1)
        throw Error(ErrorKind::InfeasibleFrame, "WBE frame needs n >= tau >= 1");
    if (n == tau)
        return Eigen::MatrixXd::Identity(tau, tau);
    if (n == tau + 1)
        return simplex_frame(tau);
    return harmonic_frame(n, tau);
}

enum class WbeScope {
    /// One K-vector frame reused by every cell; slot j gets column j.
    PerCell,
    /// A single K_tot-vector frame across the network.
    Network,
};

inline std::string_view to_string(WbeScope s) { return s == WbeScope::PerCell ? "per-cell" : "network"; }

inline PilotBook wbe_design(const NetworkConfig& cfg, WbeScope scope = WbeScope::PerCell)
{
    validate(cfg);
    PilotBook book;
    book.design = PilotDesign::WBE;
    book.users_per_cell = cfg.users_per_cell;
    if (scope == WbeScope::Network) {
        book.Q = wbe_frame(cfg.total_users(), cfg.pilot_length);
    } else {
        const Eigen::MatrixXd frame = wbe_frame(cfg.users_per_cell, cfg.pilot_length);
        book.Q.resize(cfg.pilot_length, cfg.total_users());
        for (int l = 0; l < cfg.cells; ++l)
            book.Q.middleCols(l * cfg.users_per_cell, cfg.users_per_cell) = frame;
    }
    return book;
}

/// groups[s] lists the 0-based flat users sharing orthonormal sequence s.
struct FosAssignment {
    std::vector<std::vector<int>> groups;

    int sequence_of(int user) const
    {
        for (std::size_t s = 0; s < groups.size(); ++s)
            for (int u : groups[s])
                if (u == user)
                    return static_cast<int>(s);
        return -1;
    }
};

enum class FosPolicy { RoundRobin, Explicit };

/// Finite orthogonal set: tau identity columns shared by groups of users.
/// RoundRobin gives slot j the sequence (j - 1) mod tau in every cell; Explicit
/// takes `groups` as given (one list per sequence, 0-based flat users).
inline std::pair<PilotBook, FosAssignment> fos_design(
    const NetworkConfig& cfg, FosPolicy policy = FosPolicy::RoundRobin, std::vector<std::vector<int>> groups = {})
{
    validate(cfg);
    const int n = cfg.total_users();
    const int tau = cfg.pilot_length;

    FosAssignment assignment;
    if (policy == FosPolicy::RoundRobin) {
        assignment.groups.assign(static_cast<std::size_t>(tau), {});
        for (int u = 0; u < n; ++u)
            assignment.groups[static_cast<std::size_t>((u % cfg.users_per_cell) % tau)].push_back(u);
    } else {
        if (static_cast<int>(groups.size()) != tau)
            throw Error(ErrorKind::InvalidGrouping, "explicit FOS grouping needs exactly tau groups");
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        for (const auto& g : groups) {
            if (g.empty())
                throw Error(ErrorKind::EmptyGroup, "every orthogonal sequence must be used");
            for (int u : g) {
                if (u < 0 || u >= n)
                    throw Error(ErrorKind::InvalidGrouping, "user index out of range");
                if (seen[static_cast<std::size_t>(u)]++)
                    throw Error(ErrorKind::InvalidGrouping, "user assigned to two sequences");
            }
        }
        for (int c : seen)
            if (c == 0)
                throw Error(ErrorKind::InvalidGrouping, "every user needs a sequence");
        assignment.groups = std::move(groups);
    }

    PilotBook book;
    book.design = PilotDesign::FOS;
    book.users_per_cell = cfg.users_per_cell;
    book.Q = Eigen::MatrixXd::Zero(tau, n);
    for (std::size_t s = 0; s < assignment.groups.size(); ++s)
        for (int u : assignment.groups[s])
            book.Q(static_cast<Eigen::Index>(s), u) = 1.0;
    return {std::move(book), std::move(assignment)};
}

} // namespace pilotload

#endif
