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

#ifndef PILOTLOAD_LOAD_HPP
#define PILOTLOAD_LOAD_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "baseline.hpp"
#include "errors.hpp"
#include "gwbe.hpp"
#include "majorization.hpp"
#include "netmodel.hpp"
#include "sinr.hpp"

namespace pilotload {

// ---------------------------------------------------------------- user load

struct LoadBound {
    double bound_real = 0.0;
    std::int64_t bound_int = 0;
};

/// K_tot <= sqrt(tau * sum (1 + gamma) / gamma)
inline LoadBound userload_bound(const Eigen::VectorXd& gamma, int tau)
{
    if (tau < 1)
        throw Error(ErrorKind::InvalidArgument, "tau must be >= 1");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < gamma.size(); ++i) {
        if (!(gamma[i] > 0.0))
            throw Error(ErrorKind::NonPositiveTarget, "SINR target must be > 0");
        acc += std::isinf(gamma[i]) ? 1.0 : (1.0 + gamma[i]) / gamma[i];
    }
    LoadBound b;
    b.bound_real = std::sqrt(tau * acc);
    b.bound_int = static_cast<std::int64_t>(std::floor(b.bound_real));
    return b;
}

inline LoadBound userload_bound(const SinrTargets& targets, int tau) { return userload_bound(targets.gamma, tau); }

/// tr(Gram^2) of a book and the Welch lower bound K_tot^2 / tau.
inline double welch_trace(const PilotBook& book) { return book.gram().squaredNorm(); }
inline double welch_bound(const PilotBook& book)
{
    const double n = book.total_users();
    return n * n / book.pilot_length();
}

// ---------------------------------------------------------------- verdicts

enum class Binding { GwbeBudget, Spectral, Cap };

inline std::string_view to_string(Binding b)
{
    switch (b) {
    case Binding::GwbeBudget: return "GWBE_BUDGET";
    case Binding::Spectral: return "SPECTRAL";
    case Binding::Cap: return "CAP";
    }
    return "SPECTRAL";
}

struct RegionVerdict {
    bool feasible = false;
    /// Spectral radius for SPECTRAL verdicts; for budget verdicts the largest
    /// budget utilization (sum eb / budget), so feasible <=> value <= 1 either way.
    double spectral_radius = 0.0;
    Binding binding = Binding::Spectral;
    /// Downlink powers meeting every target, when strictly feasible. Sum = K_tot.
    std::optional<Eigen::VectorXd> witness;
};

inline constexpr double kSpectralTolerance = 1e-9;

enum class RegionMode { Network, PerCell };

namespace detail {

// eb with gamma = 0 meaning "no requirement".
inline double bandwidth_or_zero(double gamma)
{
    if (gamma < 0.0 || std::isnan(gamma))
        throw Error(ErrorKind::NonPositiveTarget, "SINR target must be >= 0");
    return gamma == 0.0 ? 0.0 : effective_bandwidth(gamma);
}

} // namespace detail

/// Budget test of the load region: sum eb <= tau over the network, or
/// sum eb <= tau / L in every cell.
inline RegionVerdict region_membership(const SinrTargets& targets, const NetworkConfig& cfg, RegionMode mode)
{
    check_targets(targets, cfg);
    RegionVerdict v;
    v.binding = Binding::GwbeBudget;
    const int k = cfg.users_per_cell;
    if (mode == RegionMode::Network) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < targets.gamma.size(); ++i)
            s += detail::bandwidth_or_zero(targets.gamma[i]);
        v.spectral_radius = s / cfg.pilot_length;
    } else {
        const double budget = detail::cell_budget(cfg);
        for (int l = 0; l < cfg.cells; ++l) {
            double s = 0.0;
            for (int j = 0; j < k; ++j)
                s += detail::bandwidth_or_zero(targets.gamma[l * k + j]);
            v.spectral_radius = std::max(v.spectral_radius, s / budget);
        }
    }
    v.feasible = v.spectral_radius <= 1.0 + kBudgetTolerance;
    return v;
}

/// Targets the GWBE construction can serve: per-cell budget plus eb <= 1/L for
/// every user (the majorization cap).
inline RegionVerdict gwbe_verdict(const SinrTargets& targets, const NetworkConfig& cfg)
{
    RegionVerdict v = region_membership(targets, cfg, RegionMode::PerCell);
    if (!v.feasible)
        return v;
    const double cap = detail::cell_cap(cfg);
    for (Eigen::Index i = 0; i < targets.gamma.size(); ++i) {
        if (detail::bandwidth_or_zero(targets.gamma[i]) > cap + kBudgetTolerance) {
            v.feasible = false;
            v.binding = Binding::Cap;
            break;
        }
    }
    return v;
}

// ---------------------------------------------------------------- spectral oracle

enum class FeasibilityModel {
    /// Asymptotic SINR with cross-cell gains dropped (the load-region model):
    /// M(u, v) = eb(gamma_u) rho_uv^2.
    LowerBound,
    /// Full asymptotic SINR including beta:
    /// M(u, v) = gamma_u rho_uv^2 (beta(u, m(v)) / beta(u, l(u)))^2 for v != u.
    Exact,
};

inline std::string_view to_string(FeasibilityModel m) { return m == FeasibilityModel::LowerBound ? "bound" : "exact"; }

struct PerronPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    int iterations = 0;
    /// False when the iteration stopped on a decisive bracket instead of converging.
    bool converged = true;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Collatz-Wielandt bracket of rho(M) from a nonnegative iterate y. Entries that
/// underflowed to zero are skipped when M y vanishes there too. The lower bound
/// drops entries below 1e-9 max(y) so that reducible blocks do not spoil it.
inline std::pair<double, double> perron_bracket(const Eigen::MatrixXd& M, const Eigen::VectorXd& y)
{
    const Eigen::VectorXd my = M * y;
    double upper = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0)
            upper = std::max(upper, my[i] / y[i]);
        else if (my[i] > 0.0)
            upper = std::numeric_limits<double>::infinity();
    }
    const double floor = 1e-9 * y.maxCoeff();
    Eigen::VectorXd z = (y.array() >= floor).select(y, 0.0);
    const Eigen::VectorXd mz = M * z;
    double lower = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (z[i] > 0.0)
            lower = std::min(lower, mz[i] / z[i]);
    return {std::isfinite(lower) ? lower : 0.0, upper};
}

} // namespace detail

/// Perron root of a nonnegative matrix by power iteration on M + sI, with s half
/// the largest row sum (the shift removes periodicity). With `decide_at`, an
/// iteration that has not converged after `decide_after` steps may stop once the
/// Collatz-Wielandt bracket lies strictly on one side of it. Throws
/// NonConvergence after max_iter steps.
inline PerronPair perron_root(const Eigen::MatrixXd& M, int max_iter = 100000, double tol = 1e-12,
    std::optional<double> decide_at = std::nullopt, int decide_after = 1000)
{
    const Eigen::Index n = M.rows();
    PerronPair out;
    if (n == 0)
        return out;
    const double shift = 0.5 * M.rowwise().sum().maxCoeff();
    if (!(shift > 0.0)) {
        out.vector = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
        out.lower = out.upper = 0.0;
        return out;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double prev = -1.0;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd next = M * y + shift * y;
        const double norm = next.norm();
        const double value = norm - shift;
        next /= norm;
        y = std::move(next);
        out.iterations = it;
        out.vector = y;
        const auto [lo, hi] = detail::perron_bracket(M, y);
        out.lower = lo;
        out.upper = hi;
        if (std::isfinite(hi) && hi - lo <= tol * std::max(1.0, hi)) {
            out.value = std::max(0.0, 0.5 * (lo + hi));
            return out;
        }
        if (it >= decide_after) {
            if (decide_at && (hi < *decide_at || lo > *decide_at)) {
                out.value = std::clamp(std::max(0.0, value), lo, hi);
                out.converged = false;
                return out;
            }
            // Reducible matrices can keep the bracket open; fall back to a stalled estimate.
            if (std::abs(value - prev) <= tol * std::max(1.0, std::abs(value))) {
                out.value = std::clamp(std::max(0.0, value), lo, hi);
                return out;
            }
        }
        prev = value;
    }
    throw Error(ErrorKind::NonConvergence, "power iteration did not converge");
}

/// The matrix whose spectral radius decides feasibility of `gamma` on `book`.
inline Eigen::MatrixXd interference_matrix(const PilotBook& book, const Eigen::VectorXd& gamma,
    const NetworkConfig& cfg, FeasibilityModel model = FeasibilityModel::LowerBound)
{
    check_book(book, cfg);
    const int n = cfg.total_users();
    if (gamma.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "targets do not match the book");
    const Eigen::MatrixXd rho2 = book.gram().array().square().matrix();
    Eigen::MatrixXd M(n, n);
    for (int u = 0; u < n; ++u) {
        if (model == FeasibilityModel::LowerBound) {
            M.row(u) = detail::bandwidth_or_zero(gamma[u]) * rho2.row(u);
        } else {
            detail::bandwidth_or_zero(gamma[u]);
            const double own = cfg.gain(u, cfg.cell_of(u));
            for (int v = 0; v < n; ++v) {
                const double r = cfg.gain(u, cfg.cell_of(v)) / own;
                M(u, v) = v == u ? 0.0 : gamma[u] * rho2(u, v) * r * r;
            }
        }
    }
    return M;
}

namespace detail {

// Largest eigenvalue of diag(w) R with R symmetric PSD: similar to the
// symmetric matrix diag(sqrt w) R diag(sqrt w).
inline double symmetrized_radius(const Eigen::VectorXd& weights, const Eigen::MatrixXd& rho2)
{
    const Eigen::VectorXd s = weights.cwiseSqrt();
    const Eigen::MatrixXd S = s.asDiagonal() * rho2 * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues().maxCoeff());
}

} // namespace detail

inline double spectral_radius(const Eigen::MatrixXd& M, FeasibilityModel model)
{
    if (model == FeasibilityModel::LowerBound) {
        // M = diag(w) R2 with R2 the Hadamard square of a Gram matrix.
        const Eigen::VectorXd w = M.diagonal();
        Eigen::MatrixXd rho2 = M;
        for (Eigen::Index u = 0; u < M.rows(); ++u)
            rho2.row(u) = w[u] > 0.0 ? Eigen::VectorXd(M.row(u) / w[u]) : Eigen::VectorXd::Zero(M.cols());
        return detail::symmetrized_radius(w, rho2);
    }
    return perron_root(M).value;
}

/// Decides whether `targets` are asymptotically achievable on `book` for some
/// positive downlink powers.
inline RegionVerdict feasibility_oracle(const PilotBook& book, const SinrTargets& targets, const NetworkConfig& cfg,
    const PowerAllocation& power_uplink, FeasibilityModel model = FeasibilityModel::LowerBound)
{
    check_targets(targets, cfg);
    const Eigen::MatrixXd M = interference_matrix(book, targets.gamma, cfg, model);

    RegionVerdict v;
    v.binding = Binding::Spectral;
    if (model == FeasibilityModel::LowerBound) {
        const Eigen::MatrixXd rho2 = book.gram().array().square().matrix();
        Eigen::VectorXd w(targets.gamma.size());
        for (Eigen::Index u = 0; u < w.size(); ++u)
            w[u] = detail::bandwidth_or_zero(targets.gamma[u]);
        v.spectral_radius = detail::symmetrized_radius(w, rho2);
    } else {
        const PerronPair p = perron_root(M, 100000, 1e-12, 1.0 + kSpectralTolerance);
        v.spectral_radius = p.value;
        if (!p.converged) {
            // The bracket settled the verdict; report the radius from a dense solve.
            const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
            v.spectral_radius = std::clamp(es.eigenvalues().cwiseAbs().maxCoeff(), p.lower, p.upper);
        }
    }
    v.feasible = v.spectral_radius <= 1.0 + kSpectralTolerance;

    if (v.spectral_radius < 1.0 - kSpectralTolerance) {
        // y = (I - M)^{-1} 1 >= 1 satisfies y - M y = 1 > 0; P = delta * y.
        const Eigen::Index n = M.rows();
        const Eigen::VectorXd y = (Eigen::MatrixXd::Identity(n, n) - M).partialPivLu().solve(Eigen::VectorXd::Ones(n));
        const DeltaVector delta = delta_vector(book, power_uplink, cfg);
        Eigen::VectorXd P = delta.values.cwiseProduct(y);
        P *= static_cast<double>(n) / P.sum();
        v.witness = std::move(P);
    }
    return v;
}

// ---------------------------------------------------------------- baselines & sweeps

/// How the comparison designs are realized.
struct BaselineModes {
    WbeScope wbe_scope = WbeScope::PerCell;
    FosPolicy fos_policy = FosPolicy::RoundRobin;
    std::vector<std::vector<int>> fos_groups;
    FeasibilityModel model = FeasibilityModel::LowerBound;
};

inline PilotBook baseline_book(const NetworkConfig& cfg, PilotDesign design, const BaselineModes& modes)
{
    switch (design) {
    case PilotDesign::WBE: return wbe_design(cfg, modes.wbe_scope);
    case PilotDesign::FOS: return fos_design(cfg, modes.fos_policy, modes.fos_groups).first;
    default: throw Error(ErrorKind::InvalidArgument, "not a baseline design");
    }
}

/// Feasibility predicate for one design on one network; targets in flat order.
class DesignOracle {
public:
    DesignOracle(const NetworkConfig& cfg, PilotDesign design, const BaselineModes& modes = {})
        : cfg_(cfg)
        , design_(design)
        , model_(modes.model)
    {
        if (design != PilotDesign::GWBE) {
            book_ = baseline_book(cfg, design, modes);
            rho2_ = book_.gram().array().square().matrix();
        }
    }

    RegionVerdict operator()(const Eigen::VectorXd& gamma) const
    {
        SinrTargets t;
        t.gamma = gamma;
        t.users_per_cell = cfg_.users_per_cell;
        if (design_ == PilotDesign::GWBE)
            return gwbe_verdict(t, cfg_);
        if (model_ == FeasibilityModel::LowerBound) {
            // Fast path of feasibility_oracle without the witness.
            Eigen::VectorXd w(gamma.size());
            for (Eigen::Index u = 0; u < w.size(); ++u)
                w[u] = detail::bandwidth_or_zero(gamma[u]);
            RegionVerdict v;
            v.binding = Binding::Spectral;
            v.spectral_radius = detail::symmetrized_radius(w, rho2_);
            v.feasible = v.spectral_radius <= 1.0 + kSpectralTolerance;
            return v;
        }
        return feasibility_oracle(book_, t, cfg_, uplink_power_control(cfg_), model_);
    }

    const PilotBook& book() const { return book_; }

private:
    NetworkConfig cfg_;
    PilotDesign design_;
    FeasibilityModel model_;
    PilotBook book_;
    Eigen::MatrixXd rho2_;
};

/// Largest gamma such that targets gamma * shape (same in every cell) are
/// feasible for `design`; bisection to 1e-6 on (0, 1e3].
inline double max_permitted_sinr(const NetworkConfig& cfg, const std::vector<double>& shape, PilotDesign design,
    const BaselineModes& modes = {})
{
    if (static_cast<int>(shape.size()) != cfg.users_per_cell)
        throw Error(ErrorKind::DimensionMismatch, "target shape needs K entries");
    const DesignOracle oracle(cfg, design, modes);
    auto feasible = [&](double g) {
        Eigen::VectorXd gamma(cfg.total_users());
        for (int u = 0; u < cfg.total_users(); ++u)
            gamma[u] = g * shape[static_cast<std::size_t>(u % cfg.users_per_cell)];
        return oracle(gamma).feasible;
    };
    double lo = 0.0;
    double hi = 1e3;
    if (feasible(hi))
        throw Error(ErrorKind::BracketFailure, "targets remain feasible at the upper probe bound");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

struct RegionGrid {
    int points_per_axis = 120;
    double max_gamma = 1.2;
    /// Targets of the remaining K - 3 users of every cell.
    std::vector<double> fixed_tail{0.1};
    /// Evaluate every grid point instead of bisecting each column; required to
    /// report per-point verdicts.
    bool exhaustive = false;
};

struct RegionPoint {
    double gamma1 = 0, gamma2 = 0, gamma3 = 0;
    bool feasible = false;
    double spectral_radius = 0;
};

struct DesignRegion {
    PilotDesign design = PilotDesign::GWBE;
    std::int64_t feasible_count = 0;
    double volume = 0.0;
    /// points_per_axis^2 entries (i * n + j): number of feasible gamma3 cells above (gamma1_i, gamma2_j).
    std::vector<int> surface;
    /// Filled only for exhaustive sweeps, in (i, j, k) order.
    std::vector<RegionPoint> points;
};

struct RegionSweep {
    RegionGrid grid;
    double step = 0.0;
    std::vector<DesignRegion> regions;

    double gamma_at(int i) const { return (i + 0.5) * step; }

    const DesignRegion& region(PilotDesign d) const
    {
        for (const auto& r : regions)
            if (r.design == d)
                return r;
        throw Error(ErrorKind::InvalidArgument, "design not part of the sweep");
    }

    /// volume(GWBE) / volume(d)
    double ratio_vs_gwbe(PilotDesign d) const { return region(PilotDesign::GWBE).volume / region(d).volume; }
};

/// Feasibility over a uniform grid of (gamma1, gamma2, gamma3) in (0, max]^3,
/// cell-centred, with the other targets of each cell fixed and every cell
/// sharing the same requirement vector. Verdicts are monotone in the targets,
/// so by default each gamma3 column is bisected.
inline RegionSweep region_sweep(const NetworkConfig& cfg, const RegionGrid& grid,
    const std::vector<PilotDesign>& designs, const BaselineModes& modes = {}, unsigned workers = 0)
{
    const int n = grid.points_per_axis;
    if (n < 1 || !(grid.max_gamma > 0.0))
        throw Error(ErrorKind::InvalidArgument, "grid needs at least one point and a positive range");
    if (static_cast<double>(n) * n * n > 1e7)
        throw Error(ErrorKind::GridTooFine, "more than 1e7 grid points");
    if (cfg.users_per_cell != 3 + static_cast<int>(grid.fixed_tail.size()))
        throw Error(ErrorKind::DimensionMismatch, "region sweep needs K = 3 + number of fixed targets");

    RegionSweep sweep;
    sweep.grid = grid;
    sweep.step = grid.max_gamma / n;
    const double cell_volume = sweep.step * sweep.step * sweep.step;
    const int k = cfg.users_per_cell;

    for (PilotDesign design : designs) {
        const DesignOracle oracle(cfg, design, modes);
        DesignRegion region;
        region.design = design;
        region.surface.assign(static_cast<std::size_t>(n) * n, 0);
        if (grid.exhaustive)
            region.points.resize(static_cast<std::size_t>(n) * n * n);

        auto evaluate = [&](int i, int j, int m) {
            Eigen::VectorXd gamma(cfg.total_users());
            for (int l = 0; l < cfg.cells; ++l) {
                gamma[l * k + 0] = sweep.gamma_at(i);
                gamma[l * k + 1] = sweep.gamma_at(j);
                gamma[l * k + 2] = sweep.gamma_at(m);
                for (std::size_t t = 0; t < grid.fixed_tail.size(); ++t)
                    gamma[l * k + 3 + static_cast<int>(t)] = grid.fixed_tail[t];
            }
            return oracle(gamma);
        };

        auto column = [&](int i, int j) {
            int count = 0;
            if (grid.exhaustive) {
                for (int m = 0; m < n; ++m) {
                    const RegionVerdict v = evaluate(i, j, m);
                    region.points[(static_cast<std::size_t>(i) * n + j) * n + m]
                        = {sweep.gamma_at(i), sweep.gamma_at(j), sweep.gamma_at(m), v.feasible, v.spectral_radius};
                    count += v.feasible ? 1 : 0;
                }
            } else {
                // Largest prefix of feasible gamma3 cells.
                int lo = 0;
                int hi = n;
                while (lo < hi) {
                    const int mid = (lo + hi) / 2;
                    if (evaluate(i, j, mid).feasible)
                        lo = mid + 1;
                    else
                        hi = mid;
                }
                count = lo;
            }
            region.surface[static_cast<std::size_t>(i) * n + j] = count;
        };

        unsigned pool = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
        pool = std::min<unsigned>(pool, static_cast<unsigned>(n));
        auto work = [&](unsigned id) {
            for (int i = static_cast<int>(id); i < n; i += static_cast<int>(pool))
                for (int j = 0; j < n; ++j)
                    column(i, j);
        };
        if (pool == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            for (unsigned id = 0; id < pool; ++id)
                threads.emplace_back(work, id);
            for (auto& t : threads)
                t.join();
        }

        for (int c : region.surface)
            region.feasible_count += c;
        region.volume = static_cast<double>(region.feasible_count) * cell_volume;
        sweep.regions.push_back(std::move(region));
    }
    return sweep;
}

} // namespace pilotload

#endif
