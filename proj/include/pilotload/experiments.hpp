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

#ifndef PILOTLOAD_EXPERIMENTS_HPP
#define PILOTLOAD_EXPERIMENTS_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "errors.hpp"
#include "gwbe.hpp"
#include "load.hpp"
#include "montecarlo.hpp"
#include "netmodel.hpp"
#include "pilot_io.hpp"
#include "sinr.hpp"

namespace pilotload {

namespace detail {

// Six significant digits for console lines; CSV output keeps full precision.
inline std::string log_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace detail

enum class InflationRule { Uniform, Clipped };

/// A network configuration plus the experiment parameters carried in the same
/// JSON document.
struct Experiment {
    NetworkConfig network;
    std::optional<SinrTargets> targets;
    std::optional<Eigen::VectorXd> gamma_hat;
    InflationRule inflation = InflationRule::Uniform;
    std::vector<double> pattern;
    int first_cells = 2, last_cells = 6;
    RegionGrid grid;
    BaselineModes modes;
    int user = 0;
    std::optional<double> threshold;
    int nt_from = 10, nt_to = 500, nt_step = 10;
    std::string hash;
};

namespace detail {

inline std::vector<double> number_list(const nlohmann::json& v, const char* key)
{
    if (!v.is_array())
        throw Error(ErrorKind::ParseError, std::string("'") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (x.is_string() && x.get<std::string>() == "inf")
            out.push_back(std::numeric_limits<double>::infinity());
        else
            out.push_back(number_as<double>(x, key));
    }
    return out;
}

// Either one list per cell or a single list shared by all cells.
inline Eigen::VectorXd per_cell_values(const nlohmann::json& v, const char* key, const NetworkConfig& cfg)
{
    if (!v.is_array() || v.empty())
        throw Error(ErrorKind::ParseError, std::string("'") + key + "' must be a non-empty array");
    std::vector<std::vector<double>> cells;
    if (v.front().is_array()) {
        for (const auto& c : v)
            cells.push_back(number_list(c, key));
    } else {
        cells.assign(static_cast<std::size_t>(cfg.cells), number_list(v, key));
    }
    if (static_cast<int>(cells.size()) != cfg.cells)
        throw Error(ErrorKind::DimensionMismatch, std::string("'") + key + "' needs one list per cell");
    SinrTargets t = make_targets(cells);
    if (t.users_per_cell != cfg.users_per_cell)
        throw Error(ErrorKind::DimensionMismatch, std::string("'") + key + "' needs K entries per cell");
    return t.gamma;
}

inline nlohmann::json parse_json(std::string_view text)
{
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

} // namespace detail

inline Experiment experiment_from_json(const nlohmann::json& doc)
{
    using detail::integer_as;
    Experiment e;
    e.network = config_from_json(doc);
    const NetworkConfig& cfg = e.network;
    e.hash = [&] {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
        return std::string(buf);
    }();

    if (auto it = doc.find("gamma"); it != doc.end()) {
        SinrTargets t;
        t.gamma = detail::per_cell_values(*it, "gamma", cfg);
        t.users_per_cell = cfg.users_per_cell;
        e.targets = t;
    }
    if (auto it = doc.find("gamma_hat"); it != doc.end())
        e.gamma_hat = detail::per_cell_values(*it, "gamma_hat", cfg);
    if (auto it = doc.find("inflation"); it != doc.end()) {
        const std::string rule = it->get<std::string>();
        if (rule == "uniform")
            e.inflation = InflationRule::Uniform;
        else if (rule == "clipped")
            e.inflation = InflationRule::Clipped;
        else
            throw Error(ErrorKind::ParseError, "inflation must be \"uniform\" or \"clipped\"");
    }
    if (auto it = doc.find("pattern"); it != doc.end())
        e.pattern = detail::number_list(*it, "pattern");
    else
        e.pattern.assign(static_cast<std::size_t>(cfg.users_per_cell), 1.0);
    if (static_cast<int>(e.pattern.size()) != cfg.users_per_cell)
        throw Error(ErrorKind::DimensionMismatch, "'pattern' needs K entries");
    if (auto it = doc.find("cells"); it != doc.end()) {
        if (!it->is_array() || it->size() != 2)
            throw Error(ErrorKind::ParseError, "'cells' must be [first, last]");
        e.first_cells = integer_as((*it)[0], "cells");
        e.last_cells = integer_as((*it)[1], "cells");
        if (e.first_cells < 1 || e.last_cells < e.first_cells)
            throw Error(ErrorKind::InvalidArgument, "'cells' range is empty");
    }
    if (auto it = doc.find("grid"); it != doc.end()) {
        if (auto p = it->find("points"); p != it->end())
            e.grid.points_per_axis = integer_as(*p, "grid.points");
        if (auto p = it->find("max"); p != it->end())
            e.grid.max_gamma = detail::number_as<double>(*p, "grid.max");
        if (auto p = it->find("fixed"); p != it->end())
            e.grid.fixed_tail = detail::number_list(*p, "grid.fixed");
    }
    if (auto it = doc.find("wbe_scope"); it != doc.end()) {
        const std::string s = it->get<std::string>();
        if (s != "per-cell" && s != "network")
            throw Error(ErrorKind::ParseError, "wbe_scope must be \"per-cell\" or \"network\"");
        e.modes.wbe_scope = s == "network" ? WbeScope::Network : WbeScope::PerCell;
    }
    if (auto it = doc.find("fos_groups"); it != doc.end()) {
        e.modes.fos_policy = FosPolicy::Explicit;
        for (const auto& g : *it) {
            std::vector<int> group;
            for (const auto& u : g)
                group.push_back(integer_as(u, "fos_groups") - 1);
            e.modes.fos_groups.push_back(std::move(group));
        }
    }
    if (auto it = doc.find("oracle"); it != doc.end()) {
        const std::string s = it->get<std::string>();
        if (s != "bound" && s != "exact")
            throw Error(ErrorKind::ParseError, "oracle must be \"bound\" or \"exact\"");
        e.modes.model = s == "exact" ? FeasibilityModel::Exact : FeasibilityModel::LowerBound;
    }
    if (auto it = doc.find("user"); it != doc.end()) {
        if (!it->is_array() || it->size() != 2)
            throw Error(ErrorKind::ParseError, "'user' must be [cell, slot]");
        e.user = user_at(integer_as((*it)[0], "user"), integer_as((*it)[1], "user"), cfg.users_per_cell).flat - 1;
        if (e.user < 0 || e.user >= cfg.total_users())
            throw Error(ErrorKind::InvalidArgument, "'user' is outside the network");
    }
    if (auto it = doc.find("threshold"); it != doc.end())
        e.threshold = detail::number_as<double>(*it, "threshold");
    if (auto it = doc.find("antennas"); it != doc.end()) {
        e.nt_from = integer_as(detail::require(*it, "from"), "antennas.from");
        e.nt_to = integer_as(detail::require(*it, "to"), "antennas.to");
        e.nt_step = integer_as(detail::require(*it, "step"), "antennas.step");
        if (e.nt_from < 1 || e.nt_step < 1 || e.nt_to < e.nt_from)
            throw Error(ErrorKind::InvalidArgument, "antenna range is empty");
    }
    return e;
}

inline Experiment load_experiment(std::string_view text) { return experiment_from_json(detail::parse_json(text)); }

/// Requirements plus inflated targets. Without "gamma" every user gets the
/// equal share eb = tau / (L K), which already sits on the boundary.
inline SinrTargets prepared_targets(const Experiment& e)
{
    const NetworkConfig& cfg = e.network;
    if (!e.targets) {
        SinrTargets t;
        const double share = static_cast<double>(cfg.pilot_length) / (cfg.cells * cfg.users_per_cell);
        t.gamma = Eigen::VectorXd::Constant(cfg.total_users(), target_from_bandwidth(std::min(share, 1.0)));
        t.users_per_cell = cfg.users_per_cell;
        return e.inflation == InflationRule::Clipped ? inflate_targets_clipped(t, cfg) : inflate_targets(t, cfg);
    }
    if (e.gamma_hat)
        return with_explicit_inflation(*e.targets, *e.gamma_hat, cfg);
    return e.inflation == InflationRule::Clipped ? inflate_targets_clipped(*e.targets, cfg)
                                                 : inflate_targets(*e.targets, cfg);
}

/// A book with its downlink powers: P = delta * eb(gamma-hat) for every design,
/// with delta computed on that design's own book.
struct DesignRun {
    PilotDesign design = PilotDesign::GWBE;
    PilotBook book;
    PowerAllocation power;
    DeltaVector delta;
    std::optional<GwbeDesignReport> report;
};

inline DesignRun prepare_design(const Experiment& e, const SinrTargets& targets, PilotDesign design)
{
    const NetworkConfig& cfg = e.network;
    DesignRun run;
    run.design = design;
    if (design == PilotDesign::GWBE) {
        run.report = gwbe_design(targets, cfg);
        run.book = run.report->pilot_book;
        run.power = run.report->power;
    } else {
        run.book = baseline_book(cfg, design, e.modes);
        run.power = uplink_power_control(cfg);
    }
    run.delta = delta_vector(run.book, run.power, cfg);
    run.power.downlink = run.delta.values.cwiseProduct(effective_bandwidths(targets.effective()));
    return run;
}

struct Artifact {
    std::string name;
    std::string content;
};

struct RunOutput {
    std::vector<Artifact> artifacts;
    std::vector<std::string> log;
    bool passed = true;
};

struct RunOptions {
    std::vector<PilotDesign> designs{PilotDesign::GWBE, PilotDesign::WBE, PilotDesign::FOS};
    std::uint64_t seed = 1;
    std::int64_t trials = 100000;
    std::optional<int> grid;
    bool points = false;
    unsigned workers = 0;
};

namespace detail {

inline std::string design_list(const std::vector<PilotDesign>& designs)
{
    std::string out;
    for (std::size_t i = 0; i < designs.size(); ++i)
        out += (i ? ";" : "") + std::string(to_string(designs[i]));
    return out;
}

inline OutputHeader header(const char* kind, const Experiment& e, const RunOptions& o)
{
    return {kind, design_list(o.designs), o.seed, e.hash, {}};
}

inline std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string book_text(const PilotBook& book, const Experiment& e, const RunOptions& o)
{
    std::ostringstream os;
    write_pilot_book(os, book,
        {"design=" + std::string(to_string(book.design)), "seed=" + std::to_string(o.seed), "config_hash=" + e.hash});
    return os.str();
}

} // namespace detail

// ---------------------------------------------------------------- design

inline RunOutput run_design(const Experiment& e, const RunOptions& o)
{
    const NetworkConfig& cfg = e.network;
    const SinrTargets targets = prepared_targets(e);
    RunOutput out;

    CsvWriter report({"design", "cell", "slot", "gamma", "gamma_hat", "weight", "raw_norm", "B"});
    CsvWriter summary({"design", "unit_norm_residual", "cell_gram_residual", "welch_trace", "welch_bound"});
    for (PilotDesign d : o.designs) {
        const DesignRun run = prepare_design(e, targets, d);
        out.artifacts.push_back({"book_" + detail::lower(to_string(d)) + ".txt", detail::book_text(run.book, e, o)});
        Eigen::VectorXd weights = Eigen::VectorXd::Ones(cfg.total_users());
        if (run.report) {
            weights = run.report->weights();
            for (int u = 0; u < cfg.total_users(); ++u) {
                const UserId id = user_from_flat(u + 1, cfg.users_per_cell);
                report.cell(to_string(d)).cell(id.cell).cell(id.slot).cell(targets.gamma[u]);
                report.cell(targets.effective()[u]).cell(weights[u]).cell(run.report->raw_column_norms[u]);
                report.cell(run.report->per_cell_B[cfg.cell_of(u)]).end_row();
            }
        }
        const double residual = cell_gram_residual(run.book, weights);
        summary.cell(to_string(d)).cell(run.book.unit_norm_residual()).cell(residual);
        summary.cell(welch_trace(run.book)).cell(welch_bound(run.book)).end_row();
        out.log.push_back(std::string(to_string(d)) + ": unit-norm residual " + detail::log_number(run.book.unit_norm_residual())
            + ", cell Gram residual " + detail::log_number(residual));
    }
    const OutputHeader h = detail::header("design", e, o);
    if (report.rows())
        out.artifacts.push_back({"design_report.csv", report.str(h)});
    out.artifacts.push_back({"design_summary.csv", summary.str(h)});
    return out;
}

// ---------------------------------------------------------------- region

inline RunOutput run_region(const Experiment& e, const RunOptions& o)
{
    RegionGrid grid = e.grid;
    if (o.grid)
        grid.points_per_axis = *o.grid;
    grid.exhaustive = o.points;
    const RegionSweep sweep = region_sweep(e.network, grid, o.designs, e.modes, o.workers);
    const OutputHeader h = detail::header("region", e, o);
    RunOutput out;

    const bool has_gwbe = std::find(o.designs.begin(), o.designs.end(), PilotDesign::GWBE) != o.designs.end();
    CsvWriter summary({"design", "volume", "ratio_vs_gwbe"});
    for (const auto& r : sweep.regions) {
        summary.cell(to_string(r.design)).cell(r.volume);
        if (has_gwbe)
            summary.cell(sweep.ratio_vs_gwbe(r.design));
        else
            summary.cell("");
        summary.end_row();
        out.log.push_back(std::string(to_string(r.design)) + ": volume " + detail::log_number(r.volume)
            + (has_gwbe ? ", GWBE/design " + detail::log_number(sweep.ratio_vs_gwbe(r.design)) : ""));
    }
    out.artifacts.push_back({"region_summary.csv", summary.str(h)});

    const int n = grid.points_per_axis;
    CsvWriter surface({"gamma1", "gamma2", "design", "gamma3_max"});
    for (const auto& r : sweep.regions)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                surface.cell(sweep.gamma_at(i)).cell(sweep.gamma_at(j)).cell(to_string(r.design));
                surface.cell(r.surface[static_cast<std::size_t>(i) * n + j] * sweep.step).end_row();
            }
    out.artifacts.push_back({"region_surface.csv", surface.str(h)});

    if (o.points) {
        CsvWriter points({"gamma1", "gamma2", "gamma3", "design", "feasible", "spectral_radius"});
        for (const auto& r : sweep.regions)
            for (const auto& p : r.points) {
                points.cell(p.gamma1).cell(p.gamma2).cell(p.gamma3).cell(to_string(r.design));
                points.cell(p.feasible).cell(p.spectral_radius).end_row();
            }
        out.artifacts.push_back({"region_points.csv", points.str(h)});
    }
    return out;
}

// ---------------------------------------------------------------- cells

inline RunOutput run_cells(const Experiment& e, const RunOptions& o)
{
    CsvWriter table({"L", "design", "max_sinr"});
    RunOutput out;
    for (PilotDesign d : o.designs) {
        std::string line = std::string(to_string(d)) + ":";
        for (int cells = e.first_cells; cells <= e.last_cells; ++cells) {
            const double g = max_permitted_sinr(with_cells(e.network, cells), e.pattern, d, e.modes);
            table.cell(cells).cell(to_string(d)).cell(g).end_row();
            line += " " + detail::log_number(g);
        }
        out.log.push_back(line);
    }
    out.artifacts.push_back({"cells.csv", table.str(detail::header("cells", e, o))});
    return out;
}

// ---------------------------------------------------------------- antennas

struct Crossing {
    std::optional<double> interpolated;
    std::optional<std::int64_t> exact;
};

/// First Nt at which the user's finite-Nt SINR reaches `threshold`: linear
/// interpolation on the grid plus the smallest integer Nt by bisection.
inline Crossing antenna_crossing(const DesignRun& run, const NetworkConfig& cfg, int user, double threshold,
    const std::vector<int>& grid)
{
    auto phi = [&](double nt) { return sinr_finite(run.book, run.power, run.delta, cfg, nt).sinr[user]; };
    Crossing c;
    const double limit = sinr_asymptotic(run.book, run.power, run.delta, cfg).sinr[user];
    if (!(limit > threshold))
        return c;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = phi(grid[i]);
        if (v >= threshold) {
            if (i == 0) {
                c.interpolated = grid[0];
            } else {
                const double prev = phi(grid[i - 1]);
                c.interpolated = grid[i - 1] + (threshold - prev) / (v - prev) * (grid[i] - grid[i - 1]);
            }
            break;
        }
    }

    std::int64_t lo = 0, hi = 1;
    while (phi(static_cast<double>(hi)) < threshold) {
        lo = hi;
        hi *= 2;
        if (hi > (std::int64_t{1} << 50))
            return c;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (phi(static_cast<double>(mid)) >= threshold ? hi : lo) = mid;
    }
    c.exact = hi;
    return c;
}

inline RunOutput run_antennas(const Experiment& e, const RunOptions& o)
{
    const NetworkConfig& cfg = e.network;
    const SinrTargets targets = prepared_targets(e);
    const double threshold = e.threshold.value_or(targets.gamma[e.user]);
    const UserId id = user_from_flat(e.user + 1, cfg.users_per_cell);

    std::vector<int> grid;
    for (int nt = e.nt_from; nt <= e.nt_to; nt += e.nt_step)
        grid.push_back(nt);

    CsvWriter curve({"Nt", "design", "cell", "slot", "sinr"});
    CsvWriter summary({"design", "cell", "slot", "threshold", "asymptotic", "crossing_interpolated", "crossing_exact"});
    RunOutput out;
    for (PilotDesign d : o.designs) {
        const DesignRun run = prepare_design(e, targets, d);
        for (int nt : grid) {
            curve.cell(nt).cell(to_string(d)).cell(id.cell).cell(id.slot);
            curve.cell(sinr_finite(run.book, run.power, run.delta, cfg, nt).sinr[e.user]).end_row();
        }
        const double limit = sinr_asymptotic(run.book, run.power, run.delta, cfg).sinr[e.user];
        curve.cell("asymptotic").cell(to_string(d)).cell(id.cell).cell(id.slot).cell(limit).end_row();

        const Crossing c = antenna_crossing(run, cfg, e.user, threshold, grid);
        summary.cell(to_string(d)).cell(id.cell).cell(id.slot).cell(threshold).cell(limit);
        if (c.interpolated)
            summary.cell(*c.interpolated);
        else
            summary.cell("none");
        if (c.exact)
            summary.cell(*c.exact);
        else
            summary.cell("none");
        summary.end_row();
        out.log.push_back(std::string(to_string(d)) + ": asymptote " + detail::log_number(limit) + ", crossing "
            + (c.exact ? "Nt = " + std::to_string(*c.exact) : std::string("never")));
    }
    const OutputHeader h = detail::header("antennas", e, o);
    out.artifacts.push_back({"antennas.csv", curve.str(h)});
    out.artifacts.push_back({"antennas_summary.csv", summary.str(h)});
    return out;
}

// ---------------------------------------------------------------- validate

inline RunOutput run_validate(const Experiment& e, const RunOptions& o)
{
    const NetworkConfig& cfg = e.network;
    const SinrTargets targets = prepared_targets(e);
    const std::vector<int> antennas = cfg.antennas ? std::vector<int>{*cfg.antennas} : std::vector<int>{8, 64};

    CsvWriter table({"design", "cell", "slot", "mode", "Nt", "sinr", "ci_halfwidth", "seed"});
    CsvWriter summary({"design", "Nt", "trials", "max_abs_z", "within_3ci"});
    RunOutput out;
    for (PilotDesign d : o.designs) {
        const DesignRun run = prepare_design(e, targets, d);
        const SinrResult limit = sinr_asymptotic(run.book, run.power, run.delta, cfg);
        const SinrResult bound = sinr_lower_bound_asym(run.book, run.power, run.delta, cfg);
        for (int nt : antennas) {
            const SinrResult fin = sinr_finite(run.book, run.power, run.delta, cfg, nt);
            const SinrResult mc = monte_carlo_run(run.book, run.power, cfg, nt, o.trials, o.seed, o.workers).result;
            double worst = 0.0;
            for (int u = 0; u < cfg.total_users(); ++u) {
                const UserId id = user_from_flat(u + 1, cfg.users_per_cell);
                auto row = [&](const char* mode, double v, std::optional<double> ci) {
                    table.cell(to_string(d)).cell(id.cell).cell(id.slot).cell(mode).cell(nt).cell(v);
                    if (ci)
                        table.cell(*ci);
                    else
                        table.cell("");
                    table.cell(o.seed).end_row();
                };
                row("finite", fin.sinr[u], std::nullopt);
                row("monte-carlo", mc.sinr[u], mc.ci_halfwidth[u]);
                worst = std::max(worst, std::abs(mc.sinr[u] - fin.sinr[u]) * 1.959963984540054 / mc.ci_halfwidth[u]);
            }
            const bool ok = worst <= 3.0 * 1.959963984540054;
            out.passed = out.passed && ok;
            summary.cell(to_string(d)).cell(nt).cell(o.trials).cell(worst).cell(ok).end_row();
            out.log.push_back(std::string(to_string(d)) + " Nt=" + std::to_string(nt) + ": max |MC - closed form| = "
                + detail::log_number(worst) + " sigma");
        }
        for (int u = 0; u < cfg.total_users(); ++u) {
            const UserId id = user_from_flat(u + 1, cfg.users_per_cell);
            table.cell(to_string(d)).cell(id.cell).cell(id.slot).cell("asymptotic").cell("inf").cell(limit.sinr[u]);
            table.cell("").cell(o.seed).end_row();
            table.cell(to_string(d)).cell(id.cell).cell(id.slot).cell("lower-bound").cell("inf").cell(bound.sinr[u]);
            table.cell("").cell(o.seed).end_row();
        }
    }
    const OutputHeader h = detail::header("validate", e, o);
    out.artifacts.push_back({"validate.csv", table.str(h)});
    out.artifacts.push_back({"validate_summary.csv", summary.str(h)});
    return out;
}

// ---------------------------------------------------------------- verify

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool required = true;
    bool passed = true;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    double min_rho2 = 0.0, max_rho2 = 0.0;
    bool equiangular = false;

    bool passed() const
    {
        for (const auto& c : checks)
            if (c.required && !c.passed)
                return false;
        return true;
    }
};

/// Structural checks on a pilot book: unit norms, the per-cell weighted Gram
/// identity, the Welch trace bound, feasibility at the configured targets and
/// within-cell equiangularity.
inline VerifyReport verify_book(const PilotBook& book, const Experiment& e)
{
    const NetworkConfig& cfg = e.network;
    check_book(book, cfg);
    VerifyReport r;

    const double norm = book.unit_norm_residual();
    r.checks.push_back({"unit_norm", norm, kUnitNormTolerance, true, norm <= kUnitNormTolerance});

    std::optional<SinrTargets> targets;
    if (e.targets)
        targets = prepared_targets(e);
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(cfg.total_users());
    if (book.design == PilotDesign::GWBE)
        weights = effective_bandwidths((targets ? *targets : prepared_targets(e)).effective());
    // Columns are normalized for the Gram check so one bad norm is reported once.
    PilotBook unit = book;
    for (Eigen::Index u = 0; u < unit.Q.cols(); ++u)
        if (unit.Q.col(u).norm() > 0.0)
            unit.Q.col(u).normalize();
    const double gram = cell_gram_residual(unit, weights);
    const bool tight = book.design == PilotDesign::GWBE || book.design == PilotDesign::WBE;
    r.checks.push_back({"cell_gram", gram, 1e-8, tight, gram <= 1e-8});

    const double trace = welch_trace(book);
    const double welch = welch_bound(book);
    r.checks.push_back({"welch_trace", trace, welch, true, trace >= welch * (1.0 - 1e-9)});

    if (targets) {
        const RegionVerdict v = feasibility_oracle(unit, *targets, cfg, uplink_power_control(cfg), e.modes.model);
        r.checks.push_back({"spectral_radius", v.spectral_radius, 1.0, false, v.feasible});
    }

    const Eigen::MatrixXd rho2 = unit.gram().array().square().matrix();
    r.min_rho2 = std::numeric_limits<double>::infinity();
    r.max_rho2 = 0.0;
    const int k = cfg.users_per_cell;
    for (int l = 0; l < cfg.cells; ++l)
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                r.min_rho2 = std::min(r.min_rho2, rho2(l * k + a, l * k + b));
                r.max_rho2 = std::max(r.max_rho2, rho2(l * k + a, l * k + b));
            }
    if (k < 2)
        r.min_rho2 = 0.0;
    r.equiangular = r.max_rho2 - r.min_rho2 <= 1e-9;
    return r;
}

inline RunOutput run_verify(const PilotBook& book, const Experiment& e, const RunOptions& o)
{
    const VerifyReport r = verify_book(book, e);
    RunOutput out;
    CsvWriter table({"check", "value", "limit", "required", "passed"});
    for (const auto& c : r.checks) {
        table.cell(c.name).cell(c.value).cell(c.limit).cell(c.required).cell(c.passed).end_row();
        out.log.push_back(c.name + ": " + detail::log_number(c.value) + " (limit " + detail::log_number(c.limit) + ") "
            + (c.passed ? "ok" : (c.required ? "FAILED" : "exceeded")));
    }
    table.cell("equiangular").cell(r.max_rho2 - r.min_rho2).cell(1e-9).cell(false).cell(r.equiangular).end_row();
    out.log.push_back("within-cell |rho|^2 in [" + detail::log_number(r.min_rho2) + ", " + detail::log_number(r.max_rho2) + "]"
        + (r.equiangular ? ", uniform" : ""));
    RunOptions named = o;
    named.designs = {book.design};
    out.artifacts.push_back({"verify.csv", table.str(detail::header("verify", e, named))});
    out.passed = r.passed();
    return out;
}

} // namespace pilotload

#endif
