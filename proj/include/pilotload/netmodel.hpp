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

#ifndef PILOTLOAD_NETMODEL_HPP
#define PILOTLOAD_NETMODEL_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pilotload {

// Users are indexed by a flat index u in [0, K_tot) internally; cell(u) = u / K.
// UserId carries the 1-based (cell, slot, flat) triple used in reports.
struct UserId {
    int cell = 1;
    int slot = 1;
    int flat = 1;

    friend bool operator==(const UserId&, const UserId&) = default;
};

inline UserId user_from_flat(int flat, int users_per_cell)
{
    if (users_per_cell < 1 || flat < 1)
        throw Error(ErrorKind::InvalidArgument, "flat index and users per cell must be >= 1");
    return {(flat - 1) / users_per_cell + 1, (flat - 1) % users_per_cell + 1, flat};
}

inline UserId user_at(int cell, int slot, int users_per_cell)
{
    if (slot < 1 || slot > users_per_cell || cell < 1)
        throw Error(ErrorKind::InvalidArgument, "slot out of range");
    return {cell, slot, (cell - 1) * users_per_cell + slot};
}

/// Symmetric large-scale gain shorthand: own-cell gain and a common cross-cell gain.
struct GainShorthand {
    double own = 1.0;
    std::optional<double> cross;

    friend bool operator==(const GainShorthand&, const GainShorthand&) = default;
};

struct NetworkConfig {
    int cells = 1;          // L
    int users_per_cell = 1; // K
    int pilot_length = 1;   // tau
    std::optional<int> antennas; // Nt; empty means the asymptotic regime
    double downlink_noise = 1.0; // sigma_w^2
    double uplink_noise = 1.0;   // sigma_n^2
    /// gain(u, l): large-scale gain from user u to the BS of cell l. K_tot x L.
    Eigen::MatrixXd gain;
    /// Retained when the gains were given as (own, cross) so the network can be
    /// rebuilt for a different cell count.
    std::optional<GainShorthand> shorthand;

    int total_users() const { return cells * users_per_cell; }
    int cell_of(int u) const { return u / users_per_cell; }
    double own_gain(int u) const { return gain(u, cell_of(u)); }
};

inline Eigen::MatrixXd expand_gains(int cells, int users_per_cell, const GainShorthand& g)
{
    const int n = cells * users_per_cell;
    Eigen::MatrixXd beta(n, cells);
    for (int u = 0; u < n; ++u)
        for (int l = 0; l < cells; ++l)
            beta(u, l) = (u / users_per_cell == l) ? g.own : g.cross.value_or(0.0);
    return beta;
}

inline void validate(const NetworkConfig& cfg)
{
    if (cfg.cells < 1 || cfg.users_per_cell < 1 || cfg.pilot_length < 1)
        throw Error(ErrorKind::InvalidArgument, "L, K and tau must all be >= 1");
    if (cfg.antennas && *cfg.antennas < 1)
        throw Error(ErrorKind::InvalidArgument, "Nt must be >= 1");
    if (!(cfg.downlink_noise >= 0.0) || !(cfg.uplink_noise >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "noise variances must be non-negative");
    if (cfg.gain.rows() != cfg.total_users() || cfg.gain.cols() != cfg.cells)
        throw Error(ErrorKind::DimensionMismatch,
            "gain tensor must be " + std::to_string(cfg.total_users()) + " x " + std::to_string(cfg.cells));
    for (Eigen::Index i = 0; i < cfg.gain.size(); ++i) {
        const double b = cfg.gain.data()[i];
        if (!(b > 0.0) || !std::isfinite(b))
            throw Error(ErrorKind::NonPositiveGain, "gain entries must be finite and > 0");
    }
}

/// Builds and validates a configuration with (own, cross) gains.
inline NetworkConfig make_config(int cells, int users_per_cell, int pilot_length, double own, std::optional<double> cross,
    std::optional<int> antennas = std::nullopt, double downlink_noise = 1.0, double uplink_noise = 1.0)
{
    NetworkConfig cfg;
    cfg.cells = cells;
    cfg.users_per_cell = users_per_cell;
    cfg.pilot_length = pilot_length;
    cfg.antennas = antennas;
    cfg.downlink_noise = downlink_noise;
    cfg.uplink_noise = uplink_noise;
    if (cells > 1 && !cross)
        throw Error(ErrorKind::MissingKey, "cross");
    if (cells < 1 || users_per_cell < 1)
        throw Error(ErrorKind::InvalidArgument, "L and K must be >= 1");
    cfg.shorthand = GainShorthand{own, cells > 1 ? cross : std::nullopt};
    cfg.gain = expand_gains(cells, users_per_cell, *cfg.shorthand);
    validate(cfg);
    return cfg;
}

/// Same network with a different number of cells; needs the (own, cross) shorthand.
inline NetworkConfig with_cells(const NetworkConfig& cfg, int cells)
{
    if (!cfg.shorthand)
        throw Error(ErrorKind::InvalidArgument, "changing L requires (own, cross) gain shorthand");
    auto cross = cfg.shorthand->cross;
    if (cells > 1 && !cross)
        throw Error(ErrorKind::MissingKey, "cross");
    return make_config(cells, cfg.users_per_cell, cfg.pilot_length, cfg.shorthand->own, cross, cfg.antennas,
        cfg.downlink_noise, cfg.uplink_noise);
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& doc, const char* key)
{
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null())
        throw Error(ErrorKind::MissingKey, key);
    return *it;
}

template <class T>
T number_as(const nlohmann::json& v, const char* key)
{
    if (!v.is_number())
        throw Error(ErrorKind::ParseError, std::string("'") + key + "' must be numeric");
    return v.get<T>();
}

inline int integer_as(const nlohmann::json& v, const char* key)
{
    if (!v.is_number_integer())
        throw Error(ErrorKind::ParseError, std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

} // namespace detail

/// Reads a network configuration from a JSON document.
///
/// Required keys: L, K, tau, and either `beta` (K_tot rows of L gains) or
/// `own` (plus `cross` when L > 1). Optional: Nt (integer or "asymptotic"),
/// sigma_w2, sigma_n2 (both default to 1.0). Unknown keys are ignored so the
/// same document can carry experiment parameters.
inline NetworkConfig config_from_json(const nlohmann::json& doc)
{
    using detail::integer_as;
    using detail::number_as;
    using detail::require;

    if (!doc.is_object())
        throw Error(ErrorKind::ParseError, "configuration must be a JSON object");

    NetworkConfig cfg;
    cfg.cells = integer_as(require(doc, "L"), "L");
    cfg.users_per_cell = integer_as(require(doc, "K"), "K");
    cfg.pilot_length = integer_as(require(doc, "tau"), "tau");
    if (cfg.cells < 1 || cfg.users_per_cell < 1 || cfg.pilot_length < 1)
        throw Error(ErrorKind::InvalidArgument, "L, K and tau must all be >= 1");

    if (auto it = doc.find("Nt"); it != doc.end() && !it->is_null()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "asymptotic")
                throw Error(ErrorKind::ParseError, "Nt must be an integer or \"asymptotic\"");
        } else {
            cfg.antennas = integer_as(*it, "Nt");
        }
    }
    if (auto it = doc.find("sigma_w2"); it != doc.end())
        cfg.downlink_noise = number_as<double>(*it, "sigma_w2");
    if (auto it = doc.find("sigma_n2"); it != doc.end())
        cfg.uplink_noise = number_as<double>(*it, "sigma_n2");

    const int n = cfg.total_users();
    if (auto it = doc.find("beta"); it != doc.end() && !it->is_null()) {
        if (!it->is_array() || static_cast<int>(it->size()) != n)
            throw Error(ErrorKind::DimensionMismatch, "beta must have K_tot = " + std::to_string(n) + " rows");
        cfg.gain.resize(n, cfg.cells);
        for (int u = 0; u < n; ++u) {
            const auto& row = (*it)[u];
            if (!row.is_array() || static_cast<int>(row.size()) != cfg.cells)
                throw Error(ErrorKind::DimensionMismatch, "beta rows must have L entries");
            for (int l = 0; l < cfg.cells; ++l)
                cfg.gain(u, l) = number_as<double>(row[l], "beta");
        }
    } else {
        GainShorthand g;
        g.own = number_as<double>(require(doc, "own"), "own");
        if (auto c = doc.find("cross"); c != doc.end() && !c->is_null())
            g.cross = number_as<double>(*c, "cross");
        if (!(g.own > 0.0) || (g.cross && !(*g.cross > 0.0)))
            throw Error(ErrorKind::NonPositiveGain, "own/cross gains must be > 0");
        if (cfg.cells > 1 && !g.cross)
            throw Error(ErrorKind::MissingKey, "cross");
        if (cfg.cells == 1)
            g.cross.reset();
        cfg.shorthand = g;
        cfg.gain = expand_gains(cfg.cells, cfg.users_per_cell, g);
    }
    validate(cfg);
    return cfg;
}

inline NetworkConfig load_config(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    return config_from_json(doc);
}

inline nlohmann::json config_to_json(const NetworkConfig& cfg)
{
    nlohmann::json doc;
    doc["L"] = cfg.cells;
    doc["K"] = cfg.users_per_cell;
    doc["tau"] = cfg.pilot_length;
    if (cfg.antennas)
        doc["Nt"] = *cfg.antennas;
    else
        doc["Nt"] = "asymptotic";
    doc["sigma_w2"] = cfg.downlink_noise;
    doc["sigma_n2"] = cfg.uplink_noise;
    if (cfg.shorthand) {
        doc["own"] = cfg.shorthand->own;
        if (cfg.shorthand->cross)
            doc["cross"] = *cfg.shorthand->cross;
    } else {
        auto rows = nlohmann::json::array();
        for (Eigen::Index u = 0; u < cfg.gain.rows(); ++u) {
            auto row = nlohmann::json::array();
            for (Eigen::Index l = 0; l < cfg.gain.cols(); ++l)
                row.push_back(cfg.gain(u, l));
            rows.push_back(std::move(row));
        }
        doc["beta"] = std::move(rows);
    }
    return doc;
}

inline std::string serialize_config(const NetworkConfig& cfg) { return config_to_json(cfg).dump(2); }

inline bool operator==(const NetworkConfig& a, const NetworkConfig& b)
{
    return a.cells == b.cells && a.users_per_cell == b.users_per_cell && a.pilot_length == b.pilot_length
        && a.antennas == b.antennas && a.downlink_noise == b.downlink_noise && a.uplink_noise == b.uplink_noise
        && a.shorthand == b.shorthand && a.gain.rows() == b.gain.rows() && a.gain.cols() == b.gain.cols()
        && a.gain == b.gain;
}

// ------------------------------------------------------------------------

enum class PilotDesign { GWBE, WBE, FOS, EXPLICIT };

inline std::string_view to_string(PilotDesign d)
{
    switch (d) {
    case PilotDesign::GWBE: return "GWBE";
    case PilotDesign::WBE: return "WBE";
    case PilotDesign::FOS: return "FOS";
    case PilotDesign::EXPLICIT: return "EXPLICIT";
    }
    return "EXPLICIT";
}

inline PilotDesign design_from_string(std::string_view s)
{
    if (s == "GWBE" || s == "gwbe") return PilotDesign::GWBE;
    if (s == "WBE" || s == "wbe") return PilotDesign::WBE;
    if (s == "FOS" || s == "fos") return PilotDesign::FOS;
    if (s == "EXPLICIT" || s == "explicit") return PilotDesign::EXPLICIT;
    throw Error(ErrorKind::ParseError, "unknown design tag '" + std::string(s) + "'");
}

/// Network pilot matrix: tau x K_tot, one (nominally unit-norm) column per user.
struct PilotBook {
    Eigen::MatrixXd Q;
    PilotDesign design = PilotDesign::EXPLICIT;
    int users_per_cell = 1;

    int pilot_length() const { return static_cast<int>(Q.rows()); }
    int total_users() const { return static_cast<int>(Q.cols()); }
    int cells() const { return total_users() / users_per_cell; }

    /// Column range [first, first + count) of cell l (0-based).
    std::pair<int, int> cell_block(int l) const { return {l * users_per_cell, users_per_cell}; }
    auto cell_columns(int l) const { return Q.middleCols(l * users_per_cell, users_per_cell); }

    Eigen::MatrixXd gram() const { return Q.transpose() * Q; }
    double correlation(int u, int v) const { return Q.col(u).dot(Q.col(v)); }

    /// max_u | ||q_u|| - 1 |
    double unit_norm_residual() const
    {
        double worst = 0.0;
        for (Eigen::Index u = 0; u < Q.cols(); ++u)
            worst = std::max(worst, std::abs(Q.col(u).norm() - 1.0));
        return worst;
    }
};

inline constexpr double kUnitNormTolerance = 1e-9;

inline void check_book(const PilotBook& book, const NetworkConfig& cfg)
{
    if (book.pilot_length() != cfg.pilot_length || book.total_users() != cfg.total_users()
        || book.users_per_cell != cfg.users_per_cell)
        throw Error(ErrorKind::DimensionMismatch, "pilot book does not match the network configuration");
}

/// Per-user SINR requirements in flat user order, with the optional inflated
/// (load-region boundary) targets.
struct SinrTargets {
    Eigen::VectorXd gamma;
    int users_per_cell = 1;
    std::optional<Eigen::VectorXd> inflated;

    int total_users() const { return static_cast<int>(gamma.size()); }
    int cells() const { return total_users() / users_per_cell; }
    auto cell(int l) const { return gamma.segment(l * users_per_cell, users_per_cell); }

    /// The targets a design should realize: inflated when present.
    const Eigen::VectorXd& effective() const { return inflated ? *inflated : gamma; }
};

inline SinrTargets make_targets(const std::vector<std::vector<double>>& per_cell)
{
    if (per_cell.empty() || per_cell.front().empty())
        throw Error(ErrorKind::InvalidArgument, "targets must contain at least one user");
    const auto k = per_cell.front().size();
    SinrTargets t;
    t.users_per_cell = static_cast<int>(k);
    t.gamma.resize(static_cast<Eigen::Index>(k * per_cell.size()));
    Eigen::Index i = 0;
    for (const auto& cell : per_cell) {
        if (cell.size() != k)
            throw Error(ErrorKind::DimensionMismatch, "every cell needs K targets");
        for (double g : cell)
            t.gamma[i++] = g;
    }
    return t;
}

/// Same requirement vector in every cell.
inline SinrTargets replicate_targets(const std::vector<double>& cell, int cells)
{
    return make_targets(std::vector<std::vector<double>>(static_cast<std::size_t>(cells), cell));
}

inline void check_targets(const SinrTargets& t, const NetworkConfig& cfg)
{
    if (t.total_users() != cfg.total_users() || t.users_per_cell != cfg.users_per_cell)
        throw Error(ErrorKind::DimensionMismatch, "targets do not match the network configuration");
    if (t.inflated && t.inflated->size() != t.gamma.size())
        throw Error(ErrorKind::DimensionMismatch, "inflated targets have the wrong length");
}

struct PowerAllocation {
    Eigen::VectorXd downlink; // P
    Eigen::VectorXd uplink;   // p

    bool downlink_set() const { return downlink.size() > 0 && (downlink.array() != 0.0).any(); }
};

/// delta_u = sum_v p_v beta(v, cell(u)) rho_{v,u}^2 + sigma_n^2
struct DeltaVector {
    Eigen::VectorXd values;
};

/// Uplink power control with eta_{u, cell(u)} = 1, i.e. p_u = 1 / beta(u, cell(u)).
/// Downlink powers are left at zero.
inline PowerAllocation uplink_power_control(const NetworkConfig& cfg)
{
    validate(cfg);
    const int n = cfg.total_users();
    PowerAllocation pa;
    pa.downlink = Eigen::VectorXd::Zero(n);
    pa.uplink.resize(n);
    for (int u = 0; u < n; ++u)
        pa.uplink[u] = 1.0 / cfg.own_gain(u);
    return pa;
}

} // namespace pilotload

#endif
