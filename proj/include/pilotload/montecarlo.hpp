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

#ifndef PILOTLOAD_MONTECARLO_HPP
#define PILOTLOAD_MONTECARLO_HPP

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "netmodel.hpp"
#include "sinr.hpp"

namespace pilotload {

/// One realization of every random quantity in a coherence block.
struct ChannelDraw {
    /// Per BS m: Nt x K_tot, column v is h_{v,m} ~ CN(0, I).
    std::vector<Eigen::MatrixXcd> channel;
    /// Per BS m: Nt x tau, the uplink noise of each pilot symbol, CN(0, sigma_n^2).
    std::vector<Eigen::MatrixXcd> uplink_noise;
    /// Per user: downlink receiver noise, CN(0, sigma_w^2).
    Eigen::VectorXcd downlink_noise;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream per (seed, trial) so results do not depend on scheduling.
inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL)));
}

template <class Rng>
void fill_complex_normal(Eigen::MatrixXcd& m, double variance, Rng& rng)
{
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        m.data()[i] = {re, im};
    }
}

} // namespace detail

template <class Rng>
ChannelDraw draw_channels(const NetworkConfig& cfg, int antennas, Rng& rng)
{
    ChannelDraw d;
    d.channel.resize(static_cast<std::size_t>(cfg.cells));
    d.uplink_noise.resize(static_cast<std::size_t>(cfg.cells));
    for (std::size_t m = 0; m < d.channel.size(); ++m) {
        d.channel[m].resize(antennas, cfg.total_users());
        detail::fill_complex_normal(d.channel[m], 1.0, rng);
        d.uplink_noise[m].resize(antennas, cfg.pilot_length);
        detail::fill_complex_normal(d.uplink_noise[m], cfg.uplink_noise, rng);
    }
    Eigen::MatrixXcd w(cfg.total_users(), 1);
    detail::fill_complex_normal(w, cfg.downlink_noise, rng);
    d.downlink_noise = w.col(0);
    return d;
}

struct MonteCarloRun {
    SinrResult result;
    /// Sample mean of ||g_hat_u||^2 / Nt and its 95% half-width (channel hardening).
    Eigen::VectorXd estimate_power;
    Eigen::VectorXd estimate_power_ci;
};

namespace detail {

// Per-user running sums over trials. X = h^H a_u (complex), Y = received power.
struct UserSums {
    double a = 0, b = 0, y = 0, aa = 0, bb = 0, yy = 0, ab = 0, ay = 0, by = 0, g = 0, gg = 0;

    UserSums& operator+=(const UserSums& o)
    {
        a += o.a, b += o.b, y += o.y, aa += o.aa, bb += o.bb, yy += o.yy;
        ab += o.ab, ay += o.ay, by += o.by, g += o.g, gg += o.gg;
        return *this;
    }
};

using BlockSums = std::vector<UserSums>;

struct McSetup {
    const NetworkConfig* cfg;
    int antennas;
    std::vector<Eigen::MatrixXd> mixing; // per BS m: K_tot x K, eta_{v,m} rho_{v,n}
    std::vector<Eigen::MatrixXd> pilots; // per BS m: tau x K
    Eigen::VectorXd precoder_scale;      // 1 / sqrt(Nt delta_n)
    Eigen::VectorXd downlink;
};

inline void run_trial(const McSetup& s, std::uint64_t seed, std::uint64_t trial, BlockSums& acc)
{
    const NetworkConfig& cfg = *s.cfg;
    const int k = cfg.users_per_cell;
    auto rng = trial_engine(seed, trial);
    const ChannelDraw draw = draw_channels(cfg, s.antennas, rng);

    const int n = cfg.total_users();
    Eigen::MatrixXcd coupling(n, n); // (u, n): sqrt(beta_{u,m(n)}) h_{u,m(n)}^H a_n
    for (int m = 0; m < cfg.cells; ++m) {
        const auto& H = draw.channel[static_cast<std::size_t>(m)];
        Eigen::MatrixXcd est = H * s.mixing[static_cast<std::size_t>(m)].cast<std::complex<double>>()
            + draw.uplink_noise[static_cast<std::size_t>(m)] * s.pilots[static_cast<std::size_t>(m)].cast<std::complex<double>>();
        for (int j = 0; j < k; ++j) {
            const int user = m * k + j;
            UserSums& us = acc[static_cast<std::size_t>(user)];
            const double gain = est.col(j).squaredNorm() / s.antennas;
            us.g += gain;
            us.gg += gain * gain;
            est.col(j) *= s.precoder_scale[user];
        }
        Eigen::MatrixXcd c = H.adjoint() * est;
        for (int u = 0; u < n; ++u)
            c.row(u) *= std::sqrt(cfg.gain(u, m));
        coupling.middleCols(m * k, k) = c;
    }

    for (int u = 0; u < n; ++u) {
        const std::complex<double> x = coupling(u, u);
        const double y = coupling.row(u).cwiseAbs2().dot(s.downlink) + std::norm(draw.downlink_noise[u]);
        UserSums& us = acc[static_cast<std::size_t>(u)];
        const double a = x.real();
        const double b = x.imag();
        us.a += a, us.b += b, us.y += y;
        us.aa += a * a, us.bb += b * b, us.yy += y * y;
        us.ab += a * b, us.ay += a * y, us.by += b * y;
    }
}

} // namespace detail

/// Simulates pilot transmission, LS estimation, MRT precoding and downlink
/// reception, then estimates the achievable SINR as
///   P_u |E[c_uu]|^2 / (E[received power] - P_u |E[c_uu]|^2)
/// with a delta-method 95% interval. Trials are grouped in fixed blocks reduced
/// in block order, so results are bit-identical for any worker count.
inline MonteCarloRun monte_carlo_run(const PilotBook& book, const PowerAllocation& power, const NetworkConfig& cfg,
    int antennas, std::int64_t trials, std::uint64_t seed, unsigned workers = 0)
{
    detail::check_sizes(book, power, cfg);
    detail::check_downlink(power);
    if (antennas < 1)
        throw Error(ErrorKind::InvalidArgument, "Nt must be >= 1");
    if (trials < 2)
        throw Error(ErrorKind::InvalidArgument, "Monte-Carlo needs at least 2 trials");

    const int n = cfg.total_users();
    const int k = cfg.users_per_cell;
    const DeltaVector delta = delta_vector(book, power, cfg);
    const Eigen::MatrixXd gram = book.gram();

    detail::McSetup setup;
    setup.cfg = &cfg;
    setup.antennas = antennas;
    setup.downlink = power.downlink;
    setup.precoder_scale = (delta.values * static_cast<double>(antennas)).cwiseSqrt().cwiseInverse();
    for (int m = 0; m < cfg.cells; ++m) {
        Eigen::MatrixXd mix(n, k);
        for (int v = 0; v < n; ++v) {
            const double eta = std::sqrt(power.uplink[v] * cfg.gain(v, m));
            for (int j = 0; j < k; ++j)
                mix(v, j) = eta * gram(v, m * k + j);
        }
        setup.mixing.push_back(std::move(mix));
        setup.pilots.push_back(book.Q.middleCols(m * k, k));
    }

    constexpr std::int64_t kBlock = 256;
    const std::int64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<detail::BlockSums> partial(static_cast<std::size_t>(blocks), detail::BlockSums(static_cast<std::size_t>(n)));

    unsigned pool = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    pool = static_cast<unsigned>(std::min<std::int64_t>(pool, blocks));
    auto work = [&](unsigned id) {
        for (std::int64_t blk = id; blk < blocks; blk += pool) {
            const std::int64_t end = std::min(trials, (blk + 1) * kBlock);
            for (std::int64_t t = blk * kBlock; t < end; ++t)
                detail::run_trial(setup, seed, static_cast<std::uint64_t>(t), partial[static_cast<std::size_t>(blk)]);
        }
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

    detail::BlockSums total(static_cast<std::size_t>(n));
    for (const auto& blk : partial)
        for (int u = 0; u < n; ++u)
            total[static_cast<std::size_t>(u)] += blk[static_cast<std::size_t>(u)];

    MonteCarloRun run;
    run.result.mode = SinrMode::MonteCarlo;
    run.result.antennas = antennas;
    run.result.trials = trials;
    run.result.seed = seed;
    run.result.sinr.resize(n);
    run.result.ci_halfwidth.resize(n);
    run.estimate_power.resize(n);
    run.estimate_power_ci.resize(n);

    const double cnt = static_cast<double>(trials);
    constexpr double z95 = 1.959963984540054;
    for (int u = 0; u < n; ++u) {
        const auto& s = total[static_cast<std::size_t>(u)];
        const double ma = s.a / cnt, mb = s.b / cnt, my = s.y / cnt;
        Eigen::Matrix3d cov;
        const double nm1 = cnt - 1.0;
        cov(0, 0) = (s.aa - cnt * ma * ma) / nm1;
        cov(1, 1) = (s.bb - cnt * mb * mb) / nm1;
        cov(2, 2) = (s.yy - cnt * my * my) / nm1;
        cov(0, 1) = cov(1, 0) = (s.ab - cnt * ma * mb) / nm1;
        cov(0, 2) = cov(2, 0) = (s.ay - cnt * ma * my) / nm1;
        cov(1, 2) = cov(2, 1) = (s.by - cnt * mb * my) / nm1;

        const double pu = power.downlink[u];
        const double signal = pu * (ma * ma + mb * mb);
        const double noise = my - signal;
        if (noise <= kDivisionGuard * std::max(1.0, signal)) {
            run.result.sinr[u] = std::numeric_limits<double>::infinity();
            run.result.ci_halfwidth[u] = std::numeric_limits<double>::infinity();
        } else {
            const double lead = my / (noise * noise);
            const Eigen::Vector3d grad(lead * 2.0 * pu * ma, lead * 2.0 * pu * mb, -signal / (noise * noise));
            run.result.sinr[u] = signal / noise;
            run.result.ci_halfwidth[u] = z95 * std::sqrt(std::max(0.0, grad.dot(cov * grad)) / cnt);
        }

        const double mg = s.g / cnt;
        run.estimate_power[u] = mg;
        run.estimate_power_ci[u] = z95 * std::sqrt(std::max(0.0, (s.gg - cnt * mg * mg) / nm1) / cnt);
    }
    return run;
}

inline SinrResult monte_carlo_sinr(const PilotBook& book, const PowerAllocation& power, const NetworkConfig& cfg,
    int antennas, std::int64_t trials, std::uint64_t seed)
{
    return monte_carlo_run(book, power, cfg, antennas, trials, seed).result;
}

} // namespace pilotload

#endif
