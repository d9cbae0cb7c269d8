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

#include <gtest/gtest.h>

#include "pilotload/gwbe.hpp"
#include "pilotload/montecarlo.hpp"

using namespace pilotload;

namespace {

PilotBook book_of(Eigen::MatrixXd Q, int k)
{
    PilotBook b;
    b.Q = std::move(Q);
    b.users_per_cell = k;
    b.design = PilotDesign::EXPLICIT;
    return b;
}

} // namespace

TEST(MonteCarlo, SingleUserMatchesClosedForm)
{
    const auto cfg = make_config(1, 1, 1, 1.0, std::nullopt);
    const auto book = book_of(Eigen::MatrixXd::Ones(1, 1), 1);
    auto pa = uplink_power_control(cfg);
    pa.downlink = Eigen::VectorXd::Ones(1);
    const auto r = monte_carlo_sinr(book, pa, cfg, 4, 100000, 3);
    EXPECT_EQ(r.mode, SinrMode::MonteCarlo);
    EXPECT_EQ(r.seed, 3u);
    EXPECT_GT(r.ci_halfwidth[0], 0.0);
    EXPECT_LT(r.ci_halfwidth[0], 0.05);
    EXPECT_NEAR(r.sinr[0], 1.0, 3 * r.ci_halfwidth[0]);
}

TEST(MonteCarlo, OrthogonalPilotsScaleLinearly)
{
    const auto cfg = make_config(1, 2, 2, 1.0, std::nullopt);
    const auto book = book_of(Eigen::MatrixXd::Identity(2, 2), 2);
    auto pa = uplink_power_control(cfg);
    pa.downlink = Eigen::Vector2d(1.0, 0.5);
    const auto a = monte_carlo_sinr(book, pa, cfg, 8, 60000, 10);
    const auto b = monte_carlo_sinr(book, pa, cfg, 16, 60000, 11);
    for (int u = 0; u < 2; ++u) {
        const double ratio = b.sinr[u] / a.sinr[u];
        const double rel = std::hypot(a.ci_halfwidth[u] / a.sinr[u], b.ci_halfwidth[u] / b.sinr[u]);
        EXPECT_NEAR(ratio, 2.0, 3 * 2.0 * rel);
    }
}

TEST(MonteCarlo, ContaminatedNetworkMatchesClosedForm)
{
    const auto cfg = make_config(2, 2, 1, 1.0, 0.6, std::nullopt, 0.5, 0.8);
    const auto book = book_of(Eigen::MatrixXd::Ones(1, 4), 2);
    auto pa = uplink_power_control(cfg);
    pa.downlink = Eigen::Vector4d(1.0, 0.7, 1.3, 0.4);
    const auto d = delta_vector(book, pa, cfg);
    const auto fin = sinr_finite(book, pa, d, cfg, 16);
    const auto run = monte_carlo_run(book, pa, cfg, 16, 80000, 5);
    for (int u = 0; u < 4; ++u) {
        EXPECT_NEAR(run.result.sinr[u], fin.sinr[u], 3 * run.result.ci_halfwidth[u]) << u;
        // Channel hardening: the estimate's power per antenna tracks delta.
        EXPECT_NEAR(run.estimate_power[u], d.values[u], 3 * run.estimate_power_ci[u]) << u;
    }
}

TEST(MonteCarlo, GwbeBookMatchesClosedForm)
{
    const auto cfg = make_config(2, 3, 2, 1.0, 0.8);
    const auto rep = gwbe_design(make_targets({{0.6, 0.3, 0.2}, {0.4, 0.4, 0.3}}), cfg);
    const auto d = delta_vector(rep.pilot_book, rep.power, cfg);
    const auto pa = gwbe_power_allocation(rep, d);
    const auto fin = sinr_finite(rep.pilot_book, pa, d, cfg, 12);
    const auto mc = monte_carlo_sinr(rep.pilot_book, pa, cfg, 12, 50000, 21);
    for (int u = 0; u < 6; ++u)
        EXPECT_NEAR(mc.sinr[u], fin.sinr[u], 3 * mc.ci_halfwidth[u]) << u;
}

TEST(MonteCarlo, BitIdenticalAcrossWorkerCounts)
{
    const auto cfg = make_config(2, 2, 1, 1.0, 0.6);
    const auto book = book_of(Eigen::MatrixXd::Ones(1, 4), 2);
    auto pa = uplink_power_control(cfg);
    pa.downlink = Eigen::Vector4d(1.0, 0.7, 1.3, 0.4);
    const auto one = monte_carlo_run(book, pa, cfg, 4, 3000, 99, 1);
    const auto three = monte_carlo_run(book, pa, cfg, 4, 3000, 99, 3);
    const auto again = monte_carlo_run(book, pa, cfg, 4, 3000, 99, 1);
    EXPECT_TRUE((one.result.sinr.array() == three.result.sinr.array()).all());
    EXPECT_TRUE((one.result.ci_halfwidth.array() == three.result.ci_halfwidth.array()).all());
    EXPECT_TRUE((one.result.sinr.array() == again.result.sinr.array()).all());
    const auto other = monte_carlo_run(book, pa, cfg, 4, 3000, 100, 1);
    EXPECT_FALSE((one.result.sinr.array() == other.result.sinr.array()).all());
}

TEST(MonteCarlo, ChannelDrawStatistics)
{
    const auto cfg = make_config(2, 2, 2, 1.0, 0.5);
    auto rng = detail::trial_engine(4, 0);
    double power = 0, count = 0;
    std::complex<double> mean = 0;
    for (int t = 0; t < 200; ++t) {
        const ChannelDraw draw = draw_channels(cfg, 16, rng);
        ASSERT_EQ(draw.channel.size(), 2u);
        ASSERT_EQ(draw.channel[0].rows(), 16);
        ASSERT_EQ(draw.channel[0].cols(), 4);
        for (const auto& h : draw.channel) {
            power += h.cwiseAbs2().sum();
            mean += h.sum();
            count += static_cast<double>(h.size());
        }
    }
    EXPECT_NEAR(power / count, 1.0, 0.03);
    EXPECT_NEAR(std::abs(mean / count), 0.0, 0.03);
}

TEST(MonteCarlo, RejectsBadArguments)
{
    const auto cfg = make_config(1, 1, 1, 1.0, std::nullopt);
    const auto book = book_of(Eigen::MatrixXd::Ones(1, 1), 1);
    auto pa = uplink_power_control(cfg);
    EXPECT_THROW(monte_carlo_sinr(book, pa, cfg, 4, 100, 1), Error);
    pa.downlink = Eigen::VectorXd::Ones(1);
    EXPECT_THROW(monte_carlo_sinr(book, pa, cfg, 0, 100, 1), Error);
    EXPECT_THROW(monte_carlo_sinr(book, pa, cfg, 4, 1, 1), Error);
}
