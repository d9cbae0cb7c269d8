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

#include "pilotload/netmodel.hpp"

using namespace pilotload;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST(LoadConfig, OwnCrossShorthandExpands)
{
    const auto cfg = load_config(R"({"L":3,"K":4,"tau":3,"own":1.0,"cross":0.9,"sigma_w2":1,"Nt":200})");
    EXPECT_EQ(cfg.total_users(), 12);
    ASSERT_TRUE(cfg.antennas);
    EXPECT_EQ(*cfg.antennas, 200);
    EXPECT_DOUBLE_EQ(cfg.uplink_noise, 1.0);
    for (int u = 0; u < 12; ++u)
        for (int l = 0; l < 3; ++l)
            EXPECT_DOUBLE_EQ(cfg.gain(u, l), u / 4 == l ? 1.0 : 0.9) << u << "," << l;
}

TEST(LoadConfig, SingleUserNeedsNoCrossGain)
{
    const auto cfg = load_config(R"({"L":1,"K":1,"tau":1,"own":1.0})");
    EXPECT_EQ(cfg.total_users(), 1);
    EXPECT_FALSE(cfg.antennas);
}

TEST(LoadConfig, RejectsBadInput)
{
    EXPECT_EQ(kind_of([] { load_config(R"({"L":2,"K":4,"tau":3,"own":-1,"cross":0.5})"); }), ErrorKind::NonPositiveGain);
    EXPECT_EQ(kind_of([] { load_config(R"({"L":2,"K":4,"own":1,"cross":0.5})"); }), ErrorKind::MissingKey);
    EXPECT_EQ(kind_of([] { load_config(R"({"L":2,"K":4,"tau":3,"own":1})"); }), ErrorKind::MissingKey);
    EXPECT_EQ(kind_of([] { load_config(R"({"L":2,"K":1,"tau":1,"beta":[[1,0.5]]})"); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { load_config(R"({"L":1,"K":2,"tau":1,"beta":[[1],[0]]})"); }), ErrorKind::NonPositiveGain);
    EXPECT_EQ(kind_of([] { load_config("{not json"); }), ErrorKind::ParseError);
}

TEST(LoadConfig, FullGainMatrixAndAsymptoticAntennas)
{
    const auto cfg = load_config(
        R"({"L":2,"K":1,"tau":1,"Nt":"asymptotic","sigma_n2":0.5,"beta":[[2.0,0.1],[0.3,4.0]]})");
    EXPECT_FALSE(cfg.antennas);
    EXPECT_DOUBLE_EQ(cfg.uplink_noise, 0.5);
    EXPECT_DOUBLE_EQ(cfg.gain(1, 0), 0.3);
    EXPECT_DOUBLE_EQ(cfg.own_gain(1), 4.0);
}

TEST(LoadConfig, CrossGainMayExceedOwnGain)
{
    EXPECT_NO_THROW(load_config(R"({"L":2,"K":2,"tau":2,"own":0.5,"cross":2.0})"));
}

TEST(LoadConfig, SerializationRoundTrip)
{
    for (const char* text : {R"({"L":3,"K":4,"tau":3,"own":1.0,"cross":0.9,"Nt":64,"sigma_w2":0.25})",
             R"({"L":2,"K":2,"tau":1,"sigma_n2":3.5,"beta":[[1,0.123456789012345],[0.2,1],[0.3,0.7],[1e-3,2]]})"}) {
        const auto cfg = load_config(text);
        const auto again = load_config(serialize_config(cfg));
        EXPECT_TRUE(cfg == again) << text;
        EXPECT_EQ(serialize_config(again), serialize_config(cfg));
    }
}

TEST(UserIndex, FlatMappingIsBijective)
{
    for (int k = 1; k <= 5; ++k)
        for (int flat = 1; flat <= 4 * k; ++flat) {
            const UserId id = user_from_flat(flat, k);
            EXPECT_EQ(id.flat, flat);
            EXPECT_EQ(user_at(id.cell, id.slot, k).flat, flat);
            EXPECT_EQ((id.cell - 1) * k + id.slot, flat);
        }
}

TEST(UplinkPowerControl, ReciprocalOfOwnGain)
{
    EXPECT_TRUE(uplink_power_control(make_config(2, 2, 2, 1.0, 0.5)).uplink.isApproxToConstant(1.0));
    EXPECT_TRUE(uplink_power_control(make_config(2, 2, 2, 4.0, 0.5)).uplink.isApproxToConstant(0.25));

    auto cfg = load_config(R"({"L":1,"K":3,"tau":2,"beta":[[1],[2],[0.5]]})");
    const auto pa = uplink_power_control(cfg);
    EXPECT_DOUBLE_EQ(pa.uplink[0], 1.0);
    EXPECT_DOUBLE_EQ(pa.uplink[1], 0.5);
    EXPECT_DOUBLE_EQ(pa.uplink[2], 2.0);
    EXPECT_FALSE(pa.downlink_set());
    for (int u = 0; u < 3; ++u)
        EXPECT_DOUBLE_EQ(pa.uplink[u] * cfg.own_gain(u), 1.0);
}

TEST(PilotBookTest, CellBlocksAndCorrelation)
{
    PilotBook book;
    book.users_per_cell = 2;
    book.Q = Eigen::MatrixXd::Identity(2, 4);
    book.Q.col(2) = Eigen::Vector2d(1, 1).normalized();
    book.Q.col(3) = Eigen::Vector2d(1, -1).normalized();
    EXPECT_EQ(book.cells(), 2);
    EXPECT_EQ(book.cell_block(1).first, 2);
    EXPECT_NEAR(book.correlation(0, 2), std::sqrt(0.5), 1e-15);
    EXPECT_LE(book.unit_norm_residual(), 1e-15);
    const auto cfg = make_config(2, 2, 2, 1.0, 0.5);
    EXPECT_NO_THROW(check_book(book, cfg));
    book.Q.col(1) *= 0.9;
    EXPECT_NEAR(book.unit_norm_residual(), 0.1, 1e-12);
}

TEST(Targets, PerCellLayout)
{
    const auto t = make_targets({{0.5, 0.2}, {0.4, 0.3}});
    EXPECT_EQ(t.cells(), 2);
    EXPECT_DOUBLE_EQ(t.cell(1)[0], 0.4);
    EXPECT_EQ(kind_of([] { make_targets({{0.5, 0.2}, {0.4}}); }), ErrorKind::DimensionMismatch);
    const auto r = replicate_targets({0.3, 0.1}, 3);
    EXPECT_EQ(r.total_users(), 6);
    EXPECT_DOUBLE_EQ(r.gamma[5], 0.1);
}
