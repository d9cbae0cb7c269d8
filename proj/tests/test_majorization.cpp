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

#include <random>

#include "oracles.hpp"
#include "pilotload/majorization.hpp"

using namespace pilotload;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

void expect_factor_ok(const Eigen::VectorXd& x, const Eigen::VectorXd& z, const OrthoFactor& f)
{
    const auto k = x.size();
    EXPECT_LE((f.U.transpose() * f.U - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-9);
    const auto d = oracle::rotated_diagonal(f.U, oracle::to_vec(x));
    for (Eigen::Index i = 0; i < k; ++i)
        EXPECT_NEAR(d[static_cast<std::size_t>(i)], z[i], 1e-9) << "entry " << i;
    EXPECT_LE(f.rotation_count, k - 1);
}

} // namespace

TEST(EffectiveBandwidth, KnownValues)
{
    EXPECT_DOUBLE_EQ(effective_bandwidth(1.0), 0.5);
    EXPECT_NEAR(effective_bandwidth(0.1), 0.0909090909090909, 1e-15);
    EXPECT_DOUBLE_EQ(effective_bandwidth(std::numeric_limits<double>::infinity()), 1.0);
    EXPECT_THROW(effective_bandwidth(0.0), Error);
    EXPECT_THROW(effective_bandwidth(-0.5), Error);
}

TEST(EffectiveBandwidth, InverseAgreesWithBisection)
{
    EXPECT_NEAR(target_from_bandwidth(0.328276), 0.488706, 1e-6);
    EXPECT_NEAR(target_from_bandwidth(0.328276), oracle::eb_inverse(0.328276), 1e-12);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-6, 0.999);
    for (int i = 0; i < 200; ++i) {
        const double z = u(rng);
        EXPECT_NEAR(target_from_bandwidth(z), oracle::eb_inverse(z), 1e-9 * std::max(1.0, oracle::eb_inverse(z)));
        EXPECT_NEAR(effective_bandwidth(target_from_bandwidth(z)), z, 1e-14);
    }
}

TEST(EffectiveBandwidth, StrictlyIncreasing)
{
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> e(0.5);
    for (int i = 0; i < 1000; ++i) {
        double a = e(rng) + 1e-9, b = e(rng) + 1e-9;
        if (a == b)
            continue;
        if (a > b)
            std::swap(a, b);
        EXPECT_LT(effective_bandwidth(a), effective_bandwidth(b));
    }
}

TEST(Majorizes, HandExamples)
{
    EXPECT_TRUE(majorizes(vec({0.5, 0.5, 0, 0}), vec({0.4, 0.3, 0.2, 0.1})));
    EXPECT_FALSE(majorizes(vec({0.3, 0.3, 0.3, 0.1}), vec({0.4, 0.3, 0.2, 0.1})));
    EXPECT_FALSE(majorizes(vec({0.5, 0.5, 0, 0}), vec({0.4, 0.3, 0.2, 0.2})));
}

TEST(Majorizes, ErrorsOnBadShape)
{
    try {
        majorizes(vec({0.5, 0.5}), vec({0.5, 0.3, 0.2}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
    try {
        majorizes(vec({0.5, 0.5, 0}), vec({0.2, 0.3, 0.5}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSorted);
    }
}

TEST(Majorizes, AgreesWithPrefixSumOracle)
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> kd(2, 9);
    int trues = 0;
    for (int i = 0; i < 1000; ++i) {
        const int k = kd(rng);
        auto z = oracle::random_descending(rng, k, 0.01, 0.99);
        // Half the x vectors are caps of z (usually majorizing), half are random with the same sum.
        std::vector<double> x;
        if (i % 2 == 0) {
            std::uniform_int_distribution<int> td(1, k);
            x = oracle::to_vec(cap_vector(EbVector{vec(z)}, td(rng)).values);
        } else {
            x = oracle::random_descending(rng, k, 0.0, 1.0);
            const double scale = std::accumulate(z.begin(), z.end(), 0.0) / std::accumulate(x.begin(), x.end(), 0.0);
            for (auto& v : x)
                v *= scale;
        }
        const bool expected = oracle::majorizes(x, z);
        trues += expected;
        EXPECT_EQ(majorizes(vec(x), vec(z)), expected) << "case " << i;
    }
    EXPECT_GT(trues, 100);
    EXPECT_LT(trues, 900);
}

TEST(CapVector, Examples)
{
    EbVector z{vec({0.3103, 0.2754, 0.2, 0.1597})};
    const auto x = cap_vector(z, 3);
    EXPECT_NEAR(x.level, 0.31513333333333, 1e-10);
    EXPECT_DOUBLE_EQ(x.values[3], 0.0);
    EXPECT_EQ(x.rank, 3);
    EXPECT_TRUE(majorizes(x, z));

    const auto eq = cap_vector(EbVector{vec({0.5, 0.5})}, 2);
    EXPECT_TRUE(eq.values.isApprox(vec({0.5, 0.5})));

    const auto one = cap_vector(EbVector{vec({0.9, 0.05})}, 1);
    EXPECT_NEAR(one.values[0], 0.95, 1e-15);
    EXPECT_DOUBLE_EQ(one.values[1], 0.0);
    EXPECT_TRUE(majorizes(one, EbVector{vec({0.9, 0.05})}));

    EXPECT_THROW(cap_vector(z, 0), Error);
    EXPECT_THROW(cap_vector(z, 5), Error);
}

TEST(CapVector, MajorizesWheneverLargestFitsUnderLevel)
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> kd(1, 10);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const int k = kd(rng);
        const auto z = oracle::random_descending(rng, k, 0.01, 0.99);
        std::uniform_int_distribution<int> td(1, k);
        const int tau = td(rng);
        const auto x = cap_vector(EbVector{vec(z)}, tau);
        const bool fits = z.front() <= x.level;
        EXPECT_EQ(oracle::majorizes(oracle::to_vec(x.values), z), fits);
        if (fits) {
            ++checked;
            EXPECT_TRUE(majorizes(x, EbVector{vec(z)}));
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(SchurHorn, IdentityWhenAlreadyEqual)
{
    const Eigen::VectorXd z = vec({0.4, 0.3, 0.3});
    const auto f = schur_horn_factor(z, z);
    EXPECT_EQ(f.rotation_count, 0);
    EXPECT_TRUE(f.U.isIdentity(1e-15));
}

TEST(SchurHorn, TailPairOnly)
{
    const Eigen::VectorXd x = vec({0.5, 0.5, 0.0});
    const Eigen::VectorXd z = vec({0.5, 0.3, 0.2});
    const auto f = schur_horn_factor(x, z);
    expect_factor_ok(x, z, f);
    EXPECT_LE(f.rotation_count, 1);
}

TEST(SchurHorn, RejectsNonMajorizingPair)
{
    try {
        schur_horn_factor(vec({0.3, 0.3, 0.3, 0.1}), vec({0.4, 0.3, 0.2, 0.1}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MajorizationViolation);
    }
}

TEST(SchurHorn, RandomCapInstances)
{
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> kd(1, 12);
    int done = 0;
    while (done < 500) {
        const int k = kd(rng);
        std::uniform_int_distribution<int> td(1, k);
        const int tau = td(rng);
        auto z = oracle::random_descending(rng, k, 0.001, 0.999);
        const auto x = cap_vector(EbVector{vec(z)}, tau);
        if (z.front() > x.level)
            continue;
        const auto f = schur_horn_factor(x, EbVector{vec(z)});
        expect_factor_ok(x.values, vec(z), f);
        ++done;
    }
}

TEST(SchurHorn, TiesAndRepeatedValues)
{
    for (const auto& z : {std::vector<double>{0.25, 0.25, 0.25, 0.25}, std::vector<double>{0.4, 0.4, 0.1, 0.1},
             std::vector<double>{0.5, 0.25, 0.25, 0.0}, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 6, 1.0 / 6}}) {
        for (int tau = 1; tau <= 4; ++tau) {
            const auto x = cap_vector(EbVector{vec(z)}, tau);
            if (z.front() > x.level + 1e-15)
                continue;
            expect_factor_ok(x.values, vec(z), schur_horn_factor(x, EbVector{vec(z)}));
        }
    }
}
