// SPDX-License-Identifier: Apache-2.0
//
// massra: link-level simulator for massive MIMO random access
// Copyright (C) 2026 The massra authors
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

#include <cmath>
#include <vector>

#include "massra/analytic.hpp"

using namespace massra;

namespace {

const LinkConstants kC{};
const double kAlpha = 1.0 / 72.0;

std::vector<double> equal_alphas(int k) { return std::vector<double>(static_cast<std::size_t>(k), kAlpha); }

}  // namespace

TEST(Analytic, HighPowerLimitIsMOverK)
{
    for (int k : {1, 2, 10}) {
        SinrParams p{64.0, 1e12, 1e12, equal_alphas(k), 1, kC};
        EXPECT_NEAR(sinr_closed_form(p), 64.0 / k, 1e-6);
    }
}

TEST(Analytic, ScaledFormIsClosedFormWithScaledPowers)
{
    for (double m : {20.0, 80.0, 1000.0}) {
        const double e = 0.0913;
        SinrParams p{m, e / std::sqrt(m), (72.0 / 24.0) * e / std::sqrt(m), equal_alphas(3), 2, kC};
        EXPECT_NEAR(sinr_scaled(m, e, e, p.alphas, 2, kC) / sinr_closed_form(p), 1.0, 1e-12);
    }
}

TEST(Analytic, SinrMonotoneInResources)
{
    const auto a = equal_alphas(4);
    SinrParams base{40.0, 0.05, 0.1, a, 1, kC};
    const double s0 = sinr_closed_form(base);
    for (auto bump : {&SinrParams::m, &SinrParams::gamma, &SinrParams::gamma_d}) {
        SinrParams q = base;
        q.*bump *= 2.0;
        EXPECT_GT(sinr_closed_form(q), s0);
    }
    SinrParams more = base;
    more.alphas.push_back(kAlpha);
    EXPECT_LT(sinr_closed_form(more), s0);
    SinrParams bad = base;
    bad.i = 5;
    EXPECT_THROW(sinr_closed_form(bad), std::invalid_argument);
}

TEST(Analytic, WorstCaseNearMinusThreeDbAtTwentyAntennas)
{
    const double s = sinr_scaled(20.0, 0.0913, 0.0913, equal_alphas(2), 1, kC);
    EXPECT_NEAR(10.0 * std::log10(s), -3.0, 0.5);
}

TEST(Analytic, AsymptoteGammaU)
{
    // 72^3 * 864 * 0.0913^2 / (72^2 * 6 * 24)
    const double hand = 72.0 * 864.0 * 0.0913 * 0.0913 / 144.0;
    EXPECT_NEAR(gamma_u(0.0913, 0.0913, kAlpha, kC), hand, 1e-12);
    EXPECT_NEAR(hand, 3.601, 1e-3);
    for (int k : {2, 10}) {
        EXPECT_NEAR(sinr_scaled(1e16, 0.0913, 0.0913, equal_alphas(k), 1, kC) / hand, 1.0, 1e-5);
        double prev = 0.0;
        for (double m = 10.0; m < 1e9; m *= 4.0) {
            const double s = sinr_scaled(m, 0.0913, 0.0913, equal_alphas(k), 1, kC);
            EXPECT_GT(s, prev);
            EXPECT_LT(s, hand);
            prev = s;
        }
    }
    // Doubling E_u doubles the asymptote.
    EXPECT_NEAR(gamma_u(0.1826, 0.0913, kAlpha, kC) / hand, 2.0, 1e-12);
}

TEST(Analytic, FalseAlarmBound)
{
    EXPECT_NEAR(pf_bound(5.0, 50), 1.0 - std::pow(0.96, 50), 1e-12);
    EXPECT_NEAR(pf_bound(5.0, 50), 0.8701, 1e-4);
    // 1 - (63/64)^50; the often quoted 0.5436 is a rounding slip.
    EXPECT_NEAR(pf_bound(8.0, 50), 0.5450, 1e-4);
    EXPECT_THROW(pf_bound(1.0, 50), std::invalid_argument);
    EXPECT_GT(pf_bound(5.0, 50), pf_bound(8.0, 50));
}

TEST(Analytic, RequiredPowerInvertsSinr)
{
    const auto a = equal_alphas(3);
    const double m = 100.0, e_u = 0.0913, eps = 0.4;
    const auto pt = required_pt(eps, m, e_u, a, 1, kC);
    ASSERT_TRUE(pt.has_value());
    const auto gd = required_gamma_d(eps, m, e_u, a, 1, kC);
    EXPECT_NEAR(*pt, *gd * 24.0 / 72.0, 1e-15);
    SinrParams p{m, e_u / std::sqrt(m), *gd, a, 1, kC};
    EXPECT_NEAR(sinr_closed_form(p), eps, 1e-9);
    // Past the infinite-power ceiling no power suffices.
    EXPECT_FALSE(required_pt(m / 3.0, m, e_u, a, 1, kC).has_value());
}

TEST(Analytic, MinimumAntennas)
{
    const ScaledPowerParams sp{0.0913, 0.0913, std::pow(10.0, -0.3)};
    const auto two = min_antennas(sp, equal_alphas(2), 1, kC);
    ASSERT_TRUE(two.has_value());
    EXPECT_NEAR(two->root, 20.7, 0.05);
    EXPECT_EQ(two->ceiled, 21);
    EXPECT_NEAR(sinr_scaled(two->root, 0.0913, 0.0913, equal_alphas(2), 1, kC), sp.epsilon, 1e-9);
    EXPECT_LT(sinr_scaled(20.0, 0.0913, 0.0913, equal_alphas(2), 1, kC), sp.epsilon);

    const auto ten = min_antennas(sp, equal_alphas(10), 1, kC);
    ASSERT_TRUE(ten.has_value());
    EXPECT_GT(ten->root, two->root);
    EXPECT_NEAR(sinr_scaled(ten->root, 0.0913, 0.0913, equal_alphas(10), 1, kC), sp.epsilon, 1e-9);

    ScaledPowerParams too_much = sp;
    too_much.epsilon = 4.0;  // above gamma_u
    EXPECT_FALSE(min_antennas(too_much, equal_alphas(2), 1, kC).has_value());
}
