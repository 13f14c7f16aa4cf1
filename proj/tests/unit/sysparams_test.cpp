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
#include <numeric>

#include "massra/sysparams.hpp"

using namespace massra;
using nlohmann::json;

namespace {

// Standard normal tail by bisection on std::erfc, independent of the
// inverse used by the library.
double normal_tail_inverse(double p)
{
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(SysParams, DefaultsGiveSeventeenPreambles)
{
    const auto p = derive(json::object());
    EXPECT_EQ(p.num_preambles, 17);
    EXPECT_EQ(p.n_slot, 6);  // ceil(24 * 17 / 72)
    ASSERT_EQ(p.permissible_shifts.size(), 17u);
    for (int k = 1; k <= 17; ++k) {
        EXPECT_EQ(p.shift(k), (k - 1) * 50);
    }
    EXPECT_EQ(p.max_round_trip(), 44);
}

TEST(SysParams, SinglePreambleWhenGuardEqualsLength)
{
    const auto p = derive(json{{"prach", {{"guard", 864}}}});
    EXPECT_EQ(p.num_preambles, 1);
    EXPECT_EQ(p.permissible_shifts, std::vector<int>{0});
}

TEST(SysParams, ShiftsPairwiseSeparatedByGuard)
{
    for (int g : {50, 72, 100, 288, 432}) {
        const auto p = derive(json{{"prach", {{"guard", g}}}});
        EXPECT_LE(p.num_preambles * p.guard, p.n_zc);
        for (int j = 0; j < p.num_preambles; ++j) {
            for (int k = 0; k < p.num_preambles; ++k) {
                if (j == k) continue;
                const int d = ((p.permissible_shifts[j] - p.permissible_shifts[k]) % p.n_zc + p.n_zc) % p.n_zc;
                EXPECT_GE(d, g);
            }
        }
    }
}

TEST(SysParams, RejectsInvalidCombinations)
{
    EXPECT_THROW(derive(json{{"prach", {{"zc_root", 24}}}}), std::invalid_argument);  // gcd(24, 864) = 24
    EXPECT_THROW(derive(json{{"prach", {{"delay_spread", 50}}}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"prach", {{"delay_spread", 60}}}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"rar", {{"n_sc", 23}}}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"rar", {{"ofdm_symbols", 11}}}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"bogus", json::object()}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"prach", {{"nzc", 864}}}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"power", {{"pu_over_sigma2", 0.1}, {"pu_over_sigma2_db", -10}}}}),
                 std::invalid_argument);
    EXPECT_THROW(derive(json{{"channel", {{"pdp", {1.0, 2.0}}}}}), std::invalid_argument);
    EXPECT_THROW(derive(json{{"power", {{"noise_power", 0.0}}}}), std::invalid_argument);
    // G = 20 gives 43 preambles, more RAR bits than two hop copies fit in 14 symbols.
    EXPECT_THROW(derive(json{{"prach", {{"guard", 20}}}}), std::invalid_argument);
}

TEST(SysParams, PdpNormalisedToUnitEnergy)
{
    for (const json& pdp : {json("uniform"), json("exponential"), json({1.0, 2.0, 3.0, 4.0, 5.0, 6.0})}) {
        const auto p = derive(json{{"channel", {{"pdp", pdp}}}});
        ASSERT_EQ(p.pdp.size(), 6u);
        EXPECT_NEAR(std::accumulate(p.pdp.begin(), p.pdp.end(), 0.0), 1.0, 1e-12);
        EXPECT_NEAR(p.alpha(), 1.0 / 72.0, 1e-15);
    }
    const auto u = derive(json::object());
    for (double v : u.pdp) EXPECT_DOUBLE_EQ(v, 1.0 / 6.0);
}

TEST(SysParams, PowersAndThreshold)
{
    const auto p = derive(json{{"power", {{"pu_over_sigma2_db", -20.0}, {"pt_over_sigma2", 0.5}, {"noise_power", 2.0}}},
                               {"array", {{"num_antennas", 16}}},
                               {"detector", {{"kappa", 5.0}}}});
    EXPECT_NEAR(p.pu_over_sigma2, 0.01, 1e-15);
    EXPECT_DOUBLE_EQ(p.pt(), 1.0);
    EXPECT_DOUBLE_EQ(p.theta0(), 5.0 * 2.0 / 4.0);
}

TEST(SysParams, DefaultKappaIsGaussianInversion)
{
    const auto p = derive(json::object());
    const double tail = 1.0 - std::pow(0.999, 1.0 / 50.0);
    EXPECT_NEAR(tail, 2.0e-5, 1e-7);
    EXPECT_NEAR(p.kappa, normal_tail_inverse(tail), 1e-9);
    EXPECT_NEAR(p.kappa, 4.107, 1e-3);
    EXPECT_NEAR(gaussian_kappa(1e-3, 50), p.kappa, 0.0);
}

TEST(SysParams, DeriveIsDeterministicAndRoundTrips)
{
    json raw{{"array", {{"num_antennas", 40}}}, {"channel", {{"pdp", "exponential"}}}};
    const auto a = to_json(derive(raw));
    const auto b = to_json(derive(raw));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.at("num_preambles"), 17);
}

TEST(SysParams, OverridesParseJsonOrString)
{
    json cfg = json::object();
    apply_override(cfg, "array.num_antennas=160");
    apply_override(cfg, "channel.pdp=exponential");
    apply_override(cfg, "channel.pdp_decay=0.25");
    const auto p = derive(cfg);
    EXPECT_EQ(p.num_antennas, 160);
    EXPECT_NEAR(p.pdp[1] / p.pdp[0], 0.25, 1e-12);
    EXPECT_THROW(apply_override(cfg, "no_dot=1"), std::invalid_argument);
}

TEST(SysParams, DbConversions)
{
    EXPECT_NEAR(linear_to_db(db_to_linear(-16.9)), -16.9, 1e-12);
    EXPECT_NEAR(db_to_linear(10.0), 10.0, 1e-12);
}
