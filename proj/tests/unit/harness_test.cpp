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

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "massra/harness.hpp"

using namespace massra;
using nlohmann::json;

namespace {

SystemParams loud(int m)
{
    return derive(json{{"array", {{"num_antennas", m}}},
                       {"power", {{"pu_over_sigma2_db", 0.0}, {"pt_over_sigma2_db", 0.0}}}});
}

UserRealization ue_at(const SystemParams& p, int k, int tau, Rng& rng)
{
    UserRealization ue;
    ue.preamble_idx = k;
    ue.tau = tau;
    ue.distance_km = 1.0;
    ue.cir = draw_cir(p, 1.0, rng);
    return ue;
}

CampaignConfig small_campaign()
{
    CampaignConfig c;
    c.mean_requests = 6.0;
    c.frames = 40;
    c.replicas = 4;
    c.warmup = 2;
    c.seed = 5;
    return c;
}

}  // namespace

TEST(Harness, EmptySlot)
{
    const auto p = loud(20);
    Rng rng(1);
    const auto out = simulate_slot(p, {}, rng);
    EXPECT_TRUE(out.ues.empty());
    EXPECT_TRUE(out.granted.empty());
    EXPECT_EQ(out.idle_preambles, 17);
    EXPECT_EQ(out.active_preambles, 0);
    EXPECT_LE(out.idle_with_groups, out.idle_preambles);
    EXPECT_EQ(out.k_t, static_cast<int>(out.groups.size()));
}

TEST(Harness, LoneUserGetsItsOwnTimingAdvance)
{
    const auto p = loud(80);
    for (Route route : {Route::correlation, Route::waveform}) {
        Rng rng(2);
        const std::vector<UserRealization> users{ue_at(p, 4, 23, rng)};
        SimOptions opt;
        opt.route = route;
        const auto out = simulate_slot(p, users, rng, opt);
        ASSERT_EQ(out.ues.size(), 1u);
        const auto& u = out.ues[0];
        EXPECT_TRUE(u.success());
        ASSERT_TRUE(u.matched_ta.has_value());
        EXPECT_EQ(*u.matched_ta, 23);
        EXPECT_EQ(u.ta_error, 0);
        EXPECT_EQ(u.payload->ta, 23);
        EXPECT_EQ(out.granted, std::vector<std::size_t>{0});
        EXPECT_EQ(out.active_preambles, 1);
        EXPECT_EQ(out.active_detected, 1);
    }
}

TEST(Harness, SeparatedGroupsOnOnePreamble)
{
    const auto p = loud(160);
    Rng rng(3);
    const std::vector<UserRealization> users{ue_at(p, 2, 5, rng), ue_at(p, 2, 30, rng)};
    const auto out = simulate_slot(p, users, rng);
    std::vector<int> ta;
    for (const auto& g : out.groups) {
        if (g.preamble_idx == 2) ta.push_back(g.ta_hat);
    }
    EXPECT_EQ(ta, (std::vector<int>{5, 30}));
    EXPECT_EQ(out.ues[0].payload->ta, 5);
    EXPECT_EQ(out.ues[1].payload->ta, 30);
}

TEST(Harness, ForcedOutcomesBoundTheMetrics)
{
    const auto p = derive(json::object());
    const auto always = run_campaign(p, small_campaign(), {}, [](const UeOutcome&) { return true; });
    EXPECT_EQ(always.avg_repeats, 0.0);
    EXPECT_EQ(always.fail_prob, 0.0);
    EXPECT_EQ(always.success_per_attempt, 1.0);
    EXPECT_GT(always.resolved, 0);

    const auto never = run_campaign(p, small_campaign(), {}, [](const UeOutcome&) { return false; });
    EXPECT_EQ(never.fail_prob, 1.0);
    EXPECT_EQ(never.avg_repeats, static_cast<double>(p.max_repeats));
    EXPECT_EQ(never.success_per_attempt, 0.0);
}

TEST(Harness, CampaignIndependentOfWorkerCount)
{
    const auto p = derive(json::object());
    SimOptions one, three;
    three.workers = 3;
    const auto a = run_campaign(p, small_campaign(), one);
    const auto b = run_campaign(p, small_campaign(), three);
    EXPECT_EQ(metrics_json(a).dump(), metrics_json(b).dump());
    auto other = small_campaign();
    other.seed = 6;
    EXPECT_NE(metrics_json(run_campaign(p, other, one)).dump(), metrics_json(a).dump());
}

TEST(Harness, PowerLaws)
{
    EXPECT_DOUBLE_EQ(scale_power(0.1, 20, 80, PowerLaw::constant), 0.1);
    EXPECT_NEAR(scale_power(0.1, 20, 80, PowerLaw::inv_sqrt), 0.05, 1e-15);
    EXPECT_NEAR(scale_power(0.1, 20, 80, PowerLaw::inv), 0.025, 1e-15);
    EXPECT_EQ(parse_power_law("inv_sqrt"), PowerLaw::inv_sqrt);
    EXPECT_STREQ(to_string(PowerLaw::inv), "inv");
    EXPECT_THROW(parse_power_law("square"), std::invalid_argument);
}

TEST(Harness, ParallelForVisitsEachIndexOnce)
{
    std::vector<std::atomic<int>> hits(97);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Harness, CsvLayout)
{
    ResultRow r{20, 11.0, -16.9, -16.9, 1.5, 0.05, 0.001, 0.99, std::numeric_limits<double>::quiet_NaN()};
    std::ostringstream os;
    write_csv(os, std::span<const ResultRow>(&r, 1));
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "m,load,pu_db,pt_db,avg_repeats,fail_prob,pf,pd,ci_halfwidth");
    EXPECT_EQ(s.back(), '\n');
    EXPECT_NE(s.find("20,11,-16.9,-16.9,1.5,0.05,0.001,0.99,\n"), std::string::npos);
}

TEST(Harness, MinPowerReportsUnbracketedRange)
{
    auto p = derive(json{{"array", {{"num_antennas", 20}}}});
    MinPowerConfig c;
    c.trials = 200;
    c.calibration_trials = 2000;
    c.target_pf = 1e-2;
    c.lo_db = -40.0;
    c.hi_db = -35.0;
    const auto r = find_min_power(p, c);
    EXPECT_FALSE(r.pu_db.has_value());
    EXPECT_FALSE(r.message.empty());
}

TEST(Harness, MissProbabilityFallsWithPower)
{
    const auto p = derive(json{{"array", {{"num_antennas", 40}}}});
    const double theta0 = p.theta0();
    auto quiet = p;
    quiet.pu_over_sigma2 = db_to_linear(-30.0);
    auto strong = p;
    strong.pu_over_sigma2 = db_to_linear(-10.0);
    EXPECT_GT(measure_pe(quiet, theta0, 300, 1), 0.5);
    EXPECT_LT(measure_pe(strong, theta0, 300, 1), 0.05);
}

TEST(Harness, WorstCaseSinrNearClosedForm)
{
    const auto p = derive(json{{"array", {{"num_antennas", 40}}}});
    const auto r = worst_case_sinr_experiment(p, 4, 400, 3);
    EXPECT_NEAR(r.mean_sinr / r.closed_form, 1.0, 0.1);
    EXPECT_EQ(r.samples.size(), 400u);
    EXPECT_GT(r.sample_std, 0.0);
}
