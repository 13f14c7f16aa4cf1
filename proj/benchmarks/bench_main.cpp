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

#include <benchmark/benchmark.h>

#include <vector>

#include "massra/harness.hpp"

using namespace massra;
using nlohmann::json;

namespace {

SystemParams params_for(int m)
{
    return derive(json{{"array", {{"num_antennas", m}}}});
}

std::vector<UserRealization> some_users(const SystemParams& p, Rng& rng)
{
    std::vector<UserRealization> users;
    for (int i = 0; i < 11; ++i) users.push_back(draw_user(p, rng));
    return users;
}

RxUplink waveform(const SystemParams& p, const RootSequence& root, const std::vector<UserRealization>& users, Rng& rng)
{
    std::vector<PreambleFrame> frames;
    for (const auto& u : users) frames.push_back(build_frame(root, p.shift(u.preamble_idx), p.guard));
    return synthesize_uplink(users, frames, p, rng);
}

}  // namespace

static void BM_CorrelateDirect(benchmark::State& state)
{
    const auto p = params_for(static_cast<int>(state.range(0)));
    const auto root = root_zc(p.n_zc, p.zc_root);
    Rng rng(1);
    const auto rx = waveform(p, root, some_users(p, rng), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(correlate_direct(rx, root, p.guard));
    }
}
BENCHMARK(BM_CorrelateDirect)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_CorrelateFft(benchmark::State& state)
{
    const auto p = params_for(static_cast<int>(state.range(0)));
    const auto root = root_zc(p.n_zc, p.zc_root);
    const Correlator corr(root);
    Rng rng(1);
    const auto rx = waveform(p, root, some_users(p, rng), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(corr.correlate(rx, p.guard));
    }
}
BENCHMARK(BM_CorrelateFft)->Arg(4)->Arg(80)->Arg(320)->Unit(benchmark::kMillisecond);

// Waveform synthesis plus FFT correlation, against drawing the bank directly.
static void BM_UplinkWaveformRoute(benchmark::State& state)
{
    const auto p = params_for(static_cast<int>(state.range(0)));
    const auto root = root_zc(p.n_zc, p.zc_root);
    const Correlator corr(root);
    Rng rng(2);
    const auto users = some_users(p, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(corr.correlate(waveform(p, root, users, rng), p.guard));
    }
}
BENCHMARK(BM_UplinkWaveformRoute)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_UplinkCorrelationRoute(benchmark::State& state)
{
    const auto p = params_for(static_cast<int>(state.range(0)));
    Rng rng(2);
    const auto users = some_users(p, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize_correlation(users, p, rng));
    }
}
BENCHMARK(BM_UplinkCorrelationRoute)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_SimulateSlot(benchmark::State& state)
{
    const auto p = params_for(static_cast<int>(state.range(0)));
    const SlotContext ctx(p);
    Rng rng(3);
    const auto users = some_users(p, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_slot(p, users, rng, {}, ctx));
    }
}
BENCHMARK(BM_SimulateSlot)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_Grouping(benchmark::State& state)
{
    const auto p = params_for(80);
    Rng rng(4);
    const auto prof = profile_from_window(synthesize_window({}, 1, p, rng), 1, 0.0, p.noise_power);
    for (auto _ : state) {
        benchmark::DoNotOptimize(group(prof, p.delay_spread));
    }
}
BENCHMARK(BM_Grouping);

BENCHMARK_MAIN();
