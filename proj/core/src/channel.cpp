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

#include "massra/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace massra {

int quantize_delay(double rtt_us, double bandwidth_mhz, int max_tau)
{
    if (rtt_us < 0.0) {
        throw std::invalid_argument("quantize_delay: negative round trip");
    }
    const double samples = std::floor(rtt_us * bandwidth_mhz + 1e-9);
    return static_cast<int>(std::clamp(samples, 0.0, static_cast<double>(max_tau)));
}

int delay_for_distance(const SystemParams& params, double distance_km)
{
    return quantize_delay(distance_km * kRoundTripUsPerKm, params.prach_bandwidth_mhz, params.max_round_trip());
}

double pathloss_gain(const SystemParams& params, double distance_km)
{
    if (params.pathloss_exponent == 0.0) {
        return 1.0;
    }
    // Unit gain inside the reference distance keeps near UEs finite.
    const double d = std::max(distance_km, params.pathloss_ref_km);
    return std::pow(d / params.pathloss_ref_km, -params.pathloss_exponent);
}

CMatrix draw_cir(const SystemParams& params, double distance_km, Rng& rng)
{
    const auto m = static_cast<std::size_t>(params.num_antennas);
    const auto l = static_cast<std::size_t>(params.delay_spread);
    const double gain = pathloss_gain(params, distance_km);
    CMatrix cir(m, l);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t tap = 0; tap < l; ++tap) {
            cir(a, tap) = rng.complex_normal(params.pdp[tap] * gain);
        }
    }
    return cir;
}

UserRealization draw_user(const SystemParams& params, Rng& rng)
{
    UserRealization ue;
    ue.distance_km = params.cell_radius_km * std::sqrt(rng.uniform());
    ue.tau = delay_for_distance(params, ue.distance_km);
    ue.preamble_idx = rng.uniform_int(1, params.num_preambles);
    ue.cir = draw_cir(params, ue.distance_km, rng);
    return ue;
}

std::vector<UserRealization> draw_users(const SystemParams& params, double mean_requests, Rng& rng)
{
    if (!(mean_requests > 0.0)) {
        throw std::invalid_argument("draw_users: mean_requests must be positive");
    }
    const int count = rng.poisson(mean_requests);
    std::vector<UserRealization> users;
    users.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        users.push_back(draw_user(params, rng));
    }
    return users;
}

RxUplink synthesize_uplink(std::span<const UserRealization> users, std::span<const PreambleFrame> frames,
                           const SystemParams& params, Rng& rng)
{
    if (users.size() != frames.size()) {
        throw std::invalid_argument("synthesize_uplink: one frame per user required");
    }
    const auto m = static_cast<std::size_t>(params.num_antennas);
    const int len = params.n_zc + 2 * params.guard;
    RxUplink rx{CMatrix(m, static_cast<std::size_t>(len))};
    const double amp = std::sqrt(params.pu());

    for (std::size_t q = 0; q < users.size(); ++q) {
        const auto& ue = users[q];
        const auto& x = frames[q].samples;
        if (static_cast<int>(x.size()) != len || frames[q].shift != params.shift(ue.preamble_idx)) {
            throw std::invalid_argument("synthesize_uplink: frame does not match the user's preamble");
        }
        for (std::size_t a = 0; a < m; ++a) {
            auto y = rx.samples.row(a);
            for (int l = 0; l < params.delay_spread; ++l) {
                const cd h = amp * ue.cir(a, static_cast<std::size_t>(l));
                const int d = l + ue.tau;
                for (int t = d; t < len; ++t) {
                    y[static_cast<std::size_t>(t)] += h * x[static_cast<std::size_t>(t - d)];
                }
            }
        }
    }
    if (params.noise_power > 0.0) {
        for (cd& v : rx.samples.flat()) {
            v += rng.complex_normal(params.noise_power);
        }
    }
    return rx;
}

namespace {

// Adds sqrt(N_ZC p_u) h_mq[t - offset - tau_q] to out for users on preamble k
// (or all users when k == 0), at column (shift + tau + l - offset) mod width.
void add_user_taps(CMatrix& out, std::span<const UserRealization> users, int k, int offset,
                   const SystemParams& params)
{
    const double amp = std::sqrt(static_cast<double>(params.n_zc) * params.pu());
    const int width = static_cast<int>(out.cols());
    for (const auto& ue : users) {
        if (k != 0 && ue.preamble_idx != k) {
            continue;
        }
        const int base = params.shift(ue.preamble_idx) + ue.tau - offset;
        for (std::size_t a = 0; a < out.rows(); ++a) {
            for (int l = 0; l < params.delay_spread; ++l) {
                const int col = ((base + l) % width + width) % width;
                out(a, static_cast<std::size_t>(col)) += amp * ue.cir(a, static_cast<std::size_t>(l));
            }
        }
    }
}

}  // namespace

CMatrix synthesize_correlation(std::span<const UserRealization> users, const SystemParams& params, Rng& rng)
{
    CMatrix z(static_cast<std::size_t>(params.num_antennas), static_cast<std::size_t>(params.n_zc));
    add_user_taps(z, users, 0, 0, params);
    if (params.noise_power > 0.0) {
        for (cd& v : z.flat()) {
            v += rng.complex_normal(params.noise_power);
        }
    }
    return z;
}

CMatrix synthesize_window(std::span<const UserRealization> users, int k, const SystemParams& params, Rng& rng)
{
    CMatrix z(static_cast<std::size_t>(params.num_antennas), static_cast<std::size_t>(params.guard));
    // tau + L - 1 <= G - 1, so a user's taps never wrap out of its own window.
    add_user_taps(z, users, k, params.shift(k), params);
    if (params.noise_power > 0.0) {
        for (cd& v : z.flat()) {
            v += rng.complex_normal(params.noise_power);
        }
    }
    return z;
}

}  // namespace massra
