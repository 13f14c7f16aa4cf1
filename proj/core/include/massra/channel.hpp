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

#pragma once

#include <span>
#include <vector>

#include "massra/matrix.hpp"
#include "massra/preamble.hpp"
#include "massra/rng.hpp"
#include "massra/sysparams.hpp"

namespace massra {

/// Round-trip propagation delay per km of UE-BS distance.
inline constexpr double kRoundTripUsPerKm = 6.7;

/// One RA-attempting UE.
struct UserRealization {
    int preamble_idx = 1;  // 1-based
    int tau = 0;           // round-trip delay in channel uses, [0, G - L]
    CMatrix cir;           // M x L taps h_m[l]
    double distance_km = 0.0;
};

/// Received uplink samples, M x (N_ZC + 2G).
struct RxUplink {
    CMatrix samples;
};

/// floor(rtt_us * bandwidth_mhz), clamped to [0, max_tau]. A 1e-9 slack
/// absorbs representation error in products that land on an integer.
int quantize_delay(double rtt_us, double bandwidth_mhz, int max_tau);

/// Round-trip delay in channel uses for a UE at distance_km.
int delay_for_distance(const SystemParams& params, double distance_km);

/// M x L taps, independent CN(0, pdp[l] * g) with g the large-scale gain.
CMatrix draw_cir(const SystemParams& params, double distance_km, Rng& rng);

/// Large-scale power gain; 1 unless log-distance pathloss is enabled.
double pathloss_gain(const SystemParams& params, double distance_km);

/// One UE placed uniformly over the cell disc, uniform preamble choice.
UserRealization draw_user(const SystemParams& params, Rng& rng);

/// Poisson(mean_requests) UEs, each drawn as in draw_user.
std::vector<UserRealization> draw_users(const SystemParams& params, double mean_requests, Rng& rng);

/// Evaluates y_m[t] = sqrt(p_u) sum_q sum_l h_mq[l] x_q[t - l - tau_q] + n_m[t]
/// sample by sample. frames[i] must be the frame of users[i].
RxUplink synthesize_uplink(std::span<const UserRealization> users, std::span<const PreambleFrame> frames,
                           const SystemParams& params, Rng& rng);

/// Correlation bank z_m[t] (M x N_ZC) drawn directly in the correlation
/// domain: sqrt(N_ZC p_u) sum_q h_mq[t - c_q - tau_q] + w_m[t], w i.i.d.
/// CN(0, sigma^2). Because the shifted-root correlator is unitary this has
/// exactly the distribution of correlating synthesize_uplink's output.
CMatrix synthesize_correlation(std::span<const UserRealization> users, const SystemParams& params, Rng& rng);

/// Same as synthesize_correlation restricted to the G-sample window of
/// preamble k (M x G); only users on preamble k contribute.
CMatrix synthesize_window(std::span<const UserRealization> users, int k, const SystemParams& params, Rng& rng);

}  // namespace massra
