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
#include <string>
#include <vector>

#include "massra/channel.hpp"
#include "massra/detector.hpp"
#include "massra/matrix.hpp"
#include "massra/rng.hpp"
#include "massra/sysparams.hpp"

namespace massra {

struct GroupChannelEstimate {
    int preamble_idx = 1;
    int ta_hat = 0;
    CMatrix cir_hat;  // M x L
    CMatrix fd_gain;  // M x N_RS
    double upsilon = 0.0;
};

/// How the total downlink power is divided.
enum class PowerSplit {
    total_groups,  // P_d = P_T N_RS / (N_SC K_t), K_t = groups over all preambles
    per_preamble,  // P_d = P_T N_RS / N_SC, P_T budgeted per preamble's subcarriers
};

PowerSplit parse_power_split(const std::string& name);

/// H[m][n] = N_RS^-1/2 sum_l cir[m][l] exp(-j 2 pi n l / N_RS), n in [0, N_RS).
CMatrix frequency_response(const CMatrix& cir, int n_rs);

/// upsilon = M (p_u sum_q alpha_q + L sigma^2 / (N_ZC N_RS)) where alpha_q
/// counts only the taps of user q (on preamble k) that land inside the
/// window [ta_hat, ta_hat + L). Uses ground-truth delays and PDP statistics.
double group_upsilon(const SystemParams& params, std::span<const UserRealization> users, int k, int ta_hat);

/// upsilon for K_g fully overlapping users with the configured PDP.
double worst_case_upsilon(const SystemParams& params, int num_users);

/// Per-draw normalizer: mean over subcarriers of ||H~[n]||^2.
double empirical_upsilon(const CMatrix& fd_gain);

/// h^[m][l] = z_m[ta_hat + l + xi_k] / sqrt(N_ZC); fd_gain its N_RS-point
/// transform. upsilon is stored as given.
GroupChannelEstimate estimate_group_cir(const CorrelationBank& bank, const DetectedGroup& group,
                                        const SystemParams& params, double upsilon);

double downlink_power(const SystemParams& params, int k_t, PowerSplit split);

struct PrecodeResult {
    CMatrix x;                          // M x number of REs
    std::vector<std::size_t> skipped;   // groups with upsilon == 0
};

/// X_m[r] = sqrt(P_d) sum_g conj(fd_gain_g[m][n_r]) u_g[r] / sqrt(upsilon_g).
/// symbols[g][r] is the unit-energy symbol of group g on RE r, whose
/// subcarrier is subcarriers[r].
PrecodeResult precode(std::span<const GroupChannelEstimate> estimates, const std::vector<std::vector<cd>>& symbols,
                      std::span<const int> subcarriers, const SystemParams& params, int k_t,
                      PowerSplit split = PowerSplit::total_groups);

/// Y[r] = sqrt(N_RS) sum_m H[m][n_r] X_m[r] + E, E ~ CN(0, sigma^2).
/// true_gain is the UE's M x N_RS frequency response.
std::vector<cd> receive_downlink(const CMatrix& x, std::span<const int> subcarriers, const CMatrix& true_gain,
                                 const SystemParams& params, Rng& rng);

/// Mean-signal / effective-noise split of one received sample.
struct SinrDraw {
    cd ds;  // sqrt(N_RS P_d p_u / upsilon) E||H_i||^2 u
    cd en;  // everything else in Y
    double sinr() const { return std::norm(ds) / std::norm(en); }
};

/// Evaluates Y = sqrt(N_RS P_d / upsilon) H_i^T conj(H~) u + E and splits it
/// into DS (mean signal) and EN = Y - DS.
SinrDraw measure_instantaneous_sinr(std::span<const cd> h_user, std::span<const cd> h_est, cd u, cd noise,
                                    double expected_gain, double upsilon, double pd, const SystemParams& params);

/// SINR of one channel realization with the MUI, estimation noise and AWGN
/// replaced by their variances given the channels:
/// c p_u ||H_i||^4 / (c p_u sum_{q != i} |H_i^T H_q^*|^2 + c L sigma^2 ||H_i||^2 / (N_ZC N_RS) + sigma^2),
/// c = N_RS P_d / upsilon. users[q] holds H_q at one subcarrier.
double conditional_sinr(const std::vector<std::vector<cd>>& users, std::size_t i, double upsilon, double pd,
                        const SystemParams& params);

}  // namespace massra
