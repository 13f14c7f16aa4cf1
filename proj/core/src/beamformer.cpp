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

#include "massra/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace massra {

PowerSplit parse_power_split(const std::string& name)
{
    if (name == "total_groups") return PowerSplit::total_groups;
    if (name == "per_preamble") return PowerSplit::per_preamble;
    throw std::invalid_argument("unknown power split '" + name + "'");
}

CMatrix frequency_response(const CMatrix& cir, int n_rs)
{
    const std::size_t m = cir.rows();
    const std::size_t taps = cir.cols();
    // twiddle[(n l) mod N_RS] = exp(-j 2 pi n l / N_RS)
    std::vector<cd> twiddle(static_cast<std::size_t>(n_rs));
    for (int i = 0; i < n_rs; ++i) {
        twiddle[static_cast<std::size_t>(i)] = std::polar(1.0, -2.0 * std::numbers::pi * i / n_rs);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_rs));
    CMatrix out(m, static_cast<std::size_t>(n_rs));
    for (std::size_t a = 0; a < m; ++a) {
        const auto h = cir.row(a);
        auto row = out.row(a);
        for (int n = 0; n < n_rs; ++n) {
            cd acc{};
            for (std::size_t l = 0; l < taps; ++l) {
                acc += h[l] * twiddle[(static_cast<std::size_t>(n) * l) % static_cast<std::size_t>(n_rs)];
            }
            row[static_cast<std::size_t>(n)] = acc * scale;
        }
    }
    return out;
}

double group_upsilon(const SystemParams& params, std::span<const UserRealization> users, int k, int ta_hat)
{
    double energy = 0.0;
    for (const auto& ue : users) {
        if (ue.preamble_idx != k) {
            continue;
        }
        const double gain = pathloss_gain(params, ue.distance_km);
        for (int l = 0; l < params.delay_spread; ++l) {
            const int pos = ue.tau + l;
            if (pos >= ta_hat && pos < ta_hat + params.delay_spread) {
                energy += params.pdp[static_cast<std::size_t>(l)] * gain;
            }
        }
    }
    const double alpha_sum = energy / params.n_rs;
    return params.num_antennas *
           (params.pu() * alpha_sum + params.delay_spread * params.noise_power / (params.n_zc * params.n_rs));
}

double worst_case_upsilon(const SystemParams& params, int num_users)
{
    return params.num_antennas * (params.pu() * num_users * params.alpha() +
                                  params.delay_spread * params.noise_power / (params.n_zc * params.n_rs));
}

double empirical_upsilon(const CMatrix& fd_gain)
{
    double total = 0.0;
    for (const cd& v : fd_gain.flat()) {
        total += std::norm(v);
    }
    return total / static_cast<double>(fd_gain.cols());
}

GroupChannelEstimate estimate_group_cir(const CorrelationBank& bank, const DetectedGroup& group,
                                        const SystemParams& params, double upsilon)
{
    const int taps = params.delay_spread;
    if (group.ta_hat < 0 || group.ta_hat + taps > params.guard) {
        throw std::invalid_argument("estimate_group_cir: window [ta_hat, ta_hat + L) leaves the preamble window");
    }
    const int start = params.shift(group.preamble_idx) + group.ta_hat;
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.n_zc));
    GroupChannelEstimate est;
    est.preamble_idx = group.preamble_idx;
    est.ta_hat = group.ta_hat;
    est.cir_hat = CMatrix(bank.z.rows(), static_cast<std::size_t>(taps));
    for (std::size_t a = 0; a < bank.z.rows(); ++a) {
        for (int l = 0; l < taps; ++l) {
            est.cir_hat(a, static_cast<std::size_t>(l)) = bank.z(a, static_cast<std::size_t>(start + l)) * scale;
        }
    }
    est.fd_gain = frequency_response(est.cir_hat, params.n_rs);
    est.upsilon = upsilon;
    return est;
}

double downlink_power(const SystemParams& params, int k_t, PowerSplit split)
{
    const double base = params.pt() * params.n_rs / params.n_sc;
    if (split == PowerSplit::per_preamble) {
        return base;
    }
    if (k_t < 1) {
        throw std::invalid_argument("downlink_power: K_t must be at least 1");
    }
    return base / k_t;
}

PrecodeResult precode(std::span<const GroupChannelEstimate> estimates, const std::vector<std::vector<cd>>& symbols,
                      std::span<const int> subcarriers, const SystemParams& params, int k_t, PowerSplit split)
{
    if (symbols.size() != estimates.size()) {
        throw std::invalid_argument("precode: one symbol vector per group required");
    }
    if (split == PowerSplit::total_groups && k_t < static_cast<int>(estimates.size())) {
        throw std::invalid_argument("precode: K_t smaller than the number of groups");
    }
    const std::size_t res = subcarriers.size();
    const std::size_t m = static_cast<std::size_t>(params.num_antennas);
    PrecodeResult out{CMatrix(m, res), {}};
    const double amp = std::sqrt(downlink_power(params, std::max(k_t, 1), split));
    for (std::size_t g = 0; g < estimates.size(); ++g) {
        const auto& est = estimates[g];
        if (!(est.upsilon > 0.0)) {
            out.skipped.push_back(g);
            continue;
        }
        if (symbols[g].size() != res) {
            throw std::invalid_argument("precode: symbol count does not match RE count");
        }
        const double w = amp / std::sqrt(est.upsilon);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t r = 0; r < res; ++r) {
                const auto n = static_cast<std::size_t>(subcarriers[r]);
                out.x(a, r) += w * std::conj(est.fd_gain(a, n)) * symbols[g][r];
            }
        }
    }
    return out;
}

std::vector<cd> receive_downlink(const CMatrix& x, std::span<const int> subcarriers, const CMatrix& true_gain,
                                 const SystemParams& params, Rng& rng)
{
    const double scale = std::sqrt(static_cast<double>(params.n_rs));
    std::vector<cd> y(subcarriers.size());
    for (std::size_t r = 0; r < subcarriers.size(); ++r) {
        const auto n = static_cast<std::size_t>(subcarriers[r]);
        cd acc{};
        for (std::size_t a = 0; a < x.rows(); ++a) {
            acc += true_gain(a, n) * x(a, r);
        }
        y[r] = scale * acc;
        if (params.noise_power > 0.0) {
            y[r] += rng.complex_normal(params.noise_power);
        }
    }
    return y;
}

SinrDraw measure_instantaneous_sinr(std::span<const cd> h_user, std::span<const cd> h_est, cd u, cd noise,
                                    double expected_gain, double upsilon, double pd, const SystemParams& params)
{
    if (h_user.size() != h_est.size()) {
        throw std::invalid_argument("measure_instantaneous_sinr: antenna count mismatch");
    }
    cd inner{};
    for (std::size_t a = 0; a < h_user.size(); ++a) {
        inner += h_user[a] * std::conj(h_est[a]);
    }
    const double c = std::sqrt(params.n_rs * pd / upsilon);
    const cd y = c * inner * u + noise;
    const cd ds = c * std::sqrt(params.pu()) * expected_gain * u;
    return {ds, y - ds};
}

double conditional_sinr(const std::vector<std::vector<cd>>& users, std::size_t i, double upsilon, double pd,
                        const SystemParams& params)
{
    const auto& hi = users.at(i);
    double norm_i = 0.0;
    for (const cd& v : hi) {
        norm_i += std::norm(v);
    }
    double mui = 0.0;
    for (std::size_t q = 0; q < users.size(); ++q) {
        if (q == i) {
            continue;
        }
        cd inner{};
        for (std::size_t a = 0; a < hi.size(); ++a) {
            inner += hi[a] * std::conj(users[q][a]);
        }
        mui += std::norm(inner);
    }
    const double c = params.n_rs * pd / upsilon;
    const double signal = c * params.pu() * norm_i * norm_i;
    const double est_noise = c * params.delay_spread * params.noise_power * norm_i / (params.n_zc * params.n_rs);
    return signal / (c * params.pu() * mui + est_noise + params.noise_power);
}

}  // namespace massra
