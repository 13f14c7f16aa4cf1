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

#include <filesystem>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace massra {

/// Static protocol and channel parameters, validated and with derived
/// quantities filled in. Build one with derive(); treat as immutable.
///
/// Sample-domain quantities (n_zc, guard, delay_spread) are in PRACH channel
/// uses. Preamble indices k are 1-based, k in [1, num_preambles].
struct SystemParams {
    int n_zc = 864;
    int zc_root = 25;
    int guard = 50;         // cyclic-shift spacing G = max round trip + delay spread
    int delay_spread = 6;   // L
    int num_preambles = 0;  // Q = floor(n_zc / guard), derived
    std::vector<int> permissible_shifts;  // xi_k = (k - 1) * guard, derived

    int num_antennas = 80;

    double pu_over_sigma2 = 0.0;
    double pt_over_sigma2 = 0.0;
    double noise_power = 1.0;

    int n_rs = 72;          // shared-channel subcarriers
    int n_sc = 24;          // RAR subcarriers per preamble
    int n_slot = 0;         // ceil(n_sc * Q / n_rs), derived
    int ofdm_symbols = 14;  // RE grid height available for RAR copies

    double prach_bandwidth_mhz = 1.08;
    double cell_radius_km = 6.0;
    std::vector<double> pdp;  // per-tap variance, length L, sums to 1

    double kappa = 0.0;      // theta0 = kappa * sigma^2 / sqrt(M)
    double target_pf = 1e-3;
    int max_repeats = 5;

    double pathloss_exponent = 0.0;  // 0 disables distance-dependent gain
    double pathloss_ref_km = 1.0;

    double theta0() const;
    double pu() const { return pu_over_sigma2 * noise_power; }
    double pt() const { return pt_over_sigma2 * noise_power; }
    int max_round_trip() const { return guard - delay_spread; }

    /// Cyclic shift of preamble k (1-based).
    int shift(int k) const;

    /// alpha = (1/N_RS) * sum of the PDP; per-subcarrier channel variance.
    double alpha() const;
};

/// Number of ack + payload + CRC bits in one RAR.
inline constexpr int kRarBits = 24;

/// Default configuration, sectioned the way config files are.
nlohmann::json default_config();

/// Builds validated parameters from a sectioned config. Missing keys take
/// their defaults; unknown sections or keys throw std::invalid_argument.
SystemParams derive(const nlohmann::json& raw);

nlohmann::json load_config(const std::filesystem::path& path);

/// Applies a "section.key=value" override; value is parsed as JSON, falling
/// back to a plain string.
void apply_override(nlohmann::json& config, std::string_view assignment);

/// Fully resolved parameters, including derived fields.
nlohmann::json to_json(const SystemParams& params);

/// kappa such that 1 - (1 - Q(kappa))^guard = target_pf, with Q the standard
/// normal tail. Treats the per-sample noise in the averaged profile as
/// Gaussian with standard deviation sigma^2/sqrt(M).
double gaussian_kappa(double target_pf, int guard);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace massra
