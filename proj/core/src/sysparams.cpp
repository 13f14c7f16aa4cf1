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

#include "massra/sysparams.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>

namespace massra {

namespace {

using nlohmann::json;

void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

template <typename T>
T get_as(const json& section, const char* key, const char* section_name)
{
    try {
        return section.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config ") + section_name + "." + key + ": " + e.what());
    }
}

// Power keys come in a linear and a dB flavour; exactly one may be set.
double power_value(const json& section, const char* linear_key, const char* db_key)
{
    const bool has_linear = section.contains(linear_key) && !section.at(linear_key).is_null();
    const bool has_db = section.contains(db_key) && !section.at(db_key).is_null();
    require(!(has_linear && has_db),
            std::string("config power: both ") + linear_key + " and " + db_key + " given");
    require(has_linear || has_db, std::string("config power: missing ") + linear_key);
    return has_linear ? get_as<double>(section, linear_key, "power")
                      : db_to_linear(get_as<double>(section, db_key, "power"));
}

std::vector<double> build_pdp(const json& channel, int taps)
{
    const json& spec = channel.at("pdp");
    std::vector<double> pdp;
    if (spec.is_string()) {
        const auto name = spec.get<std::string>();
        if (name == "uniform") {
            pdp.assign(static_cast<std::size_t>(taps), 1.0);
        } else if (name == "exponential") {
            const double decay = get_as<double>(channel, "pdp_decay", "channel");
            require(decay > 0.0 && decay <= 1.0, "config channel.pdp_decay must be in (0, 1]");
            for (int l = 0; l < taps; ++l) {
                pdp.push_back(std::pow(decay, l));
            }
        } else {
            throw std::invalid_argument("config channel.pdp: unknown profile '" + name + "'");
        }
    } else {
        pdp = get_as<std::vector<double>>(channel, "pdp", "channel");
        require(static_cast<int>(pdp.size()) == taps,
                "config channel.pdp must have exactly delay_spread entries");
    }
    for (double p : pdp) {
        require(p >= 0.0 && std::isfinite(p), "config channel.pdp entries must be nonnegative");
    }
    const double total = std::accumulate(pdp.begin(), pdp.end(), 0.0);
    require(total > 0.0, "config channel.pdp must have positive total energy");
    for (double& p : pdp) {
        p /= total;
    }
    return pdp;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double SystemParams::theta0() const
{
    return kappa * noise_power / std::sqrt(static_cast<double>(num_antennas));
}

int SystemParams::shift(int k) const
{
    if (k < 1 || k > num_preambles) {
        throw std::out_of_range("preamble index " + std::to_string(k) + " outside [1, Q]");
    }
    return permissible_shifts[static_cast<std::size_t>(k - 1)];
}

double SystemParams::alpha() const
{
    return std::accumulate(pdp.begin(), pdp.end(), 0.0) / n_rs;
}

double gaussian_kappa(double target_pf, int guard)
{
    if (!(target_pf > 0.0 && target_pf < 1.0)) {
        throw std::invalid_argument("gaussian_kappa: target_pf must be in (0, 1)");
    }
    // Per-sample tail that yields target_pf over guard independent samples.
    const double tail = -std::expm1(std::log1p(-target_pf) / guard);
    return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * tail);
}

json default_config()
{
    return json{
        {"prach",
         {{"n_zc", 864},
          {"zc_root", 25},
          {"guard", 50},
          {"delay_spread", 6},
          {"prach_bandwidth_mhz", 1.08},
          {"cell_radius_km", 6.0}}},
        {"array", {{"num_antennas", 80}}},
        {"power", {{"pu_over_sigma2_db", -16.9}, {"pt_over_sigma2_db", -16.9}, {"noise_power", 1.0}}},
        {"channel",
         {{"pdp", "uniform"}, {"pdp_decay", 0.5}, {"pathloss_exponent", 0.0}, {"pathloss_ref_km", 1.0}}},
        {"rar", {{"n_rs", 72}, {"n_sc", 24}, {"ofdm_symbols", 14}}},
        {"detector", {{"kappa", nullptr}, {"target_pf", 1e-3}}},
        {"procedure", {{"max_repeats", 5}}},
    };
}

SystemParams derive(const json& raw)
{
    require(raw.is_object(), "config must be an object of sections");
    json cfg = default_config();
    for (const auto& [section, values] : raw.items()) {
        require(cfg.contains(section), "config: unknown section '" + section + "'");
        require(values.is_object(), "config: section '" + section + "' must be an object");
        json& target = cfg[section];
        if (section == "power") {
            // A user-supplied flavour replaces the default of the other flavour.
            for (const char* base : {"pu_over_sigma2", "pt_over_sigma2"}) {
                const std::string lin = base;
                const std::string db = lin + "_db";
                if (values.contains(lin) && !values.contains(db)) {
                    target.erase(db);
                } else if (values.contains(db) && !values.contains(lin)) {
                    target.erase(lin);
                }
            }
        }
        for (const auto& [key, value] : values.items()) {
            const bool known = target.contains(key) ||
                               (section == "power" && (key == "pu_over_sigma2" || key == "pt_over_sigma2" ||
                                                       key == "pu_over_sigma2_db" || key == "pt_over_sigma2_db"));
            require(known, "config: unknown key '" + section + "." + key + "'");
            target[key] = value;
        }
    }

    const json& prach = cfg.at("prach");
    const json& channel = cfg.at("channel");
    const json& rar = cfg.at("rar");
    const json& detector = cfg.at("detector");

    SystemParams p;
    p.n_zc = get_as<int>(prach, "n_zc", "prach");
    p.zc_root = get_as<int>(prach, "zc_root", "prach");
    p.guard = get_as<int>(prach, "guard", "prach");
    p.delay_spread = get_as<int>(prach, "delay_spread", "prach");
    p.prach_bandwidth_mhz = get_as<double>(prach, "prach_bandwidth_mhz", "prach");
    p.cell_radius_km = get_as<double>(prach, "cell_radius_km", "prach");
    p.num_antennas = get_as<int>(cfg.at("array"), "num_antennas", "array");
    p.pu_over_sigma2 = power_value(cfg.at("power"), "pu_over_sigma2", "pu_over_sigma2_db");
    p.pt_over_sigma2 = power_value(cfg.at("power"), "pt_over_sigma2", "pt_over_sigma2_db");
    p.noise_power = get_as<double>(cfg.at("power"), "noise_power", "power");
    p.n_rs = get_as<int>(rar, "n_rs", "rar");
    p.n_sc = get_as<int>(rar, "n_sc", "rar");
    p.ofdm_symbols = get_as<int>(rar, "ofdm_symbols", "rar");
    p.target_pf = get_as<double>(detector, "target_pf", "detector");
    p.max_repeats = get_as<int>(cfg.at("procedure"), "max_repeats", "procedure");
    p.pathloss_exponent = get_as<double>(channel, "pathloss_exponent", "channel");
    p.pathloss_ref_km = get_as<double>(channel, "pathloss_ref_km", "channel");

    require(p.n_zc >= 1, "n_zc must be positive");
    require(p.zc_root >= 1, "zc_root must be positive");
    require(std::gcd(p.zc_root, p.n_zc) == 1, "zc_root must be coprime with n_zc");
    require(p.delay_spread >= 1, "delay_spread must be at least 1");
    require(p.guard > p.delay_spread, "guard must exceed delay_spread (max round trip >= 1)");
    require(p.guard <= p.n_zc, "guard must not exceed n_zc");
    require(p.num_antennas >= 1, "num_antennas must be positive");
    require(p.pu_over_sigma2 > 0.0 && p.pt_over_sigma2 > 0.0, "powers must be positive");
    require(p.noise_power > 0.0 && std::isfinite(p.noise_power), "noise_power must be positive (powers are set relative to it)");
    require(p.n_rs >= 1, "n_rs must be positive");
    require(p.n_sc >= kRarBits, "n_sc must carry the 24-bit RAR (one bit per subcarrier)");
    require(p.ofdm_symbols >= 1, "ofdm_symbols must be positive");
    require(p.prach_bandwidth_mhz > 0.0 && p.cell_radius_km > 0.0, "bandwidth and cell radius must be positive");
    require(p.target_pf > 0.0 && p.target_pf <= 1.0, "target_pf must be in (0, 1]");
    require(p.max_repeats >= 0, "max_repeats must be nonnegative");
    require(p.pathloss_exponent >= 0.0 && p.pathloss_ref_km > 0.0, "invalid pathloss settings");

    p.num_preambles = p.n_zc / p.guard;
    p.permissible_shifts.resize(static_cast<std::size_t>(p.num_preambles));
    for (int k = 0; k < p.num_preambles; ++k) {
        p.permissible_shifts[static_cast<std::size_t>(k)] = k * p.guard;
    }
    p.n_slot = (p.n_sc * p.num_preambles + p.n_rs - 1) / p.n_rs;
    require(2 * p.n_slot <= p.ofdm_symbols, "RAR grid overflow: two hop copies need 2 * n_slot OFDM symbols");

    p.pdp = build_pdp(channel, p.delay_spread);

    if (detector.at("kappa").is_null()) {
        p.kappa = p.target_pf < 1.0 ? gaussian_kappa(p.target_pf, p.guard) : 0.0;
    } else {
        p.kappa = get_as<double>(detector, "kappa", "detector");
        require(p.kappa >= 0.0, "kappa must be nonnegative");
    }
    return p;
}

json load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file " + path.string());
    }
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
}

void apply_override(json& config, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    require(eq != std::string_view::npos && dot != std::string_view::npos && dot < eq,
            "override must look like section.key=value: " + std::string(assignment));
    const std::string section(assignment.substr(0, dot));
    const std::string key(assignment.substr(dot + 1, eq - dot - 1));
    const std::string text(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    config[section][key] = value;
}

json to_json(const SystemParams& p)
{
    return json{
        {"n_zc", p.n_zc},
        {"zc_root", p.zc_root},
        {"guard", p.guard},
        {"delay_spread", p.delay_spread},
        {"num_preambles", p.num_preambles},
        {"permissible_shifts", p.permissible_shifts},
        {"num_antennas", p.num_antennas},
        {"pu_over_sigma2", p.pu_over_sigma2},
        {"pt_over_sigma2", p.pt_over_sigma2},
        {"noise_power", p.noise_power},
        {"n_rs", p.n_rs},
        {"n_sc", p.n_sc},
        {"n_slot", p.n_slot},
        {"ofdm_symbols", p.ofdm_symbols},
        {"prach_bandwidth_mhz", p.prach_bandwidth_mhz},
        {"cell_radius_km", p.cell_radius_km},
        {"pdp", p.pdp},
        {"kappa", p.kappa},
        {"theta0", p.theta0()},
        {"target_pf", p.target_pf},
        {"max_repeats", p.max_repeats},
        {"pathloss_exponent", p.pathloss_exponent},
        {"pathloss_ref_km", p.pathloss_ref_km},
    };
}

}  // namespace massra
