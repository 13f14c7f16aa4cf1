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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "massra/analytic.hpp"
#include "massra/beamformer.hpp"
#include "massra/channel.hpp"
#include "massra/detector.hpp"
#include "massra/preamble.hpp"
#include "massra/rarlink.hpp"
#include "massra/sysparams.hpp"

namespace massra {

/// How the correlation bank of a slot is produced.
enum class Route {
    correlation,  // drawn directly in the correlation domain (fast, same distribution)
    waveform,     // frame synthesis at every antenna followed by FFT correlation
};

Route parse_route(const std::string& name);

struct SimOptions {
    Route route = Route::correlation;
    // Each preamble's N_SC subcarriers get the full P_T budget; total_groups
    // divides it further by the slot's group count K_t.
    PowerSplit split = PowerSplit::per_preamble;
    bool empirical_upsilon = false;
    int workers = 1;
};

/// Read-only per-campaign state shared by every slot.
struct SlotContext {
    explicit SlotContext(const SystemParams& params);

    RootSequence root;
    Correlator correlator;
    std::vector<std::vector<int>> subcarriers;  // per preamble: copy-1 bits then copy-2 bits
};

struct UeOutcome {
    int preamble_idx = 1;
    int tau = 0;
    std::optional<int> matched_ta;  // last group on the preamble with ta_hat <= tau
    int ta_error = 0;               // matched_ta - tau when matched
    DecodeStatus status = DecodeStatus::no_rar;
    std::optional<RarPayload> payload;
    bool success() const noexcept { return status == DecodeStatus::success; }
};

struct SlotOutcome {
    std::vector<UeOutcome> ues;            // same order as the input users
    std::vector<DetectedGroup> groups;     // all preambles, increasing k then ta_hat
    std::vector<std::size_t> granted;      // indices of UEs that decoded a RAR
    int k_t = 0;
    int idle_preambles = 0;
    int idle_with_groups = 0;
    int active_preambles = 0;
    int active_detected = 0;
};

/// One RA slot: uplink, detection and grouping on every preamble, group CIR
/// estimation, RAR precoding and per-UE reception and decoding.
SlotOutcome simulate_slot(const SystemParams& params, std::span<const UserRealization> users, Rng& rng,
                          const SimOptions& options, const SlotContext& context);

SlotOutcome simulate_slot(const SystemParams& params, std::span<const UserRealization> users, Rng& rng,
                          const SimOptions& options = {});

struct CampaignConfig {
    double mean_requests = 11.0;  // new RA requests per frame
    int frames = 2000;            // measured frames, split evenly over replicas
    int replicas = 16;            // independent chains; fixed so results do not depend on workers
    int warmup = 10;              // frames before measurement in every replica
    std::uint64_t seed = 1;
};

struct CampaignMetrics {
    double avg_repeats = 0.0;
    double fail_prob = 0.0;
    double pf = 0.0;
    double pd = 0.0;
    double ci_avg_repeats = 0.0;  // 95% half-widths, batch means over replicas
    double ci_fail_prob = 0.0;
    double success_per_attempt = 0.0;
    long long resolved = 0;
    long long failures = 0;
    long long attempts = 0;
    std::map<int, long long> ta_error_histogram;
};

/// Test hook: when set, replaces the decode outcome of every attempt.
using AttemptOverride = std::function<bool(const UeOutcome&)>;

/// Slot-by-slot RA campaign. Each frame brings Poisson(mean_requests) new
/// UEs; UEs that fail retry next frame with a fresh preamble and fading
/// draw (same distance). A UE failing after max_repeats repeats is an RA
/// failure and counts max_repeats repeats. Only UEs arriving in the
/// measured frames are counted; extra frames drain them.
CampaignMetrics run_campaign(const SystemParams& params, const CampaignConfig& config, const SimOptions& options = {},
                             const AttemptOverride& override_attempt = {});

/// Probability that the first detected group misses tau (or nothing is
/// detected) for one UE alone on its preamble. Trial i uses stream (seed, i),
/// so probes at different powers share channel and noise draws.
double measure_pe(const SystemParams& params, double theta0, int trials, std::uint64_t seed, int workers = 1);

struct MinPowerConfig {
    double target_pe = 1e-2;
    double target_pf = 1e-3;
    ThresholdMode mode = ThresholdMode::empirical;
    int trials = 10000;
    int calibration_trials = 50000;
    double lo_db = -40.0;
    double hi_db = 0.0;
    double resolution_db = 0.1;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct MinPowerResult {
    std::optional<double> pu_db;  // empty when the search range cannot bracket the target
    double theta0 = 0.0;
    double pe = 0.0;              // measured at pu_db
    std::string message;
};

/// Bisection in dB for the smallest p_u / sigma^2 with measured P_e <= target.
MinPowerResult find_min_power(const SystemParams& params, const MinPowerConfig& config);

struct WorstCaseSinrResult {
    double mean_sinr = 0.0;       // sum |DS|^2 / sum |EN|^2 over draws, subcarriers and UEs
    double closed_form = 0.0;
    std::vector<double> samples;  // conditional SINR of UE 1 on the first RAR subcarrier, one per draw
    double sample_mean = 0.0;
    double sample_std = 0.0;
};

/// K_g users with identical delay in a single group, perfect TA, D_k = 1.
WorstCaseSinrResult worst_case_sinr_experiment(const SystemParams& params, int k_g, int num_draws, std::uint64_t seed,
                                               int workers = 1);

/// Power scaling against the antenna count: p(M) = p_ref (M_ref / M)^exponent.
enum class PowerLaw { constant, inv_sqrt, inv };

PowerLaw parse_power_law(const std::string& name);
const char* to_string(PowerLaw law);
double scale_power(double p_ref, int m_ref, int m, PowerLaw law);

struct SweepConfig {
    std::vector<int> antennas{20, 80};
    std::vector<double> loads{11.0};
    PowerLaw pu_law = PowerLaw::constant;
    PowerLaw pt_law = PowerLaw::constant;
    int reference_antennas = 20;  // M at which the configured powers apply
};

struct SweepPoint {
    int m = 0;
    double load = 0.0;
    double pu_db = 0.0;
    double pt_db = 0.0;
    CampaignMetrics metrics;
};

std::vector<SweepPoint> sweep(const SystemParams& params, const SweepConfig& sweep_config,
                              const CampaignConfig& campaign, const SimOptions& options = {});

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Uniform CSV result row.
struct ResultRow {
    int m = 0;
    double load = 0.0;
    double pu_db = 0.0;
    double pt_db = 0.0;
    double avg_repeats = 0.0;
    double fail_prob = 0.0;
    double pf = 0.0;
    double pd = 0.0;
    double ci_halfwidth = 0.0;
};

ResultRow to_row(const SweepPoint& point);
void write_csv(std::ostream& out, std::span<const ResultRow> rows);
nlohmann::json metrics_json(const CampaignMetrics& metrics);

}  // namespace massra
