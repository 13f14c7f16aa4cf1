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
#include <memory>
#include <string>
#include <vector>

#include "massra/channel.hpp"
#include "massra/matrix.hpp"
#include "massra/preamble.hpp"
#include "massra/rng.hpp"
#include "massra/sysparams.hpp"

namespace massra {

/// z_m[t] for every antenna m and lag t in [0, N_ZC).
struct CorrelationBank {
    CMatrix z;
};

/// Spatially averaged profile V_k[t] and its thresholded version P_k[t],
/// t in [0, G).
struct CorrelationProfile {
    int preamble_idx = 1;
    std::vector<double> v;
    std::vector<double> p;
    double theta0 = 0.0;
};

struct DetectedGroup {
    int preamble_idx = 1;
    int ta_hat = 0;
    friend bool operator==(const DetectedGroup&, const DetectedGroup&) = default;
};

/// Reference correlator: evaluates the circular sum directly, O(M N_ZC^2).
CorrelationBank correlate_direct(const RxUplink& rx, const RootSequence& root, int guard);

/// FFT correlator. Holds the conjugate root spectrum; correlate() is const
/// and safe to call from several threads at once.
class Correlator {
public:
    explicit Correlator(const RootSequence& root);
    ~Correlator();
    Correlator(Correlator&&) noexcept;
    Correlator& operator=(Correlator&&) noexcept;

    CorrelationBank correlate(const RxUplink& rx, int guard) const;
    int size() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Drops the first `guard` received samples and correlates the next N_ZC against
/// the root: z_m[t] = N_ZC^-1/2 sum_t' r_m[t'] conj(s[(t' - t) mod N_ZC]).
CorrelationBank correlate(const RxUplink& rx, const RootSequence& root, int guard);

/// Profile of preamble k read from a full bank at offset xi_k.
CorrelationProfile profile(const CorrelationBank& bank, const SystemParams& params, int k, double theta0);

/// Profile computed from an M x G window already aligned to xi_k.
CorrelationProfile profile_from_window(const CMatrix& window, int k, double theta0, double sigma2);

/// UE grouping for one preamble. Follows the scan of the reference
/// pseudocode: outer loop while t <= G - L, skip L after each group start,
/// then run to the first zero sample (bounded by t <= G - L).
std::vector<DetectedGroup> group(const CorrelationProfile& profile, int delay_spread);

enum class ThresholdMode { bound, gaussian, empirical };

ThresholdMode parse_threshold_mode(const std::string& name);

/// Threshold theta0 for a target false-alarm probability per idle preamble.
/// Empirical mode runs `trials` noise-only windows and returns the smallest
/// theta0 whose measured false-alarm rate does not exceed target_pf; it
/// throws std::domain_error when target_pf * trials < 1.
double calibrate_threshold(const SystemParams& params, double target_pf, ThresholdMode mode, Rng& rng,
                           int trials = 20000);

/// kappa for bound mode: solves 1 - (1 - 1/kappa^2)^G = target_pf.
double bound_kappa(double target_pf, int guard);

struct PfPd {
    double pf = 0.0;        // noise-only windows with any P_k[t] > 0
    double pd = 0.0;        // single-user windows with at least one group
    double pd_exact = 0.0;  // single-user windows whose first group has ta_hat == tau
    int trials = 0;
};

/// False-alarm and detection rates at params.theta0(). Trials are
/// independent windows drawn in the correlation domain; trial i uses the
/// random stream (seed, i).
PfPd measure_pf_pd(const SystemParams& params, int trials, std::uint64_t seed);

}  // namespace massra
