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

#include "massra/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include <fftw3.h>

namespace massra {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cd* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

CorrelationBank correlate_direct(const RxUplink& rx, const RootSequence& root, int g)
{
    const int n = root.size();
    if (g < 0 || static_cast<int>(rx.samples.cols()) < n + g) {
        throw std::invalid_argument("correlate: received frame shorter than N_ZC + G");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CorrelationBank bank{CMatrix(rx.samples.rows(), static_cast<std::size_t>(n))};
    for (std::size_t m = 0; m < rx.samples.rows(); ++m) {
        const auto y = rx.samples.row(m);
        for (int t = 0; t < n; ++t) {
            cd acc{};
            for (int tp = 0; tp < n; ++tp) {
                acc += y[static_cast<std::size_t>(tp + g)] *
                       std::conj(root.samples[static_cast<std::size_t>(((tp - t) % n + n) % n)]);
            }
            bank.z(m, static_cast<std::size_t>(t)) = acc * scale;
        }
    }
    return bank;
}

struct Correlator::Impl {
    int n = 0;
    std::vector<cd> weight;  // conj(S[f]) / (N sqrt(N))
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

Correlator::Correlator(const RootSequence& root) : impl_(std::make_unique<Impl>())
{
    const int n = root.size();
    impl_->n = n;
    std::vector<cd> buf(root.samples), spec(static_cast<std::size_t>(n));
    std::lock_guard lock(planner_mutex());
    impl_->forward = fftw_plan_dft_1d(n, as_fftw(buf.data()), as_fftw(spec.data()), FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    impl_->backward = fftw_plan_dft_1d(n, as_fftw(spec.data()), as_fftw(buf.data()), FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (impl_->forward == nullptr || impl_->backward == nullptr) {
        throw std::runtime_error("Correlator: FFT planning failed");
    }
    fftw_execute_dft(impl_->forward, as_fftw(buf.data()), as_fftw(spec.data()));
    const double scale = 1.0 / (n * std::sqrt(static_cast<double>(n)));
    impl_->weight.resize(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) {
        impl_->weight[static_cast<std::size_t>(f)] = std::conj(spec[static_cast<std::size_t>(f)]) * scale;
    }
}

Correlator::~Correlator()
{
    if (impl_) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(impl_->forward);
        fftw_destroy_plan(impl_->backward);
    }
}

Correlator::Correlator(Correlator&&) noexcept = default;
Correlator& Correlator::operator=(Correlator&&) noexcept = default;

int Correlator::size() const noexcept { return impl_->n; }

CorrelationBank Correlator::correlate(const RxUplink& rx, int g) const
{
    const int n = impl_->n;
    if (g < 0 || static_cast<int>(rx.samples.cols()) < n + g) {
        throw std::invalid_argument("correlate: received frame shorter than N_ZC + G");
    }
    CorrelationBank bank{CMatrix(rx.samples.rows(), static_cast<std::size_t>(n))};
    std::vector<cd> in(static_cast<std::size_t>(n)), spec(static_cast<std::size_t>(n));
    for (std::size_t m = 0; m < rx.samples.rows(); ++m) {
        const auto y = rx.samples.row(m);
        std::copy_n(y.begin() + g, n, in.begin());
        fftw_execute_dft(impl_->forward, as_fftw(in.data()), as_fftw(spec.data()));
        for (int f = 0; f < n; ++f) {
            spec[static_cast<std::size_t>(f)] *= impl_->weight[static_cast<std::size_t>(f)];
        }
        auto out = bank.z.row(m);
        fftw_execute_dft(impl_->backward, as_fftw(spec.data()), as_fftw(out.data()));
    }
    return bank;
}

CorrelationBank correlate(const RxUplink& rx, const RootSequence& root, int guard)
{
    return Correlator(root).correlate(rx, guard);
}

CorrelationProfile profile_from_window(const CMatrix& window, int k, double theta0, double sigma2)
{
    const std::size_t m = window.rows();
    const std::size_t g = window.cols();
    CorrelationProfile prof;
    prof.preamble_idx = k;
    prof.theta0 = theta0;
    prof.v.assign(g, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        const auto row = window.row(a);
        for (std::size_t t = 0; t < g; ++t) {
            prof.v[t] += std::norm(row[t]);
        }
    }
    prof.p.resize(g);
    for (std::size_t t = 0; t < g; ++t) {
        prof.v[t] = prof.v[t] / static_cast<double>(m) - sigma2;
        prof.p[t] = prof.v[t] > theta0 ? prof.v[t] : 0.0;
    }
    return prof;
}

CorrelationProfile profile(const CorrelationBank& bank, const SystemParams& params, int k, double theta0)
{
    const auto g = static_cast<std::size_t>(params.guard);
    const auto xi = static_cast<std::size_t>(params.shift(k));
    if (xi + g > bank.z.cols()) {
        throw std::invalid_argument("profile: window exceeds correlation length");
    }
    CMatrix window(bank.z.rows(), g);
    for (std::size_t a = 0; a < bank.z.rows(); ++a) {
        std::copy_n(bank.z.row(a).begin() + static_cast<std::ptrdiff_t>(xi), g, window.row(a).begin());
    }
    return profile_from_window(window, k, theta0, params.noise_power);
}

std::vector<DetectedGroup> group(const CorrelationProfile& profile, int delay_spread)
{
    const auto& p = profile.p;
    const int g_len = static_cast<int>(p.size());
    const int last = g_len - delay_spread;
    std::vector<DetectedGroup> groups;
    int t = 0;
    while (t <= last) {
        if (p[static_cast<std::size_t>(t)] == 0.0) {
            t = t + 1;
        } else {
            groups.push_back({profile.preamble_idx, t});
            t = t + delay_spread;
            while (t <= last && p[static_cast<std::size_t>(t)] > 0.0) {
                t = t + 1;
            }
        }
    }
    return groups;
}

ThresholdMode parse_threshold_mode(const std::string& name)
{
    if (name == "bound") return ThresholdMode::bound;
    if (name == "gaussian") return ThresholdMode::gaussian;
    if (name == "empirical") return ThresholdMode::empirical;
    throw std::invalid_argument("unknown threshold mode '" + name + "'");
}

double bound_kappa(double target_pf, int guard)
{
    if (!(target_pf > 0.0 && target_pf < 1.0)) {
        throw std::invalid_argument("bound_kappa: target_pf must be in (0, 1)");
    }
    const double tail = -std::expm1(std::log1p(-target_pf) / guard);
    return 1.0 / std::sqrt(tail);
}

double calibrate_threshold(const SystemParams& params, double target_pf, ThresholdMode mode, Rng& rng, int trials)
{
    if (!(target_pf > 0.0 && target_pf <= 1.0)) {
        throw std::invalid_argument("calibrate_threshold: target_pf must be in (0, 1]");
    }
    if (target_pf >= 1.0) {
        return 0.0;
    }
    const double scale = params.noise_power / std::sqrt(static_cast<double>(params.num_antennas));
    switch (mode) {
    case ThresholdMode::bound:
        return bound_kappa(target_pf, params.guard) * scale;
    case ThresholdMode::gaussian:
        return gaussian_kappa(target_pf, params.guard) * scale;
    case ThresholdMode::empirical:
        break;
    }

    const auto allowed = static_cast<long long>(std::floor(target_pf * trials));
    if (allowed < 1) {
        throw std::domain_error("calibrate_threshold: " + std::to_string(trials) +
                                " trials cannot resolve target_pf " + std::to_string(target_pf) +
                                " (achievable resolution " + std::to_string(1.0 / trials) + ")");
    }
    std::vector<double> peaks(static_cast<std::size_t>(trials));
    const std::vector<UserRealization> none;
    for (int i = 0; i < trials; ++i) {
        const CMatrix w = synthesize_window(none, 1, params, rng);
        const auto prof = profile_from_window(w, 1, std::numeric_limits<double>::infinity(), params.noise_power);
        peaks[static_cast<std::size_t>(i)] = *std::max_element(prof.v.begin(), prof.v.end());
    }
    // With theta0 at the (allowed+1)-th largest peak exactly `allowed` windows
    // exceed it strictly; any smaller value admits one more.
    std::sort(peaks.begin(), peaks.end(), std::greater<>());
    return peaks[static_cast<std::size_t>(allowed)];
}

PfPd measure_pf_pd(const SystemParams& params, int trials, std::uint64_t seed)
{
    if (trials < 1) {
        throw std::invalid_argument("measure_pf_pd: trials must be positive");
    }
    const double theta0 = params.theta0();
    long long false_alarms = 0, detections = 0, exact = 0;
    const std::vector<UserRealization> none;
    for (int i = 0; i < trials; ++i) {
        Rng rng(seed, {static_cast<std::uint64_t>(i)});
        const auto idle = profile_from_window(synthesize_window(none, 1, params, rng), 1, theta0, params.noise_power);
        if (std::any_of(idle.p.begin(), idle.p.end(), [](double x) { return x > 0.0; })) {
            ++false_alarms;
        }
        UserRealization ue = draw_user(params, rng);
        ue.preamble_idx = 1;
        const std::vector<UserRealization> one{ue};
        const auto prof = profile_from_window(synthesize_window(one, 1, params, rng), 1, theta0, params.noise_power);
        const auto groups = group(prof, params.delay_spread);
        if (!groups.empty()) {
            ++detections;
            if (groups.front().ta_hat == ue.tau) {
                ++exact;
            }
        }
    }
    const double n = trials;
    return {false_alarms / n, detections / n, exact / n, trials};
}

}  // namespace massra
